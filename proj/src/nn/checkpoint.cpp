#include "riskmine/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "riskmine/error.hpp"

namespace riskmine::nn {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");

constexpr char kMagic[6] = {'R', 'M', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::ostream& out, std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); }
void put_str(std::ostream& out, const std::string& s) {
  put_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), 8);
  if (!in) throw FormatError("truncated checkpoint");
  return v;
}
std::string get_str(std::istream& in) {
  const std::uint64_t n = get_u64(in);
  if (n > (1u << 30)) throw FormatError("corrupt checkpoint string length");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw FormatError("truncated checkpoint");
  return s;
}

}  // namespace

void save_checkpoint(const ParameterStore& store, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  put_str(out, meta.fingerprint);
  put_str(out, meta.rng_state);
  const auto params = store.all();
  put_u64(out, params.size());
  for (const Parameter* p : params) {
    put_str(out, p->name);
    put_u64(out, static_cast<std::uint64_t>(p->group));
    put_u64(out, p->shape.rows);
    put_u64(out, p->shape.cols);
    out.write(reinterpret_cast<const char*>(p->value.data()),
              static_cast<std::streamsize>(p->value.size() * sizeof(double)));
  }
  if (!out) throw FormatError("failed writing " + path.string());
}

CheckpointMeta load_checkpoint(ParameterStore& store, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw FormatError(path.string() + " is not a checkpoint");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kVersion) throw FormatError("unsupported checkpoint version");
  CheckpointMeta meta;
  meta.fingerprint = get_str(in);
  meta.rng_state = get_str(in);
  const std::uint64_t count = get_u64(in);
  if (count != store.count()) {
    throw ShapeError("checkpoint holds " + std::to_string(count) + " parameters, model has " +
                     std::to_string(store.count()));
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = get_str(in);
    Parameter& p = store.get(name);
    const auto group = get_u64(in);
    const Shape shape{get_u64(in), get_u64(in)};
    if (!(shape == p.shape) || group != static_cast<std::uint64_t>(p.group)) {
      throw ShapeError("parameter '" + name + "' differs in shape or group");
    }
    in.read(reinterpret_cast<char*>(p.value.data()),
            static_cast<std::streamsize>(p.value.size() * sizeof(double)));
    if (!in) throw FormatError("truncated checkpoint");
  }
  return meta;
}

}  // namespace riskmine::nn
