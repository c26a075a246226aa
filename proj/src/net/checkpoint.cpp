#include "apo/net/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include "apo/common/errors.hpp"

namespace apo::net {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  if (!in) throw IoError("checkpoint: truncated file");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw IoError("checkpoint: truncated file");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("checkpoint: cannot open " + tmp);
    out.write("APO1", 4);
    put_u32(out, 1);
    put_u32(out, ckpt.spec.family == DistFamily::Categorical ? 0u : 1u);
    put_u32(out, static_cast<std::uint32_t>(ckpt.spec.mlp.input_dim));
    put_u32(out, static_cast<std::uint32_t>(ckpt.spec.action_dim));
    put_u32(out, static_cast<std::uint32_t>(ckpt.spec.mlp.hidden.size()));
    for (int h : ckpt.spec.mlp.hidden) put_u32(out, static_cast<std::uint32_t>(h));
    put_u64(out, static_cast<std::uint64_t>(ckpt.params.size()));
    for (Eigen::Index i = 0; i < ckpt.params.size(); ++i)
      put_f64(out, ckpt.params[i]);
    if (!out) throw IoError("checkpoint: write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("checkpoint: cannot rename onto " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "APO1", 4) != 0)
    throw IoError("checkpoint: bad magic in " + path);
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw IoError("checkpoint: unsupported version");
  const std::uint32_t family = get_u32(in);
  const int input_dim = static_cast<int>(get_u32(in));
  const int action_dim = static_cast<int>(get_u32(in));
  const int n_hidden = static_cast<int>(get_u32(in));
  std::vector<int> hidden(n_hidden);
  for (int& h : hidden) h = static_cast<int>(get_u32(in));

  Checkpoint ckpt;
  ckpt.spec = family == 0 ? PolicySpec::categorical(input_dim, action_dim, hidden)
                          : PolicySpec::gaussian(input_dim, action_dim, hidden);
  const std::uint64_t count = get_u64(in);
  if (count != static_cast<std::uint64_t>(ckpt.spec.mlp.param_count()))
    throw IoError("checkpoint: parameter count does not match descriptor");
  ckpt.params.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i)
    ckpt.params[static_cast<Eigen::Index>(i)] = get_f64(in);
  return ckpt;
}

}  // namespace apo::net
