#include "apo/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace apo::rng {

namespace {

constexpr std::uint64_t kIncrement = 0x9E3779B97F4A7C15ull;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += kIncrement;
  return mix64(state_);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

std::uint64_t Rng::uniform_int(std::uint64_t n) { return next_u64() % n; }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed + kIncrement) + (stream + 1) * kIncrement);
}

int worker_count(int requested) {
  int cap = requested;
  if (const char* env = std::getenv("APO_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed >= 1) cap = std::min(cap, parsed);
  }
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw >= 1) cap = std::min(cap, hw);
  return std::max(cap, 1);
}

}  // namespace apo::rng
