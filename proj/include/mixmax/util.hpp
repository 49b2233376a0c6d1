#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mixmax {

// Neumaier-compensated accumulator. Cube integrals are required to be exact
// up to one rounding per term, so plain summation is not enough.
struct CompensatedSum {
  double s = 0.0;
  double c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

inline std::vector<double> log_space(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1)
    throw std::invalid_argument("log_space: need 0 < lo <= hi, count >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double la = std::log(lo), lb = std::log(hi);
  for (int i = 0; i < count; ++i)
    out.push_back(std::exp(la + (lb - la) * static_cast<double>(i) / (count - 1)));
  return out;
}

// Deterministic, platform-independent RNG. std:: distributions are
// implementation-defined, and reports must be byte-reproducible.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    SplitMix64 r(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)));
    return r.next();
  }

 private:
  std::uint64_t state_;
};

inline long long floor_div(long long a, long long b) {
  long long q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}

inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

}  // namespace mixmax
