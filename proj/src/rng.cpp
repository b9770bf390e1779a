#include "curesem/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "curesem/distributions.hpp"

namespace curesem {

namespace {

constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

uint64_t splitmix(uint64_t& x) {
  x += kGolden;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
  uint64_t x = seed ^ rotl(stream * kGolden, 31);
  x ^= stream * 0xD1342543DE82EF95ULL;
  for (auto& w : s_) w = splitmix(x);
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
  next_u64();
  next_u64();
}

uint64_t RngStream::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
  if (!(rate > 0)) throw std::domain_error("exponential: rate must be positive");
  return -std::log(uniform()) / rate;
}

double RngStream::normal() { return normal_quantile(uniform()); }

double RngStream::gamma(double shape, double scale) {
  if (!(shape > 0) || !(scale > 0))
    throw std::domain_error("gamma: shape and scale must be positive");
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    const double u = uniform();
    return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

uint64_t RngStream::poisson(double mean) {
  if (!(mean >= 0)) throw std::domain_error("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // multiplication method
    const double l = std::exp(-mean);
    uint64_t k = 0;
    double prod = uniform();
    while (prod > l) {
      prod *= uniform();
      ++k;
    }
    return k;
  }
  // transformed rejection with squeeze (Hormann's PTRS)
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<uint64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        kf * loglam - mean - log_gamma(kf + 1.0))
      return static_cast<uint64_t>(kf);
  }
}

RngStream RngStream::substream(uint64_t k) const {
  uint64_t x = stream_ ^ rotl(k * kGolden, 33);
  const uint64_t id = splitmix(x) ^ (k + 1);
  return RngStream(seed_, id);
}

}  // namespace curesem
