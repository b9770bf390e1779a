#pragma once

#include <array>
#include <cstdint>

namespace curesem {

// Splittable 64-bit generator (xoshiro256** seeded through splitmix64).
// A stream is addressed by (seed, stream); equal pairs reproduce identical
// draw sequences, distinct pairs give statistically independent streams.
// All samplers are hand-rolled so sequences are stable across platforms and
// standard-library versions.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(uint64_t seed, uint64_t stream);

  uint64_t next_u64();
  double uniform();                      // strictly inside (0,1), 53-bit
  double exponential(double rate = 1.0);
  double normal();                       // inverse-CDF, one uniform per draw
  double gamma(double shape, double scale = 1.0);
  uint64_t poisson(double mean);

  // independent child stream; deterministic in (seed, stream, k)
  RngStream substream(uint64_t k) const;

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  std::array<uint64_t, 4> s_{};
  uint64_t seed_ = 0, stream_ = 0;
};

}  // namespace curesem
