#pragma once

#include <cstdint>

namespace rosenbench {

// Deterministic seeded random stream.
//
// State is xoshiro256++, derived from (seed, stream_id) by xoring two
// splitmix64 chains, one keyed by the seed and one by the stream id. Distinct
// stream ids give statistically independent streams, so parallel chains,
// batches and grid cells can each own one without coordination.
//
// Normal variates use the Marsaglia polar method. The method is part of the
// reproducibility contract: given (seed, stream_id), the sequence of draws is
// the same on every run of the same build.
class RngStream {
public:
  static constexpr const char* kNormalMethod = "marsaglia-polar";

  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();

  // Uniform on the open interval (0, 1).
  double uniform();

  // Standard normal draw.
  double normal();

private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace rosenbench
