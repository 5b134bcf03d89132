#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace pairglm {

// Seeded, counter-based random stream. A stream is fully identified by
// (seed, name, a, b); the same identifiers reproduce the same sequence on
// every platform, so parallel consumers each own an independent stream
// instead of sharing one generator. State mixing is splitmix64, draws come
// from xoshiro256++.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::string_view name = "", std::uint64_t a = 0,
                     std::uint64_t b = 0);

  std::uint64_t next_u64();

  // uniform on [0, 1)
  double uniform();

  // standard normal via Box-Muller
  double normal();

  // uniform integer on [lo, hi], both inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // first k entries of a Fisher-Yates shuffle of {0, ..., n-1}
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

 private:
  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pairglm
