#include "circlestab/random.hpp"

#include "circlestab/error.hpp"

namespace circlestab {

KeyedRng::KeyedRng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x63697263u /* "circ" */};
  engine_.seed(seq);
}

std::size_t KeyedRng::below(std::size_t n) {
  require(n > 0, ErrorCode::InvalidArgument, "below(0)");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

}  // namespace circlestab
