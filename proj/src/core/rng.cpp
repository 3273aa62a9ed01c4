#include "swlqr/rng.hpp"

namespace swlqr {

Rng make_rng(std::uint64_t seed, std::uint32_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream,
                      0x5357u /* tag */};
    return Rng(seq);
}

double uniform_open(Rng& rng) {
    // 53 random bits mapped to the centres of 2^53 equal cells.
    const std::uint64_t bits = rng() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace swlqr
