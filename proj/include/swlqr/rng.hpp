#pragma once

#include <cstdint>
#include <random>

namespace swlqr {

using Rng = std::mt19937_64;

// Run i of an experiment with master seed s uses sub_seed(s, i) = s XOR i.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t run) { return master ^ run; }

// Independent streams from one seed; `stream` separates e.g. noise from policy draws.
Rng make_rng(std::uint64_t seed, std::uint32_t stream = 0);

// Uniform draw in the open interval (0, 1).
double uniform_open(Rng& rng);

}  // namespace swlqr
