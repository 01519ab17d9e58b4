#pragma once

#include "generator.hpp"

#include <cstdint>

namespace steinlab {

// Occupation-time estimate of the stationary distribution from a single
// Gillespie trajectory of `steps` jumps started at state 0.  The first
// steps/10 jumps are discarded as burn-in.  Deterministic for a fixed seed.
ProbVec simulate_occupation(const Generator& gen, std::uint64_t steps, std::uint64_t seed);

}  // namespace steinlab
