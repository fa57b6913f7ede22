#pragma once

#include <cstdint>
#include <random>

namespace spectemp {

// All randomness in the library comes from std::mt19937_64 engines seeded
// through SplitMix64. A (master seed, stream id) pair names one stream, so
// parallel consumers (one stream per trial or per signal column) draw the
// same numbers regardless of scheduling.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream);

Rng make_stream(std::uint64_t master, std::uint64_t stream = 0);

}  // namespace spectemp
