#pragma once

#include <cstdint>
#include <random>

namespace relaysim {

// Names one reproducible random stream. Equal specs replay the identical
// sequence on every platform; distinct stream ids give decorrelated streams
// under the same master seed, which is what lets trials run in parallel
// without sharing generator state.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

// Engine for the stream named by spec.
std::mt19937_64 make_stream(const RngSpec& spec);

// Uniform on the open interval (0,1); never returns 0 or 1.
double uniform_open(std::mt19937_64& gen);

// Unit-mean exponential by inverse transform. Strictly positive.
double exp1(std::mt19937_64& gen);

// Uniform integer in [0, bound), bound >= 1, without modulo bias.
std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound);

}  // namespace relaysim
