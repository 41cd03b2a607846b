#include "relaysim/rng.hpp"

#include <cmath>

namespace relaysim {

namespace {

// splitmix64 step; the usual seed expander.
std::uint64_t mix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 make_stream(const RngSpec& spec) {
    // Hash master and stream through two mixing rounds so that nearby ids
    // land far apart, then seed the engine with the digest. mt19937_64
    // seeding from one 64-bit value is fully specified, hence portable.
    std::uint64_t state = spec.master_seed;
    std::uint64_t digest = mix64(state);
    state ^= spec.stream_id + 0x9E3779B97F4A7C15ull;
    digest ^= mix64(state);
    return std::mt19937_64(digest);
}

double uniform_open(std::mt19937_64& gen) {
    // Odd 53-bit numerator over 2^53: values in (0,1), never 0 or 1.
    return static_cast<double>(((gen() >> 12) << 1) | 1u) * 0x1.0p-53;
}

double exp1(std::mt19937_64& gen) {
    // Inverse transform of the unit exponential; argument stays inside
    // (0,1), so the result is finite and strictly positive.
    return -std::log1p(-uniform_open(gen));
}

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
    // Multiply-shift with rejection (Lemire); unbiased for any bound >= 1.
    unsigned __int128 prod = static_cast<unsigned __int128>(gen()) * bound;
    auto lo = static_cast<std::uint64_t>(prod);
    if (lo < bound) {
        std::uint64_t cutoff = -bound % bound;
        while (lo < cutoff) {
            prod = static_cast<unsigned __int128>(gen()) * bound;
            lo = static_cast<std::uint64_t>(prod);
        }
    }
    return static_cast<std::uint64_t>(prod >> 64);
}

}  // namespace relaysim
