#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "relaysim/matrix.hpp"
#include "relaysim/rng.hpp"

// Omniscient-scheduler oracle: the maximum number of concurrent successful
// source->relay transmissions over all source subsets and injective
// source-to-relay assignments, at small problem sizes.

namespace relaysim {

inline constexpr int kExhaustiveMaxSources = 14;
inline constexpr int kExhaustiveMaxRelays = 5;
inline constexpr std::uint64_t kDefaultNodeBudget = 20'000'000;

struct GenieResult {
    int k_max = 0;
    // (source, relay) pairs achieving k_max concurrent successes, sources
    // ascending; empty when k_max = 0. Lexicographically smallest over
    // (source set, assignment) among maxima for the exhaustive search.
    std::vector<std::pair<int, int>> witness;
    // Candidate assignments examined.
    std::uint64_t nodes_explored = 0;
    // False when the node budget stopped a branch-and-bound run early; the
    // result is then only a lower bound with a valid witness.
    bool exact = true;
};

// Full enumeration, k = min(n, m) downward; a feasible assignment restricted
// to fewer sources stays feasible, so the first k with a hit is the maximum.
// Rejects gamma larger than 14 sources x 5 relays.
GenieResult max_concurrent_exhaustive(const Matrix& gamma, double rho, double beta);

// Depth-first search over partial injective assignments, pruned when an
// already-assigned pair fails under the current (smaller) interference or
// when the remaining depth cannot beat the incumbent. Same k_max as the
// exhaustive search; node_budget caps the work.
GenieResult max_concurrent_bnb(const Matrix& gamma, double rho, double beta,
                               std::uint64_t node_budget = kDefaultNodeBudget);

struct GenieMcResult {
    double mean = 0.0;
    double stderr_mean = 0.0;
    int trials = 0;
    // False when any trial hit the node budget.
    bool all_exact = true;
};

// Monte Carlo mean of k_max over fresh realizations. Trial t draws from
// stream rng.stream_id + 2t, the same stream the simulation harness uses for
// trial t's channel, so paired comparisons see identical realizations.
GenieMcResult genie_throughput_mc(int n, int m, double rho, double beta,
                                  int trials, const RngSpec& rng);

}  // namespace relaysim
