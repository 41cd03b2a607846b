#include "relaysim/genie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "relaysim/channel.hpp"
#include "relaysim/scheduler.hpp"

namespace relaysim {

namespace {

// All assigned (source, relay) pairs clear beta when exactly the sources in
// candidate_set transmit. Uses sinr_phase1 so feasibility here and witness
// re-verification elsewhere are the same arithmetic.
bool all_pairs_feasible(const Matrix& gamma,
                        const std::vector<std::pair<int, int>>& assigned,
                        const std::vector<int>& candidate_set, double rho,
                        double beta) {
    for (const auto& [source, relay] : assigned) {
        if (sinr_phase1(gamma, candidate_set, source, relay, rho) < beta)
            return false;
    }
    return true;
}

struct BnbState {
    const Matrix& gamma;
    double rho;
    double beta;
    std::uint64_t budget;
    int n;
    int m;
    GenieResult best;
    std::vector<std::pair<int, int>> assigned;
    std::vector<int> sources;     // ascending by construction
    std::vector<char> relay_used;
    bool out_of_budget = false;

    void dfs(int next_source) {
        if (out_of_budget) return;
        const int assigned_count = static_cast<int>(assigned.size());
        // Even assigning every remaining source cannot beat the incumbent.
        const int headroom =
            std::min(n - next_source, m - assigned_count);
        if (assigned_count + headroom <= best.k_max) return;
        if (next_source == n) return;

        for (int r = 0; r < m; ++r) {
            if (relay_used[static_cast<std::size_t>(r)]) continue;
            if (best.nodes_explored >= budget) {
                out_of_budget = true;
                return;
            }
            ++best.nodes_explored;
            sources.push_back(next_source);
            assigned.emplace_back(next_source, r);
            // Interference only grows deeper in the tree, so a pair failing
            // now can never recover: prune.
            if (all_pairs_feasible(gamma, assigned, sources, rho, beta)) {
                if (assigned_count + 1 > best.k_max) {
                    best.k_max = assigned_count + 1;
                    best.witness = assigned;
                }
                relay_used[static_cast<std::size_t>(r)] = 1;
                dfs(next_source + 1);
                relay_used[static_cast<std::size_t>(r)] = 0;
            }
            assigned.pop_back();
            sources.pop_back();
            if (out_of_budget) return;
        }
        dfs(next_source + 1);  // leave this source out
    }
};

}  // namespace

GenieResult max_concurrent_exhaustive(const Matrix& gamma, double rho, double beta) {
    if (gamma.empty()) throw std::invalid_argument("exhaustive search: empty gamma");
    const int n = static_cast<int>(gamma.rows());
    const int m = static_cast<int>(gamma.cols());
    if (n > kExhaustiveMaxSources || m > kExhaustiveMaxRelays)
        throw std::invalid_argument(
            "exhaustive search supports n <= " + std::to_string(kExhaustiveMaxSources) +
            " and m <= " + std::to_string(kExhaustiveMaxRelays) + "; got n=" +
            std::to_string(n) + ", m=" + std::to_string(m));
    if (!(rho > 0.0)) throw std::invalid_argument("exhaustive search: rho must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("exhaustive search: beta must be > 0");

    GenieResult result;
    std::vector<int> subset(static_cast<std::size_t>(std::min(n, m)));
    std::vector<int> relays;
    std::vector<char> relay_used(static_cast<std::size_t>(m), 0);
    std::vector<std::pair<int, int>> assignment;

    // Assignments for the fixed source subset, relay tuples in lexicographic
    // order; returns true on the first feasible one.
    auto try_assignments = [&](auto&& self, int k, int pos) -> bool {
        if (pos == k) {
            ++result.nodes_explored;
            assignment.clear();
            for (int idx = 0; idx < k; ++idx)
                assignment.emplace_back(subset[static_cast<std::size_t>(idx)],
                                        relays[static_cast<std::size_t>(idx)]);
            std::vector<int> sources(subset.begin(), subset.begin() + k);
            return all_pairs_feasible(gamma, assignment, sources, rho, beta);
        }
        for (int r = 0; r < m; ++r) {
            if (relay_used[static_cast<std::size_t>(r)]) continue;
            relay_used[static_cast<std::size_t>(r)] = 1;
            relays.push_back(r);
            if (self(self, k, pos + 1)) return true;
            relays.pop_back();
            relay_used[static_cast<std::size_t>(r)] = 0;
        }
        return false;
    };

    // Source subsets of size k in lexicographic order.
    auto try_subsets = [&](auto&& self, int k, int start, int pos) -> bool {
        if (pos == k) return try_assignments(try_assignments, k, 0);
        for (int i = start; i <= n - (k - pos); ++i) {
            subset[static_cast<std::size_t>(pos)] = i;
            if (self(self, k, i + 1, pos + 1)) return true;
        }
        return false;
    };

    // A feasible assignment stays feasible when sources are removed, so the
    // first k (from above) with a hit is the maximum; the first hit in lex
    // order is the canonical witness.
    for (int k = std::min(n, m); k >= 1; --k) {
        relays.clear();
        std::fill(relay_used.begin(), relay_used.end(), 0);
        if (try_subsets(try_subsets, k, 0, 0)) {
            result.k_max = k;
            result.witness = assignment;
            return result;
        }
    }
    return result;
}

GenieResult max_concurrent_bnb(const Matrix& gamma, double rho, double beta,
                               std::uint64_t node_budget) {
    if (gamma.empty()) throw std::invalid_argument("bnb search: empty gamma");
    if (!(rho > 0.0)) throw std::invalid_argument("bnb search: rho must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("bnb search: beta must be > 0");
    if (node_budget == 0) throw std::invalid_argument("bnb search: zero node budget");

    BnbState state{gamma,
                   rho,
                   beta,
                   node_budget,
                   static_cast<int>(gamma.rows()),
                   static_cast<int>(gamma.cols()),
                   {},
                   {},
                   {},
                   std::vector<char>(gamma.cols(), 0)};
    state.dfs(0);
    state.best.exact = !state.out_of_budget;
    return state.best;
}

GenieMcResult genie_throughput_mc(int n, int m, double rho, double beta,
                                  int trials, const RngSpec& rng) {
    if (trials < 1) throw std::invalid_argument("genie_throughput_mc: trials must be >= 1");
    GenieMcResult result;
    result.trials = trials;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        const RngSpec trial_rng{rng.master_seed,
                                rng.stream_id + 2 * static_cast<std::uint64_t>(t)};
        const ChannelRealization real = draw_realization(n, m, trial_rng);
        const GenieResult genie = max_concurrent_bnb(real.gamma, rho, beta);
        if (!genie.exact) result.all_exact = false;
        sum += genie.k_max;
        sum_sq += static_cast<double>(genie.k_max) * genie.k_max;
    }
    result.mean = sum / trials;
    if (trials > 1) {
        const double var = std::max(0.0, (sum_sq - sum * sum / trials) / (trials - 1));
        result.stderr_mean = std::sqrt(var / trials);
    } else {
        result.stderr_mean = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace relaysim
