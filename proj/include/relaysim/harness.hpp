#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relaysim/scheduler.hpp"

// Monte Carlo engine: per-trial simulation, cell experiments, per-n
// optimization over the relay count, and n-sweeps with analytic reference
// curves. Deterministic for a fixed master seed at any worker count.

namespace relaysim {

struct SimConfig {
    int n = 100;
    int m = 3;
    double snr1_db = 10.0;  // hop-1 average SNR; rho = 10^(snr1_db/10)
    double snr2_db = 10.0;  // hop-2 average SNR; rho_r = 10^(snr2_db/10)
    double beta = 1.0;
    int trials = 2000;
    Phase1Mode mode = Phase1Mode::argmax;
    // Scheduling threshold; empty means log n - log log n (needs n >= 3).
    std::optional<double> s;
    std::uint64_t master_seed = 1;
    Hop1Counting hop1_counting = Hop1Counting::distinct_source;
};

// Throws std::invalid_argument on out-of-range fields, including threshold
// mode with a defaulted s at n < 3.
void validate_config(const SimConfig& config);

// The threshold the run uses: config.s, else log n - log log n.
double effective_threshold(const SimConfig& config);

struct TrialOutcome {
    SlotOutcome hop1;
    SlotOutcome hop2;
    // Largest per-destination count of relays clearing beta (> 1 only
    // possible when beta < 1).
    int max_feedback_candidates = 0;
    // Smallest measured SINR among scheduled hop-2 links; +inf when none.
    double min_scheduled_sinr = 0.0;
    // Smallest (realized - measured) SINR gap over scheduled hop-2 links;
    // +inf when none. Nonnegative up to rounding.
    double min_realized_margin = 0.0;
};

// One slot pair on independent channel draws. Trial t consumes streams
// (master_seed, 2t) for the channel and (master_seed, 2t+1) for the hop-2
// tie-break, so outcomes do not depend on execution order.
TrialOutcome run_trial(const SimConfig& config, std::uint64_t trial_index);

struct ExperimentRecord {
    // Config echo.
    int n = 0;
    int m = 0;
    double snr1_db = 0.0;
    double snr2_db = 0.0;
    double beta = 1.0;
    int trials = 0;
    Phase1Mode mode = Phase1Mode::argmax;
    Hop1Counting hop1_counting = Hop1Counting::distinct_source;
    std::uint64_t master_seed = 0;
    // Threshold used by the analytic hop-1 bound (and by threshold-mode
    // scheduling); NaN when n < 3 and no explicit s was given.
    double s_used = 0.0;

    // Monte Carlo estimates; stderr fields are sample standard deviation /
    // sqrt(trials), NaN when trials = 1.
    double r1_mean = 0.0;
    double r1_stderr = 0.0;
    double r2_mean = 0.0;
    double r2_stderr = 0.0;
    // End-to-end rate min(r1_mean, r2_mean)/2: hops alternate slots and the
    // relays buffer, so the long-run rate is set by the slower hop.
    double r_mean = 0.0;

    // Analytic references. Halved curves are per-hop counts divided by the
    // two-slot cost of a delivery. r1_lower_half is NaN when the bound does
    // not apply (m >= n or s_used undefined); coop_upper_half NaN when n < 3.
    double r1_lower_half = 0.0;
    double genie_upper_half = 0.0;
    double r2_closed = 0.0;
    double coop_upper_half = 0.0;

    // Mean index-feedback bits per slot, recounted from actual feedback.
    double fb_bits_hop1 = 0.0;
    double fb_bits_hop2 = 0.0;

    // Structural diagnostics aggregated over all trials.
    int max_feedback_candidates = 0;
    double min_scheduled_sinr = 0.0;
    double min_realized_margin = 0.0;
};

// Runs config.trials independent trials and aggregates. threads = 0 means
// hardware concurrency; the result is identical at any thread count because
// trials own disjoint streams and the reduction runs in trial order.
ExperimentRecord run_experiment(const SimConfig& config, unsigned threads = 1);

// 1..ceil(3 log n), the grid optimize_m scans by default.
std::vector<int> default_m_grid(int n);

struct OptimizeResult {
    int m_star = 0;
    ExperimentRecord best;
    std::vector<ExperimentRecord> cells;
};

// Maximizes r_mean over m_grid (default_m_grid(base.n) when empty); ties
// break toward smaller m. base.m is ignored.
OptimizeResult optimize_m(const SimConfig& base, std::vector<int> m_grid = {},
                          unsigned threads = 1);

// Per-n optimize_m, one record per n. Requires every n >= 3.
std::vector<ExperimentRecord> sweep_n(const SimConfig& base,
                                      const std::vector<int>& n_list,
                                      unsigned threads = 1);

// CSV emission. Numeric fields carry 10 significant digits.
std::string csv_header();
std::string to_csv_row(const ExperimentRecord& record);
void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records);
std::string to_json_string(const std::vector<ExperimentRecord>& records);

const char* to_string(Phase1Mode mode);
const char* to_string(Hop1Counting counting);

}  // namespace relaysim
