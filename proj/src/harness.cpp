#include "relaysim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "relaysim/analytics.hpp"
#include "relaysim/channel.hpp"

namespace relaysim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-trial reduction payload; plain numbers so workers can fill disjoint
// slots and the reduction can run in trial order afterwards.
struct TrialStats {
    long long r1_bits = 0;
    long long r2_bits = 0;
    long long fb1 = 0;
    long long fb2 = 0;
    int max_candidates = 0;
    double min_sinr = kInf;
    double min_margin = kInf;
};

TrialStats collect_stats(const TrialOutcome& outcome) {
    TrialStats stats;
    stats.r1_bits = outcome.hop1.bits_delivered;
    stats.r2_bits = outcome.hop2.bits_delivered;
    stats.fb1 = outcome.hop1.feedback_count;
    stats.fb2 = outcome.hop2.feedback_count;
    stats.max_candidates = outcome.max_feedback_candidates;
    stats.min_sinr = outcome.min_scheduled_sinr;
    stats.min_margin = outcome.min_realized_margin;
    return stats;
}

unsigned resolve_threads(unsigned threads, int trials) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    return std::min<unsigned>(threads, static_cast<unsigned>(trials));
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", value);
    return buf;
}

}  // namespace

void validate_config(const SimConfig& config) {
    if (config.n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (config.m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (!(config.beta > 0.0)) throw std::invalid_argument("config: beta must be > 0");
    if (config.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (config.s && !(*config.s >= 0.0))
        throw std::invalid_argument("config: s must be >= 0");
    if (config.mode == Phase1Mode::threshold && !config.s && config.n < 3)
        throw std::invalid_argument(
            "config: threshold mode with defaulted s needs n >= 3");
    if (std::isnan(config.snr1_db) || std::isnan(config.snr2_db))
        throw std::invalid_argument("config: SNR must not be NaN");
}

double effective_threshold(const SimConfig& config) {
    if (config.s) return *config.s;
    return analytics::default_threshold(config.n);
}

TrialOutcome run_trial(const SimConfig& config, std::uint64_t trial_index) {
    validate_config(config);
    const double rho = analytics::db_to_linear(config.snr1_db);
    const double rho_r = analytics::db_to_linear(config.snr2_db);

    // Streams 2t and 2t+1 belong to trial t: channel and tie-break draws
    // never depend on other trials or on scheduling order.
    const RngSpec channel_rng{config.master_seed, 2 * trial_index};
    const RngSpec tiebreak_rng{config.master_seed, 2 * trial_index + 1};
    const ChannelRealization real = draw_realization(config.n, config.m, channel_rng);

    const double s_threshold =
        config.mode == Phase1Mode::threshold ? effective_threshold(config) : 0.0;
    const PhaseOneSchedule phase1 =
        schedule_phase1(real.gamma, config.mode, s_threshold);

    TrialOutcome outcome;
    outcome.hop1 = evaluate_phase1(phase1, real.gamma, rho, config.beta,
                                   config.hop1_counting);

    const PhaseTwoSchedule phase2 =
        schedule_phase2(real.xi, rho_r, config.beta, tiebreak_rng);
    outcome.hop2 = evaluate_phase2(phase2, real.xi, rho_r, config.beta);

    outcome.max_feedback_candidates = 0;
    for (int count : phase2.candidates_per_destination)
        outcome.max_feedback_candidates = std::max(outcome.max_feedback_candidates, count);
    outcome.min_scheduled_sinr = kInf;
    outcome.min_realized_margin = kInf;
    for (const auto& [link, realized] : outcome.hop2.sinr_values) {
        const double measured = sinr_phase2(real.xi, link.first, link.second, rho_r);
        outcome.min_scheduled_sinr = std::min(outcome.min_scheduled_sinr, measured);
        outcome.min_realized_margin =
            std::min(outcome.min_realized_margin, realized - measured);
    }
    return outcome;
}

ExperimentRecord run_experiment(const SimConfig& config, unsigned threads) {
    validate_config(config);
    const int trials = config.trials;
    std::vector<TrialStats> per_trial(static_cast<std::size_t>(trials));

    const unsigned workers = resolve_threads(threads, trials);
    if (workers <= 1) {
        for (int t = 0; t < trials; ++t)
            per_trial[static_cast<std::size_t>(t)] =
                collect_stats(run_trial(config, static_cast<std::uint64_t>(t)));
    } else {
        std::atomic<int> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&] {
            try {
                while (true) {
                    const int t = next.fetch_add(1, std::memory_order_relaxed);
                    if (t >= trials) return;
                    per_trial[static_cast<std::size_t>(t)] =
                        collect_stats(run_trial(config, static_cast<std::uint64_t>(t)));
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(trials, std::memory_order_relaxed);
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    // Deterministic reduction in trial order; bit counts are integers, so
    // the sums are exact and identical for any worker count.
    long long r1_sum = 0;
    long long r1_sum_sq = 0;
    long long r2_sum = 0;
    long long r2_sum_sq = 0;
    long long fb1_sum = 0;
    long long fb2_sum = 0;
    int max_candidates = 0;
    double min_sinr = kInf;
    double min_margin = kInf;
    for (const TrialStats& stats : per_trial) {
        r1_sum += stats.r1_bits;
        r1_sum_sq += stats.r1_bits * stats.r1_bits;
        r2_sum += stats.r2_bits;
        r2_sum_sq += stats.r2_bits * stats.r2_bits;
        fb1_sum += stats.fb1;
        fb2_sum += stats.fb2;
        max_candidates = std::max(max_candidates, stats.max_candidates);
        min_sinr = std::min(min_sinr, stats.min_sinr);
        min_margin = std::min(min_margin, stats.min_margin);
    }

    auto mean_of = [trials](long long sum) {
        return static_cast<double>(sum) / trials;
    };
    auto stderr_of = [trials](long long sum, long long sum_sq) {
        if (trials < 2) return kNan;
        const double num = static_cast<double>(sum_sq) -
                           static_cast<double>(sum) * sum / trials;
        const double var = std::max(0.0, num / (trials - 1));
        return std::sqrt(var / trials);
    };

    ExperimentRecord rec;
    rec.n = config.n;
    rec.m = config.m;
    rec.snr1_db = config.snr1_db;
    rec.snr2_db = config.snr2_db;
    rec.beta = config.beta;
    rec.trials = trials;
    rec.mode = config.mode;
    rec.hop1_counting = config.hop1_counting;
    rec.master_seed = config.master_seed;
    rec.s_used = config.s ? *config.s
                          : (config.n >= 3 ? analytics::default_threshold(config.n) : kNan);

    rec.r1_mean = mean_of(r1_sum);
    rec.r1_stderr = stderr_of(r1_sum, r1_sum_sq);
    rec.r2_mean = mean_of(r2_sum);
    rec.r2_stderr = stderr_of(r2_sum, r2_sum_sq);
    rec.r_mean = std::min(rec.r1_mean, rec.r2_mean) / 2.0;

    const double rho = analytics::db_to_linear(config.snr1_db);
    const double rho_r = analytics::db_to_linear(config.snr2_db);
    rec.r1_lower_half = (config.m < config.n && rec.s_used > 0.0)
                            ? analytics::r1_lower_bound(config.n, config.m, rho,
                                                        rec.s_used) / 2.0
                            : kNan;
    rec.genie_upper_half = config.n >= 2 ? analytics::genie_upper(config.n) / 2.0 : kNan;
    rec.r2_closed = analytics::r2_closed_form(config.n, config.m, rho_r);
    rec.coop_upper_half =
        config.n >= 3 ? analytics::coop_upper(config.n, config.m) / 2.0 : kNan;

    rec.fb_bits_hop1 = mean_of(fb1_sum) *
                       analytics::ceil_log2(static_cast<std::uint64_t>(config.n));
    rec.fb_bits_hop2 = mean_of(fb2_sum) *
                       analytics::ceil_log2(static_cast<std::uint64_t>(config.m));

    rec.max_feedback_candidates = max_candidates;
    rec.min_scheduled_sinr = min_sinr;
    rec.min_realized_margin = min_margin;
    return rec;
}

std::vector<int> default_m_grid(int n) {
    if (n < 1) throw std::invalid_argument("default_m_grid: n must be >= 1");
    const int top =
        n < 2 ? 1 : std::max(1, static_cast<int>(std::ceil(3.0 * std::log(n))));
    std::vector<int> grid;
    grid.reserve(static_cast<std::size_t>(top));
    for (int m = 1; m <= top; ++m) grid.push_back(m);
    return grid;
}

OptimizeResult optimize_m(const SimConfig& base, std::vector<int> m_grid,
                          unsigned threads) {
    if (m_grid.empty()) m_grid = default_m_grid(base.n);
    std::sort(m_grid.begin(), m_grid.end());
    m_grid.erase(std::unique(m_grid.begin(), m_grid.end()), m_grid.end());

    OptimizeResult result;
    bool have_best = false;
    for (int m : m_grid) {
        SimConfig cell = base;
        cell.m = m;
        ExperimentRecord rec = run_experiment(cell, threads);
        // Ascending grid plus strict improvement = ties go to the smaller m.
        if (!have_best || rec.r_mean > result.best.r_mean) {
            result.best = rec;
            result.m_star = m;
            have_best = true;
        }
        result.cells.push_back(std::move(rec));
    }
    return result;
}

std::vector<ExperimentRecord> sweep_n(const SimConfig& base,
                                      const std::vector<int>& n_list,
                                      unsigned threads) {
    if (n_list.empty()) throw std::invalid_argument("sweep_n: empty n list");
    std::vector<ExperimentRecord> records;
    records.reserve(n_list.size());
    for (int n : n_list) {
        if (n < 3) throw std::invalid_argument("sweep_n: every n must be >= 3");
        SimConfig cell = base;
        cell.n = n;
        records.push_back(optimize_m(cell, {}, threads).best);
    }
    return records;
}

std::string csv_header() {
    return "n,m_star,r1_mean,r1_stderr,r2_mean,r2_stderr,r_mean,r1_lower_half,"
           "genie_upper_half,r2_closed,coop_upper_half,fb_bits_hop1,fb_bits_hop2,"
           "trials,seed";
}

std::string to_csv_row(const ExperimentRecord& rec) {
    std::string row;
    row += std::to_string(rec.n);
    row += ',';
    row += std::to_string(rec.m);
    for (double value : {rec.r1_mean, rec.r1_stderr, rec.r2_mean, rec.r2_stderr,
                         rec.r_mean, rec.r1_lower_half, rec.genie_upper_half,
                         rec.r2_closed, rec.coop_upper_half, rec.fb_bits_hop1,
                         rec.fb_bits_hop2}) {
        row += ',';
        row += format_double(value);
    }
    row += ',';
    row += std::to_string(rec.trials);
    row += ',';
    row += std::to_string(rec.master_seed);
    return row;
}

void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
    out << csv_header() << '\n';
    for (const auto& rec : records) out << to_csv_row(rec) << '\n';
}

std::string to_json_string(const std::vector<ExperimentRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& rec : records) {
        nlohmann::json obj;
        obj["n"] = rec.n;
        obj["m_star"] = rec.m;
        obj["snr1_db"] = rec.snr1_db;
        obj["snr2_db"] = rec.snr2_db;
        obj["beta"] = rec.beta;
        obj["trials"] = rec.trials;
        obj["mode"] = to_string(rec.mode);
        obj["hop1_counting"] = to_string(rec.hop1_counting);
        obj["seed"] = rec.master_seed;
        obj["s_used"] = rec.s_used;
        obj["r1_mean"] = rec.r1_mean;
        obj["r1_stderr"] = rec.r1_stderr;
        obj["r2_mean"] = rec.r2_mean;
        obj["r2_stderr"] = rec.r2_stderr;
        obj["r_mean"] = rec.r_mean;
        obj["r1_lower_half"] = rec.r1_lower_half;
        obj["genie_upper_half"] = rec.genie_upper_half;
        obj["r2_closed"] = rec.r2_closed;
        obj["coop_upper_half"] = rec.coop_upper_half;
        obj["fb_bits_hop1"] = rec.fb_bits_hop1;
        obj["fb_bits_hop2"] = rec.fb_bits_hop2;
        obj["max_feedback_candidates"] = rec.max_feedback_candidates;
        obj["min_scheduled_sinr"] = rec.min_scheduled_sinr;
        obj["min_realized_margin"] = rec.min_realized_margin;
        arr.push_back(std::move(obj));
    }
    return arr.dump(2);
}

const char* to_string(Phase1Mode mode) {
    return mode == Phase1Mode::argmax ? "argmax" : "threshold";
}

const char* to_string(Hop1Counting counting) {
    return counting == Hop1Counting::distinct_source ? "distinct-source" : "per-link";
}

}  // namespace relaysim
