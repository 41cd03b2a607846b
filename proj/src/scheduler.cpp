#include "relaysim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaysim {

namespace {

// Relative slack for realized-vs-measured SINR checks; covers summation
// rounding only, real violations are orders of magnitude larger.
constexpr double kSinrSlack = 1e-12;

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

// Interference-limited SINR with the interference given as (total gain at
// the receiver) - (own gain). The clamp absorbs the one-ulp negatives that
// subtracting a summand from a rounded total can produce. Keeping this one
// formula everywhere makes scheduling and evaluation decisions consistent
// to the bit.
double sinr_from_total(double own, double total, double inv_noise) {
    const double interference = std::max(total - own, 0.0);
    return own / (inv_noise + interference);
}

}  // namespace

PhaseOneSchedule schedule_phase1(const Matrix& gamma, Phase1Mode mode,
                                 double s_threshold) {
    require(!gamma.empty(), "schedule_phase1: gamma must be nonempty");
    require(mode == Phase1Mode::argmax || s_threshold >= 0.0,
            "schedule_phase1: threshold mode needs s_threshold >= 0");
    const std::size_t n = gamma.rows();
    const std::size_t m = gamma.cols();

    PhaseOneSchedule schedule;
    schedule.mode = mode;
    schedule.s_threshold = mode == Phase1Mode::threshold ? s_threshold : 0.0;
    schedule.chosen_source.assign(m, std::nullopt);

    for (std::size_t r = 0; r < m; ++r) {
        std::size_t best = 0;
        double best_gain = gamma(0, r);
        for (std::size_t i = 1; i < n; ++i) {
            if (gamma(i, r) > best_gain) {  // ties keep the lowest index
                best_gain = gamma(i, r);
                best = i;
            }
        }
        if (mode == Phase1Mode::threshold && !(best_gain > s_threshold)) continue;
        schedule.chosen_source[r] = static_cast<int>(best);
    }

    for (const auto& pick : schedule.chosen_source)
        if (pick) schedule.scheduled_set.push_back(*pick);
    std::sort(schedule.scheduled_set.begin(), schedule.scheduled_set.end());
    schedule.scheduled_set.erase(
        std::unique(schedule.scheduled_set.begin(), schedule.scheduled_set.end()),
        schedule.scheduled_set.end());
    return schedule;
}

double sinr_phase1(const Matrix& gamma, const std::vector<int>& scheduled_set,
                   int source, int relay, double rho) {
    require(relay >= 0 && static_cast<std::size_t>(relay) < gamma.cols(),
            "sinr_phase1: relay out of range");
    require(rho > 0.0, "sinr_phase1: rho must be > 0");
    bool member = false;
    double interference = 0.0;
    for (int t : scheduled_set) {
        require(t >= 0 && static_cast<std::size_t>(t) < gamma.rows(),
                "sinr_phase1: scheduled source out of range");
        if (t == source)
            member = true;
        else
            interference += gamma(static_cast<std::size_t>(t),
                                  static_cast<std::size_t>(relay));
    }
    require(member, "sinr_phase1: source not in the scheduled set");
    return gamma(static_cast<std::size_t>(source), static_cast<std::size_t>(relay)) /
           (1.0 / rho + interference);
}

SlotOutcome evaluate_phase1(const PhaseOneSchedule& schedule, const Matrix& gamma,
                            double rho, double beta, Hop1Counting counting) {
    require(schedule.chosen_source.size() == gamma.cols(),
            "evaluate_phase1: schedule does not match gamma");
    require(beta > 0.0, "evaluate_phase1: beta must be > 0");

    SlotOutcome outcome;
    outcome.hop = 1;
    std::vector<int> successful_sources;
    for (std::size_t r = 0; r < gamma.cols(); ++r) {
        const auto& pick = schedule.chosen_source[r];
        if (!pick) continue;
        ++outcome.feedback_count;
        const double sinr = sinr_phase1(gamma, schedule.scheduled_set, *pick,
                                        static_cast<int>(r), rho);
        const Link link{*pick, static_cast<int>(r)};
        outcome.sinr_values[link] = sinr;
        if (sinr >= beta) {
            outcome.successes.push_back(link);
            successful_sources.push_back(*pick);
        }
    }
    std::sort(outcome.successes.begin(), outcome.successes.end());

    if (counting == Hop1Counting::per_link) {
        outcome.bits_delivered = static_cast<long long>(outcome.successes.size());
    } else {
        std::sort(successful_sources.begin(), successful_sources.end());
        successful_sources.erase(
            std::unique(successful_sources.begin(), successful_sources.end()),
            successful_sources.end());
        outcome.bits_delivered = static_cast<long long>(successful_sources.size());
    }
    return outcome;
}

double sinr_phase2(const Matrix& xi, int relay, int dest, double rho_r) {
    require(relay >= 0 && static_cast<std::size_t>(relay) < xi.rows(),
            "sinr_phase2: relay out of range");
    require(dest >= 0 && static_cast<std::size_t>(dest) < xi.cols(),
            "sinr_phase2: destination out of range");
    require(rho_r > 0.0, "sinr_phase2: rho_r must be > 0");
    double total = 0.0;
    for (std::size_t l = 0; l < xi.rows(); ++l)
        total += xi(l, static_cast<std::size_t>(dest));
    return sinr_from_total(
        xi(static_cast<std::size_t>(relay), static_cast<std::size_t>(dest)), total,
        1.0 / rho_r);
}

PhaseTwoSchedule schedule_phase2(const Matrix& xi, double rho_r, double beta,
                                 const RngSpec& rng) {
    require(!xi.empty(), "schedule_phase2: xi must be nonempty");
    require(rho_r > 0.0, "schedule_phase2: rho_r must be > 0");
    require(beta > 0.0, "schedule_phase2: beta must be > 0");
    const std::size_t m = xi.rows();
    const std::size_t n = xi.cols();
    const double inv_noise = 1.0 / rho_r;

    PhaseTwoSchedule schedule;
    schedule.feedback.assign(n, std::nullopt);
    schedule.chosen_destination.assign(m, std::nullopt);
    schedule.candidates_per_destination.assign(n, 0);

    std::vector<std::vector<int>> feedbacks_per_relay(m);
    for (std::size_t j = 0; j < n; ++j) {
        double total = 0.0;
        for (std::size_t k = 0; k < m; ++k) total += xi(k, j);
        int candidates = 0;
        int best_relay = -1;
        double best_sinr = -1.0;
        for (std::size_t k = 0; k < m; ++k) {
            const double sinr = sinr_from_total(xi(k, j), total, inv_noise);
            if (sinr >= beta) {
                ++candidates;
                if (sinr > best_sinr) {  // > 1 candidate only when beta < 1
                    best_sinr = sinr;
                    best_relay = static_cast<int>(k);
                }
            }
        }
        schedule.candidates_per_destination[j] = candidates;
        if (best_relay >= 0) {
            schedule.feedback[j] = best_relay;
            feedbacks_per_relay[static_cast<std::size_t>(best_relay)].push_back(
                static_cast<int>(j));
        }
    }

    // Draws are consumed only for relays with a real choice, in ascending
    // relay order, so the outcome is a pure function of (xi, rng).
    std::mt19937_64 gen = make_stream(rng);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& options = feedbacks_per_relay[k];
        if (options.empty()) continue;
        const std::size_t pick =
            options.size() == 1
                ? 0
                : static_cast<std::size_t>(uniform_below(gen, options.size()));
        schedule.chosen_destination[k] = options[pick];
        schedule.transmitting_set.push_back(static_cast<int>(k));
    }
    return schedule;
}

SlotOutcome evaluate_phase2(const PhaseTwoSchedule& schedule, const Matrix& xi,
                            double rho_r, double beta) {
    require(schedule.chosen_destination.size() == xi.rows(),
            "evaluate_phase2: schedule does not match xi");
    require(schedule.feedback.size() == xi.cols(),
            "evaluate_phase2: schedule does not match xi");
    require(rho_r > 0.0, "evaluate_phase2: rho_r must be > 0");
    require(beta > 0.0, "evaluate_phase2: beta must be > 0");
    const double inv_noise = 1.0 / rho_r;

    SlotOutcome outcome;
    outcome.hop = 2;
    for (const auto& fb : schedule.feedback)
        if (fb) ++outcome.feedback_count;

    for (int k : schedule.transmitting_set) {
        const auto& dest = schedule.chosen_destination[static_cast<std::size_t>(k)];
        require(dest.has_value(), "evaluate_phase2: transmitting relay without destination");
        const std::size_t j = static_cast<std::size_t>(*dest);
        double total = 0.0;
        for (int l : schedule.transmitting_set)
            total += xi(static_cast<std::size_t>(l), j);
        const double realized =
            sinr_from_total(xi(static_cast<std::size_t>(k), j), total, inv_noise);
        const double measured = sinr_phase2(xi, k, *dest, rho_r);
        // Interference shrinks from all relays to the transmitting subset,
        // so realized < measured or realized < beta means a scheduling bug.
        if (realized < measured * (1.0 - kSinrSlack))
            throw std::logic_error("evaluate_phase2: realized SINR below measured value");
        if (realized < beta * (1.0 - kSinrSlack))
            throw std::logic_error("evaluate_phase2: scheduled link below threshold");
        const Link link{k, *dest};
        outcome.sinr_values[link] = realized;
        outcome.successes.push_back(link);
    }
    std::sort(outcome.successes.begin(), outcome.successes.end());
    outcome.bits_delivered = static_cast<long long>(outcome.successes.size());
    return outcome;
}

}  // namespace relaysim
