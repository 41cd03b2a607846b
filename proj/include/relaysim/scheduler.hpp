#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "relaysim/matrix.hpp"
#include "relaysim/rng.hpp"

// Both hops of the opportunistic relaying protocol: hop-1 per-relay
// best-source scheduling, hop-2 per-destination SINR-threshold relay
// selection, and per-slot success evaluation. All operations are pure
// functions of their inputs (plus an RngSpec for the hop-2 tie-break).

namespace relaysim {

enum class Phase1Mode { argmax, threshold };

// Hop-1 throughput convention: a source decoded by several relays carries
// one packet (distinct_source, default) or one per successful link
// (per_link, for sensitivity analysis).
enum class Hop1Counting { distinct_source, per_link };

// (transmitter, receiver) node index pair.
using Link = std::pair<int, int>;

struct PhaseOneSchedule {
    // Entry r: source scheduled by relay r; empty when threshold mode
    // declines. When present it maximizes gamma(., r); ties break toward the
    // lowest source index.
    std::vector<std::optional<int>> chosen_source;
    // Distinct scheduled sources, ascending. |scheduled_set| <= min(n, m).
    std::vector<int> scheduled_set;
    Phase1Mode mode = Phase1Mode::argmax;
    double s_threshold = 0.0;
};

struct PhaseTwoSchedule {
    // Entry j: relay index fed back by destination j, empty when no relay
    // clears beta there. For beta >= 1 at most one relay can clear.
    std::vector<std::optional<int>> feedback;
    // Entry k: destination served by relay k; present iff k received at
    // least one feedback, picked uniformly among its feedbacks.
    std::vector<std::optional<int>> chosen_destination;
    // Relays with at least one feedback, ascending.
    std::vector<int> transmitting_set;
    // Entry j: how many relays cleared beta at destination j. Diagnostic for
    // the single-candidate property; every entry is <= 1 when beta >= 1.
    std::vector<int> candidates_per_destination;
};

struct SlotOutcome {
    int hop = 0;
    long long bits_delivered = 0;
    // Successful links, ascending.
    std::vector<Link> successes;
    // Evaluated links -> SINR. Hop 1: the scheduled links' SINRs over the
    // scheduled set K. Hop 2: the transmitting links' realized SINRs
    // (interference restricted to transmitting relays).
    std::map<Link, double> sinr_values;
    // Index messages actually sent: hop 1 counts scheduling relays, hop 2
    // counts feeding-back destinations.
    long long feedback_count = 0;
};

// Per-relay pick of the strongest source. Threshold mode schedules relay r
// only when max_i gamma(i, r) > s_threshold (s_threshold >= 0 required).
PhaseOneSchedule schedule_phase1(const Matrix& gamma, Phase1Mode mode,
                                 double s_threshold = 0.0);

// Hop-1 SINR of (source, relay) when the sources in scheduled_set transmit:
// gamma(source, relay) / (1/rho + sum of gamma(t, relay), t in set, t != source).
// Rejects source not in scheduled_set.
double sinr_phase1(const Matrix& gamma, const std::vector<int>& scheduled_set,
                   int source, int relay, double rho);

// Success = SINR >= beta per scheduled link; bits_delivered per counting.
SlotOutcome evaluate_phase1(const PhaseOneSchedule& schedule, const Matrix& gamma,
                            double rho, double beta,
                            Hop1Counting counting = Hop1Counting::distinct_source);

// Hop-2 SINR of (relay, destination) as the destination measures it, with
// all m relays assumed to interfere:
// xi(relay, dest) / (1/rho_r + sum of xi(l, dest), l != relay).
double sinr_phase2(const Matrix& xi, int relay, int dest, double rho_r);

// Each destination feeds back the relay clearing beta (if any); each relay
// with feedback picks one destination uniformly at random from rng.
PhaseTwoSchedule schedule_phase2(const Matrix& xi, double rho_r, double beta,
                                 const RngSpec& rng);

// Every scheduled hop-2 link succeeds; realized SINR (interference from
// transmitting relays only) is recomputed and checked against the measured
// value, which it can only exceed. A realized value materially below the
// measured one (or below beta) throws std::logic_error.
SlotOutcome evaluate_phase2(const PhaseTwoSchedule& schedule, const Matrix& xi,
                            double rho_r, double beta);

}  // namespace relaysim
