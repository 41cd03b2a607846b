#pragma once

#include <cstdint>
#include <string>

// Closed-form probabilities, throughput bounds, asymptotic predictors, and
// feedback-overhead accounting for the two-hop opportunistic relaying scheme.
// All SNR arguments are linear; dB conversion belongs to the CLI boundary.
// Logarithms are natural unless a name says otherwise.

namespace relaysim::analytics {

double db_to_linear(double db);

// Bits needed to index x distinct values: ceil(log2 x), and 0 for x <= 1.
int ceil_log2(std::uint64_t x);

// Probability that m independent uniform picks among n sources are all
// distinct: n(n-1)...(n-m+1)/n^m. Requires 1 <= m <= n.
double prob_exactly_m_distinct(int n, int m);

// CDF of the maximum of n i.i.d. unit-mean exponentials: (1-e^{-x})^n for
// x >= 0, else 0. Requires n >= 1.
double cdf_max_exp(double x, int n);

// CDF of the sum of m-1 i.i.d. unit-mean exponentials (the scheduling
// interference surrogate): 1 - e^{-y} sum_{k<=m-2} y^k/k!. m = 1 degenerates
// to the unit step at 0. Large m falls back to the regularized incomplete
// gamma to avoid long finite sums. Requires m >= 1.
double cdf_interference(double y, int m);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);

// Normal CDF with mean m-1 and variance m-1 evaluated at y; central-limit
// stand-in for cdf_interference at large m. Requires m >= 2.
double gaussian_approx_fy(double y, int m);

// Hop-1 throughput lower bound for the threshold-scheduling variant:
// m * P(all m picks distinct) * P(max gain > s) * P(interference < s - 1/rho).
// Requires 1 <= m < n, s > 0, rho > 0.
double r1_lower_bound(int n, int m, double rho, double s);

// Scheduling threshold log n - log log n. Requires n >= 3.
double default_threshold(double n);

// Exact mean hop-2 delivered bits/slot: m * (1 - (1 - p)^n) with
// p = p_dest_success(m, rho_r). Requires n, m >= 1, rho_r > 0.
double r2_closed_form(int n, int m, double rho_r);

// Probability that one destination's SINR toward one relay clears 1:
// e^{-1/rho_r} / 2^{m-1}. Requires m >= 1.
double p_dest_success(int m, double rho_r);

// Per-hop concurrent-success count bounds for the omniscient scheduler:
// upper log n/log 2 + 2 (n >= 2); lower (1-eps) log n/(2 log 2) + 2
// (n >= 2, 0 < eps < 1).
double genie_upper(double n);
double genie_lower(double n, double eps);

// (m/2) log log n, ceiling for any scheme that serves one source per relay
// slot without multiuser diversity gain. Requires n >= 3.
double coop_upper(double n, double m);

// Relay count that balances the two hops: (log n - log log n - 1/rho_r)/log 2
// + 1, real-valued. Requires n >= 3.
double optimal_m_phase2(double n, double rho_r);

// Index-feedback cost per fading block, plus growth labels for the
// m = Theta(log n) operating regime.
struct FeedbackOverhead {
    long long hop1_bits = 0;  // m relays x one source index each
    long long hop2_bits = 0;  // feeding-back destinations x one relay index
    std::string hop1_scaling;
    std::string hop2_scaling;
};
FeedbackOverhead feedback_overhead(int n, int m, long long feedback_count);

// Function-object form of cdf_interference for a fixed relay count.
struct InterferenceCdf {
    int m = 1;
    double operator()(double y) const { return cdf_interference(y, m); }
};

// One row of analytic curves at a parameter point. r1_lower is NaN when
// m >= n (the bound needs m < n); coop_upper needs n >= 3.
struct BoundRecord {
    int n = 0;
    int m = 0;
    double rho = 0.0;
    double rho_r = 0.0;
    double s = 0.0;
    double r1_lower = 0.0;
    double r2_exact = 0.0;
    double genie_upper = 0.0;
    double coop_upper = 0.0;
};
BoundRecord make_bound_record(int n, int m, double rho, double rho_r, double s);

}  // namespace relaysim::analytics
