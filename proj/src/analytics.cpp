#include "relaysim/analytics.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace relaysim::analytics {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Finite-sum cutoff; larger shapes go through the incomplete gamma.
constexpr int kFiniteSumMaxM = 64;

const char* kHop1Label = "Theta((log n)^2)";
const char* kHop2Label = "Theta(log n * log log n)";

[[noreturn]] void reject(const char* what) { throw std::invalid_argument(what); }

}  // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

int ceil_log2(std::uint64_t x) {
    if (x <= 1) return 0;
    return std::bit_width(x - 1);
}

double prob_exactly_m_distinct(int n, int m) {
    if (n < 1) reject("prob_exactly_m_distinct: n must be >= 1");
    if (m < 1 || m > n) reject("prob_exactly_m_distinct: need 1 <= m <= n");
    double prob = 1.0;
    for (int k = 1; k < m; ++k)
        prob *= static_cast<double>(n - k) / static_cast<double>(n);
    return prob;
}

double cdf_max_exp(double x, int n) {
    if (n < 1) reject("cdf_max_exp: n must be >= 1");
    if (!(x > 0.0)) return 0.0;
    return std::pow(-std::expm1(-x), n);
}

double cdf_interference(double y, int m) {
    if (m < 1) reject("cdf_interference: m must be >= 1");
    if (m == 1) return y >= 0.0 ? 1.0 : 0.0;  // empty sum, point mass at 0
    if (!(y > 0.0)) return 0.0;
    if (m <= kFiniteSumMaxM) {
        // 1 - e^{-y} sum_{k=0}^{m-2} y^k/k!, the factor e^{-y} folded into
        // the running term so nothing overflows.
        double term = std::exp(-y);
        double sum = term;
        for (int k = 1; k <= m - 2; ++k) {
            term *= y / k;
            sum += term;
        }
        return sum >= 1.0 ? 0.0 : 1.0 - sum;
    }
    return regularized_gamma_p(static_cast<double>(m - 1), y);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0)) reject("regularized_gamma_p: a must be > 0");
    if (x < 0.0) reject("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double log_prefactor = -x + a * std::log(x) - std::lgamma(a);
    if (x < a + 1.0) {
        // Lower series: P(a,x) = x^a e^{-x}/Gamma(a) * sum x^k / (a)_{k+1}.
        double denom = a;
        double term = 1.0 / a;
        double sum = term;
        for (int i = 0; i < 1000; ++i) {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
        }
        return sum * std::exp(log_prefactor);
    }
    // Upper continued fraction (modified Lentz), then P = 1 - Q.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return 1.0 - std::exp(log_prefactor) * h;
}

double gaussian_approx_fy(double y, int m) {
    if (m < 2) reject("gaussian_approx_fy: m must be >= 2");
    const double mean = m - 1.0;
    const double sd = std::sqrt(mean);
    return 0.5 * std::erfc((mean - y) / (sd * std::sqrt(2.0)));
}

double r1_lower_bound(int n, int m, double rho, double s) {
    if (m < 1) reject("r1_lower_bound: m must be >= 1");
    if (m >= n) reject("r1_lower_bound: needs m < n");
    if (!(s > 0.0)) reject("r1_lower_bound: s must be > 0");
    if (!(rho > 0.0)) reject("r1_lower_bound: rho must be > 0");
    const double p_distinct = prob_exactly_m_distinct(n, m);
    const double p_max_clears = 1.0 - cdf_max_exp(s, n);
    const double p_interference_low = cdf_interference(s - 1.0 / rho, m);
    return m * p_distinct * p_max_clears * p_interference_low;
}

double default_threshold(double n) {
    if (!(n >= 3.0)) reject("default_threshold: n must be >= 3");
    return std::log(n) - std::log(std::log(n));
}

double r2_closed_form(int n, int m, double rho_r) {
    if (n < 1) reject("r2_closed_form: n must be >= 1");
    const double p = p_dest_success(m, rho_r);
    if (p >= 1.0) return m;
    return m * -std::expm1(n * std::log1p(-p));
}

double p_dest_success(int m, double rho_r) {
    if (m < 1) reject("p_dest_success: m must be >= 1");
    if (!(rho_r > 0.0)) reject("p_dest_success: rho_r must be > 0");
    return std::ldexp(std::exp(-1.0 / rho_r), 1 - m);
}

double genie_upper(double n) {
    if (!(n >= 2.0)) reject("genie_upper: n must be >= 2");
    return std::log2(n) + 2.0;
}

double genie_lower(double n, double eps) {
    if (!(n >= 2.0)) reject("genie_lower: n must be >= 2");
    if (!(eps > 0.0 && eps < 1.0)) reject("genie_lower: need 0 < eps < 1");
    return (1.0 - eps) * std::log2(n) / 2.0 + 2.0;
}

double coop_upper(double n, double m) {
    if (!(n >= 3.0)) reject("coop_upper: n must be >= 3");
    return m / 2.0 * std::log(std::log(n));
}

double optimal_m_phase2(double n, double rho_r) {
    if (!(n >= 3.0)) reject("optimal_m_phase2: n must be >= 3");
    if (!(rho_r > 0.0)) reject("optimal_m_phase2: rho_r must be > 0");
    return (std::log(n) - std::log(std::log(n)) - 1.0 / rho_r) / std::log(2.0) + 1.0;
}

FeedbackOverhead feedback_overhead(int n, int m, long long feedback_count) {
    if (n < 1) reject("feedback_overhead: n must be >= 1");
    if (m < 1) reject("feedback_overhead: m must be >= 1");
    if (feedback_count < 0 || feedback_count > n)
        reject("feedback_overhead: need 0 <= feedback_count <= n");
    FeedbackOverhead fb;
    fb.hop1_bits = static_cast<long long>(m) * ceil_log2(static_cast<std::uint64_t>(n));
    fb.hop2_bits = feedback_count * ceil_log2(static_cast<std::uint64_t>(m));
    fb.hop1_scaling = kHop1Label;
    fb.hop2_scaling = kHop2Label;
    return fb;
}

BoundRecord make_bound_record(int n, int m, double rho, double rho_r, double s) {
    if (n < 1) reject("make_bound_record: n must be >= 1");
    if (m < 1) reject("make_bound_record: m must be >= 1");
    BoundRecord rec;
    rec.n = n;
    rec.m = m;
    rec.rho = rho;
    rec.rho_r = rho_r;
    rec.s = s;
    rec.r1_lower = (m < n && s > 0.0) ? r1_lower_bound(n, m, rho, s) : kNan;
    rec.r2_exact = r2_closed_form(n, m, rho_r);
    rec.genie_upper = n >= 2 ? genie_upper(n) : kNan;
    rec.coop_upper = n >= 3 ? coop_upper(n, m) : kNan;
    return rec;
}

}  // namespace relaysim::analytics
