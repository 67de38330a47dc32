#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "renet/errors.hpp"

namespace renet {

inline double poisson_pmf(std::uint64_t k, double mean) {
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

inline double poisson_cdf(std::int64_t k, double mean) {
    if (k < 0) return 0.0;
    double term = std::exp(-mean);
    double sum = term;
    for (std::int64_t j = 1; j <= k; ++j) {
        term *= mean / static_cast<double>(j);
        sum += term;
    }
    return std::min(sum, 1.0);
}

/// Smallest integer m with poisson_cdf(m) >= u. Walks the CDF; guarded
/// against u so close to 1 that the pmf underflows.
inline std::uint64_t poisson_quantile(double u, double mean) {
    double term = std::exp(-mean);
    double cum = term;
    std::uint64_t m = 0;
    while (cum < u) {
        ++m;
        term *= mean / static_cast<double>(m);
        cum += term;
        if (m > 1000000) throw Error("poisson_quantile: CDF walk did not reach target");
    }
    return m;
}

/// Incremental walker over Binomial(n, p) CDF values; cdf(-1) = 0.
/// Evaluations must be requested with nondecreasing k.
class BinomialCdf {
public:
    BinomialCdf(std::uint64_t n, double p) : n_(n), p_(p) {
        if (p < 0.0 || p > 1.0) throw ParamOutOfRange("binomial p must be in [0,1]");
        term_ = (p >= 1.0) ? (n == 0 ? 1.0 : 0.0) : std::exp(static_cast<double>(n) * std::log1p(-p));
        cum_ = term_;
        k_ = 0;
    }

    double at(std::int64_t k) {
        if (k < 0) return 0.0;
        if (static_cast<std::uint64_t>(k) >= n_) return 1.0;
        if (p_ >= 1.0) return 0.0;
        const std::uint64_t kk = static_cast<std::uint64_t>(k);
        while (k_ < kk) {
            ++k_;
            term_ *= (static_cast<double>(n_ - k_ + 1) / static_cast<double>(k_)) * (p_ / (1.0 - p_));
            cum_ += term_;
        }
        return std::min(cum_, 1.0);
    }

    /// pmf of the last k passed to at().
    double last_pmf() const { return term_; }

private:
    std::uint64_t n_;
    double p_;
    double term_, cum_;
    std::uint64_t k_;
};

inline double binomial_cdf(std::int64_t k, std::uint64_t n, double p) {
    BinomialCdf walker(n, p);
    return walker.at(k);
}

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace detail

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw ParamOutOfRange("regularized_gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

/// P{Chi2(dof) > x}.
inline double chi_square_pvalue(double x, unsigned dof) {
    if (x <= 0.0) return 1.0;
    const double a = 0.5 * static_cast<double>(dof);
    if (0.5 * x < a + 1.0) return 1.0 - detail::gamma_p_series(a, 0.5 * x);
    return detail::gamma_q_contfrac(a, 0.5 * x);
}

struct GofResult {
    double chi2 = 0.0;
    unsigned dof = 0;
    double p_value = 1.0;
};

/// Pearson chi-square of observed nonnegative-integer counts against
/// Poisson(mean). Cells are pooled from the upper tail until every
/// expected count is >= min_expected; dof = cells - 1 (mean not fitted).
inline GofResult poisson_gof(std::span<const std::uint32_t> observations, double mean,
                             double min_expected = 5.0) {
    if (observations.empty()) throw EmptyLaw();
    std::uint32_t max_obs = 0;
    for (auto v : observations) max_obs = std::max(max_obs, v);
    const double total = static_cast<double>(observations.size());

    std::vector<double> expected;
    std::vector<double> observed;
    double cum_p = 0.0;
    std::vector<std::uint64_t> histogram(static_cast<std::size_t>(max_obs) + 1, 0);
    for (auto v : observations) ++histogram[v];

    // cells 0..max_obs then one tail cell; pool from the right afterwards
    for (std::uint32_t k = 0; k <= max_obs; ++k) {
        const double p = poisson_pmf(k, mean);
        cum_p += p;
        expected.push_back(p * total);
        observed.push_back(static_cast<double>(histogram[k]));
    }
    expected.push_back(std::max(0.0, 1.0 - cum_p) * total);
    observed.push_back(0.0);

    while (expected.size() > 2 && expected.back() < min_expected) {
        expected[expected.size() - 2] += expected.back();
        observed[observed.size() - 2] += observed.back();
        expected.pop_back();
        observed.pop_back();
    }
    // pool small leading cells too (relevant for large means)
    std::size_t lead = 0;
    while (lead + 2 < expected.size() && expected[lead] < min_expected) {
        expected[lead + 1] += expected[lead];
        observed[lead + 1] += observed[lead];
        ++lead;
    }

    GofResult r;
    std::size_t cells = 0;
    for (std::size_t i = lead; i < expected.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        r.chi2 += d * d / expected[i];
        ++cells;
    }
    r.dof = cells > 1 ? static_cast<unsigned>(cells - 1) : 1;
    r.p_value = chi_square_pvalue(r.chi2, r.dof);
    return r;
}

/// Two-sample Kolmogorov-Smirnov statistic; both inputs sorted ascending.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EmptyLaw();
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

inline double sample_mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double sample_stddev(std::span<const double> xs) {
    const double m = sample_mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace renet
