#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "renet/errors.hpp"
#include "renet/rng.hpp"
#include "renet/stats.hpp"

namespace renet {

/// Distribution of a single edge resistance, concentrated on [0, inf).
///
/// Supported families: PointMass(c), Uniform(a,b), Exponential(rate) and
/// finite Discrete{(x_i, p_i)}. All sampling goes through the quantile
/// function so that a single uniform variate determines the draw (required
/// by the keyed per-pair edge sampling).
class EdgeDistribution {
public:
    enum class Family { Point, Uniform, Exponential, Discrete };

    static EdgeDistribution point(double c) {
        if (c < 0.0 || !std::isfinite(c)) throw ParamOutOfRange("point mass must be finite and >= 0");
        EdgeDistribution d;
        d.family_ = Family::Point;
        d.a_ = c;
        return d;
    }

    static EdgeDistribution uniform(double a, double b) {
        if (a < 0.0 || b <= a || !std::isfinite(b)) throw ParamOutOfRange("uniform needs 0 <= a < b < inf");
        EdgeDistribution d;
        d.family_ = Family::Uniform;
        d.a_ = a;
        d.b_ = b;
        return d;
    }

    static EdgeDistribution exponential(double rate) {
        if (rate <= 0.0 || !std::isfinite(rate)) throw ParamOutOfRange("exponential rate must be positive");
        EdgeDistribution d;
        d.family_ = Family::Exponential;
        d.a_ = rate;
        return d;
    }

    static EdgeDistribution discrete(std::vector<std::pair<double, double>> atoms) {
        if (atoms.empty()) throw ParamOutOfRange("discrete law needs at least one atom");
        double mass = 0.0;
        for (auto& [x, p] : atoms) {
            if (x < 0.0 || !std::isfinite(x)) throw ParamOutOfRange("discrete atom must be finite and >= 0");
            if (p < 0.0) throw ParamOutOfRange("discrete probability must be >= 0");
            mass += p;
        }
        if (std::abs(mass - 1.0) > 1e-9) throw ParamOutOfRange("discrete probabilities must sum to 1");
        std::sort(atoms.begin(), atoms.end());
        EdgeDistribution d;
        d.family_ = Family::Discrete;
        d.atoms_ = std::move(atoms);
        return d;
    }

    [[nodiscard]] double cdf(double x) const {
        switch (family_) {
            case Family::Point: return x >= a_ ? 1.0 : 0.0;
            case Family::Uniform:
                if (x < a_) return 0.0;
                if (x >= b_) return 1.0;
                return (x - a_) / (b_ - a_);
            case Family::Exponential: return x < 0.0 ? 0.0 : -std::expm1(-a_ * x);
            case Family::Discrete: {
                double c = 0.0;
                for (auto& [xi, pi] : atoms_)
                    if (xi <= x) c += pi;
                return std::min(c, 1.0);
            }
        }
        return 0.0;
    }

    /// Generalized inverse CDF; u in [0, 1).
    [[nodiscard]] double quantile(double u) const {
        switch (family_) {
            case Family::Point: return a_;
            case Family::Uniform: return a_ + (b_ - a_) * u;
            case Family::Exponential: return -std::log1p(-u) / a_;
            case Family::Discrete: {
                double c = 0.0;
                for (auto& [xi, pi] : atoms_) {
                    c += pi;
                    if (u < c) return xi;
                }
                return atoms_.back().first;
            }
        }
        return 0.0;
    }

    [[nodiscard]] double sample(Rng& rng) const { return quantile(u01(rng)); }

    /// F(0): mass at zero resistance.
    [[nodiscard]] double atom_at_zero() const { return cdf(0.0); }

    /// Integral of 1/x dF(x); +inf when it diverges (in particular whenever
    /// F(0) > 0, and for the exponential which diverges at the origin).
    [[nodiscard]] double mean_inverse() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        switch (family_) {
            case Family::Point: return a_ == 0.0 ? inf : 1.0 / a_;
            case Family::Uniform:
                if (a_ == 0.0) return inf;
                return std::log(b_ / a_) / (b_ - a_);
            case Family::Exponential: return inf;
            case Family::Discrete: {
                double s = 0.0;
                for (auto& [xi, pi] : atoms_) {
                    if (pi == 0.0) continue;
                    if (xi == 0.0) return inf;
                    s += pi / xi;
                }
                return s;
            }
        }
        return inf;
    }

    /// Smallest x with F(x) = 1 (support bound); +inf for the exponential.
    [[nodiscard]] double support_max() const {
        switch (family_) {
            case Family::Point: return a_;
            case Family::Uniform: return b_;
            case Family::Exponential: return std::numeric_limits<double>::infinity();
            case Family::Discrete: return atoms_.back().first;
        }
        return 0.0;
    }

    [[nodiscard]] std::string spec_string() const {
        char buf[64];
        std::ostringstream out;
        switch (family_) {
            case Family::Point:
                std::snprintf(buf, sizeof buf, "point:%g", a_);
                return buf;
            case Family::Uniform:
                std::snprintf(buf, sizeof buf, "uniform:%g,%g", a_, b_);
                return buf;
            case Family::Exponential:
                std::snprintf(buf, sizeof buf, "exp:%g", a_);
                return buf;
            case Family::Discrete:
                out << "discrete:";
                for (std::size_t i = 0; i < atoms_.size(); ++i) {
                    if (i) out << ',';
                    out << atoms_[i].first << ':' << atoms_[i].second;
                }
                return out.str();
        }
        return {};
    }

    /// Parses the mini-grammar: point:c | uniform:a,b | exp:rate |
    /// discrete:x1:p1,x2:p2,...
    static EdgeDistribution parse(std::string_view spec);

private:
    EdgeDistribution() = default;

    Family family_ = Family::Point;
    double a_ = 1.0, b_ = 0.0;
    std::vector<std::pair<double, double>> atoms_;
};

namespace detail {

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.emplace_back(s.substr(pos));
            break;
        }
        parts.emplace_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("bad number '" + s + "'");
    }
    if (used != s.size()) throw ParseError("bad number '" + s + "'");
    return v;
}

}  // namespace detail

inline EdgeDistribution EdgeDistribution::parse(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) throw ParseError("distribution spec needs 'family:args'");
    const std::string family(spec.substr(0, colon));
    const std::string args(spec.substr(colon + 1));
    if (family == "point") return point(detail::parse_double(args));
    if (family == "uniform") {
        const auto parts = detail::split(args, ',');
        if (parts.size() != 2) throw ParseError("uniform:a,b");
        return uniform(detail::parse_double(parts[0]), detail::parse_double(parts[1]));
    }
    if (family == "exp") return exponential(detail::parse_double(args));
    if (family == "discrete") {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& pair : detail::split(args, ',')) {
            const auto xp = detail::split(pair, ':');
            if (xp.size() != 2) throw ParseError("discrete:x1:p1,x2:p2,...");
            atoms.emplace_back(detail::parse_double(xp[0]), detail::parse_double(xp[1]));
        }
        return discrete(std::move(atoms));
    }
    throw ParseError("unknown distribution family '" + family + "'");
}

/// Offspring distribution of the branching process: Poisson(mean) or an
/// explicit pmf {p_0, p_1, ...}.
class OffspringLaw {
public:
    static OffspringLaw poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean)) throw ParamOutOfRange("poisson mean must be finite and >= 0");
        OffspringLaw law;
        law.poisson_ = true;
        law.mean_ = mean;
        return law;
    }

    static OffspringLaw explicit_pmf(std::vector<double> pmf) {
        double mass = 0.0, mean = 0.0;
        for (std::size_t k = 0; k < pmf.size(); ++k) {
            if (pmf[k] < 0.0) throw ParamOutOfRange("pmf entries must be >= 0");
            mass += pmf[k];
            mean += static_cast<double>(k) * pmf[k];
        }
        if (std::abs(mass - 1.0) > 1e-9) throw ParamOutOfRange("pmf must sum to 1");
        OffspringLaw law;
        law.poisson_ = false;
        law.mean_ = mean;
        law.pmf_ = std::move(pmf);
        return law;
    }

    [[nodiscard]] bool is_poisson() const { return poisson_; }
    [[nodiscard]] double mean() const { return mean_; }

    /// Generating function f(s) = E s^Z.
    [[nodiscard]] double pgf(double s) const {
        if (poisson_) return std::exp(-mean_ * (1.0 - s));
        double acc = 0.0, power = 1.0;
        for (double p : pmf_) {
            acc += p * power;
            power *= s;
        }
        return acc;
    }

    [[nodiscard]] std::uint32_t sample(Rng& rng) const {
        if (poisson_) {
            std::poisson_distribution<std::uint32_t> dist(mean_);
            return dist(rng);
        }
        double u = u01(rng), c = 0.0;
        for (std::size_t k = 0; k < pmf_.size(); ++k) {
            c += pmf_[k];
            if (u < c) return static_cast<std::uint32_t>(k);
        }
        return static_cast<std::uint32_t>(pmf_.size() - 1);
    }

    /// P{Z = 1 exactly, surely} -- the degenerate law whose extinction
    /// probability is 0 rather than 1.
    [[nodiscard]] bool is_deterministic_unit() const {
        if (poisson_) return false;
        return pmf_.size() >= 2 && pmf_[1] > 1.0 - 1e-12;
    }

private:
    OffspringLaw() = default;
    bool poisson_ = true;
    double mean_ = 1.0;
    std::vector<double> pmf_;
};

/// Smallest fixed point of the offspring generating function in [0, 1]:
/// the extinction probability. Subcritical and critical laws (mean <= 1)
/// return exactly 1 (monotone iteration stalls near criticality);
/// supercritical laws iterate q <- f(q) from 0 until |step| <= 1e-14.
inline double extinction_probability(const OffspringLaw& law) {
    if (law.is_deterministic_unit()) return 0.0;
    if (law.mean() <= 1.0) return 1.0;
    double q = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double next = law.pgf(q);
        if (std::abs(next - q) <= 1e-14) return next;
        q = next;
    }
    return q;
}

}  // namespace renet
