#pragma once

#include <cmath>
#include <compare>
#include <cstdio>
#include <limits>
#include <string>

#include "renet/errors.hpp"

namespace renet {

/// Extended nonnegative resistance value in [0, +inf].
///
/// Arithmetic is total: x + inf = inf, 1/0 = inf, 1/inf = 0. IEEE-754
/// semantics implement the whole table, so the wrapper only guards the
/// domain (no negatives, no NaN, -0 normalized to +0). The one undefined
/// combination, 0 * inf, never arises because zero-resistance edges are
/// contracted away before any conductance is formed.
class ExtResistance {
public:
    constexpr ExtResistance() = default;

    explicit ExtResistance(double ohms) : ohms_(ohms == 0.0 ? 0.0 : ohms) {
        if (std::isnan(ohms) || ohms < 0.0)
            throw ParamOutOfRange("resistance must be in [0, inf]");
    }

    static constexpr ExtResistance infinite() {
        ExtResistance r;
        r.ohms_ = std::numeric_limits<double>::infinity();
        return r;
    }

    [[nodiscard]] constexpr double ohms() const { return ohms_; }
    [[nodiscard]] constexpr bool is_infinite() const {
        return ohms_ == std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] constexpr bool is_zero() const { return ohms_ == 0.0; }

    /// Conductance 1/R; inf -> 0, 0 -> inf.
    [[nodiscard]] constexpr double conductance() const { return 1.0 / ohms_; }

    friend constexpr auto operator<=>(ExtResistance a, ExtResistance b) {
        return a.ohms_ <=> b.ohms_;
    }
    friend constexpr bool operator==(ExtResistance, ExtResistance) = default;

private:
    double ohms_ = 0.0;
};

/// Series combination a + b; inf absorbs.
inline ExtResistance series(ExtResistance a, ExtResistance b) {
    if (a.is_infinite() || b.is_infinite()) return ExtResistance::infinite();
    return ExtResistance(a.ohms() + b.ohms());
}

/// Parallel combination (a^-1 + b^-1)^-1; 0 absorbs.
inline ExtResistance parallel(ExtResistance a, ExtResistance b) {
    if (a.is_zero() || b.is_zero()) return ExtResistance(0.0);
    const double g = a.conductance() + b.conductance();
    if (g == 0.0) return ExtResistance::infinite();
    return ExtResistance(1.0 / g);
}

inline std::string to_string(ExtResistance r) {
    if (r.is_infinite()) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", r.ohms());
    return buf;
}

}  // namespace renet
