#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "renet/errors.hpp"
#include "renet/network.hpp"

namespace renet {

struct SolveOptions {
    double iterative_tolerance = 1e-12;  // relative residual target of the CG fallback
    double max_residual = 1e-8;          // beyond this the solve is reported singular
    std::uint32_t direct_limit = 3000;   // classes; above this use the iterative solver
};

/// Potentials on quotient classes with boundary values V(A0^) = 0 and
/// V(A1^) = 1. Classes in components touching neither terminal carry no
/// current; they are excluded from the linear system and reported as
/// floating (potential NaN, defined(c) false).
struct PotentialSolution {
    std::vector<double> potential;  // size num_classes; NaN on floating classes
    std::vector<ClassId> floating;
    double residual = 0.0;  // max relative Kirchhoff violation over interior classes

    [[nodiscard]] bool defined(ClassId c) const { return !std::isnan(potential[c]); }
};

namespace detail {

/// Component labels over the finite-resistance class graph; -1 untouched.
inline std::vector<std::int32_t> finite_components(const QuotientNetwork& q) {
    std::vector<std::vector<ClassId>> adj(q.num_classes);
    for (const auto& e : q.edges) {
        if (e.r.is_infinite()) continue;
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    std::vector<std::int32_t> comp(q.num_classes, -1);
    std::int32_t next = 0;
    std::vector<ClassId> stack;
    for (ClassId s = 0; s < q.num_classes; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const ClassId v = stack.back();
            stack.pop_back();
            for (ClassId w : adj[v])
                if (comp[w] == -1) {
                    comp[w] = next;
                    stack.push_back(w);
                }
        }
        ++next;
    }
    return comp;
}

}  // namespace detail

/// Solves the Kirchhoff potential system on the quotient network.
/// Throws SameTerminalClass when both terminals share a class and
/// SingularSystem when the factorization fails or the residual exceeds
/// SolveOptions::max_residual.
inline PotentialSolution solve_potentials(const QuotientNetwork& q, const SolveOptions& opt = {}) {
    if (q.terminals_merged()) throw SameTerminalClass();

    const auto comp = detail::finite_components(q);
    const std::int32_t c0 = comp[q.a0_class], c1 = comp[q.a1_class];

    PotentialSolution sol;
    sol.potential.assign(q.num_classes, std::numeric_limits<double>::quiet_NaN());

    // Interior unknowns: classes in a terminal-touching component, minus the
    // terminals themselves. Components touching only one terminal still get
    // solved (their potential is constant there); untouched ones float.
    std::vector<std::int32_t> unknown(q.num_classes, -1);
    std::int32_t n_unknown = 0;
    for (ClassId c = 0; c < q.num_classes; ++c) {
        if (c == q.a0_class || c == q.a1_class) continue;
        if (comp[c] == c0 || comp[c] == c1) {
            unknown[c] = n_unknown++;
        } else {
            sol.floating.push_back(c);
        }
    }
    sol.potential[q.a0_class] = 0.0;
    sol.potential[q.a1_class] = 1.0;

    if (n_unknown > 0) {
        using Triplet = Eigen::Triplet<double>;
        std::vector<Triplet> trip;
        trip.reserve(q.edges.size() * 4);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_unknown);
        std::vector<double> diag(static_cast<std::size_t>(n_unknown), 0.0);

        for (const auto& e : q.edges) {
            if (e.r.is_infinite()) continue;
            const double g = e.r.conductance();
            const std::int32_t ia = unknown[e.a], ib = unknown[e.b];
            const bool a_boundary = (e.a == q.a0_class || e.a == q.a1_class);
            const bool b_boundary = (e.b == q.a0_class || e.b == q.a1_class);
            if (!a_boundary) diag[static_cast<std::size_t>(ia)] += g;
            if (!b_boundary) diag[static_cast<std::size_t>(ib)] += g;
            if (!a_boundary && !b_boundary) {
                trip.emplace_back(ia, ib, -g);
                trip.emplace_back(ib, ia, -g);
            } else if (!a_boundary && b_boundary) {
                rhs[ia] += g * sol.potential[e.b];
            } else if (a_boundary && !b_boundary) {
                rhs[ib] += g * sol.potential[e.a];
            }
        }
        for (std::int32_t i = 0; i < n_unknown; ++i)
            trip.emplace_back(i, i, diag[static_cast<std::size_t>(i)]);

        Eigen::SparseMatrix<double> lap(n_unknown, n_unknown);
        lap.setFromTriplets(trip.begin(), trip.end());

        Eigen::VectorXd x;
        if (static_cast<std::uint32_t>(n_unknown) <= opt.direct_limit) {
            Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
            if (solver.info() != Eigen::Success) throw SingularSystem("sparse factorization failed");
            x = solver.solve(rhs);
            if (solver.info() != Eigen::Success) throw SingularSystem("sparse back-substitution failed");
        } else {
            Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
            cg.setTolerance(opt.iterative_tolerance);
            cg.setMaxIterations(4 * n_unknown);
            cg.compute(lap);
            x = cg.solve(rhs);
            if (cg.info() != Eigen::Success) throw SingularSystem("conjugate gradient did not converge");
        }
        for (ClassId c = 0; c < q.num_classes; ++c)
            if (unknown[c] >= 0) sol.potential[c] = std::clamp(x[unknown[c]], 0.0, 1.0);
    }

    // Relative fixed-point residual of the potential equation per class.
    std::vector<double> flux(q.num_classes, 0.0), strength(q.num_classes, 0.0);
    for (const auto& e : q.edges) {
        if (e.r.is_infinite()) continue;
        const double g = e.r.conductance();
        if (sol.defined(e.a) && sol.defined(e.b)) {
            flux[e.a] += g * (sol.potential[e.b] - sol.potential[e.a]);
            flux[e.b] += g * (sol.potential[e.a] - sol.potential[e.b]);
        }
        strength[e.a] += g;
        strength[e.b] += g;
    }
    for (ClassId c = 0; c < q.num_classes; ++c) {
        if (c == q.a0_class || c == q.a1_class || unknown[c] < 0) continue;
        if (strength[c] > 0.0) sol.residual = std::max(sol.residual, std::abs(flux[c]) / strength[c]);
    }
    if (sol.residual > opt.max_residual) throw SingularSystem("residual above tolerance");
    return sol;
}

/// Two-terminal effective resistance. Total on valid networks: returns 0
/// when the terminals share a zero-resistance class and inf when no
/// finite-resistance path joins them.
inline ExtResistance effective_resistance(const QuotientNetwork& q, const SolveOptions& opt = {}) {
    if (q.terminals_merged()) return ExtResistance(0.0);
    const PotentialSolution sol = solve_potentials(q, opt);
    double current = 0.0;  // into the network at A0^, per edge V(w^)/R(e)
    for (const auto& e : q.edges) {
        if (e.r.is_infinite()) continue;
        if (e.a == q.a0_class && sol.defined(e.b))
            current += sol.potential[e.b] * e.r.conductance();
        else if (e.b == q.a0_class && sol.defined(e.a))
            current += sol.potential[e.a] * e.r.conductance();
    }
    if (current <= 0.0) return ExtResistance::infinite();
    return ExtResistance(1.0 / current);
}

inline ExtResistance effective_resistance(const ResistorNetwork& net, const SolveOptions& opt = {}) {
    return effective_resistance(quotient(net), opt);
}

}  // namespace renet
