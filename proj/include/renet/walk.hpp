#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "renet/errors.hpp"
#include "renet/gw.hpp"
#include "renet/network.hpp"
#include "renet/resistance.hpp"
#include "renet/rng.hpp"

namespace renet {

/// Conductance-proportional transition law of the random walk on quotient
/// classes. A class with no finite-resistance incident edge has no defined
/// row and is marked absorbing instead.
struct TransitionMatrix {
    std::uint32_t num_states = 0;
    std::vector<std::vector<std::pair<ClassId, double>>> rows;
    std::vector<bool> absorbing;
};

inline TransitionMatrix transition_matrix(const QuotientNetwork& q) {
    TransitionMatrix tm;
    tm.num_states = q.num_classes;
    tm.rows.resize(q.num_classes);
    tm.absorbing.assign(q.num_classes, false);

    std::vector<double> strength(q.num_classes, 0.0);
    std::vector<std::vector<std::pair<ClassId, double>>> mass(q.num_classes);
    for (const auto& e : q.edges) {
        if (e.r.is_infinite()) continue;  // infinite edges carry no transition mass
        const double g = e.r.conductance();
        strength[e.a] += g;
        strength[e.b] += g;
        mass[e.a].emplace_back(e.b, g);
        mass[e.b].emplace_back(e.a, g);
    }
    for (ClassId c = 0; c < q.num_classes; ++c) {
        if (strength[c] == 0.0) {
            tm.absorbing[c] = true;
            continue;
        }
        // accumulate multi-edge mass per neighbor
        auto& entries = mass[c];
        std::sort(entries.begin(), entries.end());
        auto& row = tm.rows[c];
        for (std::size_t i = 0; i < entries.size();) {
            double g = 0.0;
            const ClassId nb = entries[i].first;
            while (i < entries.size() && entries[i].first == nb) g += entries[i++].second;
            row.emplace_back(nb, g / strength[c]);
        }
    }
    return tm;
}

/// P{walk hits `target` before `avoid` | start}, for every start class,
/// by the absorbing-chain linear system. States that can reach neither
/// set (including isolated ones) get probability 0.
inline std::vector<double> hitting_probabilities(const QuotientNetwork& q,
                                                 const std::vector<ClassId>& target,
                                                 const std::vector<ClassId>& avoid) {
    std::vector<std::int8_t> state(q.num_classes, 0);  // 1 target, -1 avoid
    for (ClassId c : target) state.at(c) = 1;
    for (ClassId c : avoid) {
        if (state.at(c) == 1) throw ParamOutOfRange("target and avoid sets intersect");
        state[c] = -1;
    }

    const TransitionMatrix tm = transition_matrix(q);
    std::vector<std::int32_t> idx(q.num_classes, -1);
    std::int32_t n = 0;
    for (ClassId c = 0; c < q.num_classes; ++c)
        if (state[c] == 0 && !tm.absorbing[c]) idx[c] = n++;

    std::vector<double> h(q.num_classes, 0.0);
    for (ClassId c : target) h[c] = 1.0;
    if (n > 0) {
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
        for (ClassId c = 0; c < q.num_classes; ++c) {
            if (idx[c] < 0) continue;
            trip.emplace_back(idx[c], idx[c], 1.0);
            for (const auto& [nb, p] : tm.rows[c]) {
                if (state[nb] == 1)
                    rhs[idx[c]] += p;
                else if (state[nb] == 0 && !tm.absorbing[nb])
                    trip.emplace_back(idx[c], idx[nb], -p);
                // avoid or absorbing neighbors contribute 0
            }
        }
        Eigen::SparseMatrix<double> sys(n, n);
        sys.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
        solver.compute(sys);
        if (solver.info() != Eigen::Success) throw SingularSystem("absorbing-chain factorization failed");
        const Eigen::VectorXd x = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw SingularSystem("absorbing-chain solve failed");
        for (ClassId c = 0; c < q.num_classes; ++c)
            if (idx[c] >= 0) h[c] = std::clamp(x[idx[c]], 0.0, 1.0);
    }
    return h;
}

inline double hitting_probability(const QuotientNetwork& q, ClassId start,
                                  const std::vector<ClassId>& target,
                                  const std::vector<ClassId>& avoid) {
    for (ClassId c : target)
        if (c == start) return 1.0;
    for (ClassId c : avoid)
        if (c == start) return 0.0;
    return hitting_probabilities(q, target, avoid).at(start);
}

struct WalkEstimate {
    double probability = 0.0;
    double std_error = 0.0;
    std::uint64_t resolved = 0;  // trials absorbed before the step cap
    std::uint64_t cap_hits = 0;
    bool valid = false;
};

/// Frequency estimate of the hitting probability among resolved trials;
/// trials that exhaust step_cap are counted separately and excluded.
inline WalkEstimate monte_carlo_walk(const QuotientNetwork& q, ClassId start,
                                     const std::vector<ClassId>& target,
                                     const std::vector<ClassId>& avoid, std::uint64_t trials,
                                     std::uint64_t step_cap, Rng& rng) {
    WalkEstimate est;
    if (trials == 0) return est;

    std::vector<std::int8_t> state(q.num_classes, 0);
    for (ClassId c : target) state.at(c) = 1;
    for (ClassId c : avoid) {
        if (state.at(c) == 1) throw ParamOutOfRange("target and avoid sets intersect");
        state[c] = -1;
    }
    const TransitionMatrix tm = transition_matrix(q);

    std::uint64_t hits = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        ClassId at = start;
        bool resolved = false;
        for (std::uint64_t step = 0; step <= step_cap; ++step) {
            if (state[at] == 1) {
                ++hits;
                resolved = true;
                break;
            }
            if (state[at] == -1 || tm.absorbing[at]) {
                resolved = true;
                break;
            }
            double u = u01(rng);
            const auto& row = tm.rows[at];
            ClassId next = row.back().first;
            for (const auto& [nb, p] : row) {
                if (u < p) {
                    next = nb;
                    break;
                }
                u -= p;
            }
            at = next;
        }
        if (resolved)
            ++est.resolved;
        else
            ++est.cap_hits;
    }
    if (est.resolved > 0) {
        const double n = static_cast<double>(est.resolved);
        est.probability = static_cast<double>(hits) / n;
        est.std_error = std::sqrt(std::max(est.probability * (1.0 - est.probability), 0.0) / n);
        est.valid = true;
    }
    return est;
}

struct EscapeBound {
    double exact = 0.0;        // P{walk reaches generation m before the root class}
    double lower_bound = 0.0;  // path(x) / (path(x) + descent(x, m))
};

/// Escape inequality on a finite tree with resistances: the exact
/// probability that the walk started at `node` reaches generation
/// `horizon` before the root class, against its closed-form lower bound
/// from the bare ancestor-path comparison. Degenerate case: when `node`
/// has no generation-`horizon` descendants inside its own subtree both
/// sides are reported as 0.
inline EscapeBound escape_bound(const FamilyTree& t, NodeId node, NodeId horizon) {
    if (node == 0) throw ParamOutOfRange("node must not be the root");
    if (horizon <= t.generation_of(node)) throw ParamOutOfRange("horizon must lie below the node");
    if (horizon > t.depth()) throw ParamOutOfRange("horizon exceeds realized depth");

    const ExtResistance rho = path_resistance(t, node);
    const ExtResistance descent = subtree_resistance_to_generation(t, node, horizon);
    if (descent.is_infinite()) return {0.0, 0.0};

    if (rho.ohms() + descent.ohms() <= 0.0)
        throw ParamOutOfRange("path and descent resistances are both zero");
    EscapeBound b;
    b.lower_bound = rho.ohms() / (rho.ohms() + descent.ohms());

    const ResistorNetwork net = tree_to_network(t, horizon);
    const QuotientNetwork q = quotient(net);
    b.exact = hitting_probability(q, q.class_of.at(node), {q.a1_class}, {q.a0_class});
    return b;
}

}  // namespace renet
