#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "renet/distributions.hpp"
#include "renet/errors.hpp"
#include "renet/network.hpp"
#include "renet/resistance.hpp"
#include "renet/rng.hpp"

namespace renet {

using NodeId = std::uint32_t;

/// Rooted labeled family tree in breadth-first order. Node 0 is the root;
/// the children of a node are contiguous, so the label <i1,...,in> of the
/// classic construction is recoverable as child ranks along the root path.
/// Each non-root node carries the resistance of the edge to its parent.
struct FamilyTree {
    std::vector<NodeId> parent;         // parent[0] = 0, unused
    std::vector<NodeId> child_begin;    // first child index (meaningful when child_count > 0)
    std::vector<NodeId> child_count;
    std::vector<ExtResistance> edge_r;  // edge to parent; edge_r[0] unused
    std::vector<NodeId> gen_offset;     // generation g = [gen_offset[g], gen_offset[g+1])
    bool truncated = false;             // caps censored further growth

    [[nodiscard]] NodeId size() const { return static_cast<NodeId>(parent.size()); }

    /// Generations realized (root only -> 0).
    [[nodiscard]] NodeId depth() const { return static_cast<NodeId>(gen_offset.size()) - 2; }

    [[nodiscard]] NodeId generation_size(NodeId g) const {
        if (g > depth()) return 0;
        return gen_offset[g + 1] - gen_offset[g];
    }

    [[nodiscard]] NodeId generation_of(NodeId node) const {
        const auto it = std::upper_bound(gen_offset.begin(), gen_offset.end(), node);
        return static_cast<NodeId>(it - gen_offset.begin()) - 1;
    }

    /// True when the process died out inside the realized range (some
    /// realized generation is empty, equivalently growth stopped with no
    /// cap hit).
    [[nodiscard]] bool extinct() const { return !truncated; }

    /// Child rank (1-based) of a non-root node under its parent.
    [[nodiscard]] NodeId rank(NodeId node) const {
        return node - child_begin[parent[node]] + 1;
    }

    /// Full label <i1,...,in> of a node; empty for the root.
    [[nodiscard]] std::vector<NodeId> label(NodeId node) const {
        std::vector<NodeId> out;
        while (node != 0) {
            out.push_back(rank(node));
            node = parent[node];
        }
        std::reverse(out.begin(), out.end());
        return out;
    }
};

/// Caps and the stabilization threshold for growing a single tree.
struct GrowthPolicy {
    NodeId depth_cap = 24;
    NodeId node_cap = 200000;
    double stabilization = 1e-4;  // epsilon_R on successive whole-tree resistances
};

/// Samples the family tree generation by generation: independent offspring
/// counts per node, independent edge resistances from F. If finishing the
/// next generation would exceed node_cap, that generation is discarded
/// whole and the tree is marked truncated (partial generations would bias
/// the law).
inline FamilyTree sample_tree(const OffspringLaw& law, const EdgeDistribution& F, NodeId depth_cap,
                              NodeId node_cap, Rng& rng) {
    if (depth_cap == 0 || node_cap == 0) throw ParamOutOfRange("caps must be positive");
    FamilyTree t;
    t.parent = {0};
    t.child_begin = {0};
    t.child_count = {0};
    t.edge_r = {ExtResistance(0.0)};
    t.gen_offset = {0, 1};

    if (node_cap == 1) {
        t.truncated = true;  // no room to even attempt generation 1
        return t;
    }

    NodeId gen_begin = 0, gen_end = 1;
    for (NodeId g = 0; g < depth_cap && gen_begin < gen_end; ++g) {
        std::vector<NodeId> counts(gen_end - gen_begin);
        std::uint64_t total = 0;
        for (auto& c : counts) {
            c = law.sample(rng);
            total += c;
        }
        if (static_cast<std::uint64_t>(gen_end) + total > node_cap) {
            t.truncated = true;
            return t;
        }
        for (NodeId i = gen_begin; i < gen_end; ++i) {
            const NodeId c = counts[i - gen_begin];
            t.child_count[i] = c;
            t.child_begin[i] = static_cast<NodeId>(t.parent.size());
            for (NodeId k = 0; k < c; ++k) {
                t.parent.push_back(i);
                t.child_begin.push_back(0);
                t.child_count.push_back(0);
                t.edge_r.push_back(ExtResistance(F.sample(rng)));
            }
        }
        gen_begin = gen_end;
        gen_end = static_cast<NodeId>(t.parent.size());
        t.gen_offset.push_back(gen_end);
        if (gen_begin == gen_end) break;  // extinct
    }
    if (gen_begin < gen_end && t.depth() == depth_cap) t.truncated = true;
    return t;
}

/// R(T_[n]): the resistance between the root and generation n with that
/// whole generation shortcircuited, by the parallel-of-series recursion.
/// inf exactly when generation n is empty. Throws when the caps censored
/// the tree before generation n could be realized.
inline ExtResistance truncated_resistance(const FamilyTree& t, NodeId n) {
    if (n == 0) return ExtResistance(0.0);
    if (n > t.depth()) {
        if (t.truncated) throw TreeTruncatedBeforeN(n);
        return ExtResistance::infinite();  // extinct before n
    }
    const NodeId lo = t.gen_offset[n], hi = t.gen_offset[n + 1];
    if (lo == hi) return ExtResistance::infinite();

    // value[i] = resistance from node i down to generation n inside its subtree
    std::vector<double> value(t.gen_offset[n + 1], 0.0);
    for (NodeId i = lo; i < hi; ++i) value[i] = 0.0;
    for (NodeId g = n; g-- > 0;) {
        for (NodeId i = t.gen_offset[g]; i < t.gen_offset[g + 1]; ++i) {
            double conductance = 0.0;
            const NodeId cb = t.child_begin[i], cc = t.child_count[i];
            for (NodeId k = 0; k < cc; ++k) {
                const NodeId child = cb + k;
                if (child >= t.gen_offset[n + 1]) continue;
                conductance += 1.0 / (t.edge_r[child].ohms() + value[child]);
            }
            value[i] = 1.0 / conductance;  // childless -> 1/0 = inf
        }
    }
    return value[0] == std::numeric_limits<double>::infinity() ? ExtResistance::infinite()
                                                               : ExtResistance(value[0]);
}

struct ResistanceEstimate {
    ExtResistance value = ExtResistance::infinite();
    bool converged = false;  // stabilized, or exact inf from extinction
    bool censored = false;   // a cap stopped growth before stabilization
    NodeId depth = 0;        // final feasible generation evaluated
    NodeId nodes = 1;
};

/// Grows one tree lazily and reports R(T_[d]) at the last feasible depth.
/// Converged when the last two depth increments each moved the value by
/// less than policy.stabilization, or when the tree goes extinct (then the
/// value inf is exact). By monotonicity the reported value is a lower
/// bound for R(T).
inline ResistanceEstimate limit_resistance_estimate(const OffspringLaw& law, const EdgeDistribution& F,
                                                    Rng& rng, const GrowthPolicy& policy = {}) {
    if (policy.depth_cap == 0 || policy.node_cap == 0 || policy.stabilization <= 0.0)
        throw ParamOutOfRange("growth policy");
    FamilyTree t;
    t.parent = {0};
    t.child_begin = {0};
    t.child_count = {0};
    t.edge_r = {ExtResistance(0.0)};
    t.gen_offset = {0, 1};

    ResistanceEstimate est;
    double prev = std::numeric_limits<double>::quiet_NaN();
    int small_steps = 0;

    NodeId gen_begin = 0, gen_end = 1;
    for (NodeId g = 0; g < policy.depth_cap; ++g) {
        std::vector<NodeId> counts(gen_end - gen_begin);
        std::uint64_t total = 0;
        for (auto& c : counts) {
            c = law.sample(rng);
            total += c;
        }
        if (total == 0) {  // extinct: R(T) = inf exactly
            est.value = ExtResistance::infinite();
            est.converged = true;
            est.depth = g;
            est.nodes = gen_end;
            return est;
        }
        if (static_cast<std::uint64_t>(gen_end) + total > policy.node_cap) {
            est.censored = true;
            est.nodes = gen_end;
            return est;
        }
        for (NodeId i = gen_begin; i < gen_end; ++i) {
            const NodeId c = counts[i - gen_begin];
            t.child_count[i] = c;
            t.child_begin[i] = static_cast<NodeId>(t.parent.size());
            for (NodeId k = 0; k < c; ++k) {
                t.parent.push_back(i);
                t.child_begin.push_back(0);
                t.child_count.push_back(0);
                t.edge_r.push_back(ExtResistance(F.sample(rng)));
            }
        }
        gen_begin = gen_end;
        gen_end = static_cast<NodeId>(t.parent.size());
        t.gen_offset.push_back(gen_end);

        const ExtResistance r = truncated_resistance(t, g + 1);
        est.value = r;
        est.depth = g + 1;
        est.nodes = gen_end;
        if (!std::isnan(prev) && !r.is_infinite()) {
            small_steps = (r.ohms() - prev < policy.stabilization) ? small_steps + 1 : 0;
            if (small_steps >= 2) {
                est.converged = true;
                return est;
            }
        }
        prev = r.ohms();
    }
    est.censored = !est.converged;
    return est;
}

/// Subtree of nodes connected to the root through edges with r <= cap.
/// For offspring mean gamma and edge law F this is again a family tree,
/// with offspring mean gamma * F(cap).
inline FamilyTree filter_tree(const FamilyTree& t, double cap) {
    FamilyTree out;
    out.parent = {0};
    out.child_begin = {0};
    out.child_count = {0};
    out.edge_r = {ExtResistance(0.0)};
    out.gen_offset = {0, 1};
    out.truncated = t.truncated;

    std::vector<NodeId> survivors = {0};  // old ids, current generation
    std::vector<NodeId> new_id(t.size(), 0);
    for (NodeId g = 0; g < t.depth() && !survivors.empty(); ++g) {
        std::vector<NodeId> next;
        for (NodeId old : survivors) {
            const NodeId me = new_id[old];
            out.child_begin[me] = static_cast<NodeId>(out.parent.size());
            NodeId kept = 0;
            for (NodeId k = 0; k < t.child_count[old]; ++k) {
                const NodeId child = t.child_begin[old] + k;
                if (t.edge_r[child].is_infinite() || t.edge_r[child].ohms() > cap) continue;
                new_id[child] = static_cast<NodeId>(out.parent.size());
                out.parent.push_back(me);
                out.child_begin.push_back(0);
                out.child_count.push_back(0);
                out.edge_r.push_back(t.edge_r[child]);
                next.push_back(child);
                ++kept;
            }
            out.child_count[me] = kept;
        }
        if (next.empty()) break;
        out.gen_offset.push_back(static_cast<NodeId>(out.parent.size()));
        survivors = std::move(next);
    }
    return out;
}

/// r -> r + eps if r + eps <= cap, else inf, on every edge. Pointwise
/// monotone, so the truncated resistance never decreases under it.
inline FamilyTree apply_truncation(FamilyTree t, double eps, double cap) {
    if (eps < 0.0 || cap <= eps) throw ParamOutOfRange("need 0 <= eps < cap");
    for (std::size_t i = 1; i < t.edge_r.size(); ++i) {
        if (t.edge_r[i].is_infinite()) continue;
        const double lifted = t.edge_r[i].ohms() + eps;
        t.edge_r[i] = lifted <= cap ? ExtResistance(lifted) : ExtResistance::infinite();
    }
    return t;
}

/// Root-to-node path resistance (sum of edge resistances along the
/// ancestor line).
inline ExtResistance path_resistance(const FamilyTree& t, NodeId node) {
    ExtResistance acc(0.0);
    while (node != 0) {
        acc = series(acc, t.edge_r[node]);
        node = t.parent[node];
    }
    return acc;
}

namespace detail {

// resistance from `node` (at generation `gen`) down to generation m inside
// its subtree; recursion depth bounded by m
inline double descent_resistance(const FamilyTree& t, NodeId node, NodeId gen, NodeId m) {
    if (gen == m) return 0.0;
    double conductance = 0.0;
    for (NodeId k = 0; k < t.child_count[node]; ++k) {
        const NodeId child = t.child_begin[node] + k;
        const double below = descent_resistance(t, child, gen + 1, m);
        conductance += 1.0 / (t.edge_r[child].ohms() + below);  // inf edge or branch -> 0
    }
    return 1.0 / conductance;  // childless -> inf
}

}  // namespace detail

/// Resistance from `node` to its generation-m descendants inside its own
/// subtree (m is an absolute generation of t); inf when it has none.
inline ExtResistance subtree_resistance_to_generation(const FamilyTree& t, NodeId node, NodeId m) {
    const NodeId g0 = t.generation_of(node);
    if (m <= g0) throw ParamOutOfRange("target generation must lie below the node");
    if (m > t.depth()) {
        if (t.truncated) throw TreeTruncatedBeforeN(m);
        return ExtResistance::infinite();
    }
    const double r = detail::descent_resistance(t, node, g0, m);
    return r == std::numeric_limits<double>::infinity() ? ExtResistance::infinite() : ExtResistance(r);
}

/// Serializes a tree as a two-terminal network: root (vertex 0) against
/// the whole generation n as A1.
inline ResistorNetwork tree_to_network(const FamilyTree& t, NodeId n) {
    if (n == 0 || n > t.depth()) throw ParamOutOfRange("generation must be in [1, depth]");
    if (t.gen_offset[n] == t.gen_offset[n + 1]) throw ParamOutOfRange("generation n is empty");
    ResistorNetwork net;
    const NodeId limit = t.gen_offset[n + 1];
    net.vertices.resize(limit);
    std::iota(net.vertices.begin(), net.vertices.end(), VertexId{0});
    for (NodeId i = 1; i < limit; ++i) net.edges.push_back({t.parent[i], i, t.edge_r[i]});
    net.a0 = {0};
    for (NodeId i = t.gen_offset[n]; i < limit; ++i) net.a1.push_back(i);
    return net;
}

}  // namespace renet
