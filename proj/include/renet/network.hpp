#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "renet/errors.hpp"
#include "renet/resistance.hpp"

namespace renet {

using VertexId = std::uint32_t;
using ClassId = std::uint32_t;

struct Edge {
    VertexId u, v;
    ExtResistance r;
};

/// Finite multigraph with resistances in [0, inf] and two disjoint
/// terminal vertex sets. Multi-edges are kept distinct; self-loops are
/// rejected by validate().
struct ResistorNetwork {
    std::vector<VertexId> vertices;  // sorted, unique
    std::vector<Edge> edges;
    std::vector<VertexId> a0, a1;

    void add_vertex(VertexId v) { vertices.push_back(v); }

    void add_edge(VertexId u, VertexId v, ExtResistance r) {
        if (u == v) throw ParamOutOfRange("self-loop edge");
        edges.push_back({u, v, r});
    }

    /// Sorts/uniques the vertex list and checks the type invariants.
    void validate() {
        std::sort(vertices.begin(), vertices.end());
        vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
        std::unordered_set<VertexId> declared(vertices.begin(), vertices.end());
        for (const auto& e : edges) {
            if (e.u == e.v) throw ParamOutOfRange("self-loop edge");
            if (!declared.count(e.u) || !declared.count(e.v))
                throw ParamOutOfRange("edge endpoint is not a declared vertex");
        }
        if (a0.empty() || a1.empty()) throw ParamOutOfRange("both terminal sets must be nonempty");
        std::unordered_set<VertexId> t0(a0.begin(), a0.end());
        for (VertexId v : a1)
            if (t0.count(v)) throw ParamOutOfRange("terminal sets intersect");
        for (VertexId v : a0)
            if (!declared.count(v)) throw ParamOutOfRange("terminal not a declared vertex");
        for (VertexId v : a1)
            if (!declared.count(v)) throw ParamOutOfRange("terminal not a declared vertex");
    }
};

struct QEdge {
    ClassId a, b;
    ExtResistance r;  // always > 0
};

/// The network after contracting zero-resistance classes: each terminal
/// set is merged first, then every maximal set of vertices joined by
/// r = 0 edges becomes one class. Edges internal to a class are dropped,
/// so every remaining edge has r > 0.
struct QuotientNetwork {
    std::unordered_map<VertexId, ClassId> class_of;
    ClassId num_classes = 0;
    std::vector<QEdge> edges;
    ClassId a0_class = 0, a1_class = 0;

    [[nodiscard]] bool terminals_merged() const { return a0_class == a1_class; }
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Contracts the network by its zero-resistance classes. Total: even when
/// the two terminal classes coincide the quotient is still produced (the
/// potential solver is what rejects that case).
inline QuotientNetwork quotient(const ResistorNetwork& net) {
    std::unordered_map<VertexId, std::size_t> index;
    index.reserve(net.vertices.size());
    for (std::size_t i = 0; i < net.vertices.size(); ++i) index.emplace(net.vertices[i], i);

    detail::UnionFind uf(net.vertices.size());
    for (std::size_t i = 1; i < net.a0.size(); ++i) uf.unite(index.at(net.a0[i]), index.at(net.a0[0]));
    for (std::size_t i = 1; i < net.a1.size(); ++i) uf.unite(index.at(net.a1[i]), index.at(net.a1[0]));
    for (const auto& e : net.edges)
        if (e.r.is_zero()) uf.unite(index.at(e.u), index.at(e.v));

    QuotientNetwork q;
    q.class_of.reserve(net.vertices.size());
    std::vector<ClassId> root_class(net.vertices.size(), static_cast<ClassId>(-1));
    for (std::size_t i = 0; i < net.vertices.size(); ++i) {
        const std::size_t root = uf.find(i);
        if (root_class[root] == static_cast<ClassId>(-1)) root_class[root] = q.num_classes++;
        q.class_of.emplace(net.vertices[i], root_class[root]);
    }
    for (const auto& e : net.edges) {
        const ClassId ca = q.class_of.at(e.u), cb = q.class_of.at(e.v);
        if (ca == cb) continue;  // internal (r = 0 by construction, or shorted in parallel)
        q.edges.push_back({ca, cb, e.r});
    }
    q.a0_class = q.class_of.at(net.a0.front());
    q.a1_class = q.class_of.at(net.a1.front());
    return q;
}

/// Views a quotient as a plain network on its class ids (used by the
/// quotient-invariance checks).
inline ResistorNetwork quotient_to_network(const QuotientNetwork& q) {
    ResistorNetwork net;
    net.vertices.resize(q.num_classes);
    std::iota(net.vertices.begin(), net.vertices.end(), VertexId{0});
    for (const auto& e : q.edges) net.edges.push_back({e.a, e.b, e.r});
    net.a0 = {q.a0_class};
    net.a1 = {q.a1_class};
    return net;
}

/// r -> r + eps if r + eps <= cap, else inf; applied to every edge.
inline ResistorNetwork truncate_resistances(ResistorNetwork net, double eps, double cap) {
    if (eps < 0.0 || cap <= eps) throw ParamOutOfRange("need 0 <= eps < cap");
    for (auto& e : net.edges) {
        if (e.r.is_infinite()) continue;
        const double lifted = e.r.ohms() + eps;
        e.r = lifted <= cap ? ExtResistance(lifted) : ExtResistance::infinite();
    }
    return net;
}

// ---------------------------------------------------------------------------
// Plain-text network format, one record per line:
//   terminals A0: <ids> A1: <ids>
//   edge <u> <v> <r>
// where <r> is a decimal or the token `inf`; zero is written `0`.
// ---------------------------------------------------------------------------

inline void write_network(std::ostream& out, const ResistorNetwork& net) {
    out << "terminals A0:";
    for (VertexId v : net.a0) out << ' ' << v;
    out << " A1:";
    for (VertexId v : net.a1) out << ' ' << v;
    out << '\n';
    for (const auto& e : net.edges) out << "edge " << e.u << ' ' << e.v << ' ' << to_string(e.r) << '\n';
}

inline ResistorNetwork read_network(std::istream& in) {
    ResistorNetwork net;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "terminals") {
            if (have_header) throw ParseError("duplicate terminals line");
            std::string tok;
            ls >> tok;
            if (tok != "A0:") throw ParseError("expected 'A0:' on terminals line");
            std::vector<VertexId>* target = &net.a0;
            while (ls >> tok) {
                if (tok == "A1:") {
                    target = &net.a1;
                    continue;
                }
                try {
                    target->push_back(static_cast<VertexId>(std::stoul(tok)));
                } catch (const std::exception&) {
                    throw ParseError("bad vertex id '" + tok + "' on line " + std::to_string(line_no));
                }
            }
            have_header = true;
        } else if (tag == "edge") {
            if (!have_header) throw ParseError("edge record before terminals line");
            unsigned long u = 0, v = 0;
            std::string rtok;
            if (!(ls >> u >> v >> rtok))
                throw ParseError("malformed edge record on line " + std::to_string(line_no));
            ExtResistance r = ExtResistance::infinite();
            if (rtok != "inf") {
                try {
                    r = ExtResistance(std::stod(rtok));
                } catch (const ParamOutOfRange&) {
                    throw ParseError("bad resistance '" + rtok + "' on line " + std::to_string(line_no));
                } catch (const std::exception&) {
                    throw ParseError("bad resistance '" + rtok + "' on line " + std::to_string(line_no));
                }
            }
            net.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v), r);
        } else {
            throw ParseError("unknown record '" + tag + "' on line " + std::to_string(line_no));
        }
    }
    if (!have_header) throw ParseError("missing terminals line");
    for (const auto& e : net.edges) {
        net.vertices.push_back(e.u);
        net.vertices.push_back(e.v);
    }
    for (VertexId v : net.a0) net.vertices.push_back(v);
    for (VertexId v : net.a1) net.vertices.push_back(v);
    net.validate();
    return net;
}

}  // namespace renet
