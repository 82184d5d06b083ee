#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fexpo/error.hpp"

namespace fexpo {

using vertex = int;
// Unordered pair stored as (min, max).
using vpair = std::pair<vertex, vertex>;

inline vpair make_pair_key(vertex a, vertex b) { return a < b ? vpair{a, b} : vpair{b, a}; }

// Edge-vertex weighted graph (V, theta, q). Immutable; theta keeps only positive entries.
class WeightedGraph {
public:
    WeightedGraph() = default;

    WeightedGraph(std::map<vertex, int> q, std::map<vpair, int> theta) : q_(std::move(q)) {
        if (q_.empty()) fail(errc::domain_error, "graph must have at least one vertex");
        for (auto& [v, w] : q_)
            if (w < 0) fail(errc::weight_underflow, "negative vertex weight at " + std::to_string(v));
        for (auto& [e, w] : theta) {
            auto key = make_pair_key(e.first, e.second);
            if (key.first == key.second) fail(errc::domain_error, "self-loop at " + std::to_string(key.first));
            if (!q_.count(key.first) || !q_.count(key.second))
                fail(errc::domain_error, "edge references unknown vertex");
            if (w < 0) fail(errc::weight_underflow, "negative edge weight");
            if (w > 0) theta_[key] += w;
        }
    }

    static WeightedGraph singleton(vertex v, int q) { return WeightedGraph({{v, q}}, {}); }

    const std::map<vertex, int>& q() const { return q_; }
    const std::map<vpair, int>& theta() const { return theta_; }

    int q(vertex v) const {
        auto it = q_.find(v);
        if (it == q_.end()) fail(errc::index_out_of_range, "no vertex " + std::to_string(v));
        return it->second;
    }
    int theta(vertex a, vertex b) const {
        auto it = theta_.find(make_pair_key(a, b));
        return it == theta_.end() ? 0 : it->second;
    }
    bool has_vertex(vertex v) const { return q_.count(v) != 0; }
    std::size_t size() const { return q_.size(); }

    std::vector<vertex> vertices() const {
        std::vector<vertex> out;
        out.reserve(q_.size());
        for (auto& kv : q_) out.push_back(kv.first);
        return out;
    }
    vertex min_label() const { return q_.begin()->first; }
    vertex max_label() const { return q_.rbegin()->first; }

    int theta_bar() const {
        int s = 0;
        for (auto& kv : theta_) s += kv.second;
        return s;
    }
    int q_bar() const {
        int s = 0;
        for (auto& kv : q_) s += kv.second;
        return s;
    }
    int max_q() const {
        int m = 0;
        for (auto& kv : q_) m = std::max(m, kv.second);
        return m;
    }

    // Sum of theta over edges incident to v.
    int degree(vertex v) const {
        int d = 0;
        for (auto& [e, w] : theta_)
            if (e.first == v || e.second == v) d += w;
        return d;
    }

    WeightedGraph induced(const std::set<vertex>& vs) const {
        std::map<vertex, int> q;
        std::map<vpair, int> th;
        for (vertex v : vs) q[v] = this->q(v);
        for (auto& [e, w] : theta_)
            if (vs.count(e.first) && vs.count(e.second)) th[e] = w;
        return WeightedGraph(std::move(q), std::move(th));
    }

    friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
        return a.q_ == b.q_ && a.theta_ == b.theta_;
    }
    friend bool operator<(const WeightedGraph& a, const WeightedGraph& b) {
        return std::tie(a.q_, a.theta_) < std::tie(b.q_, b.theta_);
    }

private:
    std::map<vertex, int> q_;
    std::map<vpair, int> theta_;
};

struct ComponentStats {
    int I = 0;
    int theta_bar = 0;
    int q_bar = 0;
    int s = 0;
    friend bool operator==(const ComponentStats&, const ComponentStats&) = default;
};

// Connected components w.r.t. positive theta, ordered by smallest label.
inline std::vector<WeightedGraph> components(const WeightedGraph& g) {
    std::map<vertex, vertex> parent;
    for (auto& kv : g.q()) parent[kv.first] = kv.first;
    auto find = [&](vertex v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (auto& kv : g.theta()) {
        vertex a = find(kv.first.first), b = find(kv.first.second);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<vertex, std::set<vertex>> groups;
    for (auto& kv : g.q()) groups[find(kv.first)].insert(kv.first);
    std::vector<WeightedGraph> out;
    for (auto& [root, vs] : groups) out.push_back(g.induced(vs));
    std::sort(out.begin(), out.end(),
              [](const WeightedGraph& a, const WeightedGraph& b) { return a.min_label() < b.min_label(); });
    return out;
}

inline bool is_connected(const WeightedGraph& g) { return components(g).size() == 1; }

inline ComponentStats stats(const WeightedGraph& c) {
    if (!is_connected(c)) fail(errc::component_required, "stats() needs a connected graph");
    ComponentStats st;
    st.I = static_cast<int>(c.size());
    st.theta_bar = c.theta_bar();
    st.q_bar = c.q_bar();
    st.s = 2 * (st.theta_bar - (st.I - 1)) + st.q_bar;
    return st;
}

inline WeightedGraph vee(const std::vector<WeightedGraph>& gs) {
    if (gs.empty()) fail(errc::domain_error, "vee of an empty family");
    std::map<vertex, int> q;
    std::map<vpair, int> th;
    for (auto& g : gs) {
        for (auto& [v, w] : g.q())
            if (!q.emplace(v, w).second)
                fail(errc::disjointness_violated, "vertex " + std::to_string(v) + " appears twice");
        for (auto& kv : g.theta()) th.insert(kv);
    }
    return WeightedGraph(std::move(q), std::move(th));
}

inline WeightedGraph vee(const WeightedGraph& a, const WeightedGraph& b) { return vee(std::vector{a, b}); }

inline WeightedGraph shift(const WeightedGraph& g, int k) {
    std::map<vertex, int> q;
    std::map<vpair, int> th;
    for (auto& [v, w] : g.q()) q[v + k] = w;
    for (auto& [e, w] : g.theta()) th[{e.first + k, e.second + k}] = w;
    return WeightedGraph(std::move(q), std::move(th));
}

// <sigma>: q(v) + sigma(v), sigma <= 0.
inline WeightedGraph vertex_contract(const WeightedGraph& g, const std::map<vertex, int>& sigma) {
    auto q = g.q();
    for (auto& [v, s] : sigma) {
        if (s > 0) fail(errc::domain_error, "sigma must be nonpositive");
        auto it = q.find(v);
        if (it == q.end()) fail(errc::index_out_of_range, "sigma on unknown vertex " + std::to_string(v));
        it->second += s;
        if (it->second < 0) fail(errc::weight_underflow, "q(" + std::to_string(v) + ") + sigma < 0");
    }
    return WeightedGraph(std::move(q), g.theta());
}

// [[tau]]: theta += tau, q(v) -= tau_v.
inline WeightedGraph edge_augment(const WeightedGraph& g, const std::map<vpair, int>& tau) {
    auto q = g.q();
    auto th = g.theta();
    for (auto& [e, t] : tau) {
        if (t < 0) fail(errc::domain_error, "tau must be nonnegative");
        if (t == 0) continue;
        auto key = make_pair_key(e.first, e.second);
        if (key.first == key.second) fail(errc::domain_error, "tau on a self-pair");
        for (vertex v : {key.first, key.second}) {
            auto it = q.find(v);
            if (it == q.end()) fail(errc::index_out_of_range, "tau on unknown vertex " + std::to_string(v));
            it->second -= t;
        }
        th[key] += t;
    }
    for (auto& [v, w] : q)
        if (w < 0) fail(errc::weight_underflow, "tau_v exceeds q(" + std::to_string(v) + ")");
    return WeightedGraph(std::move(q), std::move(th));
}

// ---- shapes -------------------------------------------------------------

inline bool is_cycle_graph(const WeightedGraph& c) {
    if (c.q_bar() != 0 || c.size() < 2 || !is_connected(c)) return false;
    if (c.size() == 2) return c.theta_bar() == 2;
    if (c.theta().size() != c.size()) return false;
    for (auto& kv : c.theta())
        if (kv.second != 1) return false;
    for (vertex v : c.vertices())
        if (c.degree(v) != 2) return false;
    return true;
}

// Simple path with theta = 1, end vertices weighted 1 and inner vertices 0.
// On success returns the two ends in ascending order.
inline bool path_weighted_ends(const WeightedGraph& c, vertex* end1 = nullptr, vertex* end2 = nullptr) {
    if (c.size() < 2 || !is_connected(c)) return false;
    if (c.theta().size() != c.size() - 1) return false;
    for (auto& kv : c.theta())
        if (kv.second != 1) return false;
    std::vector<vertex> ends;
    for (vertex v : c.vertices()) {
        int d = c.degree(v);
        if (d > 2) return false;
        if (d == 1) {
            if (c.q(v) != 1) return false;
            ends.push_back(v);
        } else if (c.q(v) != 0) {
            return false;
        }
    }
    if (ends.size() != 2) return false;
    if (end1) *end1 = ends[0];
    if (end2) *end2 = ends[1];
    return true;
}

// ---- classification -----------------------------------------------------

enum class Taxonomy { First, Second };

enum class ClassTag {
    C0,
    C1,
    C2_zero,
    C2_two_I1,
    C2_two_I2plus,
    C2plus_odd,
    C2plus_posEven_max0,
    C2plus_posEven_max1,
    C2plus_posEven_max2,
    General,
};

inline const char* tag_name(ClassTag t) {
    switch (t) {
    case ClassTag::C0: return "C0";
    case ClassTag::C1: return "C1";
    case ClassTag::C2_zero: return "C2_zero";
    case ClassTag::C2_two_I1: return "C2_two_I1";
    case ClassTag::C2_two_I2plus: return "C2_two_I2plus";
    case ClassTag::C2plus_odd: return "C2plus_odd";
    case ClassTag::C2plus_posEven_max0: return "C2plus_posEven_max0";
    case ClassTag::C2plus_posEven_max1: return "C2plus_posEven_max1";
    case ClassTag::C2plus_posEven_max2: return "C2plus_posEven_max2";
    case ClassTag::General: return "General";
    }
    return "?";
}

struct ComponentClass {
    ClassTag tag = ClassTag::General;
    bool is_cycle = false;
    bool is_path_weighted_ends = false;
};

inline ComponentClass classify(const WeightedGraph& c, Taxonomy tax) {
    auto st = stats(c);
    ComponentClass cl;
    cl.is_cycle = is_cycle_graph(c);
    cl.is_path_weighted_ends = path_weighted_ends(c);
    if (st.s == 0) {
        cl.tag = ClassTag::C0;
    } else if (st.s == 1) {
        cl.tag = ClassTag::C1;
    } else if (tax == Taxonomy::First) {
        int qb = st.q_bar;
        if (qb == 0)
            cl.tag = ClassTag::C2_zero;
        else if (qb % 2 == 1)
            cl.tag = ClassTag::C2plus_odd;
        else if (c.max_q() <= qb / 2)
            cl.tag = ClassTag::C2plus_posEven_max0;
        else if (c.max_q() == qb / 2 + 1)
            cl.tag = ClassTag::C2plus_posEven_max1;
        else
            cl.tag = ClassTag::C2plus_posEven_max2;
    } else {
        if (st.s != 2)
            cl.tag = ClassTag::General;
        else if (st.I == 1)
            cl.tag = ClassTag::C2_two_I1;  // singleton with q = 2
        else if (cl.is_cycle)
            cl.tag = ClassTag::C2_zero;
        else if (cl.is_path_weighted_ends)
            cl.tag = ClassTag::C2_two_I2plus;
        else
            cl.tag = ClassTag::General;
    }
    return cl;
}

inline bool satisfies_assumption_connected(const WeightedGraph& c) {
    return classify(c, Taxonomy::Second).tag != ClassTag::General;
}

inline bool satisfies_assumption_graph(const WeightedGraph& g) {
    for (auto& c : components(g))
        if (!satisfies_assumption_connected(c)) return false;
    return true;
}

// Component id: smallest vertex label of the component.
using component_id = vertex;

inline const WeightedGraph* find_component(const std::vector<WeightedGraph>& comps, component_id id) {
    for (auto& c : comps)
        if (c.min_label() == id) return &c;
    return nullptr;
}

} // namespace fexpo
