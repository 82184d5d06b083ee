#pragma once

// Graph rewrites behind the exponent calculus: the action of D_{u_n} in both
// exponent regimes, the doubled graph for ||D^i I_n||^2, and the
// product-formula / duality reduction used to bound E[I_n].

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fexpo/chaos.hpp"
#include "fexpo/error.hpp"
#include "fexpo/exponent.hpp"
#include "fexpo/graph.hpp"

namespace fexpo {

struct GraphSumSpec {
    Expr alpha;
    WeightedGraph graph;
    std::set<component_id> t_set;
    Taxonomy taxonomy = Taxonomy::First;
    std::string provenance;  // opaque audit label for the weight family
    int multiplicity = 1;
};

inline void validate(const GraphSumSpec& s) {
    if (s.taxonomy == Taxonomy::First) {
        if (!s.t_set.empty()) fail(errc::tset_invalid, "first-regime spec carries a T-set");
    } else {
        if (!satisfies_assumption_graph(s.graph)) fail(errc::assumption_violated, "graph violates the shape assumption");
        check_tset(s.graph, s.t_set);
    }
}

inline Expr exponent(const GraphSumSpec& s) {
    return s.taxonomy == Taxonomy::First ? first_exponent(s.alpha, s.graph)
                                         : second_exponent(s.alpha, s.graph, s.t_set);
}

enum class CaseTag { A, B };

struct RewriteFamily {
    std::vector<GraphSumSpec> items;
    Expr max_exponent;  // value claimed by the rewrite law
    CaseTag case_tag = CaseTag::A;
};

// Pointwise max of the item exponents.
inline Expr items_max(const RewriteFamily& f) {
    std::vector<Expr> xs;
    for (auto& it : f.items) xs.push_back(exponent(it));
    return Expr::max(xs);
}

namespace detail {
inline const WeightedGraph& component_containing(const std::vector<WeightedGraph>& comps, vertex v) {
    for (auto& c : comps)
        if (c.has_vertex(v)) return c;
    fail(errc::index_out_of_range, "no component contains " + std::to_string(v));
}

inline std::vector<WeightedGraph> others(const std::vector<WeightedGraph>& comps, const WeightedGraph& skip) {
    std::vector<WeightedGraph> out;
    for (auto& c : comps)
        if (!(c == skip)) out.push_back(c);
    return out;
}

// [[v, fresh]]_1 (C v C0) v (all other components)
inline WeightedGraph attach_fresh(const std::vector<WeightedGraph>& comps, const WeightedGraph& c, vertex v,
                                  const WeightedGraph& c0, vertex fresh) {
    auto joined = edge_augment(vee(c, c0), {{make_pair_key(v, fresh), 1}});
    auto rest = others(comps, c);
    rest.insert(rest.begin(), joined);
    return vee(rest);
}

inline Expr two_h_minus(Q a) { return Expr::affine(a, 2); }  // 2H + a
} // namespace detail

// D_{u_n} in the first regime.
inline RewriteFamily du_rewrite_first(const GraphSumSpec& spec) {
    if (spec.taxonomy != Taxonomy::First) fail(errc::taxonomy_mismatch, "du_rewrite_first needs a first-regime spec");
    validate(spec);
    const auto& g = spec.graph;
    const vertex fresh = g.max_label() + 1;
    const auto c0 = WeightedGraph::singleton(fresh, 2);
    const auto comps = components(g);

    RewriteFamily fam;
    GraphSumSpec it0;
    it0.alpha = spec.alpha + detail::two_h_minus(qfrac(-3, 2));
    it0.graph = vee(vertex_contract(c0, {{fresh, -1}}), g);
    it0.taxonomy = Taxonomy::First;
    it0.provenance = "(0): D A";
    fam.items.push_back(it0);

    for (auto& [v, qv] : g.q()) {
        if (qv == 0) continue;
        const auto& cv = detail::component_containing(comps, v);
        GraphSumSpec it;
        it.alpha = spec.alpha + detail::two_h_minus(qfrac(-1, 2));
        it.graph = detail::attach_fresh(comps, cv, v, c0, fresh);
        it.taxonomy = Taxonomy::First;
        it.multiplicity = qv;
        it.provenance = "(v=" + std::to_string(v) + "): D I_q at v";
        fam.items.push_back(it);
    }

    bool any_pe1 = false;
    for (auto& c : comps)
        if (classify(c, Taxonomy::First).tag == ClassTag::C2plus_posEven_max1) any_pe1 = true;
    const Expr e = first_exponent(spec.alpha, g);
    fam.case_tag = any_pe1 ? CaseTag::B : CaseTag::A;
    fam.max_exponent = any_pe1 ? e : e + detail::two_h_minus(qfrac(-3, 2));
    return fam;
}

// D_{u_n} in the second regime.
inline RewriteFamily du_rewrite_second(const GraphSumSpec& spec) {
    if (spec.taxonomy != Taxonomy::Second) fail(errc::taxonomy_mismatch, "du_rewrite_second needs a second-regime spec");
    validate(spec);
    const auto& g = spec.graph;
    const vertex fresh = g.max_label() + 1;
    const auto c0 = WeightedGraph::singleton(fresh, 2);
    const auto comps = components(g);

    RewriteFamily fam;
    GraphSumSpec it0;
    it0.alpha = spec.alpha + detail::two_h_minus(qfrac(-3, 2));
    it0.graph = vee(vertex_contract(c0, {{fresh, -1}}), g);
    it0.t_set = spec.t_set;
    it0.taxonomy = Taxonomy::Second;
    it0.provenance = "(0): D A";
    fam.items.push_back(it0);

    int i_min = 0;
    for (auto& c : comps) {
        auto st = stats(c);
        const component_id id = c.min_label();
        if (st.s == 1) {
            // the only vertex with q = 1
            vertex v = 0;
            for (auto& [u, w] : c.q())
                if (w == 1) v = u;
            GraphSumSpec it;
            it.alpha = spec.alpha + detail::two_h_minus(qfrac(-1, 2));
            it.graph = detail::attach_fresh(comps, c, v, c0, fresh);
            it.t_set = spec.t_set;
            it.taxonomy = Taxonomy::Second;
            it.provenance = "(C=" + std::to_string(id) + "): C1";
            fam.items.push_back(it);
        } else if (st.s == 2 && st.q_bar == 2) {
            vertex e1 = c.min_label(), e2 = e1;
            if (st.I >= 2) path_weighted_ends(c, &e1, &e2);
            const bool in_t = spec.t_set.count(id) != 0;
            if (st.I == 1 || in_t) i_min = i_min == 0 ? st.I : std::min(i_min, st.I);
            int k = 1;
            for (vertex end : {e1, e2}) {
                GraphSumSpec it;
                it.alpha = spec.alpha + detail::two_h_minus(qfrac(-1, 2));
                it.graph = detail::attach_fresh(comps, c, end, c0, fresh);
                it.t_set = spec.t_set;
                if (in_t) it.t_set.erase(id);
                it.taxonomy = Taxonomy::Second;
                it.provenance = "(C=" + std::to_string(id) + "," + std::to_string(k++) + ")";
                fam.items.push_back(it);
            }
        }
    }

    const Expr e2 = second_exponent(spec.alpha, g, spec.t_set);
    if (i_min == 0) {
        fam.case_tag = CaseTag::A;
        fam.max_exponent = e2 + detail::two_h_minus(qfrac(-3, 2));
    } else {
        fam.case_tag = CaseTag::B;
        fam.max_exponent = e2 + delta_H(i_min);
    }
    return fam;
}

// Doubled graph whose functional is ||D^i I_n||^2 for the derivative pattern
// lambda (lambda_v derivatives landing on vertex v).
inline GraphSumSpec derivative_norm_graph(const GraphSumSpec& spec, const std::map<vertex, int>& lambda) {
    validate(spec);
    const auto& g = spec.graph;
    for (auto& [v, l] : lambda) {
        if (l < 0) fail(errc::domain_error, "lambda must be nonnegative");
        if (l > g.q(v)) fail(errc::weight_underflow, "lambda exceeds q at " + std::to_string(v));
    }
    const int m = g.max_label() - g.min_label() + 1;
    std::vector<WeightedGraph> parts;
    std::set<component_id> tset;
    for (auto& c : components(g)) {
        std::map<vpair, int> tau;
        for (auto& [v, w] : c.q()) {
            auto it = lambda.find(v);
            if (it != lambda.end() && it->second > 0) tau[{v, v + m}] = it->second;
        }
        auto doubled = vee(c, shift(c, m));
        if (tau.empty()) {
            parts.push_back(doubled);
            if (spec.t_set.count(c.min_label())) {
                tset.insert(c.min_label());
                tset.insert(c.min_label() + m);
            }
        } else {
            parts.push_back(edge_augment(doubled, tau));
        }
    }
    GraphSumSpec out;
    out.alpha = Q(2) * spec.alpha;
    out.graph = vee(parts);
    out.t_set = tset;
    out.taxonomy = spec.taxonomy;
    out.provenance = "||D^i I||^2";
    return out;
}

// Product formula on the target component followed by duality against the
// other weighted components; one output per (pi, i).
inline std::vector<GraphSumSpec> ibp_reduce(const GraphSumSpec& spec, component_id target) {
    if (spec.taxonomy != Taxonomy::First) fail(errc::taxonomy_mismatch, "ibp_reduce works in the first regime");
    validate(spec);
    const auto& g = spec.graph;
    const auto comps = components(g);
    const WeightedGraph* c1p = find_component(comps, target);
    if (!c1p) fail(errc::index_out_of_range, "no component " + std::to_string(target));
    const WeightedGraph& c1 = *c1p;
    if (c1.q_bar() == 0) fail(errc::component_has_no_weight, "target component has q = 0");

    // receiving vertices: weighted vertices of the other weighted components
    std::vector<vertex> recv;
    for (auto& c : comps)
        if (!(c == c1) && c.q_bar() > 0)
            for (auto& [v, w] : c.q())
                if (w > 0) recv.push_back(v);

    std::vector<GraphSumSpec> out;
    for (auto& term : chaos_product_expand(c1.q())) {
        const auto base = edge_augment(c1, term.pi);  // [[pi]] C1
        std::vector<vertex> src;
        for (auto& [v, r] : term.residual)
            if (r > 0) src.push_back(v);

        std::map<vertex, int> cap;
        for (vertex w : recv) cap[w] = g.q(w);
        std::map<vertex, int> to_zero;         // i(v, 0)
        std::map<vpair, int> tau;              // i(v, w)
        auto emit = [&] {
            int i0 = 0;
            std::map<vertex, int> sigma;
            for (auto& [v, k] : to_zero) {
                i0 += k;
                if (k) sigma[v] = -k;
            }
            std::set<vertex> touched;
            for (auto& [e, k] : tau) touched.insert(c1.has_vertex(e.first) ? e.second : e.first);
            std::vector<WeightedGraph> joined{vertex_contract(base, sigma)};
            std::vector<WeightedGraph> rest;
            for (auto& c : comps) {
                if (c == c1) continue;
                bool hit = false;
                for (vertex w : touched)
                    if (c.has_vertex(w)) hit = true;
                (hit ? joined : rest).push_back(c);
            }
            auto cpi = edge_augment(vee(joined), tau);
            rest.insert(rest.begin(), cpi);
            GraphSumSpec s;
            s.alpha = spec.alpha - Expr::constant(i0);
            s.graph = vee(rest);
            s.taxonomy = Taxonomy::First;
            s.provenance = "ibp(pi,i)";
            out.push_back(s);
        };
        // distribute residual[v] over recv + {0}
        auto rec = [&](auto&& self, std::size_t si, std::size_t ri, int left) -> void {
            if (si == src.size()) {
                emit();
                return;
            }
            vertex v = src[si];
            if (ri == recv.size()) {
                to_zero[v] = left;
                self(self, si + 1, 0, si + 1 < src.size() ? term.residual.at(src[si + 1]) : 0);
                to_zero.erase(v);
                return;
            }
            vertex w = recv[ri];
            int lim = std::min(left, cap[w]);
            for (int k = 0; k <= lim; ++k) {
                if (k) tau[make_pair_key(v, w)] = k;
                cap[w] -= k;
                self(self, si, ri + 1, left - k);
                cap[w] += k;
                tau.erase(make_pair_key(v, w));
            }
        };
        rec(rec, 0, 0, src.empty() ? 0 : term.residual.at(src[0]));
    }
    return out;
}

} // namespace fexpo
