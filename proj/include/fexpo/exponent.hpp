#pragma once

#include <set>
#include <string>
#include <vector>

#include "fexpo/error.hpp"
#include "fexpo/expr.hpp"
#include "fexpo/graph.hpp"

namespace fexpo {

struct HurstParam {
    double H;
    double alpha_H;

    explicit HurstParam(double h) : H(h), alpha_H(h * (2 * h - 1)) {
        if (!(h > 0.5 && h < 0.75)) fail(errc::domain_error, "H must lie in (1/2, 3/4), got " + std::to_string(h));
    }
};

inline Expr affine(Q a, Q b) { return Expr::affine(a, b); }
inline Expr cst(Q a) { return Expr::constant(a); }

// ---- first exponent ------------------------------------------------------

// (2-I) - 1 + (1/2-2H) - H(s-2)
inline Expr first_case_a(int I, int s) { return affine(qfrac(3, 2) - I, Q(-s)); }
// (2-I) + 2(1/2-2H) - H(s-2)
inline Expr first_case_b(int I, int s) { return affine(Q(3 - I), Q(-2 - s)); }

inline bool first_is_case_a(ClassTag t) {
    return t == ClassTag::C2plus_odd || t == ClassTag::C2plus_posEven_max1 || t == ClassTag::C2plus_posEven_max2;
}

inline Expr first_exponent_component(const WeightedGraph& c) {
    auto st = stats(c);
    if (st.s <= 1) return cst(2 - st.I - st.s);
    auto cl = classify(c, Taxonomy::First);
    return first_is_case_a(cl.tag) ? first_case_a(st.I, st.s) : first_case_b(st.I, st.s);
}

inline Expr first_exponent(const Expr& alpha, const WeightedGraph& g) {
    std::vector<Expr> terms{alpha};
    for (auto& c : components(g)) terms.push_back(first_exponent_component(c));
    return Expr::sum(terms);
}

// ---- auxiliary functions of the second exponent ----------------------------

// phi_H(I) = -1/2 + max((1/2 - H) I, -1/2), I >= 2
inline Expr phi_H(int I) {
    if (I < 2) fail(errc::domain_error, "phi_H needs I >= 2");
    return cst(qfrac(-1, 2)) + Expr::max({affine(qfrac(I, 2), -I), cst(qfrac(-1, 2))});
}

// e2+(I) = (2-I) + 2 phi_H(I), I >= 2
inline Expr e2_plus(int I) {
    if (I < 2) fail(errc::domain_error, "e2_plus needs I >= 2");
    return cst(2 - I) + Q(2) * phi_H(I);
}

// e2-(I) = (2-I) - 1 + phi_H(2I), I >= 1
inline Expr e2_minus(int I) {
    if (I < 1) fail(errc::domain_error, "e2_minus needs I >= 1");
    return cst(1 - I) + phi_H(2 * I);
}

// delta_H(k) = 2 phi_H(k+1) - phi_H(2k) - phi_H(2), k >= 1
inline Expr delta_H(int k) {
    if (k < 1) fail(errc::domain_error, "delta_H needs k >= 1");
    return Q(2) * phi_H(k + 1) - phi_H(2 * k) - phi_H(2);
}

// Explicit three-branch form of delta_H written in H:
//   0 for H <= 1/2 + 1/(4k), 1/2 + (1-2H)k in between, 2H - 3/2 for H >= (k+2)/(2k+2).
inline Piecewise delta_H_closed(int k) {
    if (k < 1) fail(errc::domain_error, "delta_H needs k >= 1");
    Q h1 = qfrac(1, 2) + qfrac(1, 4 * k);
    Q h2 = qfrac(k + 2, 2 * k + 2);
    Affine zero{0, 0}, mid{qfrac(1, 2) + k, Q(-2 * k)}, tail{qfrac(-3, 2), 2};
    std::vector<Q> bp{H_LO};
    std::vector<Affine> pc;
    auto clip = [](Q x) { return std::clamp(x, H_LO, H_HI); };
    Q a = clip(h1), b = clip(h2);
    if (H_LO < a) {
        pc.push_back(zero);
        bp.push_back(a);
    }
    if (a < b) {
        pc.push_back(mid);
        bp.push_back(b);
    }
    if (b < H_HI) {
        pc.push_back(tail);
        bp.push_back(H_HI);
    }
    if (bp.back() != H_HI) bp.back() = H_HI;
    return Piecewise(bp, pc);
}

// ---- second exponent -----------------------------------------------------

inline bool in_c22plus(const WeightedGraph& c) {
    return classify(c, Taxonomy::Second).tag == ClassTag::C2_two_I2plus;
}

inline Expr e2_component(const WeightedGraph& c) {
    auto st = stats(c);
    if (st.s <= 1) return cst(2 - st.I - st.s);
    if (st.s == 2 && st.I == 1) return e2_minus(1);
    if (st.s == 2) return e2_plus(st.I);
    fail(errc::assumption_violated, "component with s > 2");
}

inline Expr e_T(const WeightedGraph& c) { return e2_minus(static_cast<int>(c.size())); }

inline void check_tset(const WeightedGraph& g, const std::set<component_id>& tset) {
    auto comps = components(g);
    for (auto id : tset) {
        auto* c = find_component(comps, id);
        if (!c || !in_c22plus(*c))
            fail(errc::tset_invalid, "component " + std::to_string(id) + " is not a path graph with weighted ends");
    }
}

inline Expr second_exponent(const Expr& alpha, const WeightedGraph& g, const std::set<component_id>& tset) {
    if (!satisfies_assumption_graph(g)) fail(errc::assumption_violated, "graph violates the s <= 2 shape assumption");
    check_tset(g, tset);
    std::vector<Expr> terms{alpha};
    for (auto& c : components(g)) terms.push_back(tset.count(c.min_label()) ? e_T(c) : e2_component(c));
    return Expr::sum(terms);
}

} // namespace fexpo
