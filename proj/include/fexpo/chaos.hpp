#pragma once

// Product formula for multiple Wiener integrals of tensor powers:
//   prod_v I_{q_v}(f_v^{(x) q_v}) = sum_pi c(pi) I_{qbar - 2 pibar}( (x)_v f_v^{(x)(q_v - pi_v)} )
//                                              * prod_{[v,v']} <f_v, f_v'>^{pi([v,v'])}

#include <cstdint>
#include <map>
#include <vector>

#include "fexpo/error.hpp"
#include "fexpo/graph.hpp"

namespace fexpo {

struct ContractionTerm {
    std::map<vpair, int> pi;            // positive entries only
    std::int64_t constant = 1;          // c(pi)
    std::map<vertex, int> residual;     // q_v - pi_v
};

inline std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// c(pi) = prod_v q_v! / (q_v - pi_v)!  /  prod_e pi_e!
// Choose which pi_v slots of each vertex are contracted (ordered), then divide
// by the orderings within each edge bundle.
inline std::int64_t contraction_constant(const std::map<vertex, int>& q, const std::map<vpair, int>& pi) {
    std::map<vertex, int> used;
    for (auto& [e, k] : pi) {
        used[e.first] += k;
        used[e.second] += k;
    }
    std::int64_t c = 1;
    for (auto& [v, qv] : q) {
        int u = used.count(v) ? used[v] : 0;
        if (u > qv) fail(errc::weight_underflow, "pi_v exceeds q_v");
        c *= factorial(qv) / factorial(qv - u);
    }
    for (auto& [e, k] : pi) c /= factorial(k);
    return c;
}

// Enumerates Pi(q) = { pi : p(V) -> Z>=0 | pi_v <= q_v } with constants.
inline std::vector<ContractionTerm> chaos_product_expand(const std::map<vertex, int>& q) {
    if (q.empty()) fail(errc::domain_error, "chaos_product_expand needs at least one vertex");
    std::vector<vpair> pairs;
    std::vector<vertex> vs;
    for (auto& kv : q) vs.push_back(kv.first);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = i + 1; j < vs.size(); ++j) pairs.push_back({vs[i], vs[j]});

    std::vector<ContractionTerm> out;
    std::map<vertex, int> room = q;
    std::map<vpair, int> pi;
    auto rec = [&](auto&& self, std::size_t k) -> void {
        if (k == pairs.size()) {
            ContractionTerm t;
            t.pi = pi;
            t.constant = contraction_constant(q, pi);
            t.residual = room;
            out.push_back(std::move(t));
            return;
        }
        auto [a, b] = pairs[k];
        int lim = std::min(room[a], room[b]);
        for (int m = 0; m <= lim; ++m) {
            if (m) pi[pairs[k]] = m;
            room[a] -= m;
            room[b] -= m;
            self(self, k + 1);
            room[a] += m;
            room[b] += m;
            pi.erase(pairs[k]);
        }
    };
    rec(rec, 0);
    return out;
}

} // namespace fexpo
