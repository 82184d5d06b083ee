#pragma once

// Random graph generators and H grids shared by the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "fexpo/fexpo.hpp"

namespace fexpo::testing {

inline std::vector<double> h_grid(int points = 50) {
    std::vector<double> h;
    for (int i = 1; i <= points; ++i) h.push_back(0.5 + 0.25 * i / (points + 1));
    return h;
}

// Arbitrary small graph, labels start at `base`.
inline WeightedGraph random_graph(std::mt19937_64& rng, int max_vertices = 4, int max_q = 3, int base = 1) {
    std::uniform_int_distribution<int> nv(1, max_vertices), qd(0, max_q), td(0, 5);
    int n = nv(rng);
    std::map<vertex, int> q;
    std::map<vpair, int> th;
    for (int i = 0; i < n; ++i) q[base + i] = qd(rng);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            int t = td(rng);
            if (t >= 3) th[{base + i, base + j}] = t - 2;
        }
    return WeightedGraph(q, th);
}

// One connected component admissible for the second exponent, labels base..
inline WeightedGraph random_admissible_component(std::mt19937_64& rng, int base) {
    std::uniform_int_distribution<int> kind(0, 5), len(2, 4);
    std::map<vertex, int> q;
    std::map<vpair, int> th;
    switch (kind(rng)) {
    case 0: {  // singleton, q in {0,1,2}
        q[base] = std::uniform_int_distribution<int>(0, 2)(rng);
        break;
    }
    case 1:
    case 2: {  // tree with theta = 1, at most one vertex of weight 1
        int n = len(rng);
        for (int i = 0; i < n; ++i) q[base + i] = 0;
        for (int i = 1; i < n; ++i) th[{base + std::uniform_int_distribution<int>(0, i - 1)(rng), base + i}] = 1;
        if (kind(rng) % 2) q[base + std::uniform_int_distribution<int>(0, n - 1)(rng)] = 1;
        break;
    }
    case 3: {  // cycle
        int n = len(rng);
        for (int i = 0; i < n; ++i) q[base + i] = 0;
        if (n == 2) th[{base, base + 1}] = 2;
        else
            for (int i = 0; i < n; ++i) th[make_pair_key(base + i, base + (i + 1) % n)] = 1;
        break;
    }
    default: {  // path with weighted ends
        int n = len(rng);
        for (int i = 0; i < n; ++i) q[base + i] = (i == 0 || i == n - 1) ? 1 : 0;
        for (int i = 0; i + 1 < n; ++i) th[{base + i, base + i + 1}] = 1;
        break;
    }
    }
    return WeightedGraph(q, th);
}

struct AdmissibleSpec {
    WeightedGraph graph;
    std::set<component_id> t_set;
};

inline AdmissibleSpec random_admissible(std::mt19937_64& rng, int max_components = 3) {
    int k = std::uniform_int_distribution<int>(1, max_components)(rng);
    std::vector<WeightedGraph> parts;
    int base = 1;
    for (int i = 0; i < k; ++i) {
        parts.push_back(random_admissible_component(rng, base));
        base += static_cast<int>(parts.back().size());
    }
    AdmissibleSpec s{vee(parts), {}};
    for (auto& c : components(s.graph))
        if (in_c22plus(c) && rng() % 2) s.t_set.insert(c.min_label());
    return s;
}

// Random positive-definite gram from vectors with positive coordinates.
inline Eigen::MatrixXd random_gram(std::mt19937_64& rng, int nv, int dim = 5) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd F(nv, dim);
    for (int i = 0; i < nv; ++i)
        for (int j = 0; j < dim; ++j) F(i, j) = u(rng);
    return F * F.transpose();
}

// E[ prod_v I_{q_v}(f_v^{(x)q_v}) * I_R(g^{(x)R}) ] from the product expansion:
// only terms with total residual R survive, each contributing
// c(pi) R! prod_v <f_v,g>^{r_v} prod_e <f_v,f_w>^{pi_e}. gram carries g as the last row.
inline double expansion_moment(const std::vector<int>& q, const Eigen::MatrixXd& gram, int R) {
    std::map<vertex, int> qm;
    for (std::size_t v = 0; v < q.size(); ++v) qm[static_cast<vertex>(v)] = q[v];
    const int g = static_cast<int>(q.size());
    double total = 0;
    for (auto& t : chaos_product_expand(qm)) {
        int r = 0;
        for (auto& kv : t.residual) r += kv.second;
        if (r != R) continue;
        double term = static_cast<double>(t.constant) * static_cast<double>(factorial(R));
        for (auto& [e, k] : t.pi) term *= std::pow(gram(e.first, e.second), k);
        for (auto& [v, rv] : t.residual) term *= std::pow(gram(v, g), rv);
        total += term;
    }
    return total;
}

inline double oracle_moment(const std::vector<int>& q, const Eigen::MatrixXd& gram, int R) {
    ChaosConfig cfg{q, gram};
    cfg.q.push_back(R);
    return gaussian_moment_oracle(cfg);
}

} // namespace fexpo::testing
