#pragma once

// Deterministic beta sums: rho_H, c_H^2, beta_n, graph sums and cycle sums.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/zeta.hpp>

#include "fexpo/error.hpp"
#include "fexpo/graph.hpp"

namespace fexpo {

inline void check_H(double H) {
    if (!(H > 0.5 && H < 0.75)) fail(errc::domain_error, "H must lie in (1/2, 3/4), got " + std::to_string(H));
}

// 1/2 (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H}); for |k| >= 2 written through
// expm1/log1p so the second difference does not cancel catastrophically.
inline double rho_H(long long k, double H) {
    double a = std::fabs(static_cast<double>(k));
    double p = 2 * H;
    if (a < 2) return 0.5 * (std::pow(a + 1, p) + std::pow(std::fabs(a - 1), p) - 2 * std::pow(a, p));
    double x = 1.0 / a;
    return 0.5 * std::pow(a, p) * (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
}

struct CH2Result {
    double value;
    double error_bound;
    long long cutoff;
};

// Sum over |k| <= K exactly, tail replaced by the midpoint of
//   alpha^2 sum_{k>K} k^{4H-4} <= sum_{k>K} rho(k)^2 <= alpha^2 sum_{k>=K} k^{4H-4}
// (second difference of a convex f'' is squeezed between f''(k) and f''(k-1)).
// The tail bound alpha^2 K^{4H-4} is made <= tol.
inline CH2Result c_H_squared_detail(double H, double tol, long long cap = 100000000LL) {
    check_H(H);
    if (!(tol > 0)) fail(errc::domain_error, "tol must be positive");
    const double alpha = H * (2 * H - 1);
    const double p = 4 * H - 4;
    double kneed = std::pow(tol / (alpha * alpha), 1.0 / p);
    if (!(kneed < static_cast<double>(cap)))
        fail(errc::tol_unachievable, "cutoff " + std::to_string(kneed) + " exceeds cap");
    long long K = std::max<long long>(16, static_cast<long long>(std::ceil(kneed)));

    double head = 0, tail_gap = 0;
    // pairwise-ish: sum small terms first for accuracy
    for (long long k = K; k >= 1; --k) {
        double r = rho_H(k, H);
        head += r * r;
    }
    // sum_{k>K} k^p = zeta(-p) - sum_{k<=K} k^p
    double partial = 0;
    for (long long k = K; k >= 1; --k) partial += std::pow(static_cast<double>(k), p);
    double z = boost::math::zeta(-p);
    double lower = z - partial;
    double upper = lower + std::pow(static_cast<double>(K), p);
    tail_gap = alpha * alpha * (upper - lower) / 2;
    double tail = alpha * alpha * (lower + upper) / 2;
    return {1.0 + 2 * (head + tail), 2 * tail_gap, K};
}

inline double c_H_squared(double H, double tol) { return c_H_squared_detail(H, tol).value; }

// Requested tolerance, loosened to what a cutoff of `cap` terms certifies;
// used where c_H^2 is an ingredient rather than the quantity under test.
inline constexpr long long kInternalCutoffCap = 20000000LL;

inline double c_H_squared_capped(double H, double tol, long long cap = kInternalCutoffCap) {
    check_H(H);
    const double alpha = H * (2 * H - 1);
    double floor_tol = alpha * alpha * std::pow(static_cast<double>(cap), 4 * H - 4) * 1.0001;
    return c_H_squared_detail(H, std::max(tol, floor_tol), cap).value;
}

inline double beta_n(long long j1, long long j2, long long n, double H, double T) {
    if (n < 1 || j1 < 1 || j2 < 1 || j1 > n || j2 > n)
        fail(errc::index_out_of_range, "beta_n indices must lie in 1..n");
    return std::pow(T / static_cast<double>(n), 2 * H) * rho_H(j1 - j2, H);
}

// table[d] = beta_n at lag d, d = 0..n-1
inline std::vector<double> beta_lags(long long n, double H, double T) {
    check_H(H);
    if (n < 1) fail(errc::domain_error, "n must be positive");
    std::vector<double> t(static_cast<std::size_t>(n));
    double s = std::pow(T / static_cast<double>(n), 2 * H);
    for (long long d = 0; d < n; ++d) t[d] = s * rho_H(d, H);
    return t;
}

// sup_j sum_{j2} beta_n(j, j2)
inline double beta_row_sum_sup(long long n, double H, double T) {
    auto t = beta_lags(n, H, T);
    std::vector<double> pre(n + 1, 0.0);
    for (long long d = 0; d < n; ++d) pre[d + 1] = pre[d] + t[d];
    double best = 0;
    for (long long j = 1; j <= n; ++j) best = std::max(best, pre[j] + pre[n - j + 1] - t[0]);
    return best;
}

inline constexpr double kDenseFlopBudget = 2e11;

// trace(R^k) from an explicit dense matrix; reference route.
inline double cycle_sum_dense(long long n, int k, double H, double T, double budget = kDenseFlopBudget) {
    if (k < 2) fail(errc::domain_error, "cycle length must be >= 2");
    double n3 = static_cast<double>(n) * n * n;
    if (n3 * (k / 2) > budget) fail(errc::too_large, "dense cycle sum over budget");
    auto t = beta_lags(n, H, T);
    Eigen::MatrixXd R(n, n);
    for (long long i = 0; i < n; ++i)
        for (long long j = 0; j < n; ++j) R(i, j) = t[std::abs(i - j)];
    // trace(R^k) = <R^a, R^b> with a + b = k
    int a = k / 2, b = k - a;
    Eigen::MatrixXd Pa = R, Pb;
    for (int i = 1; i < a; ++i) Pa = Pa * R;
    Pb = Pa;
    if (b > a) Pb = Pa * R;
    return (Pa.array() * Pb.array()).sum();
}

// trace(R^k) using the Toeplitz structure for k = 2, 3; dense otherwise.
inline double cycle_sum(long long n, int k, double H, double T, double budget = kDenseFlopBudget) {
    if (k < 2) fail(errc::domain_error, "cycle length must be >= 2");
    auto t = beta_lags(n, H, T);
    if (k == 2) {
        double s = 0;
        for (long long d = n - 1; d >= 1; --d) s += 2.0 * (n - d) * t[d] * t[d];
        return s + n * t[0] * t[0];
    }
    if (k == 3) {
        // positions j, j+a, j-b for lags a, b; span max-min of {0, a, -b}
        double s = 0;
        for (long long a = -(n - 1); a <= n - 1; ++a) {
            double ta = t[std::abs(a)];
            double row = 0;
            for (long long b = -(n - 1); b <= n - 1; ++b) {
                long long c = a + b;
                if (c <= -n || c >= n) continue;
                long long hi = std::max<long long>({0, a, -b}), lo = std::min<long long>({0, a, -b});
                long long cnt = n - (hi - lo);
                if (cnt <= 0) continue;
                row += static_cast<double>(cnt) * t[std::abs(b)] * t[std::abs(c)];
            }
            s += ta * row;
        }
        return s;
    }
    return cycle_sum_dense(n, k, H, T, budget);
}

inline constexpr double kExhaustiveBudget = 4e8;

namespace detail {

// Simple-graph view: every pair with theta > 0 is one edge.
inline bool underlying_is_tree(const WeightedGraph& c) {
    return c.theta().size() + 1 == c.size();
}

inline double tree_sum(const WeightedGraph& c, long long n, double H, double T) {
    auto lags = beta_lags(n, H, T);
    std::map<vertex, std::vector<std::pair<vertex, int>>> adj;
    for (auto& [e, th] : c.theta()) {
        adj[e.first].push_back({e.second, th});
        adj[e.second].push_back({e.first, th});
    }
    std::function<std::vector<double>(vertex, vertex)> msg = [&](vertex v, vertex parent) {
        std::vector<double> m(n, 1.0);
        for (auto [w, th] : adj[v]) {
            if (w == parent) continue;
            auto child = msg(w, v);
            std::vector<double> kern(n);
            for (long long d = 0; d < n; ++d) kern[d] = std::pow(lags[d], th);
            for (long long j = 0; j < n; ++j) {
                double s = 0;
                for (long long i = 0; i < n; ++i) s += kern[std::abs(j - i)] * child[i];
                m[j] *= s;
            }
        }
        return m;
    };
    auto root = msg(c.vertices().front(), c.vertices().front() - 1);
    double s = 0;
    for (double x : root) s += x;
    return s;
}

inline double exhaustive_sum(const WeightedGraph& c, long long n, double H, double T, double budget) {
    auto vs = c.vertices();
    double cost = std::pow(static_cast<double>(n), static_cast<double>(vs.size()));
    if (vs.size() > 4 || cost > budget) fail(errc::too_large, "exhaustive beta sum over budget");
    auto lags = beta_lags(n, H, T);
    std::map<vertex, int> idx;
    for (std::size_t i = 0; i < vs.size(); ++i) idx[vs[i]] = static_cast<int>(i);
    std::vector<std::tuple<int, int, int>> edges;
    for (auto& [e, th] : c.theta()) edges.push_back({idx[e.first], idx[e.second], th});
    std::vector<long long> j(vs.size(), 0);
    double total = 0;
    auto rec = [&](auto&& self, std::size_t d) -> void {
        if (d == vs.size()) {
            double p = 1;
            for (auto& [a, b, th] : edges) p *= std::pow(lags[std::abs(j[a] - j[b])], th);
            total += p;
            return;
        }
        for (long long x = 0; x < n; ++x) {
            j[d] = x;
            self(self, d + 1);
        }
    };
    rec(rec, 0);
    return total;
}

} // namespace detail

// sum over j in [n]^V of prod beta_n(j_v, j_v')^theta
inline double graph_beta_sum(const WeightedGraph& g, long long n, double H, double T,
                             double budget = kExhaustiveBudget) {
    check_H(H);
    for (auto& [v, qv] : g.q())
        if (qv != 0) fail(errc::domain_error, "graph_beta_sum needs all vertex weights zero");
    double prod = 1;
    for (auto& c : components(g)) {
        if (c.size() == 1) {
            prod *= static_cast<double>(n);
        } else if (detail::underlying_is_tree(c)) {
            prod *= detail::tree_sum(c, n, H, T);
        } else if (is_cycle_graph(c)) {
            prod *= cycle_sum(n, static_cast<int>(c.size()), H, T);
        } else {
            prod *= detail::exhaustive_sum(c, n, H, T, budget);
        }
    }
    return prod;
}

// ---- slope fitting --------------------------------------------------------

struct SlopeFit {
    std::vector<long long> n_grid;
    std::vector<double> values;
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
    int dropped = 0;  // smallest n values discarded as pre-asymptotic
};

inline SlopeFit fit_loglog(const std::vector<long long>& ns, const std::vector<double>& vs) {
    SlopeFit f{ns, vs};
    const std::size_t m = ns.size();
    double sx = 0, sy = 0;
    std::vector<double> x(m), y(m);
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = std::log(static_cast<double>(ns[i]));
        y[i] = std::log(std::fabs(vs[i]));
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / m, my = sy / m, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline SlopeFit fit_order(const std::vector<long long>& n_grid, const std::vector<double>& values,
                          bool discard_transient = true) {
    if (n_grid.size() != values.size()) fail(errc::length_mismatch, "n_grid and values differ in length");
    if (n_grid.size() < 4) fail(errc::domain_error, "fit_order needs at least 4 grid points");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] <= 0 || (i && n_grid[i] <= n_grid[i - 1]))
            fail(errc::domain_error, "n_grid must be positive and strictly increasing");
        if (!(values[i] > 0)) fail(errc::non_positive_value, "value at n=" + std::to_string(n_grid[i]));
    }
    auto f = fit_loglog(n_grid, values);
    if (discard_transient && f.r_squared < 0.999) {
        std::vector<long long> ns(n_grid.begin() + 2, n_grid.end());
        std::vector<double> vs(values.begin() + 2, values.end());
        auto g = fit_loglog(ns, vs);
        g.n_grid = n_grid;
        g.values = values;
        g.dropped = 2;
        return g;
    }
    return f;
}

} // namespace fexpo
