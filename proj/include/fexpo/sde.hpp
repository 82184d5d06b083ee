#pragma once

// fOU and Euler/Young solvers on a fine grid, quadratic variation statistic.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fexpo/error.hpp"
#include "fexpo/fbm.hpp"
#include "fexpo/parallel.hpp"

namespace fexpo {

using ScalarFn = std::function<double(double)>;

struct SdeCoefficients {
    ScalarFn v1, v1_d1, v1_d2;  // V^[1] and derivatives
    ScalarFn v2, v2_d1;         // V^[2] and derivative
    double x0 = 0;
};

inline int observation_count(const FbmPath& path, int m) {
    if (m < 1) fail(errc::domain_error, "substeps must be >= 1");
    if (path.N % m != 0)
        fail(errc::resolution_mismatch, "path resolution " + std::to_string(path.N) + " not a multiple of " + std::to_string(m));
    return path.N / m;
}

// X on the fine grid: X_t = x0 e^{-bt} + sigma (B_t - b int_0^t e^{-b(t-s)} B_s ds),
// inner integral by the trapezoid rule.
inline std::vector<double> solve_fou_fine(const FbmPath& path, double b, double sigma, double x0) {
    if (b < 0 || sigma < 0) fail(errc::domain_error, "b and sigma must be nonnegative");
    const int N = path.N;
    const double h = path.T / N, eh = std::exp(-b * h);
    std::vector<double> x(N + 1);
    double I = 0;
    x[0] = x0;
    for (int k = 0; k < N; ++k) {
        I = eh * I + 0.5 * h * (eh * path.values[k] + path.values[k + 1]);
        double t = (k + 1) * h;
        x[k + 1] = x0 * std::exp(-b * t) + sigma * (path.values[k + 1] - b * I);
    }
    return x;
}

inline std::vector<double> subsample(const std::vector<double>& fine, int m) {
    std::vector<double> out;
    for (std::size_t i = 0; i < fine.size(); i += m) out.push_back(fine[i]);
    return out;
}

inline std::vector<double> solve_fou(const FbmPath& path, double b, double sigma, double x0, int m) {
    observation_count(path, m);
    return subsample(solve_fou_fine(path, b, sigma, x0), m);
}

// First-order scheme X_{k+1} = X_k + V2(X_k) dt + V1(X_k) dB on the fine grid.
inline std::vector<double> solve_sde_young_fine(const FbmPath& path, const SdeCoefficients& c) {
    if (!c.v1 || !c.v2) fail(errc::kernel_missing, "V1 and V2 are required");
    const int N = path.N;
    const double h = path.T / N;
    std::vector<double> x(N + 1);
    x[0] = c.x0;
    for (int k = 0; k < N; ++k)
        x[k + 1] = x[k] + c.v2(x[k]) * h + c.v1(x[k]) * (path.values[k + 1] - path.values[k]);
    return x;
}

inline std::vector<double> solve_sde_young(const FbmPath& path, const SdeCoefficients& c, int m) {
    observation_count(path, m);
    return subsample(solve_sde_young_fine(path, c), m);
}

struct QvReport {
    int n = 0;
    double v_n = 0;
    double v_inf = 0;
    double z_n = 0;
    double r_n = 0;
};

inline double r_n_of(int n, double H) { return std::pow(static_cast<double>(n), 2 * H - 1.5); }

inline QvReport quadratic_variation(const std::vector<double>& x, int n, double H, double v_inf) {
    if (static_cast<int>(x.size()) != n + 1) fail(errc::length_mismatch, "x_grid must have n+1 entries");
    double s = 0;
    for (int j = 1; j <= n; ++j) {
        double d = x[j] - x[j - 1];
        s += d * d;
    }
    QvReport r;
    r.n = n;
    r.v_n = std::pow(static_cast<double>(n), 2 * H - 1) * s;
    r.v_inf = v_inf;
    r.z_n = std::sqrt(static_cast<double>(n)) * (r.v_n - v_inf);
    r.r_n = r_n_of(n, H);
    return r;
}

inline double fou_v_inf(double sigma, double T, double H) { return sigma * sigma * std::pow(T, 2 * H); }

// T^{2H-1} int_0^T V1(X_t)^2 dt on the fine grid (trapezoid)
inline double general_v_inf(const std::vector<double>& fine, const ScalarFn& v1, double T, double H) {
    const int N = static_cast<int>(fine.size()) - 1;
    double h = T / N, s = 0;
    for (int k = 0; k <= N; ++k) {
        double a = v1(fine[k]);
        s += (k == 0 || k == N ? 0.5 : 1.0) * a * a;
    }
    return std::pow(T, 2 * H - 1) * s * h;
}

inline double trapezoid_square(const std::vector<double>& fine, double T) {
    const int N = static_cast<int>(fine.size()) - 1;
    double h = T / N, s = 0;
    for (int k = 0; k <= N; ++k) s += (k == 0 || k == N ? 0.5 : 1.0) * fine[k] * fine[k];
    return s * h;
}

struct FouParams {
    double H = 0.6, b = 1, sigma = 1, T = 1, x0 = 0;
};

struct FouPathStats {
    double v_n, z_n, int_x2;
};

// One fOU Monte Carlo run: per path V_n, Z_n and int_0^T X^2 dt (fine grid).
inline std::vector<FouPathStats> simulate_fou(const FouParams& p, int n, long long paths, int substeps,
                                              std::uint64_t seed, FbmMethod method, int threads) {
    if (n < 1 || paths < 1) fail(errc::domain_error, "n and paths must be positive");
    FbmSampler sampler(n * substeps, p.H, p.T, method);
    const double vinf = fou_v_inf(p.sigma, p.T, p.H);
    std::vector<FouPathStats> out(paths);
    parallel_for(static_cast<std::size_t>(paths), threads, [&](std::size_t i) {
        auto path = sampler.sample(seed, i);
        auto fine = solve_fou_fine(path, p.b, p.sigma, p.x0);
        auto obs = subsample(fine, substeps);
        auto q = quadratic_variation(obs, n, p.H, vinf);
        out[i] = {q.v_n, q.z_n, trapezoid_square(fine, p.T)};
    });
    return out;
}

} // namespace fexpo
