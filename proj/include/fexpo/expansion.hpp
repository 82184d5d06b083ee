#pragma once

// Expansion density, fOU random symbol (Monte Carlo and quadrature oracle),
// kernel functions and distribution-distance tools.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "fexpo/beta.hpp"
#include "fexpo/error.hpp"
#include "fexpo/sde.hpp"

namespace fexpo {

inline constexpr double kPi = 3.14159265358979323846;

// ---- quadrature helpers ---------------------------------------------------

inline double integrate_gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
    if (a == b) return 0.0;
    double err = 0;
    double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
    if (!std::isfinite(v) || err > 1e-7 * std::max(1.0, std::fabs(v)))
        fail(errc::quadrature_failure, "quadrature did not converge (error estimate " + std::to_string(err) + ")");
    return v;
}

// int_lo^hi f(u) u^{2H-2} du with u = w^{1/(2H-1)}, which removes the
// singular weight at u = 0.
inline double singular_weight_integral(const std::function<double(double)>& f, double lo, double hi, double H) {
    const double g = 2 * H - 1;
    const double p = 1.0 / g;
    return integrate_gk([&](double w) { return f(std::pow(w, p)); }, std::pow(lo, g), std::pow(hi, g)) / g;
}

// int_0^T f, for f behaving like tau^{2H-1} near 0: tau = v^{1/(2H-1)}.
inline double holder_origin_integral(const std::function<double(double)>& f, double T, double H, double tol = 1e-10) {
    const double p = 1.0 / (2 * H - 1);
    return integrate_gk([&](double v) { return f(std::pow(v, p)) * p * std::pow(v, p - 1); }, 0.0, std::pow(T, 1.0 / p),
                        tol);
}

// ---- constants of the fOU expansion -------------------------------------

inline double g_infinity_fou(double sigma, double T, double H, double tol = 1e-10) {
    if (!(sigma > 0 && T > 0)) fail(errc::domain_error, "sigma and T must be positive");
    double s2 = sigma * sigma;
    return 2 * c_H_squared_capped(H, tol) * s2 * s2 * std::pow(T, 4 * H);
}

// int_0^T g(X_t) dt with g(x) = 2 c_H^2 T^{4H-1} V1(x)^4, trapezoid on the fine grid
inline double g_infinity_general(const std::vector<double>& fine, const ScalarFn& v1, double T, double H,
                                 double tol = 1e-10) {
    const int N = static_cast<int>(fine.size()) - 1;
    double h = T / N, s = 0;
    for (int k = 0; k <= N; ++k) {
        double a = v1(fine[k]);
        s += (k == 0 || k == N ? 0.5 : 1.0) * a * a * a * a;
    }
    return 2 * c_H_squared_capped(H, tol) * std::pow(T, 4 * H - 1) * s * h;
}

// d_dot(tau, tau) = sigma alpha_H T int_0^tau e^{-bu} u^{2H-2} du
inline double d_dot_fou(double tau, double b, double sigma, double H, double T) {
    check_H(H);
    if (tau < 0) fail(errc::domain_error, "tau must be nonnegative");
    if (tau == 0) return 0.0;
    double alpha = H * (2 * H - 1);
    return sigma * alpha * T * singular_weight_integral([b](double u) { return std::exp(-b * u); }, 0.0, tau, H);
}

// d_dot(tau, t) = sigma alpha_H T int_0^t e^{-b(t-s)} |s - tau|^{2H-2} ds
inline double d_dot_fou_field(double tau, double t, double b, double sigma, double H, double T) {
    check_H(H);
    if (t <= 0) return 0.0;
    double alpha = H * (2 * H - 1), acc = 0;
    if (t <= tau) {
        // u = tau - s in [tau - t, tau]
        acc = singular_weight_integral([&](double u) { return std::exp(-b * (t - tau + u)); }, tau - t, tau, H);
    } else {
        // s < tau: u = tau - s in [0, tau]; s > tau: u = s - tau in [0, t - tau]
        if (tau > 0) acc += singular_weight_integral([&](double u) { return std::exp(-b * (t - tau + u)); }, 0.0, tau, H);
        acc += singular_weight_integral([&](double u) { return std::exp(-b * (t - tau - u)); }, 0.0, t - tau, H);
    }
    return sigma * alpha * T * acc;
}

inline double int_d_dot_fou(double b, double sigma, double H, double T) {
    return holder_origin_integral([&](double tau) { return d_dot_fou(tau, b, sigma, H, T); }, T, H);
}

// ---- symbols --------------------------------------------------------------

struct SymbolPolynomial {
    std::map<int, double> coef;      // degree -> coefficient
    std::map<int, double> variance;  // degree -> variance of the estimate (0 when exact)

    double at(int d) const {
        auto it = coef.find(d);
        return it == coef.end() ? 0.0 : it->second;
    }
    double se(int d) const {
        auto it = variance.find(d);
        return it == variance.end() ? 0.0 : std::sqrt(it->second);
    }
};

// E[X_tau^2] = x0^2 e^{-2 b tau} + 2 sigma^2 alpha_H int_0^tau e^{-2bc} J(tau - c) dc,
// J(s) = int_0^s e^{-bw} w^{2H-2} dw = b^{1-2H} gamma_lower(2H-1, b s).
inline double fou_second_moment(double tau, double b, double sigma, double x0, double H) {
    const double g = 2 * H - 1, alpha = H * g;
    auto J = [&](double s) {
        if (s <= 0) return 0.0;
        if (b == 0) return std::pow(s, g) / g;
        return std::pow(b, -g) * boost::math::tgamma_lower(g, b * s);
    };
    // s = tau - c = v^{1/(2H-1)} makes J(s) smooth in v
    const double p = 1.0 / g;
    double var = tau > 0 ? integrate_gk([&](double v) {
                               double s = std::pow(v, p);
                               return std::exp(-2 * b * (tau - s)) * J(s) * p * std::pow(v, p - 1);
                           }, 0.0, std::pow(tau, g), 1e-11)
                         : 0.0;
    return x0 * x0 * std::exp(-2 * b * tau) + 2 * sigma * sigma * alpha * var;
}

inline void check_fou_params(double b, double sigma, double H, double T) {
    check_H(H);
    if (b < 0 || sigma < 0 || !(T > 0)) fail(errc::domain_error, "need b >= 0, sigma >= 0, T > 0");
}

// c_1 = -2 b sigma int d_dot(tau,tau) dtau + T b^2 int E[X_tau^2] dtau
inline SymbolPolynomial fou_symbol_coefficient_exact(double b, double sigma, double x0, double H, double T) {
    check_fou_params(b, sigma, H, T);
    SymbolPolynomial s;
    if (b == 0) {
        s.coef[1] = 0;
        s.variance[1] = 0;
        return s;
    }
    double det = -2 * b * sigma * int_d_dot_fou(b, sigma, H, T);
    double ex2 = holder_origin_integral([&](double tau) { return fou_second_moment(tau, b, sigma, x0, H); }, T, H);
    s.coef[1] = det + T * b * b * ex2;
    s.variance[1] = 0;
    return s;
}

// Same coefficient with T b^2 E[int X^2] replaced by a sample mean.
inline SymbolPolynomial fou_symbol_from_samples(double b, double sigma, double H, double T,
                                                const std::vector<double>& int_x2) {
    check_fou_params(b, sigma, H, T);
    SymbolPolynomial s;
    if (b == 0) {
        s.coef[1] = 0;
        s.variance[1] = 0;
        return s;
    }
    double m = 0, v = 0;
    const double k = static_cast<double>(int_x2.size());
    for (double x : int_x2) m += x;
    m /= k;
    for (double x : int_x2) v += (x - m) * (x - m);
    v /= (k - 1);
    double tb2 = T * b * b;
    s.coef[1] = -2 * b * sigma * int_d_dot_fou(b, sigma, H, T) + tb2 * m;
    s.variance[1] = tb2 * tb2 * v / k;
    return s;
}

inline SymbolPolynomial fou_symbol_coefficient_mc(double b, double sigma, double x0, double H, double T,
                                                  long long n_paths, std::uint64_t seed, int fine_steps = 2048,
                                                  int threads = 1) {
    check_fou_params(b, sigma, H, T);
    if (n_paths < 2) fail(errc::domain_error, "need at least 2 paths");
    FbmSampler sampler(fine_steps, H, T, fine_steps <= kAutoCholeskyMax ? FbmMethod::Circulant : FbmMethod::Auto);
    std::vector<double> ix2(n_paths);
    parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t i) {
        auto path = sampler.sample(seed, i);
        ix2[i] = trapezoid_square(solve_fou_fine(path, b, sigma, x0), T);
    });
    return fou_symbol_from_samples(b, sigma, H, T, ix2);
}

// ---- general symbol evaluator -------------------------------------------

struct KernelField {
    std::function<double(double, double)> d_dot;   // (tau, t)
    std::function<double(double, double)> d_ddot;  // may be empty: identically zero
};

// a = V1^2, g = 2 c_H^2 T^{4H-1} V1^4 and the drift combinations
struct SymbolCoefficients {
    ScalarFn a_d1, a_d2, g_d1;
    ScalarFn a;
    ScalarFn v21;    // V2 V1
    ScalarFn v21_1;  // V2' V1 + V2 V1'
    ScalarFn v22;    // V2 V2
};

inline SymbolCoefficients symbol_coefficients_from(const SdeCoefficients& c, double H, double T, double tol = 1e-10) {
    if (!c.v1 || !c.v1_d1 || !c.v1_d2 || !c.v2 || !c.v2_d1)
        fail(errc::kernel_missing, "V1, V1', V1'', V2, V2' are all required");
    double k = 2 * c_H_squared_capped(H, tol) * std::pow(T, 4 * H - 1);
    SymbolCoefficients s;
    s.a = [c](double x) { double v = c.v1(x); return v * v; };
    s.a_d1 = [c](double x) { return 2 * c.v1(x) * c.v1_d1(x); };
    s.a_d2 = [c](double x) { double d = c.v1_d1(x); return 2 * (d * d + c.v1(x) * c.v1_d2(x)); };
    s.g_d1 = [c, k](double x) { double v = c.v1(x); return 4 * k * v * v * v * c.v1_d1(x); };
    s.v21 = [c](double x) { return c.v2(x) * c.v1(x); };
    s.v21_1 = [c](double x) { return c.v2_d1(x) * c.v1(x) + c.v2(x) * c.v1_d1(x); };
    s.v22 = [c](double x) { double v = c.v2(x); return v * v; };
    return s;
}

struct GeneralSymbol {
    double s30_1 = 0, s30_2 = 0, s10_1 = 0, s10_2 = 0;

    SymbolPolynomial poly() const {
        SymbolPolynomial p;
        p.coef[5] = s30_1;
        p.coef[3] = s30_2 + s10_1;
        p.coef[1] = s10_2;
        return p;
    }
};

// Kernel values on the quadrature grid tau_i = i T / nodes.
struct KernelTable {
    int nodes = 0;
    double T = 1;
    std::vector<std::vector<double>> dd, ddd;  // [tau][t]
};

inline KernelTable tabulate_kernels(const KernelField& k, double T, int nodes) {
    if (!k.d_dot) fail(errc::kernel_missing, "d_dot kernel is required");
    if (nodes < 2) fail(errc::domain_error, "need at least 2 quadrature nodes");
    KernelTable kt{nodes, T};
    kt.dd.assign(nodes + 1, std::vector<double>(nodes + 1, 0.0));
    kt.ddd = kt.dd;
    for (int i = 0; i <= nodes; ++i)
        for (int j = 0; j <= nodes; ++j) {
            double tau = T * i / nodes, t = T * j / nodes;
            kt.dd[i][j] = k.d_dot(tau, t);
            if (k.d_ddot) kt.ddd[i][j] = k.d_ddot(tau, t);
        }
    return kt;
}

// Linear interpolation of a fine-grid path onto the quadrature grid.
inline std::vector<double> resample_path(const std::vector<double>& fine, int nodes) {
    const int N = static_cast<int>(fine.size()) - 1;
    std::vector<double> x(nodes + 1);
    for (int i = 0; i <= nodes; ++i) {
        double pos = static_cast<double>(i) * N / nodes;
        int lo = std::min(static_cast<int>(pos), N - 1);
        double w = pos - lo;
        x[i] = (1 - w) * fine[lo] + w * fine[lo + 1];
    }
    return x;
}

// Per-path trapezoid evaluation of the four limit functionals.
inline GeneralSymbol general_symbols_evaluate(const std::vector<double>& fine, const KernelTable& kt,
                                              const SymbolCoefficients& c, double H) {
    if (!c.a || !c.a_d1 || !c.a_d2 || !c.g_d1 || !c.v21 || !c.v21_1 || !c.v22)
        fail(errc::kernel_missing, "symbol coefficient functions missing");
    const int m = kt.nodes;
    const double T = kt.T, h = T / m;
    const double c2 = c_H_squared_capped(H, 1e-10);
    auto x = resample_path(fine, m);
    std::vector<double> a(m + 1), a1(m + 1), a2(m + 1), g1(m + 1), v21(m + 1), v211(m + 1), v22(m + 1), w(m + 1);
    for (int i = 0; i <= m; ++i) {
        a[i] = c.a(x[i]);
        a1[i] = c.a_d1(x[i]);
        a2[i] = c.a_d2(x[i]);
        g1[i] = c.g_d1(x[i]);
        v21[i] = c.v21(x[i]);
        v211[i] = c.v21_1(x[i]);
        v22[i] = c.v22(x[i]);
        w[i] = (i == 0 || i == m ? 0.5 : 1.0) * h;
    }
    GeneralSymbol s;
    double b1 = 0, b2 = 0, b3 = 0;
    for (int i = 0; i <= m; ++i) {
        const auto& dd = kt.dd[i];
        const auto& ddd = kt.ddd[i];
        double gint = 0, in1 = 0, in2 = 0, in3 = 0;
        for (int j = 0; j <= m; ++j) {
            gint += w[j] * g1[j] * dd[j];
            in1 += w[j] * (a2[j] * dd[j] * dd[j] + a1[j] * ddd[j]) * a[j];
            in2 += w[j] * a1[j] * dd[j] * a[j];
            double q = a1[j] * dd[j];
            in3 += w[j] * q * q;
        }
        double dtt = dd[i];
        s.s30_1 += w[i] * gint * gint * a[i] / (4 * T);
        b1 += w[i] * in1 * a[i];
        b2 += w[i] * in2 * a1[i] * dtt;
        b3 += w[i] * in3 * a[i];
        s.s10_1 += w[i] * gint * (0.5 / T * a1[i] * dtt + v21[i]);
        s.s10_2 += w[i] * ((a2[i] * dtt * dtt + a1[i] * kt.ddd[i][i]) / T + 2 * v211[i] * dtt + T * v22[i]);
    }
    s.s30_2 = 2 * std::pow(T, 4 * H - 2) * c2 * (b1 + b2 + b3);
    return s;
}

inline KernelField fou_kernels(double b, double sigma, double H, double T) {
    KernelField k;
    k.d_dot = [=](double tau, double t) { return d_dot_fou_field(tau, t, b, sigma, H, T); };
    return k;
}

inline SdeCoefficients fou_coefficients(double b, double sigma, double x0) {
    SdeCoefficients c;
    c.v1 = [sigma](double) { return sigma; };
    c.v1_d1 = [](double) { return 0.0; };
    c.v1_d2 = [](double) { return 0.0; };
    c.v2 = [b](double x) { return -b * x; };
    c.v2_d1 = [b](double) { return -b; };
    c.x0 = x0;
    return c;
}

// ---- expansion density ----------------------------------------------------

struct ExpansionDensity {
    double g_inf = 1;
    double r_n = 0;
    SymbolPolynomial symbol;
};

// probabilists' Hermite polynomial He_k
inline double hermite_he(int k, double x) {
    if (k == 0) return 1.0;
    double p0 = 1, p1 = x;
    for (int j = 1; j < k; ++j) {
        double p2 = x * p1 - j * p0;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

inline double normal_pdf(double z, double var) { return std::exp(-0.5 * z * z / var) / std::sqrt(2 * kPi * var); }
inline double normal_cdf(double z, double var) { return 0.5 * std::erfc(-z / std::sqrt(2 * var)); }

inline void check_density(const ExpansionDensity& d) {
    if (!(d.g_inf > 0)) fail(errc::domain_error, "g_inf must be positive");
    for (auto& [k, c] : d.symbol.coef)
        if (k < 0 || k > 5) fail(errc::domain_error, "symbol degree must lie in 0..5");
}

// phi(z; 0, G) (1 + r_n sum_k c_k He_k(z / sqrt G) / G^{k/2})
inline double expansion_density(const ExpansionDensity& d, double z) {
    check_density(d);
    double sg = std::sqrt(d.g_inf), u = z / sg, corr = 0;
    for (auto& [k, c] : d.symbol.coef) corr += c * hermite_he(k, u) / std::pow(sg, k);
    return normal_pdf(z, d.g_inf) * (1 + d.r_n * corr);
}

// Antiderivative via int_{-inf}^v He_k phi = -He_{k-1}(v) phi(v) for k >= 1.
inline double expansion_cdf(const ExpansionDensity& d, double z) {
    check_density(d);
    double sg = std::sqrt(d.g_inf), u = z / sg, corr = 0;
    for (auto& [k, c] : d.symbol.coef) {
        if (k == 0) corr += c * normal_cdf(u, 1.0);
        else corr -= c * hermite_he(k - 1, u) * normal_pdf(u, 1.0) / std::pow(sg, k);
    }
    return normal_cdf(u, 1.0) + d.r_n * corr;
}

// CDF by composite Simpson integration of the density; reference route.
inline double expansion_cdf_numeric(const ExpansionDensity& d, double z, int panels = 4000) {
    double sg = std::sqrt(d.g_inf), lo = -12 * sg;
    if (z <= lo) return 0.0;
    int m = panels * 2;
    double h = (z - lo) / m, s = expansion_density(d, lo) + expansion_density(d, z);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4 : 2) * expansion_density(d, lo + i * h);
    return s * h / 3;
}

// ---- Kolmogorov distance, KS tests and bootstrap -------------------------

using Cdf = std::function<double(double)>;

inline constexpr std::size_t kMinKsSamples = 1000;

// sup_x |F_emp(x) - F(x)| from sorted samples
inline double kolmogorov_distance_sorted(const std::vector<double>& sorted, const Cdf& F) {
    const double n = static_cast<double>(sorted.size());
    double d = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = F(sorted[i]);
        d = std::max({d, (i + 1) / n - f, f - i / n});
    }
    return d;
}

inline double kolmogorov_distance(std::vector<double> samples, const Cdf& F) {
    if (samples.size() < kMinKsSamples) fail(errc::domain_error, "need at least 1000 samples");
    std::sort(samples.begin(), samples.end());
    return kolmogorov_distance_sorted(samples, F);
}

inline double kolmogorov_distance(const std::vector<double>& samples, const ExpansionDensity& d) {
    return kolmogorov_distance(samples, [&d](double z) { return expansion_cdf(d, z); });
}

// Asymptotic Kolmogorov tail Q(l) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 l^2}
inline double kolmogorov_q(double l) {
    if (l < 0.2) return 1.0;
    double s = 0;
    for (int k = 1; k <= 100; ++k) {
        double t = std::exp(-2.0 * k * k * l * l);
        s += (k % 2 ? 1 : -1) * t;
        if (t < 1e-17) break;
    }
    return std::clamp(2 * s, 0.0, 1.0);
}

struct KsResult {
    double d;
    double p_value;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) fail(errc::domain_error, "empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = a.size(), nb = b.size();
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    double ne = na * nb / (na + nb), sq = std::sqrt(ne);
    return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

struct BootstrapCi {
    double estimate;
    double lo;
    double hi;
};

// Percentile bootstrap for D(samples, F) - D(samples, G). Each replicate is a
// multinomial reweighting of the sorted sample, so no re-sorting is needed.
inline BootstrapCi bootstrap_distance_difference(std::vector<double> samples, const Cdf& F, const Cdf& G,
                                                 int reps, std::uint64_t seed, double level = 0.95) {
    if (samples.size() < kMinKsSamples) fail(errc::domain_error, "need at least 1000 samples");
    if (reps < 10) fail(errc::domain_error, "need at least 10 bootstrap replicates");
    std::sort(samples.begin(), samples.end());
    const std::size_t n = samples.size();
    std::vector<double> fv(n), gv(n);
    for (std::size_t i = 0; i < n; ++i) {
        fv[i] = F(samples[i]);
        gv[i] = G(samples[i]);
    }
    auto dist = [&](const std::vector<int>& cnt) {
        double df = 0, dg = 0, below = 0;
        const double N = static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!cnt[i]) continue;
            double lo = below / N, hi = (below + cnt[i]) / N;
            df = std::max({df, hi - fv[i], fv[i] - lo});
            dg = std::max({dg, hi - gv[i], gv[i] - lo});
            below += cnt[i];
        }
        return df - dg;
    };
    std::vector<int> ones(n, 1);
    BootstrapCi ci{dist(ones), 0, 0};
    std::vector<double> reps_v;
    auto rng = path_rng(seed, 0xb007);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<int> cnt(n);
    for (int r = 0; r < reps; ++r) {
        std::fill(cnt.begin(), cnt.end(), 0);
        for (std::size_t k = 0; k < n; ++k) ++cnt[pick(rng)];
        reps_v.push_back(dist(cnt));
    }
    std::sort(reps_v.begin(), reps_v.end());
    double alpha = (1 - level) / 2;
    auto q = [&](double p) {
        double pos = p * (reps_v.size() - 1);
        std::size_t i = static_cast<std::size_t>(pos);
        double f = pos - i;
        return i + 1 < reps_v.size() ? reps_v[i] * (1 - f) + reps_v[i + 1] * f : reps_v.back();
    };
    ci.lo = q(alpha);
    ci.hi = q(1 - alpha);
    return ci;
}

} // namespace fexpo
