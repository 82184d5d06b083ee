#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss.hpp>

#include "support.hpp"

using namespace fexpo;
using Catch::Approx;

static FbmPath coarsen(const FbmPath& p, int factor) {
    FbmPath q{p.H, p.T, p.N / factor, {}};
    for (int i = 0; i <= p.N; i += factor) q.values.push_back(p.values[i]);
    return q;
}

TEST_CASE("fBm covariance values") {
    CHECK(fbm_covariance(0, 0.7, 0.6) == 0.0);
    CHECK(fbm_covariance(0.7, 0.7, 0.6) == Approx(std::pow(0.7, 1.2)));
    CHECK(fbm_covariance(1, 2, 0.6) == Approx(std::pow(2.0, 0.2)).epsilon(1e-14));
    CHECK(fbm_covariance(1, 2, 0.6) == Approx(1.148698354997035).epsilon(1e-12));
    CHECK(fbm_covariance(0.3, 0.9, 0.7) == fbm_covariance(0.9, 0.3, 0.7));
}

TEST_CASE("sampler determinism and shape") {
    for (auto m : {FbmMethod::Cholesky, FbmMethod::Circulant, FbmMethod::Auto}) {
        auto a = sample_fbm(50, 0.6, 2.0, 99, m, 3), b = sample_fbm(50, 0.6, 2.0, 99, m, 3);
        CHECK(a.values == b.values);
        CHECK(a.values.size() == 51);
        CHECK(a.values[0] == 0.0);
        for (double v : a.values) CHECK(std::isfinite(v));
        CHECK(sample_fbm(50, 0.6, 2.0, 99, m, 4).values != a.values);
        CHECK(sample_fbm(50, 0.6, 2.0, 100, m, 3).values != a.values);
    }
    CHECK(FbmSampler(100, 0.6, 1.0).method() == FbmMethod::Cholesky);
    CHECK(FbmSampler(4096, 0.6, 1.0).method() == FbmMethod::Circulant);
    CHECK_THROWS_AS(FbmSampler(5000, 0.6, 1.0, FbmMethod::Cholesky), error);
    CHECK_THROWS_AS(FbmSampler(0, 0.6, 1.0), error);
    CHECK_THROWS_AS(FbmSampler(10, 0.8, 1.0), error);
}

TEST_CASE("N = 1 gives a single centred Gaussian with variance T^{2H}") {
    const int P = 40000;
    const double T = 2.0, H = 0.65, var = std::pow(T, 2 * H);
    FbmSampler s(1, H, T, FbmMethod::Cholesky);
    double m = 0, m2 = 0;
    for (int i = 0; i < P; ++i) {
        double x = s.sample(7, i).values[1];
        m += x;
        m2 += x * x;
    }
    m /= P;
    m2 /= P;
    CHECK(std::fabs(m) < 4 * std::sqrt(var / P));
    CHECK(std::fabs(m2 - var) < 4 * var * std::sqrt(2.0 / P));
}

TEST_CASE("sampled covariance matches fBm covariance") {
    const int N = 12, P = 30000;
    const double H = 0.6, T = 1.0;
    for (auto method : {FbmMethod::Cholesky, FbmMethod::Circulant}) {
        FbmSampler s(N, H, T, method);
        Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(N + 1, N + 1);
        for (int p = 0; p < P; ++p) {
            auto path = s.sample(11, p);
            Eigen::Map<const Eigen::VectorXd> v(path.values.data(), N + 1);
            acc += v * v.transpose();
        }
        acc /= P;
        for (int i = 1; i <= N; ++i)
            for (int j = i; j <= N; ++j) {
                double ti = T * i / N, tj = T * j / N;
                double c = fbm_covariance(ti, tj, H);
                double se = std::sqrt((std::pow(ti, 2 * H) * std::pow(tj, 2 * H) + c * c) / P);
                INFO(method_name(method) << " i=" << i << " j=" << j);
                CHECK(std::fabs(acc(i, j) - c) < 4 * se);
            }
    }
}

TEST_CASE("increments are stationary") {
    const int N = 32, P = 20000;
    FbmSampler s(N, 0.7, 1.0, FbmMethod::Circulant);
    std::vector<double> var(N, 0.0);
    for (int p = 0; p < P; ++p) {
        auto path = s.sample(5, p);
        for (int j = 0; j < N; ++j) {
            double d = path.values[j + 1] - path.values[j];
            var[j] += d * d;
        }
    }
    double expect = std::pow(1.0 / N, 1.4);
    for (double v : var) CHECK(std::fabs(v / P - expect) < 4 * expect * std::sqrt(2.0 / P));
}

TEST_CASE("fOU solver limits") {
    auto path = sample_fbm(256, 0.6, 1.0, 1, FbmMethod::Cholesky);
    auto x = solve_fou(path, 1.5, 0.0, 2.0, 8);
    REQUIRE(x.size() == 33);
    for (int i = 0; i <= 32; ++i) CHECK(x[i] == Approx(2.0 * std::exp(-1.5 * i / 32.0)).epsilon(1e-14));

    auto y = solve_fou(path, 1e-8, 0.7, 0.3, 8);
    for (int i = 0; i <= 32; ++i) CHECK(std::fabs(y[i] - (0.3 + 0.7 * path.values[8 * i])) < 1e-6);

    CHECK_THROWS_AS(solve_fou(path, 1.0, 1.0, 0.0, 3), error);
    CHECK_THROWS_AS(solve_fou(path, -1.0, 1.0, 0.0, 8), error);
    CHECK(observation_count(path, 8) == 32);
}

TEST_CASE("fOU terminal variance matches a quadrature oracle") {
    const double H = 0.6, b = 1.0, sigma = 1.0, T = 1.0;
    using GL = boost::math::quadrature::gauss<double, 30>;
    // Var(B_T - b int e^{-b(T-s)} B_s ds) from the covariance kernel
    auto k = [&](double s) { return std::exp(-b * (T - s)); };
    double cross = GL::integrate([&](double s) { return k(s) * fbm_covariance(s, T, H); }, 0.0, T);
    double dbl = GL::integrate(
        [&](double s) {
            return GL::integrate([&](double u) { return k(s) * k(u) * fbm_covariance(s, u, H); }, 0.0, T);
        },
        0.0, T);
    double oracle = sigma * sigma * (std::pow(T, 2 * H) - 2 * b * cross + b * b * dbl);

    const int P = 20000;
    FbmSampler s(512, H, T, FbmMethod::Cholesky);
    double m2 = 0;
    for (int p = 0; p < P; ++p) {
        double xt = solve_fou_fine(s.sample(21, p), b, sigma, 0.0).back();
        m2 += xt * xt;
    }
    m2 /= P;
    CHECK(std::fabs(m2 - oracle) < 4 * oracle * std::sqrt(2.0 / P));
}

TEST_CASE("Euler scheme converges to the fOU solution") {
    const double b = 1.2, sigma = 0.8, x0 = 0.5;
    SdeCoefficients c;
    c.v1 = [&](double) { return sigma; };
    c.v1_d1 = c.v1_d2 = [](double) { return 0.0; };
    c.v2 = [&](double x) { return -b * x; };
    c.v2_d1 = [&](double) { return -b; };
    c.x0 = x0;
    auto fine = sample_fbm(16 * 256, 0.6, 1.0, 8, FbmMethod::Circulant);
    auto ref = solve_fou(fine, b, sigma, x0, 256);
    double prev = 1e300;
    for (int m : {4, 16, 64}) {
        auto x = solve_sde_young(coarsen(fine, 256 / m), c, m);
        double err = 0;
        for (std::size_t i = 0; i < x.size(); ++i) err = std::max(err, std::fabs(x[i] - ref[i]));
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 0.02);

    // V1 = 0: plain Euler for the ODE; V2 = 0, V1 = 1: X = x0 + B
    SdeCoefficients ode = c;
    ode.v1 = [](double) { return 0.0; };
    auto xo = solve_sde_young(coarsen(fine, 1), ode, 256);
    CHECK(xo.back() == Approx(x0 * std::exp(-b)).epsilon(1e-3));
    SdeCoefficients bm = c;
    bm.v1 = [](double) { return 1.0; };
    bm.v2 = [](double) { return 0.0; };
    auto xb = solve_sde_young(fine, bm, 256);
    for (std::size_t i = 0; i < xb.size(); ++i) CHECK(xb[i] == Approx(x0 + fine.values[256 * i]).margin(1e-12));

    SdeCoefficients none;
    CHECK_THROWS_AS(solve_sde_young(fine, none, 256), error);
}

TEST_CASE("quadratic variation statistic") {
    std::vector<double> flat(17, 3.0);
    auto q = quadratic_variation(flat, 16, 0.6, 1.0);
    CHECK(q.v_n == 0.0);
    CHECK(q.z_n == Approx(-4.0));
    CHECK(q.r_n == Approx(std::pow(16.0, -0.3)));
    CHECK_THROWS_AS(quadratic_variation(flat, 15, 0.6, 1.0), error);
    CHECK(fou_v_inf(2.0, 3.0, 0.6) == Approx(4.0 * std::pow(3.0, 1.2)));

    // X = B: E[v_n] = T^{2H}
    const int n = 64, P = 20000;
    const double H = 0.6, T = 1.7;
    FbmSampler s(n, H, T, FbmMethod::Cholesky);
    double m = 0, m2 = 0;
    for (int p = 0; p < P; ++p) {
        double v = quadratic_variation(s.sample(2, p).values, n, H, 0.0).v_n;
        m += v;
        m2 += v * v;
    }
    m /= P;
    double sd = std::sqrt(m2 / P - m * m);
    CHECK(std::fabs(m - std::pow(T, 2 * H)) < 4 * sd / std::sqrt(P));
}

TEST_CASE("parallel simulation is order independent") {
    FouParams p;
    auto a = simulate_fou(p, 16, 300, 4, 77, FbmMethod::Cholesky, 1);
    auto b = simulate_fou(p, 16, 300, 4, 77, FbmMethod::Cholesky, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].v_n == b[i].v_n);
        CHECK(a[i].z_n == b[i].z_n);
        CHECK(a[i].int_x2 == b[i].int_x2);
    }
    setenv("FEXPO_THREADS", "2", 1);
    CHECK(resolve_threads(7) == 2);
    unsetenv("FEXPO_THREADS");
    CHECK(resolve_threads(5) == 5);
    CHECK(resolve_threads(0) >= 1);
}
