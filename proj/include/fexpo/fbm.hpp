#pragma once

// Exact fBm sampling on the uniform grid t_i = iT/N.

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "fexpo/beta.hpp"
#include "fexpo/error.hpp"
#include "fexpo/rng.hpp"

namespace fexpo {

inline double fbm_covariance(double s, double t, double H) {
    double p = 2 * H;
    return 0.5 * (std::pow(std::fabs(t), p) + std::pow(std::fabs(s), p) - std::pow(std::fabs(t - s), p));
}

struct FbmPath {
    double H = 0.6;
    double T = 1;
    int N = 0;
    std::vector<double> values;  // B(t_i), i = 0..N
};

enum class FbmMethod { Cholesky, Circulant, Auto };

inline const char* method_name(FbmMethod m) {
    switch (m) {
    case FbmMethod::Cholesky: return "cholesky";
    case FbmMethod::Circulant: return "circulant";
    default: return "auto";
    }
}

inline constexpr int kCholeskyCap = 4096;
inline constexpr int kAutoCholeskyMax = 2048;

// Holds the factorization for one (N, H, T); sample() is const and reentrant.
class FbmSampler {
public:
    FbmSampler(int N, double H, double T, FbmMethod method = FbmMethod::Auto) : N_(N), H_(H), T_(T) {
        check_H(H);
        if (N < 1) fail(errc::domain_error, "N must be >= 1");
        if (!(T > 0)) fail(errc::domain_error, "T must be positive");
        scale_ = std::pow(T / N, H);
        if (method == FbmMethod::Auto) {
            if (N <= kAutoCholeskyMax) {
                method = FbmMethod::Cholesky;
            } else {
                try {
                    build_circulant();
                    method_ = FbmMethod::Circulant;
                    return;
                } catch (const error& e) {
                    if (e.code() != errc::circulant_embedding_failure) throw;
                    method = FbmMethod::Cholesky;
                }
            }
        }
        method_ = method;
        if (method == FbmMethod::Cholesky) build_cholesky();
        else build_circulant();
    }

    FbmMethod method() const { return method_; }
    int N() const { return N_; }

    // fGn with unit-lag covariance rho_H, unscaled
    void sample_increments(std::mt19937_64& rng, std::vector<double>& out) const {
        std::normal_distribution<double> nd;
        out.assign(N_, 0.0);
        if (method_ == FbmMethod::Cholesky) {
            Eigen::VectorXd z(N_);
            for (int i = 0; i < N_; ++i) z[i] = nd(rng);
            Eigen::VectorXd x = L_ * z;
            for (int i = 0; i < N_; ++i) out[i] = x[i];
            return;
        }
        const int M = static_cast<int>(sqrt_lambda_.size());
        std::vector<std::complex<double>> w(M), y(M);
        for (int k = 0; k < M; ++k) {
            double a = nd(rng), b = nd(rng);
            w[k] = sqrt_lambda_[k] * std::complex<double>(a, b);
        }
        Eigen::FFT<double> fft;
        fft.fwd(y, w);
        for (int i = 0; i < N_; ++i) out[i] = y[i].real();
    }

    FbmPath sample(std::uint64_t seed, std::uint64_t path_index) const {
        auto rng = path_rng(seed, path_index);
        return sample(rng);
    }

    FbmPath sample(std::mt19937_64& rng) const {
        std::vector<double> inc;
        sample_increments(rng, inc);
        FbmPath p{H_, T_, N_, std::vector<double>(N_ + 1, 0.0)};
        for (int i = 0; i < N_; ++i) p.values[i + 1] = p.values[i] + scale_ * inc[i];
        return p;
    }

private:
    int N_;
    double H_, T_, scale_;
    FbmMethod method_ = FbmMethod::Cholesky;
    Eigen::MatrixXd L_;
    std::vector<double> sqrt_lambda_;

    void build_cholesky() {
        if (N_ > kCholeskyCap) fail(errc::cholesky_cap_exceeded, "N=" + std::to_string(N_) + " exceeds Cholesky cap");
        Eigen::MatrixXd C(N_, N_);
        for (int i = 0; i < N_; ++i)
            for (int j = 0; j < N_; ++j) C(i, j) = rho_H(i - j, H_);
        Eigen::LLT<Eigen::MatrixXd> llt(C);
        if (llt.info() != Eigen::Success) fail(errc::domain_error, "increment covariance not positive definite");
        L_ = llt.matrixL();
    }

    // Circulant embedding of size 2N; the real part of the transformed
    // complex Gaussian vector has exactly the Toeplitz covariance.
    void build_circulant() {
        const int M = 2 * N_;
        std::vector<std::complex<double>> c(M), lam;
        for (int j = 0; j <= N_; ++j) c[j] = rho_H(j, H_);
        for (int j = 1; j < N_; ++j) c[M - j] = rho_H(j, H_);
        Eigen::FFT<double> fft;
        fft.fwd(lam, c);
        sqrt_lambda_.resize(M);
        double mx = 0;
        for (auto& l : lam) mx = std::max(mx, std::fabs(l.real()));
        for (int k = 0; k < M; ++k) {
            double l = lam[k].real();
            if (l < -1e-10 * mx) fail(errc::circulant_embedding_failure, "negative circulant eigenvalue");
            sqrt_lambda_[k] = std::sqrt(std::max(l, 0.0) / M);
        }
    }
};

inline FbmPath sample_fbm(int N, double H, double T, std::uint64_t seed, FbmMethod method = FbmMethod::Auto,
                          std::uint64_t path_index = 0) {
    return FbmSampler(N, H, T, method).sample(seed, path_index);
}

} // namespace fexpo
