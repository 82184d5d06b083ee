#pragma once

// Isserlis-type oracle: E[ prod_v I_{q_v}(f_v^{(x) q_v}) ] as a sum over perfect
// matchings of the kernel slots that never pair two slots of the same vertex.

#include <vector>

#include <Eigen/Dense>

#include "fexpo/error.hpp"

namespace fexpo {

struct ChaosConfig {
    std::vector<int> q;       // order per vertex
    Eigen::MatrixXd gram;     // <f_v, f_w>
};

inline constexpr int kMaxOracleDegree = 12;

inline double gaussian_moment_oracle(const ChaosConfig& cfg) {
    const int nv = static_cast<int>(cfg.q.size());
    if (cfg.gram.rows() != nv || cfg.gram.cols() != nv) fail(errc::domain_error, "gram size mismatch");
    std::vector<int> owner;
    for (int v = 0; v < nv; ++v) {
        if (cfg.q[v] < 0) fail(errc::domain_error, "negative order");
        for (int k = 0; k < cfg.q[v]; ++k) owner.push_back(v);
    }
    const int n = static_cast<int>(owner.size());
    if (n > kMaxOracleDegree) fail(errc::degree_too_large, "total degree " + std::to_string(n));
    if (n % 2) return 0.0;
    if (n == 0) return 1.0;
    std::vector<char> used(n, 0);
    auto rec = [&](auto&& self) -> double {
        int i = 0;
        while (i < n && used[i]) ++i;
        if (i == n) return 1.0;
        used[i] = 1;
        double acc = 0;
        for (int j = i + 1; j < n; ++j) {
            if (used[j] || owner[j] == owner[i]) continue;
            used[j] = 1;
            acc += cfg.gram(owner[i], owner[j]) * self(self);
            used[j] = 0;
        }
        used[i] = 0;
        return acc;
    };
    return rec(rec);
}

} // namespace fexpo
