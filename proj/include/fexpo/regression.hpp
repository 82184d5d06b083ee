#pragma once

// Exponent values worked out by hand for the M(2,0), M(3,0) and N(1,0) graph families.

#include <set>
#include <string>
#include <vector>

#include "fexpo/dsl.hpp"
#include "fexpo/exponent.hpp"

namespace fexpo {

struct RegressionCase {
    std::string name;
    std::string alpha;
    std::string graph;  // DSL text
    bool second = false;
    std::set<component_id> t_set;
    std::string expected;
};

struct RegressionOutcome {
    RegressionCase c;
    std::string computed;
    bool pass = false;
};

inline const std::vector<RegressionCase>& regression_table() {
    static const std::vector<RegressionCase> table = {
        {"M2_1", "4H-1", "v 1 1\nv 2 1\ne 1 2 1\n", false, {}, "0"},
        {"M2_2", "4H-2", "v 1 2\nv 2 1\n", false, {}, "2H-3/2"},
        {"M2_3", "4H-3", "v 1 1\nv 2 1\n", false, {}, "4H-3"},
        {"M2_4", "4H-2", "v 1 0\nv 2 1\ne 1 2 1\n", false, {}, "4H-3"},
        {"M2_1/T", "4H-1", "v 1 1\nv 2 1\ne 1 2 1\n", true, {1}, "max(-1/2, 4H-3)"},
        {"M3_1", "6H-5/2", "v 1 0\nv 2 0\nv 3 1\ne 1 2 2\n", false, {}, "2H-3/2"},
        {"M3_2", "6H-3/2", "v 1 0\nv 2 1\nv 3 1\ne 1 2 1\ne 1 3 1\n", false, {}, "2H-3/2"},
        {"M3_2/e2", "6H-3/2", "v 1 0\nv 2 1\nv 3 1\ne 1 2 1\ne 1 3 1\n", true, {}, "max(-1/2, 6H-9/2)"},
        {"M3_3", "6H-7/2", "v 1 2\nv 2 1\nv 3 1\n", false, {}, "4H-3"},
        {"M3_5", "6H-5/2", "v 1 2\nv 2 0\nv 3 1\ne 2 3 1\n", false, {}, "4H-3"},
        {"N1_1", "0", "v 1 1\n", false, {}, "0"},
        {"N1_1/shifted", "2H-3/2", "v 1 1\n", false, {}, "2H-3/2"},
    };
    return table;
}

inline Expr regression_exponent(const RegressionCase& c) {
    auto g = parse_graph(c.graph);
    auto a = parse_expr(c.alpha);
    return c.second ? second_exponent(a, g, c.t_set) : first_exponent(a, g);
}

inline std::vector<RegressionOutcome> run_regression() {
    std::vector<RegressionOutcome> out;
    for (auto& c : regression_table()) {
        RegressionOutcome o{c};
        auto e = regression_exponent(c);
        o.computed = canonical_str(e);
        o.pass = e.canonical() == parse_expr(c.expected).canonical();
        out.push_back(o);
    }
    return out;
}

} // namespace fexpo
