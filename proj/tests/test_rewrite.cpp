#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fexpo;

static GraphSumSpec first_spec(const std::string& alpha, const std::string& g) {
    GraphSumSpec s;
    s.alpha = parse_expr(alpha);
    s.graph = parse_graph(g);
    return s;
}

static GraphSumSpec second_spec(const std::string& alpha, const std::string& g, std::set<component_id> t = {}) {
    auto s = first_spec(alpha, g);
    s.taxonomy = Taxonomy::Second;
    s.t_set = std::move(t);
    return s;
}

static bool same(const Expr& a, const std::string& b) { return sym_equal(a, parse_expr(b)); }

TEST_CASE("first-regime rewrite examples") {
    auto f1 = du_rewrite_first(first_spec("0", "v 1 1\n"));
    CHECK(f1.case_tag == CaseTag::A);
    CHECK(same(f1.max_exponent, "2H-3/2"));
    CHECK(sym_equal(items_max(f1), f1.max_exponent));
    REQUIRE(f1.items.size() == 2);
    CHECK(f1.items[0].graph == parse_graph("v 1 1\nv 2 1\n"));
    CHECK(f1.items[1].graph == parse_graph("v 1 0\nv 2 1\ne 1 2 1\n"));

    // q = (1,1): max q equals half of q-bar, so the component is not of type PE,1
    auto f2 = du_rewrite_first(first_spec("4H-1", "v 1 1\nv 2 1\ne 1 2 1\n"));
    CHECK(f2.case_tag == CaseTag::A);
    CHECK(same(f2.max_exponent, "2H-3/2"));
    CHECK(sym_equal(items_max(f2), f2.max_exponent));
    CHECK(f2.items[1].multiplicity == 1);

    auto f3 = du_rewrite_first(first_spec("6H-5/2", "v 1 0\nv 2 0\nv 3 1\ne 1 2 2\n"));
    CHECK(f3.case_tag == CaseTag::A);
    CHECK(same(f3.max_exponent, "4H-3"));
    CHECK(sym_equal(items_max(f3), f3.max_exponent));

    auto f4 = du_rewrite_first(first_spec("0", "v 1 2\n"));
    CHECK(f4.case_tag == CaseTag::B);
    CHECK(sym_equal(f4.max_exponent, first_exponent(Expr::constant(0), parse_graph("v 1 2\n"))));
    CHECK(sym_equal(items_max(f4), f4.max_exponent));

    CHECK_THROWS_AS(du_rewrite_first(second_spec("0", "v 1 1\n")), error);
}

TEST_CASE("second-regime rewrite examples") {
    auto cyc = second_spec("0", "v 1 0\nv 2 0\ne 1 2 2\n");
    auto f1 = du_rewrite_second(cyc);
    CHECK(f1.case_tag == CaseTag::A);
    CHECK(sym_equal(f1.max_exponent, exponent(cyc) + parse_expr("2H-3/2")));
    CHECK(same(f1.max_exponent, "-1/2-2H"));
    CHECK(sym_equal(items_max(f1), f1.max_exponent));

    auto s2 = second_spec("0", "v 1 2\nv 2 0\nv 3 0\ne 2 3 2\n");
    auto f2 = du_rewrite_second(s2);
    CHECK(f2.case_tag == CaseTag::B);
    CHECK(sym_equal(f2.max_exponent, exponent(s2)));
    CHECK(sym_equal(items_max(f2), f2.max_exponent));

    auto s3 = second_spec("0", "v 1 1\nv 2 0\nv 3 1\ne 1 2 1\ne 2 3 1\n", {1});
    auto f3 = du_rewrite_second(s3);
    CHECK(f3.case_tag == CaseTag::B);
    CHECK(sym_equal(f3.max_exponent, exponent(s3) + delta_H(3)));
    CHECK(sym_equal(items_max(f3), f3.max_exponent));
    for (std::size_t i = 1; i < f3.items.size(); ++i) CHECK(f3.items[i].t_set.empty());

    CHECK_THROWS_AS(du_rewrite_second(first_spec("0", "v 1 1\n")), error);
    try {
        du_rewrite_second(second_spec("0", "v 1 3\n"));
        FAIL("expected AssumptionViolated");
    } catch (const error& e) {
        CHECK(e.code() == errc::assumption_violated);
    }
}

TEST_CASE("property: rewrite laws on random graphs") {
    std::mt19937_64 rng(31);
    int case_b_first = 0, case_b_second = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        GraphSumSpec s;
        s.alpha = Expr::affine(qfrac(static_cast<long>(rng() % 5) - 2, 2), static_cast<long>(rng() % 5));
        s.graph = testing::random_graph(rng, 5, 3);
        auto f = du_rewrite_first(s);
        INFO(format_graph(s.graph));
        CHECK(sym_equal(items_max(f), f.max_exponent));
        case_b_first += f.case_tag == CaseTag::B;
    }
    for (int trial = 0; trial < 1000; ++trial) {
        auto a = testing::random_admissible(rng);
        GraphSumSpec s;
        s.alpha = Expr::constant(0);
        s.graph = a.graph;
        s.t_set = a.t_set;
        s.taxonomy = Taxonomy::Second;
        auto f = du_rewrite_second(s);
        INFO(format_graph(s.graph));
        CHECK(sym_equal(items_max(f), f.max_exponent));
        case_b_second += f.case_tag == CaseTag::B;
    }
    CHECK(case_b_first > 50);
    CHECK(case_b_second > 50);
}

TEST_CASE("derivative norm graph examples") {
    auto s = first_spec("4H-1", "v 1 1\nv 2 1\ne 1 2 1\n");
    auto d0 = derivative_norm_graph(s, {});
    CHECK(d0.graph == vee(s.graph, shift(s.graph, 2)));
    CHECK(sym_equal(exponent(d0), exponent(s).scaled(2)));

    auto one = second_spec("0", "v 1 1\n");
    auto d1 = derivative_norm_graph(one, {{1, 1}});
    CHECK(d1.graph == parse_graph("v 1 0\nv 2 0\ne 1 2 1\n"));
    CHECK(sym_equal(e2_component(d1.graph), e2_component(one.graph).scaled(2)));

    auto path = second_spec("0", "v 1 1\nv 2 1\ne 1 2 1\n");
    auto d2 = derivative_norm_graph(path, {{1, 1}});
    CHECK(d2.graph == parse_graph("v 1 0\nv 2 1\nv 3 0\nv 4 1\ne 1 2 1\ne 3 4 1\ne 1 3 1\n"));
    CHECK(sym_equal(e2_component(d2.graph), e2_plus(4)));
    CHECK(sym_equal(e2_plus(4), e2_minus(2).scaled(2)));

    CHECK_THROWS_AS(derivative_norm_graph(one, {{1, 2}}), error);
}

TEST_CASE("property: derivative norm graph at most doubles the exponent") {
    std::mt19937_64 rng(32);
    auto grid = testing::h_grid(50);
    auto check = [&](const GraphSumSpec& s) {
        std::map<vertex, int> lambda;
        for (auto& [v, w] : s.graph.q())
            if (w > 0) lambda[v] = static_cast<int>(rng() % (w + 1));
        auto d = derivative_norm_graph(s, lambda);
        auto lhs = exponent(d), rhs = exponent(s).scaled(2);
        INFO(format_graph(s.graph));
        CHECK(sym_leq(lhs, rhs));
        for (double h : grid) CHECK(lhs.eval(h) <= rhs.eval(h) + 1e-12);
    };
    for (int trial = 0; trial < 1000; ++trial) {
        GraphSumSpec s;
        s.alpha = Expr::affine(0, static_cast<long>(rng() % 3));
        s.graph = testing::random_graph(rng, 4, 3);
        check(s);
        auto a = testing::random_admissible(rng);
        GraphSumSpec t;
        t.graph = a.graph;
        t.t_set = a.t_set;
        t.taxonomy = Taxonomy::Second;
        check(t);
    }
}

TEST_CASE("chaos product expansion examples") {
    auto t1 = chaos_product_expand({{1, 1}});
    REQUIRE(t1.size() == 1);
    CHECK(t1[0].pi.empty());
    CHECK(t1[0].constant == 1);
    CHECK(t1[0].residual == std::map<vertex, int>{{1, 1}});

    auto t2 = chaos_product_expand({{1, 1}, {2, 1}});
    REQUIRE(t2.size() == 2);
    CHECK((t2[0].constant == 1 && t2[0].residual == std::map<vertex, int>{{1, 1}, {2, 1}}));
    CHECK((t2[1].constant == 1 && t2[1].pi.at({1, 2}) == 1 && t2[1].residual == std::map<vertex, int>{{1, 0}, {2, 0}}));

    auto t3 = chaos_product_expand({{1, 2}, {2, 2}});
    REQUIRE(t3.size() == 3);
    CHECK(t3[1].constant == 4);
    CHECK(t3[2].constant == 2);

    CHECK_THROWS_AS(chaos_product_expand({}), error);
}

TEST_CASE("property: contraction terms respect weights") {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<vertex, int> q;
        int nv = 1 + static_cast<int>(rng() % 4), qbar = 0;
        for (int v = 1; v <= nv; ++v) qbar += (q[v] = static_cast<int>(rng() % 4));
        for (auto& t : chaos_product_expand(q)) {
            int pibar = 0, res = 0;
            std::map<vertex, int> pv;
            for (auto& [e, k] : t.pi) {
                pibar += k;
                pv[e.first] += k;
                pv[e.second] += k;
            }
            for (auto& [v, r] : t.residual) res += r;
            for (auto& [v, k] : pv) CHECK(k <= q[v]);
            CHECK(res == qbar - 2 * pibar);
            CHECK(t.constant >= 1);
        }
    }
}

TEST_CASE("property: product expansion agrees with the Isserlis oracle") {
    std::mt19937_64 rng(34);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 4);
        std::vector<int> q(nv);
        int qbar = 0;
        for (auto& x : q) qbar += (x = static_cast<int>(rng() % 4));
        auto gram = testing::random_gram(rng, nv + 1);
        // every residual order R reachable, with a test kernel carrying the residual chaos
        for (int R = qbar % 2; R <= qbar && qbar + R <= kMaxOracleDegree; R += 2) {
            double a = testing::expansion_moment(q, gram, R), b = testing::oracle_moment(q, gram, R);
            CHECK(std::fabs(a - b) <= 1e-10 * std::max(1.0, std::fabs(b)));
            ++checked;
        }
    }
    CHECK(checked > 200);
}

TEST_CASE("integration by parts reduction") {
    CHECK_THROWS_AS(ibp_reduce(first_spec("0", "v 1 0\n"), 1), error);
    try {
        ibp_reduce(first_spec("0", "v 1 0\nv 2 1\n"), 1);
        FAIL("expected ComponentHasNoWeight");
    } catch (const error& e) {
        CHECK(e.code() == errc::component_has_no_weight);
    }

    auto out = ibp_reduce(first_spec("0", "v 1 2\n"), 1);
    REQUIRE(!out.empty());
    for (auto& s : out) CHECK(s.graph.q_bar() == 0);
}

TEST_CASE("property: reduction lowers the exponent and terminates") {
    std::mt19937_64 rng(35);
    auto grid = testing::h_grid(50);
    int steps_total = 0;
    for (int trial = 0; trial < 100; ++trial) {
        GraphSumSpec s;
        s.alpha = Expr::constant(0);
        s.graph = testing::random_graph(rng, 3, 2);
        if (s.graph.q_bar() == 0) continue;
        std::vector<GraphSumSpec> work{s};
        int guard = 0;
        while (!work.empty()) {
            REQUIRE(++guard < 20000);
            auto cur = work.back();
            work.pop_back();
            const WeightedGraph* target = nullptr;
            auto comps = components(cur.graph);
            for (auto& c : comps)
                if (c.q_bar() > 0) {
                    target = &c;
                    break;
                }
            if (!target) continue;
            auto e_in = exponent(cur);
            int w_in = cur.graph.q_bar();
            for (auto& o : ibp_reduce(cur, target->min_label())) {
                auto e_out = exponent(o);
                CHECK(sym_leq(e_out, e_in));
                for (double h : grid) CHECK(e_out.eval(h) <= e_in.eval(h) + 1e-12);
                CHECK(o.graph.q_bar() < w_in);
                work.push_back(o);
            }
            ++steps_total;
        }
    }
    CHECK(steps_total > 50);
}
