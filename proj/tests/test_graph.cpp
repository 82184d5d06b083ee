#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace fexpo;

static errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    FAIL("expected an exception");
    return errc::parse_error;
}

TEST_CASE("components split on positive theta only") {
    auto two = parse_graph("v 1 0\nv 2 0\n");
    CHECK(components(two).size() == 2);

    auto chain = parse_graph("v 1 0\nv 2 0\nv 3 0\ne 1 2 1\ne 1 3 0\ne 2 3 1\n");
    REQUIRE(components(chain).size() == 1);
    CHECK(components(chain)[0].size() == 3);

    auto g = parse_graph("v 1 0\nv 2 0\nv 3 1\ne 1 2 2\n");
    auto cs = components(g);
    REQUIRE(cs.size() == 2);
    CHECK(cs[0].vertices() == std::vector<vertex>{1, 2});
    CHECK(cs[1].vertices() == std::vector<vertex>{3});
}

TEST_CASE("component stats") {
    auto s0 = stats(WeightedGraph::singleton(1, 0));
    CHECK((s0.I == 1 && s0.theta_bar == 0 && s0.q_bar == 0 && s0.s == 0));
    auto s2 = stats(WeightedGraph::singleton(1, 2));
    CHECK((s2.I == 1 && s2.q_bar == 2 && s2.s == 2));
    auto st = stats(parse_graph("v 1 0\nv 2 0\ne 1 2 2\n"));
    CHECK((st.I == 2 && st.theta_bar == 2 && st.q_bar == 0 && st.s == 2));
    CHECK(code_of([] { stats(parse_graph("v 1 0\nv 2 0\n")); }) == errc::component_required);
}

TEST_CASE("vee, shift and weight operations") {
    auto a = WeightedGraph::singleton(1, 1), b = WeightedGraph::singleton(2, 1);
    CHECK(vee(std::vector{a}) == a);
    auto ab = vee(a, b);
    CHECK(ab.size() == 2);
    CHECK(ab.theta().empty());
    CHECK(ab.q_bar() == a.q_bar() + b.q_bar());
    CHECK(code_of([&] { vee(a, a); }) == errc::disjointness_violated);

    CHECK(shift(ab, 0) == ab);
    CHECK(shift(WeightedGraph::singleton(1, 2), 3) == WeightedGraph::singleton(4, 2));

    CHECK(vertex_contract(ab, {}) == ab);
    CHECK(vertex_contract(WeightedGraph::singleton(1, 2), {{1, -1}}) == WeightedGraph::singleton(1, 1));
    CHECK(code_of([&] { vertex_contract(a, {{1, -2}}); }) == errc::weight_underflow);

    CHECK(edge_augment(ab, {}) == ab);
    auto e = edge_augment(ab, {{{1, 2}, 1}});
    CHECK(e.theta(1, 2) == 1);
    CHECK(e.q(1) == 0);
    CHECK(e.q(2) == 0);
    CHECK(code_of([&] { edge_augment(ab, {{{1, 2}, 2}}); }) == errc::weight_underflow);
}

TEST_CASE("classification examples") {
    auto c1 = classify(WeightedGraph::singleton(1, 1), Taxonomy::First);
    CHECK(c1.tag == ClassTag::C1);

    auto p = classify(parse_graph("v 1 1\nv 2 1\ne 1 2 1\n"), Taxonomy::Second);
    CHECK(p.tag == ClassTag::C2_two_I2plus);
    CHECK(p.is_path_weighted_ends);

    auto cyc = classify(parse_graph("v 1 0\nv 2 0\nv 3 0\ne 1 2 1\ne 2 3 1\ne 1 3 1\n"), Taxonomy::Second);
    CHECK(cyc.tag == ClassTag::C2_zero);
    CHECK(cyc.is_cycle);

    CHECK(classify(WeightedGraph::singleton(1, 2), Taxonomy::Second).tag == ClassTag::C2_two_I1);
    CHECK(classify(WeightedGraph::singleton(1, 2), Taxonomy::First).tag == ClassTag::C2plus_posEven_max1);
    CHECK(classify(WeightedGraph::singleton(1, 3), Taxonomy::First).tag == ClassTag::C2plus_odd);
    CHECK(classify(WeightedGraph::singleton(1, 4), Taxonomy::First).tag == ClassTag::C2plus_posEven_max2);
    CHECK(classify(parse_graph("v 1 1\nv 2 1\ne 1 2 1\n"), Taxonomy::First).tag == ClassTag::C2plus_posEven_max0);
}

TEST_CASE("assumption checks") {
    CHECK(satisfies_assumption_connected(parse_graph("v 1 0\nv 2 0\nv 3 0\ne 1 2 1\ne 2 3 1\ne 1 3 1\n")));
    CHECK_FALSE(satisfies_assumption_connected(WeightedGraph::singleton(1, 3)));
    CHECK_FALSE(satisfies_assumption_connected(parse_graph("v 1 1\nv 2 1\ne 1 2 2\n")));
    CHECK_FALSE(satisfies_assumption_graph(parse_graph("v 1 1\nv 2 3\n")));
}

TEST_CASE("DSL parsing and errors") {
    auto g = parse_graph("# comment\nv 1 2   # trailing comment\nv 2 0\ne 2 1 3\n");
    CHECK(g.q(1) == 2);
    CHECK(g.theta(1, 2) == 3);
    CHECK(parse_graph(format_graph(g)) == g);
    for (const char* bad : {"v 1 0\nv 1 0\n", "v 1 0\ne 1 1 1\n", "v 1 0\nv 2 0\ne 1 2 1\ne 2 1 1\n",
                            "v 1 -1\n", "v 1 0\ne 1 2 1\n", "", "x 1 2\n", "v 1 0 7\n"})
        CHECK(code_of([&] { parse_graph(bad); }) == errc::parse_error);
}

TEST_CASE("property: stats identity and vertex partition on random graphs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        auto g = testing::random_graph(rng, 6);
        std::size_t total = 0;
        for (auto& c : components(g)) {
            auto st = stats(c);
            total += st.I;
            CHECK(st.s == 2 * (st.theta_bar - (st.I - 1)) + st.q_bar);
            CHECK(st.s >= 0);
            CHECK(stats(shift(c, 7)).s == st.s);
            // first taxonomy is total and never General
            CHECK(classify(c, Taxonomy::First).tag != ClassTag::General);
        }
        CHECK(total == g.size());
    }
}

TEST_CASE("property: contraction and augmentation commute") {
    std::mt19937_64 rng(12);
    int checked = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto g = testing::random_graph(rng, 4, 3);
        auto vs = g.vertices();
        std::map<vertex, int> sigma;
        std::map<vpair, int> tau;
        for (vertex v : vs) sigma[v] = -static_cast<int>(rng() % 2);
        for (std::size_t i = 0; i < vs.size(); ++i)
            for (std::size_t j = i + 1; j < vs.size(); ++j)
                if (rng() % 3 == 0) tau[{vs[i], vs[j]}] = 1;
        WeightedGraph a = g, b = g;
        try {
            a = edge_augment(vertex_contract(g, sigma), tau);
        } catch (const error&) {
            continue;
        }
        b = vertex_contract(edge_augment(g, tau), sigma);
        CHECK(a == b);
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("property: bar-statistics of combined families") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 1 + static_cast<int>(rng() % 3);
        std::vector<WeightedGraph> fam;
        int base = 1, sum_theta = 0, sum_q = 0, sum_s = 0;
        bool all_connected = true;
        for (int i = 0; i < k; ++i) {
            auto c = testing::random_graph(rng, 3, 3, base);
            base += static_cast<int>(c.size());
            sum_theta += c.theta_bar();
            sum_q += c.q_bar();
            if (is_connected(c)) sum_s += stats(c).s;
            else all_connected = false;
            fam.push_back(c);
        }
        auto g = vee(fam);
        // tau joins consecutive family members through one weighted vertex each
        std::map<vpair, int> tau;
        std::map<vertex, int> sigma;
        int tau_total = 0, sigma_total = 0;
        for (int i = 0; i + 1 < k; ++i) {
            vertex a = -1, b = -1;
            for (auto& [v, w] : fam[i].q())
                if (w > 0) a = v;
            for (auto& [v, w] : fam[i + 1].q())
                if (w > 0) b = v;
            if (a < 0 || b < 0) continue;
            tau[{a, b}] += 1;
        }
        try {
            g = edge_augment(g, tau);
        } catch (const error&) {
            continue;
        }
        for (auto& kv : tau) tau_total += kv.second;
        for (auto& [v, w] : g.q())
            if (w > 0 && rng() % 3 == 0) sigma[v] = -1;
        g = vertex_contract(g, sigma);
        for (auto& kv : sigma) sigma_total += kv.second;
        CHECK(g.theta_bar() == sum_theta + tau_total);
        CHECK(g.q_bar() == sum_q - 2 * tau_total + sigma_total);
        if (all_connected && is_connected(g))
            CHECK(stats(g).s == sum_s + sigma_total - 2 * (k - 1));
    }
}

TEST_CASE("property: second taxonomy partitions admissible graphs") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 300; ++trial) {
        auto s = testing::random_admissible(rng);
        REQUIRE(satisfies_assumption_graph(s.graph));
        for (auto& c : components(s.graph)) {
            auto t = classify(c, Taxonomy::Second).tag;
            CHECK((t == ClassTag::C0 || t == ClassTag::C1 || t == ClassTag::C2_zero || t == ClassTag::C2_two_I1 ||
                   t == ClassTag::C2_two_I2plus));
        }
    }
}
