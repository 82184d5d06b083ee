// fexpo command-line front end.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fexpo/fexpo.hpp"

using namespace fexpo;

namespace {

constexpr int kOk = 0, kUsage = 1, kAcceptance = 2;

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

// CSV sink: optional timestamp comment, header row, then rows.
class Csv {
public:
    Csv(std::ostream& os, bool stamp, const std::vector<std::string>& header) : os_(os) {
        if (stamp) os_ << "# generated " << timestamp() << '\n';
        row(header);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cell(cells[i]);
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

struct Common {
    bool no_timestamp = false;
    int threads = 0;
    std::string out;
};

// Runs f with the chosen output stream: the --out file or stdout.
template <class F>
void with_output(const std::string& path, F&& f) {
    if (path.empty()) {
        f(std::cout);
        return;
    }
    std::ofstream os(path);
    if (!os) fail(errc::domain_error, "cannot write " + path);
    f(os);
}

const auto kHurst = CLI::Validator(
    [](std::string& s) -> std::string {
        double h = 0;
        try {
            std::size_t used = 0;
            h = std::stod(s, &used);
            if (used != s.size()) return "H must be a number";
        } catch (...) {
            return "H must be a number";
        }
        return (h > 0.5 && h < 0.75) ? "" : "H must lie in (0.5, 0.75)";
    },
    "H in (0.5, 0.75)");

std::set<component_id> to_tset(const std::vector<long long>& ids) {
    return {ids.begin(), ids.end()};
}

GraphSumSpec make_spec(const std::string& graph_path, const std::string& alpha, bool second,
                       const std::vector<long long>& tset) {
    GraphSumSpec s;
    s.graph = load_graph(graph_path);
    s.alpha = parse_expr(alpha);
    s.taxonomy = second ? Taxonomy::Second : Taxonomy::First;
    s.t_set = to_tset(tset);
    validate(s);
    return s;
}

// ---- beta-slope prediction ----

// Predicted growth exponent of the raw beta-sum; `bound` marks components where only an upper bound is known.
Expr beta_prediction(const WeightedGraph& g, bool& bound) {
    std::vector<Expr> terms;
    bound = false;
    for (auto& c : components(g)) {
        auto st = stats(c);
        if (st.I == 1) {
            terms.push_back(Expr::constant(1));
        } else if (st.theta_bar == st.I - 1) {
            terms.push_back(Expr::constant(2 - st.I));
        } else if (is_cycle_graph(c)) {
            terms.push_back(e2_plus(st.I));
        } else {
            bound = true;
            terms.push_back(Expr::affine(Q(3 - st.I), Q(2 * st.I - 4 - 2 * st.theta_bar)));
        }
    }
    return Expr::sum(terms);
}

std::vector<long long> pow2_grid(long long lo, long long hi) {
    if (lo < 2 || hi < lo) fail(errc::domain_error, "need 2 <= nmin <= nmax");
    std::vector<long long> ns;
    for (long long n = lo; n <= hi; n *= 2) ns.push_back(n);
    return ns;
}

// ---- samples CSV ----

std::vector<double> read_column(const std::string& path, const std::string& name) {
    std::ifstream in(path);
    if (!in) fail(errc::parse_error, "cannot open " + path);
    std::string line;
    int col = -1;
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (col < 0) {
            for (std::size_t i = 0; i < cells.size(); ++i)
                if (cells[i] == name) col = static_cast<int>(i);
            if (col < 0) fail(errc::parse_error, "column " + name + " not found in " + path);
            continue;
        }
        if (col >= static_cast<int>(cells.size())) fail(errc::parse_error, "short row in " + path);
        out.push_back(std::stod(cells[col]));
    }
    return out;
}

struct FouCli {
    FouParams p;
    void add(CLI::App* app) {
        app->add_option("--H", p.H, "Hurst index")->check(kHurst);
        app->add_option("--b", p.b, "drift rate")->check(CLI::NonNegativeNumber);
        app->add_option("--sigma", p.sigma, "volatility")->check(CLI::NonNegativeNumber);
        app->add_option("--x0", p.x0, "initial value");
        app->add_option("--T", p.T, "horizon")->check(CLI::PositiveNumber);
    }
};

ExpansionDensity fou_density(const FouParams& p, int n) {
    ExpansionDensity d{g_infinity_fou(p.sigma, p.T, p.H), r_n_of(n, p.H), {}};
    d.symbol = fou_symbol_coefficient_exact(p.b, p.sigma, p.x0, p.H, p.T);
    return d;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fexpo: exponent calculus and fOU quadratic-variation expansion"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--threads", common.threads, "worker threads (FEXPO_THREADS overrides)");
    app.add_flag("--no-timestamp", common.no_timestamp, "omit the timestamp line in CSV output");
    app.add_option("--out", common.out, "write CSV output to this file");
    auto global = [&](CLI::App* s) {
        s->add_option("--threads", common.threads, "worker threads (FEXPO_THREADS overrides)");
        s->add_flag("--no-timestamp", common.no_timestamp, "omit the timestamp line in CSV output");
        s->add_option("--out", common.out, "write CSV output to this file");
    };
    int status = kOk;

    // exponent
    std::string graph_path, alpha = "0";
    double H = 0.6;
    bool second = false;
    std::vector<long long> tset;
    auto* ex = app.add_subcommand("exponent", "first or second exponent of a graph");
    ex->add_option("--graph", graph_path, "graph file")->required()->check(CLI::ExistingFile);
    ex->add_option("--alpha", alpha, "base exponent, affine in H");
    ex->add_option("--H", H, "evaluation point")->check(kHurst);
    ex->add_flag("--second", second, "use the second exponent");
    ex->add_option("--tset", tset, "T-set component ids (second exponent)");
    global(ex);
    ex->callback([&] {
        auto s = make_spec(graph_path, alpha, second || !tset.empty(), tset);
        auto e = exponent(s);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"field", "value"});
            csv.row({"regime", s.taxonomy == Taxonomy::First ? "first" : "second"});
            csv.row({"symbolic", e.str()});
            csv.row({"canonical", canonical_str(e)});
            csv.row({"H", num(H)});
            csv.row({"value", num(e.eval(H))});
        });
    });

    // rewrite
    auto* rw = app.add_subcommand("rewrite", "D_u rewrite family of a graph");
    rw->add_option("--graph", graph_path, "graph file")->required()->check(CLI::ExistingFile);
    rw->add_option("--alpha", alpha, "base exponent, affine in H");
    rw->add_flag("--second", second, "second-regime rewrite");
    rw->add_option("--tset", tset, "T-set component ids (second regime)");
    global(rw);
    rw->callback([&] {
        auto s = make_spec(graph_path, alpha, second || !tset.empty(), tset);
        auto f = s.taxonomy == Taxonomy::First ? du_rewrite_first(s) : du_rewrite_second(s);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"field", "value"});
            csv.row({"case", f.case_tag == CaseTag::A ? "A" : "B"});
            csv.row({"input_exponent", canonical_str(exponent(s))});
            csv.row({"max_exponent", canonical_str(f.max_exponent)});
            csv.row({"items_max", canonical_str(items_max(f))});
            csv.row({"items", std::to_string(f.items.size())});
            int k = 0;
            for (auto& it : f.items) {
                os << "# item " << k++ << ": " << it.provenance << "; multiplicity " << it.multiplicity
                   << "; alpha " << canonical_str(it.alpha) << "; exponent " << canonical_str(exponent(it));
                if (!it.t_set.empty()) {
                    os << "; tset";
                    for (auto id : it.t_set) os << ' ' << id;
                }
                os << '\n';
                std::istringstream body(format_graph(it.graph));
                for (std::string line; std::getline(body, line);) os << "#   " << line << '\n';
            }
        });
    });

    // beta-slope
    long long nmin = 256, nmax = 4096;
    double T = 1.0;
    auto* bs = app.add_subcommand("beta-slope", "beta-sum values over a dyadic n grid and their fitted slope");
    bs->add_option("--graph", graph_path, "graph file with zero vertex weights")->required()->check(CLI::ExistingFile);
    bs->add_option("--H", H, "Hurst index")->check(kHurst);
    bs->add_option("--nmin", nmin, "smallest n (power-of-two steps)");
    bs->add_option("--nmax", nmax, "largest n");
    bs->add_option("--T", T, "horizon")->check(CLI::PositiveNumber);
    global(bs);
    bs->callback([&] {
        auto g = load_graph(graph_path);
        auto ns = pow2_grid(nmin, nmax);
        std::vector<double> vs(ns.size());
        parallel_for(ns.size(), resolve_threads(common.threads),
                     [&](std::size_t i) { vs[i] = graph_beta_sum(g, ns[i], H, T); });
        auto fit = fit_order(ns, vs);
        bool bound = false;
        auto pred = beta_prediction(g, bound);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"n", "value"});
            for (std::size_t i = 0; i < ns.size(); ++i) csv.row({std::to_string(ns[i]), num(vs[i])});
        });
        Csv summary(std::cout, false, {"field", "value"});
        summary.row({"slope", num(fit.slope)});
        summary.row({"intercept", num(fit.intercept)});
        summary.row({"r_squared", num(fit.r_squared)});
        summary.row({"dropped", std::to_string(fit.dropped)});
        summary.row({bound ? "predicted_upper_bound" : "predicted", canonical_str(pred)});
        summary.row({"predicted_value", num(pred.eval(H))});
    });

    // chaos-check
    std::uint64_t seed = 1;
    int trials = 200;
    auto* cc = app.add_subcommand("chaos-check", "product expansion vs Gaussian moment oracle on random configurations");
    cc->add_option("--seed", seed, "RNG seed");
    cc->add_option("--trials", trials, "number of random configurations")->check(CLI::PositiveNumber);
    global(cc);
    cc->callback([&] {
        std::mt19937_64 rng(seed);
        int bad = 0;
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"trial", "q", "R", "expansion", "oracle", "rel_error", "pass"});
            for (int t = 0; t < trials; ++t) {
                int nv = 1 + static_cast<int>(rng() % 4), qbar = 0;
                std::vector<int> q(nv);
                for (auto& x : q) qbar += (x = static_cast<int>(rng() % 4));
                std::uniform_real_distribution<double> u(0, 1);
                Eigen::MatrixXd F(nv + 1, 5);
                for (int i = 0; i <= nv; ++i)
                    for (int j = 0; j < 5; ++j) F(i, j) = u(rng);
                Eigen::MatrixXd gram = F * F.transpose();
                std::string qs;
                for (int x : q) qs += (qs.empty() ? "" : " ") + std::to_string(x);
                for (int R = qbar % 2; R <= qbar && qbar + R <= kMaxOracleDegree; R += 2) {
                    std::map<vertex, int> qm;
                    for (int v = 0; v < nv; ++v) qm[v] = q[v];
                    double a = 0;
                    for (auto& term : chaos_product_expand(qm)) {
                        int r = 0;
                        for (auto& kv : term.residual) r += kv.second;
                        if (r != R) continue;
                        double x = static_cast<double>(term.constant) * static_cast<double>(factorial(R));
                        for (auto& [e, k] : term.pi) x *= std::pow(gram(e.first, e.second), k);
                        for (auto& [v, rv] : term.residual) x *= std::pow(gram(v, nv), rv);
                        a += x;
                    }
                    ChaosConfig cfg{q, gram};
                    cfg.q.push_back(R);
                    double b = gaussian_moment_oracle(cfg);
                    double rel = (a == b) ? 0.0 : std::fabs(a - b) / std::max(std::fabs(b), 1e-300);
                    bool ok = rel < 1e-10;
                    bad += !ok;
                    csv.row({std::to_string(t), qs, std::to_string(R), num(a), num(b), num(rel), ok ? "pass" : "fail"});
                }
            }
        });
        if (bad) status = kAcceptance;
    });

    // simulate-fou
    FouCli fou;
    int n = 256, substeps = 8;
    long long paths = 10000;
    std::string method_name_opt = "auto";
    auto* sf = app.add_subcommand("simulate-fou", "Monte Carlo of V_n and Z_n for the fOU process");
    fou.add(sf);
    sf->add_option("--n", n, "observation count")->check(CLI::PositiveNumber);
    sf->add_option("--paths", paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
    sf->add_option("--substeps", substeps, "fine steps per observation")->check(CLI::PositiveNumber);
    sf->add_option("--seed", seed, "RNG seed");
    sf->add_option("--method", method_name_opt, "fBm sampler")->check(CLI::IsMember({"auto", "cholesky", "circulant"}));
    global(sf);
    sf->callback([&] {
        auto m = method_name_opt == "cholesky"    ? FbmMethod::Cholesky
                 : method_name_opt == "circulant" ? FbmMethod::Circulant
                                                  : FbmMethod::Auto;
        auto st = simulate_fou(fou.p, n, paths, substeps, seed, m, resolve_threads(common.threads));
        double mv = 0, mz = 0, vz = 0;
        for (auto& s : st) {
            mv += s.v_n;
            mz += s.z_n;
        }
        mv /= paths;
        mz /= paths;
        for (auto& s : st) vz += (s.z_n - mz) * (s.z_n - mz);
        vz /= std::max<long long>(paths - 1, 1);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"path_id", "v_n", "z_n", "int_x2"});
            for (std::size_t i = 0; i < st.size(); ++i)
                csv.row({std::to_string(i), num(st[i].v_n), num(st[i].z_n), num(st[i].int_x2)});
        });
        std::ostream& os = common.out.empty() ? std::cerr : std::cout;
        Csv summary(os, false, {"field", "value"});
        summary.row({"v_inf", num(fou_v_inf(fou.p.sigma, fou.p.T, fou.p.H))});
        summary.row({"mean_v_n", num(mv)});
        summary.row({"mean_z_n", num(mz)});
        summary.row({"var_z_n", num(vz)});
        summary.row({"g_inf", num(g_infinity_fou(fou.p.sigma, fou.p.T, fou.p.H))});
    });

    // expand-fou
    double zmin = -6, zmax = 6;
    int points = 241;
    auto* ef = app.add_subcommand("expand-fou", "expansion density and CDF of Z_n for the fOU process");
    fou.add(ef);
    ef->add_option("--n", n, "observation count")->check(CLI::PositiveNumber);
    ef->add_option("--zmin", zmin, "left end of the z grid");
    ef->add_option("--zmax", zmax, "right end of the z grid");
    ef->add_option("--points", points, "grid points")->check(CLI::Range(2, 1000000));
    global(ef);
    ef->callback([&] {
        if (!(zmin < zmax)) fail(errc::domain_error, "need zmin < zmax");
        auto d = fou_density(fou.p, n);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"z", "density", "cdf", "gaussian_density"});
            for (int i = 0; i < points; ++i) {
                double z = zmin + (zmax - zmin) * i / (points - 1);
                csv.row({num(z), num(expansion_density(d, z)), num(expansion_cdf(d, z)), num(normal_pdf(z, d.g_inf))});
            }
        });
        std::ostream& os = common.out.empty() ? std::cerr : std::cout;
        Csv summary(os, false, {"field", "value"});
        summary.row({"c1", num(d.symbol.at(1))});
        summary.row({"g_inf", num(d.g_inf)});
        summary.row({"r_n", num(d.r_n)});
    });

    // compare
    std::string samples_path;
    int reps = 1000;
    auto* cp = app.add_subcommand("compare", "Kolmogorov distances of Z_n samples to the expansion and to the Gaussian");
    fou.add(cp);
    cp->add_option("--samples", samples_path, "CSV with a z_n column")->required()->check(CLI::ExistingFile);
    cp->add_option("--n", n, "observation count the samples were drawn at")->check(CLI::PositiveNumber);
    cp->add_option("--bootstrap", reps, "bootstrap replicates");
    cp->add_option("--seed", seed, "bootstrap seed");
    global(cp);
    cp->callback([&] {
        auto z = read_column(samples_path, "z_n");
        auto d = fou_density(fou.p, n);
        Cdf F = [&d](double x) { return expansion_cdf(d, x); };
        Cdf G = [&d](double x) { return normal_cdf(x, d.g_inf); };
        double dh = kolmogorov_distance(z, F), dg = kolmogorov_distance(z, G);
        auto ci = bootstrap_distance_difference(z, F, G, reps, seed);
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"field", "value"});
            csv.row({"samples", std::to_string(z.size())});
            csv.row({"d_expansion", num(dh)});
            csv.row({"d_gaussian", num(dg)});
            csv.row({"difference", num(ci.estimate)});
            csv.row({"ci95_lo", num(ci.lo)});
            csv.row({"ci95_hi", num(ci.hi)});
            csv.row({"p_value_expansion", num(kolmogorov_q(std::sqrt(static_cast<double>(z.size())) * dh))});
            csv.row({"p_value_gaussian", num(kolmogorov_q(std::sqrt(static_cast<double>(z.size())) * dg))});
        });
    });

    // regression
    auto* rg = app.add_subcommand("regression", "hand-derived exponent table");
    global(rg);
    rg->callback([&] {
        bool all = true;
        with_output(common.out, [&](std::ostream& os) {
            Csv csv(os, !common.no_timestamp, {"name", "expected", "computed", "pass"});
            for (auto& o : run_regression()) {
                all &= o.pass;
                csv.row({o.c.name, o.c.expected, o.computed, o.pass ? "pass" : "fail"});
            }
        });
        if (!all) status = kAcceptance;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    } catch (const fexpo::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return status;
}
