#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fexpo/error.hpp"
#include "fexpo/graph.hpp"

namespace fexpo {

// Graph text format:
//   v <label> <q>
//   e <label1> <label2> <theta>
// '#' starts a comment. Edges may reference vertices declared later.
inline WeightedGraph parse_graph(const std::string& text) {
    std::map<vertex, int> q;
    std::map<vpair, int> th;
    std::set<vpair> seen_edges;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto bad = [&](const std::string& msg) {
        fail(errc::parse_error, "line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "v") {
            long long label, w;
            if (!(ls >> label >> w)) bad("expected 'v <label> <q>'");
            if (w < 0) bad("negative vertex weight");
            if (!q.emplace(static_cast<vertex>(label), static_cast<int>(w)).second)
                bad("duplicate vertex " + std::to_string(label));
        } else if (kind == "e") {
            long long a, b, w;
            if (!(ls >> a >> b >> w)) bad("expected 'e <label1> <label2> <theta>'");
            if (a == b) bad("self-loop at " + std::to_string(a));
            if (w < 0) bad("negative edge weight");
            auto key = make_pair_key(static_cast<vertex>(a), static_cast<vertex>(b));
            if (!seen_edges.insert(key).second) bad("duplicate edge");
            if (w > 0) th[key] = static_cast<int>(w);
        } else {
            bad("unknown declaration '" + kind + "'");
        }
        std::string extra;
        if (ls >> extra) bad("trailing token '" + extra + "'");
    }
    for (auto& kv : seen_edges)
        if (!q.count(kv.first) || !q.count(kv.second)) fail(errc::parse_error, "edge references undeclared vertex");
    if (q.empty()) fail(errc::parse_error, "no vertices declared");
    return WeightedGraph(std::move(q), std::move(th));
}

inline WeightedGraph load_graph(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(errc::parse_error, "cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_graph(ss.str());
}

inline std::string format_graph(const WeightedGraph& g) {
    std::ostringstream os;
    for (auto& [v, w] : g.q()) os << "v " << v << ' ' << w << '\n';
    for (auto& [e, w] : g.theta()) os << "e " << e.first << ' ' << e.second << ' ' << w << '\n';
    return os.str();
}

} // namespace fexpo
