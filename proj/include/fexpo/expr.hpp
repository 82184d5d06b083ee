#pragma once

// Symbolic exponents: trees of affine functions a + bH (rational a, b)
// combined by sum / max / min, with an exact piecewise-affine normal form
// on the open interval 1/2 < H < 3/4.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "fexpo/error.hpp"

namespace fexpo {

using Q = mpq_class;

inline Q qfrac(long n, long d) {
    Q r(n, d);
    r.canonicalize();
    return r;
}

inline const Q H_LO = qfrac(1, 2);
inline const Q H_HI = qfrac(3, 4);

inline double to_double(const Q& x) { return x.get_d(); }

inline std::string q_str(const Q& x) { return x.get_str(); }

struct Affine {
    Q a{0}, b{0};  // a + b H

    Q at(const Q& h) const { return a + b * h; }
    double at(double h) const { return to_double(a) + to_double(b) * h; }
    bool is_const() const { return b == 0; }

    friend Affine operator+(const Affine& x, const Affine& y) { return {x.a + y.a, x.b + y.b}; }
    friend Affine operator-(const Affine& x, const Affine& y) { return {x.a - y.a, x.b - y.b}; }
    friend Affine operator*(const Q& c, const Affine& x) { return {c * x.a, c * x.b}; }
    friend bool operator==(const Affine& x, const Affine& y) { return x.a == y.a && x.b == y.b; }
    friend bool operator!=(const Affine& x, const Affine& y) { return !(x == y); }
};

inline std::string affine_str(const Affine& f) {
    auto coef = [](const Q& b) -> std::string {
        if (b == 1) return "H";
        if (b.get_den() == 1) return b.get_str() + "H";
        return "(" + q_str(b) + ")H";
    };
    if (f.b == 0) return q_str(f.a);
    if (f.a == 0) return f.b == -1 ? "-H" : coef(f.b);
    if (f.b > 0 && f.a < 0) return coef(f.b) + "-" + q_str(-f.a);
    std::string s = q_str(f.a);
    if (f.b > 0) return s + "+" + coef(f.b);
    return s + "-" + coef(-f.b);
}

// ---- piecewise-affine normal form ----------------------------------------

class Piecewise {
public:
    explicit Piecewise(const Affine& f) : bp_{H_LO, H_HI}, pieces_{f} {}
    Piecewise(std::vector<Q> bp, std::vector<Affine> pieces) : bp_(std::move(bp)), pieces_(std::move(pieces)) {
        if (bp_.size() != pieces_.size() + 1 || bp_.front() != H_LO || bp_.back() != H_HI)
            fail(errc::domain_error, "malformed piecewise function");
        for (std::size_t i = 0; i + 1 < bp_.size(); ++i)
            if (!(bp_[i] < bp_[i + 1])) fail(errc::domain_error, "breakpoints must increase");
        merge();
    }

    const std::vector<Q>& breakpoints() const { return bp_; }
    const std::vector<Affine>& pieces() const { return pieces_; }

    Q at(const Q& h) const {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (h <= bp_[i + 1]) return pieces_[i].at(h);
        return pieces_.back().at(h);
    }
    double at(double h) const {
        for (std::size_t i = 0; i < pieces_.size(); ++i)
            if (h <= to_double(bp_[i + 1])) return pieces_[i].at(h);
        return pieces_.back().at(h);
    }

    friend bool operator==(const Piecewise& x, const Piecewise& y) {
        return x.bp_ == y.bp_ && x.pieces_ == y.pieces_;
    }

    friend Piecewise operator+(const Piecewise& x, const Piecewise& y) {
        return combine(x, y, [](const Q&, const Q&, const Affine& f, const Affine& g) {
            return std::vector<std::pair<Q, Affine>>{{Q{0}, f + g}};
        });
    }
    friend Piecewise operator-(const Piecewise& x, const Piecewise& y) {
        return combine(x, y, [](const Q&, const Q&, const Affine& f, const Affine& g) {
            return std::vector<std::pair<Q, Affine>>{{Q{0}, f - g}};
        });
    }
    static Piecewise pmax(const Piecewise& x, const Piecewise& y) { return lattice(x, y, true); }
    static Piecewise pmin(const Piecewise& x, const Piecewise& y) { return lattice(x, y, false); }
    Piecewise scaled(const Q& c) const {
        std::vector<Affine> p;
        for (auto& f : pieces_) p.push_back(c * f);
        return Piecewise(bp_, p);
    }

    // Minimum over the closed interval [1/2, 3/4]; attained at a breakpoint.
    Q min_value() const {
        Q m = at(bp_[0]);
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            m = std::min(m, pieces_[i].at(bp_[i]));
            m = std::min(m, pieces_[i].at(bp_[i + 1]));
        }
        return m;
    }
    Q max_value() const { return -scaled(Q{-1}).min_value(); }

    bool is_convex() const { return *this == max_of_pieces(); }
    bool is_concave() const { return *this == min_of_pieces(); }

    std::string str() const {
        if (pieces_.size() == 1) return affine_str(pieces_[0]);
        auto list = [&] {
            std::string s;
            auto ord = pieces_;
            for (std::size_t i = 0; i < ord.size(); ++i) s += (i ? ", " : "") + affine_str(ord[i]);
            return s;
        };
        if (is_convex()) return "max(" + list() + ")";
        if (is_concave()) return "min(" + list() + ")";
        std::string s = "piecewise(";
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (i) s += "; ";
            s += affine_str(pieces_[i]) + " on [" + q_str(bp_[i]) + "," + q_str(bp_[i + 1]) + "]";
        }
        return s + ")";
    }

private:
    std::vector<Q> bp_;
    std::vector<Affine> pieces_;

    Piecewise max_of_pieces() const {
        Piecewise acc(pieces_[0]);
        for (std::size_t i = 1; i < pieces_.size(); ++i) acc = pmax(acc, Piecewise(pieces_[i]));
        return acc;
    }
    Piecewise min_of_pieces() const {
        Piecewise acc(pieces_[0]);
        for (std::size_t i = 1; i < pieces_.size(); ++i) acc = pmin(acc, Piecewise(pieces_[i]));
        return acc;
    }

    void merge() {
        std::vector<Q> bp{bp_[0]};
        std::vector<Affine> pc{pieces_[0]};
        for (std::size_t i = 1; i < pieces_.size(); ++i) {
            if (pieces_[i] == pc.back()) continue;
            bp.push_back(bp_[i]);
            pc.push_back(pieces_[i]);
        }
        bp.push_back(bp_.back());
        bp_ = std::move(bp);
        pieces_ = std::move(pc);
    }

    // f(l, r, fx, fy) returns sub-pieces as (split point offsets are absolute
    // breakpoints; first entry's Q is ignored) on [l, r].
    template <class F>
    static Piecewise combine(const Piecewise& x, const Piecewise& y, F f) {
        std::vector<Q> cuts = x.bp_;
        cuts.insert(cuts.end(), y.bp_.begin(), y.bp_.end());
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        std::vector<Q> bp{cuts[0]};
        std::vector<Affine> pc;
        std::size_t ix = 0, iy = 0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            while (x.bp_[ix + 1] <= cuts[i]) ++ix;
            while (y.bp_[iy + 1] <= cuts[i]) ++iy;
            auto parts = f(cuts[i], cuts[i + 1], x.pieces_[ix], y.pieces_[iy]);
            for (std::size_t k = 0; k < parts.size(); ++k) {
                if (k > 0) bp.push_back(parts[k].first);
                pc.push_back(parts[k].second);
            }
            bp.push_back(cuts[i + 1]);
        }
        return Piecewise(bp, pc);
    }

    static Piecewise lattice(const Piecewise& x, const Piecewise& y, bool take_max) {
        return combine(x, y, [take_max](const Q& l, const Q& r, const Affine& f, const Affine& g) {
            auto pick = [&](const Q& h) {
                Q d = f.at(h) - g.at(h);
                bool f_bigger = d > 0;
                return (take_max == f_bigger) ? f : g;
            };
            Affine d = f - g;
            std::vector<std::pair<Q, Affine>> out;
            if (d.b != 0) {
                Q c = -d.a / d.b;
                if (l < c && c < r) {
                    out.push_back({l, pick((l + c) / 2)});
                    out.push_back({c, pick((c + r) / 2)});
                    return out;
                }
            }
            out.push_back({l, pick((l + r) / 2)});
            return out;
        });
    }
};

// ---- expression tree -----------------------------------------------------

class Expr {
public:
    enum class Kind { Affine, Sum, Max, Min };

    Expr() : Expr(Affine{}) {}
    Expr(const Affine& f) : node_(std::make_shared<Node>(Node{Kind::Affine, f, {}})) {}
    static Expr constant(const Q& a) { return Expr(Affine{a, 0}); }
    static Expr affine(const Q& a, const Q& b) { return Expr(Affine{a, b}); }

    static Expr sum(std::vector<Expr> xs) { return nary(Kind::Sum, std::move(xs)); }
    static Expr max(std::vector<Expr> xs) { return nary(Kind::Max, std::move(xs)); }
    static Expr min(std::vector<Expr> xs) { return nary(Kind::Min, std::move(xs)); }

    Kind kind() const { return node_->kind; }
    const Affine& leaf() const { return node_->leaf; }
    const std::vector<Expr>& kids() const { return node_->kids; }

    double eval(double h) const {
        switch (kind()) {
        case Kind::Affine: return leaf().at(h);
        case Kind::Sum: {
            double s = 0;
            for (auto& k : kids()) s += k.eval(h);
            return s;
        }
        case Kind::Max: {
            double m = kids()[0].eval(h);
            for (auto& k : kids()) m = std::max(m, k.eval(h));
            return m;
        }
        case Kind::Min: {
            double m = kids()[0].eval(h);
            for (auto& k : kids()) m = std::min(m, k.eval(h));
            return m;
        }
        }
        return 0;
    }

    Piecewise canonical() const {
        switch (kind()) {
        case Kind::Affine: return Piecewise(leaf());
        case Kind::Sum: {
            Piecewise acc = kids()[0].canonical();
            for (std::size_t i = 1; i < kids().size(); ++i) acc = acc + kids()[i].canonical();
            return acc;
        }
        case Kind::Max:
        case Kind::Min: {
            Piecewise acc = kids()[0].canonical();
            for (std::size_t i = 1; i < kids().size(); ++i)
                acc = kind() == Kind::Max ? Piecewise::pmax(acc, kids()[i].canonical())
                                          : Piecewise::pmin(acc, kids()[i].canonical());
            return acc;
        }
        }
        return Piecewise(Affine{});
    }

    // c * expr with max/min swapped for negative c.
    Expr scaled(const Q& c) const {
        switch (kind()) {
        case Kind::Affine: return Expr(c * leaf());
        default: {
            std::vector<Expr> ks;
            for (auto& k : kids()) ks.push_back(k.scaled(c));
            Kind kd = kind();
            if (c < 0 && kd == Kind::Max)
                kd = Kind::Min;
            else if (c < 0 && kd == Kind::Min)
                kd = Kind::Max;
            return nary(kd, std::move(ks));
        }
        }
    }

    std::string str() const {
        switch (kind()) {
        case Kind::Affine: return affine_str(leaf());
        case Kind::Sum: {
            std::string s;
            for (std::size_t i = 0; i < kids().size(); ++i) {
                std::string t = kids()[i].str();
                if (i && !t.empty() && t[0] == '-')
                    s += " - " + t.substr(1);
                else
                    s += (i ? " + " : "") + t;
            }
            return s;
        }
        case Kind::Max:
        case Kind::Min: {
            std::string s = kind() == Kind::Max ? "max(" : "min(";
            for (std::size_t i = 0; i < kids().size(); ++i) s += (i ? ", " : "") + kids()[i].str();
            return s + ")";
        }
        }
        return "";
    }

    friend Expr operator+(const Expr& x, const Expr& y) { return sum({x, y}); }
    friend Expr operator-(const Expr& x, const Expr& y) { return sum({x, y.scaled(Q{-1})}); }
    friend Expr operator*(const Q& c, const Expr& x) { return x.scaled(c); }

private:
    struct Node {
        Kind kind;
        Affine leaf;
        std::vector<Expr> kids;
    };
    std::shared_ptr<const Node> node_;

    static Expr nary(Kind k, std::vector<Expr> xs) {
        if (xs.empty()) {
            if (k == Kind::Sum) return Expr(Affine{});
            fail(errc::domain_error, "max/min of an empty list");
        }
        // flatten nested nodes of the same kind; fold affine summands
        std::vector<Expr> flat;
        Affine acc;
        bool have_acc = false;
        for (auto& x : xs) {
            if (x.kind() == k && k != Kind::Affine) {
                for (auto& c : x.kids()) flat.push_back(c);
            } else {
                flat.push_back(x);
            }
        }
        if (k == Kind::Sum) {
            std::vector<Expr> rest;
            for (auto& x : flat) {
                if (x.kind() == Kind::Affine) {
                    acc = acc + x.leaf();
                    have_acc = true;
                } else {
                    rest.push_back(x);
                }
            }
            if (rest.empty()) return Expr(acc);
            if (have_acc && acc != Affine{}) rest.insert(rest.begin(), Expr(acc));
            if (rest.size() == 1) return rest[0];
            flat = std::move(rest);
        }
        if (flat.size() == 1) return flat[0];
        Expr e;
        e.node_ = std::make_shared<Node>(Node{k, Affine{}, std::move(flat)});
        return e;
    }
};

// Exact symbolic comparisons on the open interval (1/2, 3/4).
inline bool sym_equal(const Expr& x, const Expr& y) { return x.canonical() == y.canonical(); }
inline bool sym_leq(const Expr& x, const Expr& y) { return (y.canonical() - x.canonical()).min_value() >= 0; }

inline std::string canonical_str(const Expr& x) { return x.canonical().str(); }

// ---- parser ----------------------------------------------------------------
// Grammar: sum := prod (('+'|'-') prod)* ; prod := unary ('*'? unary)* ;
// unary := '-' unary | atom ; atom := number | 'H' | '(' sum ')' | max(...) | min(...)
// Products require all but one factor to be constant.

namespace detail {
class ExprParser {
public:
    explicit ExprParser(std::string s) : s_(std::move(s)) {}

    Expr parse() {
        Expr e = sum();
        skip();
        if (i_ != s_.size()) bad("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    std::string s_;
    std::size_t i_ = 0;

    [[noreturn]] void bad(const std::string& m) { fail(errc::parse_error, "exponent '" + s_ + "': " + m); }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool peek(char c) {
        skip();
        return i_ < s_.size() && s_[i_] == c;
    }
    bool eat(char c) {
        if (peek(c)) {
            ++i_;
            return true;
        }
        return false;
    }

    static bool constant(const Expr& e, Q* v) {
        if (e.kind() != Expr::Kind::Affine || e.leaf().b != 0) return false;
        *v = e.leaf().a;
        return true;
    }

    Expr sum() {
        Expr e = prod();
        for (;;) {
            if (eat('+'))
                e = e + prod();
            else if (eat('-'))
                e = e - prod();
            else
                return e;
        }
    }

    Expr prod() {
        Expr e = unary();
        for (;;) {
            skip();
            bool star = eat('*');
            skip();
            bool juxt = !star && i_ < s_.size() &&
                        (s_[i_] == 'H' || s_[i_] == '(' || std::isalpha(static_cast<unsigned char>(s_[i_])));
            if (!star && !juxt) return e;
            Expr f = unary();
            Q c;
            if (constant(e, &c))
                e = c * f;
            else if (constant(f, &c))
                e = c * e;
            else
                bad("product of two non-constant factors");
        }
    }

    Expr unary() {
        if (eat('-')) return unary().scaled(Q{-1});
        if (eat('+')) return unary();
        return atom();
    }

    Expr atom() {
        skip();
        if (i_ >= s_.size()) bad("unexpected end");
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(number());
        if (c == '(') {
            ++i_;
            Expr e = sum();
            if (!eat(')')) bad("missing ')'");
            return e;
        }
        if (s_.compare(i_, 3, "max") == 0 || s_.compare(i_, 3, "min") == 0) {
            bool is_max = s_[i_ + 1] == 'a';
            i_ += 3;
            if (!eat('(')) bad("expected '(' after max/min");
            std::vector<Expr> xs{sum()};
            while (eat(',')) xs.push_back(sum());
            if (!eat(')')) bad("missing ')'");
            return is_max ? Expr::max(xs) : Expr::min(xs);
        }
        if (c == 'H') {
            ++i_;
            return Expr::affine(0, 1);
        }
        bad("unexpected '" + std::string(1, c) + "'");
    }

    Q number() {
        std::int64_t num = 0, den = 1;
        bool digits = false;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
            num = num * 10 + (s_[i_++] - '0');
            digits = true;
        }
        if (i_ < s_.size() && s_[i_] == '.') {
            ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                num = num * 10 + (s_[i_++] - '0');
                den *= 10;
                digits = true;
            }
        }
        if (!digits) bad("malformed number");
        Q v = qfrac(num, den);
        // a/b rational literal
        if (i_ + 1 < s_.size() && s_[i_] == '/' && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
            ++i_;
            std::int64_t d = 0;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) d = d * 10 + (s_[i_++] - '0');
            if (d == 0) bad("division by zero");
            v /= d;
        }
        return v;
    }
};
} // namespace detail

inline Expr parse_expr(const std::string& s) { return detail::ExprParser(s).parse(); }

} // namespace fexpo
