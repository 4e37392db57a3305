#include "hsym/exprcore/text.hpp"

#include <cctype>

namespace hsym::exprcore {

namespace {

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    Expr run() {
        Expr e = sum();
        skip();
        if (p_ != s_.size()) fail("unexpected '" + std::string(1, s_[p_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, p_); }

    void skip() {
        while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
    }

    bool eat(char c) {
        skip();
        if (p_ < s_.size() && s_[p_] == c) {
            ++p_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }

    Expr sum() {
        Expr e = prod();
        for (;;) {
            if (eat('+')) e += prod();
            else if (eat('-')) e -= prod();
            else return e;
        }
    }

    Expr prod() {
        Expr e = unary();
        for (;;) {
            if (eat('*')) {
                e = e * unary();
            } else if (eat('/')) {
                size_t at = p_;
                Expr d = unary();
                if (d.is_zero()) throw ParseError("division by zero", at);
                if (!d.is_single_term()) throw ParseError("division by a sum is outside the expression class", at);
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    long integer_exponent() {
        bool paren = eat('(');
        bool neg = eat('-');
        skip();
        size_t start = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        if (start == p_) fail("expected integer exponent");
        long n = std::stol(s_.substr(start, p_ - start));
        if (paren) expect(')');
        return neg ? -n : n;
    }

    Expr power() {
        Expr base = atom();
        if (eat('^')) {
            size_t at = p_;
            long n = integer_exponent();
            try {
                return base.pow(static_cast<int>(n));
            } catch (const OutOfClass& ex) {
                throw ParseError(ex.what(), at);
            }
        }
        return base;
    }

    Expr number() {
        size_t start = p_;
        while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        std::string whole = s_.substr(start, p_ - start);
        std::string frac;
        if (p_ < s_.size() && s_[p_] == '.') {
            ++p_;
            size_t fs = p_;
            while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
            frac = s_.substr(fs, p_ - fs);
        }
        if (whole.empty() && frac.empty()) fail("malformed number");
        mpz_class num(whole.empty() ? std::string("0") : whole);
        mpz_class den = 1;
        for (char c : frac) {
            num = num * 10 + (c - '0');
            den *= 10;
        }
        Q q(num, den);
        if (p_ + 1 < s_.size() && (s_[p_] == 'e' || s_[p_] == 'E') &&
            (std::isdigit(static_cast<unsigned char>(s_[p_ + 1])) ||
             ((s_[p_ + 1] == '-' || s_[p_ + 1] == '+') && p_ + 2 < s_.size() &&
              std::isdigit(static_cast<unsigned char>(s_[p_ + 2]))))) {
            ++p_;
            bool neg = s_[p_] == '-';
            if (s_[p_] == '-' || s_[p_] == '+') ++p_;
            size_t es = p_;
            while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
            long ex = std::stol(s_.substr(es, p_ - es));
            mpz_class scale;
            mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(ex));
            if (neg) q /= scale;
            else q *= scale;
        }
        q.canonicalize();
        return Expr(q);
    }

    std::string ident() {
        size_t start = p_;
        while (p_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[p_])) || s_[p_] == '_')) ++p_;
        if (p_ < s_.size() && s_[p_] == '~') ++p_;
        while (p_ < s_.size() && s_[p_] == '\'') ++p_;
        return s_.substr(start, p_ - start);
    }

    Expr atom() {
        skip();
        if (p_ >= s_.size()) fail("unexpected end of input");
        char c = s_[p_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++p_;
            Expr e = sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t at = p_;
            std::string name = ident();
            skip();
            if ((name == "exp" || name == "sin" || name == "cos") && p_ < s_.size() && s_[p_] == '(') {
                ++p_;
                Expr arg = sum();
                expect(')');
                try {
                    if (name == "exp") return exp(arg);
                    if (name == "sin") return sin(arg);
                    return cos(arg);
                } catch (const OutOfClass& ex) {
                    throw ParseError(ex.what(), at);
                }
            }
            if (p_ < s_.size() && s_[p_] == '(') throw ParseError("unknown function '" + name + "'", at);
            if (name == "I") return Expr::imag_unit();
            return Expr::sym(name);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    size_t p_ = 0;
};

std::string factors_of(const Monomial& m, const Poly& rate, const std::string& trig) {
    std::string f = mono_to_string(m);
    auto add = [&](const std::string& x) {
        if (x.empty()) return;
        if (!f.empty()) f += "*";
        f += x;
    };
    if (!rate.is_zero()) add("exp(" + to_string(rate) + ")");
    add(trig);
    return f;
}

void append_term(std::string& out, const std::string& t) {
    if (out.empty()) {
        out = t;
    } else if (t[0] == '-') {
        out += " - " + t.substr(1);
    } else {
        out += " + " + t;
    }
}

bool positive_leading(const Poly& p) { return !p.is_zero() && sgn(p.entries().front().second) > 0; }

} // namespace

Expr parse(const std::string& text) { return Parser(text).run(); }

std::string format_product(const Q& c, const std::string& factors) {
    Q a = abs(c);
    std::string s = sgn(c) < 0 ? "-" : "";
    std::string num = a.get_num().get_str();
    std::string den = a.get_den().get_str();
    if (factors.empty()) {
        s += num;
    } else {
        if (num != "1") s += num + "*";
        s += factors;
    }
    if (den != "1") s += "/" + den;
    return s;
}

std::string print(const Expr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    if (e.is_real()) {
        for (const auto& t : e.terms()) {
            if (t.phase.is_zero()) {
                append_term(out, format_product(t.c.re(), factors_of(t.m, t.rate, "")));
                continue;
            }
            if (!positive_leading(t.phase)) continue;
            std::string ph = to_string(t.phase);
            if (sgn(t.c.re()) != 0)
                append_term(out, format_product(t.c.re() * 2, factors_of(t.m, t.rate, "cos(" + ph + ")")));
            if (sgn(t.c.im()) != 0)
                append_term(out, format_product(-t.c.im() * 2, factors_of(t.m, t.rate, "sin(" + ph + ")")));
        }
        return out;
    }
    for (const auto& t : e.terms()) {
        std::string trig = t.phase.is_zero() ? "" : "exp(I*(" + to_string(t.phase) + "))";
        std::string f = factors_of(t.m, t.rate, trig);
        if (t.c.is_real()) {
            append_term(out, format_product(t.c.re(), f));
        } else if (sgn(t.c.re()) == 0) {
            append_term(out, format_product(t.c.im(), f.empty() ? "I" : "I*" + f));
        } else {
            std::string s = to_string(t.c);
            append_term(out, f.empty() ? s : s + "*" + f);
        }
    }
    return out;
}

} // namespace hsym::exprcore
