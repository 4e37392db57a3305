#include "hsym/exprcore/number.hpp"

#include <stdexcept>

namespace hsym::exprcore {

Q make_q(long num, long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    Q q(num, den);
    q.canonicalize();
    return q;
}

std::string q_to_string(const Q& q) { return q.get_str(); }

double q_to_double(const Q& q) { return q.get_d(); }

QI& QI::operator+=(const QI& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
}

QI& QI::operator-=(const QI& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
}

QI& QI::operator*=(const QI& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
        re_ *= o.re_;
        return *this;
    }
    Q r = re_ * o.re_ - im_ * o.im_;
    Q i = re_ * o.im_ + im_ * o.re_;
    re_ = r;
    im_ = i;
    return *this;
}

QI& QI::operator/=(const QI& o) {
    if (o.is_zero()) throw std::domain_error("division by zero coefficient");
    if (sgn(o.im_) == 0) {
        re_ /= o.re_;
        im_ /= o.re_;
        return *this;
    }
    Q n = o.re_ * o.re_ + o.im_ * o.im_;
    Q r = (re_ * o.re_ + im_ * o.im_) / n;
    Q i = (im_ * o.re_ - re_ * o.im_) / n;
    re_ = r;
    im_ = i;
    return *this;
}

int cmp(const QI& a, const QI& b) {
    int c = ::cmp(a.re(), b.re());
    if (c != 0) return c < 0 ? -1 : 1;
    c = ::cmp(a.im(), b.im());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

std::string to_string(const QI& c) {
    if (c.is_real()) return q_to_string(c.re());
    if (sgn(c.re()) == 0) {
        if (c.im() == 1) return "I";
        if (c.im() == -1) return "-I";
        return q_to_string(c.im()) + "*I";
    }
    std::string s = "(" + q_to_string(c.re());
    if (sgn(c.im()) > 0) s += "+";
    if (c.im() == 1) s += "I";
    else if (c.im() == -1) s += "-I";
    else s += q_to_string(c.im()) + "*I";
    return s + ")";
}

} // namespace hsym::exprcore
