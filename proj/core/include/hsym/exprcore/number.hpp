#pragma once

#include <gmpxx.h>

#include <complex>
#include <string>

namespace hsym::exprcore {

using Q = mpq_class;

Q make_q(long num, long den = 1);
std::string q_to_string(const Q& q);
double q_to_double(const Q& q);

// Gaussian rational re + i*im.
class QI {
public:
    QI() = default;
    QI(long n) : re_(n) {}
    QI(const Q& re) : re_(re) {}
    QI(const Q& re, const Q& im) : re_(re), im_(im) {}

    static QI imag_unit() { return QI(Q(0), Q(1)); }

    const Q& re() const { return re_; }
    const Q& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
    QI conj() const { return QI(re_, -im_); }
    std::complex<double> to_complex() const { return {q_to_double(re_), q_to_double(im_)}; }

    QI operator-() const { return QI(-re_, -im_); }
    QI& operator+=(const QI& o);
    QI& operator-=(const QI& o);
    QI& operator*=(const QI& o);
    QI& operator/=(const QI& o);

    friend QI operator+(QI a, const QI& b) { return a += b; }
    friend QI operator-(QI a, const QI& b) { return a -= b; }
    friend QI operator*(QI a, const QI& b) { return a *= b; }
    friend QI operator/(QI a, const QI& b) { return a /= b; }
    friend bool operator==(const QI& a, const QI& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const QI& a, const QI& b) { return !(a == b); }

private:
    Q re_{0};
    Q im_{0};
};

int cmp(const QI& a, const QI& b);
std::string to_string(const QI& c);

} // namespace hsym::exprcore
