#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace ncphase {

using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1)
{
    if (den == 0) throw std::domain_error("rational with zero denominator");
    Rational r(static_cast<long>(num), static_cast<long>(den));
    r.canonicalize();
    return r;
}

inline std::string to_string(const Rational& r)
{
    return r.get_str();
}

/// Exact element of Q[i]. Every coefficient in the engine is one of these.
class Gauss {
public:
    Gauss() = default;
    Gauss(std::int64_t v) : re_(static_cast<long>(v)) {}  // NOLINT(implicit)
    Gauss(int v) : re_(v) {}                               // NOLINT(implicit)
    Gauss(Rational re) : re_(std::move(re)) {}            // NOLINT(implicit)
    Gauss(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {}

    static Gauss i() { return Gauss(Rational(0), Rational(1)); }
    static Gauss frac(std::int64_t num, std::int64_t den) { return Gauss(make_rational(num, den)); }

    const Rational& re() const { return re_; }
    const Rational& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    Gauss conj() const { return Gauss(re_, -im_); }
    Rational norm() const { return re_ * re_ + im_ * im_; }

    Gauss operator-() const { return Gauss(-re_, -im_); }

    /// Multiplies by i^k without arithmetic.
    Gauss& rotate(int k)
    {
        switch (((k % 4) + 4) % 4) {
        case 1:
            std::swap(re_, im_);
            re_ = -re_;
            break;
        case 2:
            re_ = -re_;
            im_ = -im_;
            break;
        case 3:
            std::swap(re_, im_);
            im_ = -im_;
            break;
        default:
            break;
        }
        return *this;
    }

    Gauss& operator+=(const Gauss& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    Gauss& operator-=(const Gauss& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    Gauss& operator*=(const Gauss& o)
    {
        if (sgn(im_) == 0 && sgn(o.im_) == 0) {
            re_ *= o.re_;
            return *this;
        }
        Rational r = re_ * o.re_ - im_ * o.im_;
        Rational m = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(m);
        return *this;
    }
    Gauss& operator/=(const Gauss& o)
    {
        if (o.is_zero()) throw std::domain_error("division by zero Gaussian rational");
        if (sgn(o.im_) == 0) {
            re_ /= o.re_;
            im_ /= o.re_;
            return *this;
        }
        Rational d = o.norm();
        Gauss num = *this * o.conj();
        re_ = num.re_ / d;
        im_ = num.im_ / d;
        return *this;
    }

    friend Gauss operator+(Gauss a, const Gauss& b) { return a += b; }
    friend Gauss operator-(Gauss a, const Gauss& b) { return a -= b; }
    friend Gauss operator*(Gauss a, const Gauss& b) { return a *= b; }
    friend Gauss operator/(Gauss a, const Gauss& b) { return a /= b; }

    friend bool operator==(const Gauss& a, const Gauss& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Gauss& a, const Gauss& b) { return !(a == b); }

    /// Canonical text: `3/2`, `-i`, `1/2*i`, `(1 + 2*i)`.
    std::string str() const
    {
        if (sgn(im_) == 0) return re_.get_str();
        std::string im_part;
        if (im_ == 1)
            im_part = "i";
        else if (im_ == -1)
            im_part = "-i";
        else
            im_part = im_.get_str() + "*i";
        if (sgn(re_) == 0) return im_part;
        if (sgn(im_) < 0) {
            Rational a = -im_;
            std::string mag = a == 1 ? std::string("i") : a.get_str() + "*i";
            return "(" + re_.get_str() + " - " + mag + ")";
        }
        return "(" + re_.get_str() + " + " + im_part + ")";
    }

    friend std::ostream& operator<<(std::ostream& os, const Gauss& g) { return os << g.str(); }

private:
    Rational re_{0};
    Rational im_{0};
};

inline Gauss pow(Gauss base, unsigned e)
{
    Gauss r(1);
    while (e != 0) {
        if (e & 1U) r *= base;
        base *= base;
        e >>= 1U;
    }
    return r;
}

/// Powers of i without multiplication.
inline Gauss i_pow(int e)
{
    switch (((e % 4) + 4) % 4) {
    case 0: return Gauss(1);
    case 1: return Gauss::i();
    case 2: return Gauss(-1);
    default: return -Gauss::i();
    }
}

inline Rational factorial(unsigned n)
{
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(f);
}

inline Rational binomial(unsigned n, unsigned k)
{
    mpz_class b;
    mpz_bin_uiui(b.get_mpz_t(), n, k);
    return Rational(b);
}

}  // namespace ncphase
