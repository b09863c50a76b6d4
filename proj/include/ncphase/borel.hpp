#pragma once

#include "ncphase/gauss.hpp"
#include "ncphase/report.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncphase {

/// Element of the tensor power U(b)^{(x) legs} of the Borel algebra spanned by
/// A = a.p and D = x.p with [D, A] = i A. Each leg is PBW ordered, A^a D^d,
/// and everything beyond total A-degree `cap` is dropped; the relation keeps
/// A-degree, so the truncation is exact.
class BorelTensor {
public:
    using Key = std::array<std::uint8_t, 6>;  // (a, d) per leg
    using Terms = std::map<Key, Gauss>;

    BorelTensor(int legs, int cap) : legs_(legs), cap_(cap)
    {
        if (legs < 1 || legs > 3) throw std::invalid_argument("Borel tensors have one to three legs");
    }

    static BorelTensor one(int legs, int cap)
    {
        BorelTensor r(legs, cap);
        r.add(Key{}, Gauss(1));
        return r;
    }
    BorelTensor one() const { return one(legs_, cap_); }
    BorelTensor zero() const { return BorelTensor(legs_, cap_); }
    BorelTensor A(int leg) const { return generator(leg, 0); }
    BorelTensor D(int leg) const { return generator(leg, 1); }

    /// sum_k c_k A^k in leg `leg`.
    BorelTensor power_series_in_A(int leg, const std::vector<Gauss>& c) const
    {
        BorelTensor r = zero();
        for (std::size_t k = 0; k < c.size() && static_cast<int>(k) <= cap_; ++k) {
            Key key{};
            key[static_cast<std::size_t>(2 * leg)] = static_cast<std::uint8_t>(k);
            r.add(key, c[k]);
        }
        return r;
    }

    int legs() const { return legs_; }
    int cap() const { return cap_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    int a_degree(const Key& k) const
    {
        int s = 0;
        for (int l = 0; l < legs_; ++l) s += k[static_cast<std::size_t>(2 * l)];
        return s;
    }

    void add(const Key& k, const Gauss& c)
    {
        if (c.is_zero() || a_degree(k) > cap_) return;
        auto [it, ins] = terms_.try_emplace(k, c);
        if (!ins) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    BorelTensor& operator+=(const BorelTensor& o)
    {
        check(o);
        for (const auto& [k, c] : o.terms_) add(k, c);
        return *this;
    }
    BorelTensor& operator-=(const BorelTensor& o)
    {
        check(o);
        for (const auto& [k, c] : o.terms_) add(k, -c);
        return *this;
    }
    friend BorelTensor operator+(BorelTensor a, const BorelTensor& b) { return a += b; }
    friend BorelTensor operator-(BorelTensor a, const BorelTensor& b) { return a -= b; }
    friend BorelTensor operator*(BorelTensor a, const Gauss& c)
    {
        BorelTensor r = a.zero();
        for (const auto& [k, v] : a.terms_) r.add(k, v * c);
        return r;
    }
    friend bool operator==(const BorelTensor& a, const BorelTensor& b) { return a.legs_ == b.legs_ && a.terms_ == b.terms_; }

    /// Legwise product with (A^a D^d)(A^b D^e) = A^{a+b} (D + i b)^d D^e.
    friend BorelTensor operator*(const BorelTensor& x, const BorelTensor& y)
    {
        x.check(y);
        BorelTensor r = x.zero();
        for (const auto& [kx, cx] : x.terms_)
            for (const auto& [ky, cy] : y.terms_) {
                if (x.a_degree(kx) + y.a_degree(ky) > x.cap_) continue;
                // expand leg by leg
                std::vector<std::pair<Key, Gauss>> acc{{Key{}, cx * cy}};
                for (int l = 0; l < x.legs_; ++l) {
                    const auto ia = static_cast<std::size_t>(2 * l), id = ia + 1;
                    const int a = kx[ia], d = kx[id], b = ky[ia], e = ky[id];
                    std::vector<std::pair<Key, Gauss>> next;
                    const Gauss shift = Gauss::i() * Gauss(b);
                    for (const auto& [k, c] : acc)
                        for (int j = 0; j <= d; ++j) {
                            // binom(d, j) (i b)^{d-j} D^{j+e}
                            const Gauss f = Gauss(binomial(static_cast<unsigned>(d), static_cast<unsigned>(j))) * ncphase::pow(shift, static_cast<unsigned>(d - j));
                            if (f.is_zero()) continue;
                            Key nk = k;
                            nk[ia] = static_cast<std::uint8_t>(a + b);
                            nk[id] = static_cast<std::uint8_t>(j + e);
                            next.emplace_back(nk, c * f);
                        }
                    acc = std::move(next);
                }
                for (const auto& [k, c] : acc) r.add(k, c);
            }
        return r;
    }

    BorelTensor pow(unsigned e) const
    {
        BorelTensor r = one();
        for (unsigned k = 0; k < e; ++k) r = r * *this;
        return r;
    }

    /// e^X; every term of X must carry A-degree at least one.
    BorelTensor exp() const
    {
        for (const auto& [k, c] : terms_)
            if (a_degree(k) == 0) throw DomainError("Borel exponent needs positive A-degree in every term");
        BorelTensor sum = one(), term = one();
        for (int j = 1; j <= cap_; ++j) {
            term = term * *this * Gauss(Rational(1, j));
            sum += term;
        }
        return sum;
    }

    /// Algebra map sending leg l of *this to leg map[l] of a tensor with
    /// `legs` legs; `split` (if >= 0) is sent through Delta_0 into legs
    /// map[split] and map[split] + 1.
    BorelTensor map_legs(int legs, const std::vector<int>& map, int split = -1) const
    {
        BorelTensor r(legs, cap_);
        const BorelTensor unit = one(legs, cap_);
        for (const auto& [k, c] : terms_) {
            BorelTensor t = unit * c;
            for (int l = 0; l < legs_; ++l) {
                const int a = k[static_cast<std::size_t>(2 * l)], d = k[static_cast<std::size_t>(2 * l + 1)];
                if (a == 0 && d == 0) continue;
                const int to = map[static_cast<std::size_t>(l)];
                BorelTensor gA = unit.A(to), gD = unit.D(to);
                if (l == split) {
                    gA += unit.A(to + 1);
                    gD += unit.D(to + 1);
                }
                t = t * gA.pow(static_cast<unsigned>(a)) * gD.pow(static_cast<unsigned>(d));
            }
            r += t;
        }
        return r;
    }

    std::string monomial_str(const Key& k) const
    {
        std::string s;
        for (int l = 0; l < legs_; ++l) {
            if (l) s += " (x) ";
            const int a = k[static_cast<std::size_t>(2 * l)], d = k[static_cast<std::size_t>(2 * l + 1)];
            if (a == 0 && d == 0) s += "1";
            if (a) s += "A" + (a > 1 ? "^" + std::to_string(a) : std::string());
            if (d) s += "D" + (d > 1 ? "^" + std::to_string(d) : std::string());
        }
        return s;
    }

    std::string str() const
    {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [k, c] : terms_) s += (s.empty() ? "(" : " + (") + c.str() + ") " + monomial_str(k);
        return s;
    }

private:
    BorelTensor generator(int leg, int which) const
    {
        if (leg < 0 || leg >= legs_) throw std::out_of_range("Borel leg out of range");
        BorelTensor r = zero();
        Key k{};
        k[static_cast<std::size_t>(2 * leg + which)] = 1;
        r.add(k, Gauss(1));
        return r;
    }
    void check(const BorelTensor& o) const
    {
        if (o.legs_ != legs_ || o.cap_ != cap_) throw std::invalid_argument("Borel tensors of different shape");
    }

    int legs_;
    int cap_;
    Terms terms_;
};

/// ln(1 + s A) = sum_k (-1)^{k+1} s^k A^k / k in leg `leg`, s = +1 or -1.
inline BorelTensor borel_log1p(const BorelTensor& like, int leg, int s)
{
    std::vector<Gauss> c(static_cast<std::size_t>(like.cap() + 1), Gauss(0));
    for (int k = 1; k <= like.cap(); ++k) {
        const int sign = (k % 2 == 1 ? 1 : -1) * (s < 0 && k % 2 == 1 ? -1 : 1);
        c[static_cast<std::size_t>(k)] = Gauss(Rational(sign, k));
    }
    return like.power_series_in_A(leg, c);
}

/// F = exp(-i ln(1 - A) (x) D).
inline BorelTensor borel_jordanian_right(int cap)
{
    const BorelTensor like = BorelTensor::one(2, cap);
    return (borel_log1p(like, 0, -1) * like.D(1) * -Gauss::i()).exp();
}

/// F = exp(-i D (x) ln(1 + A)).
inline BorelTensor borel_jordanian_left(int cap)
{
    const BorelTensor like = BorelTensor::one(2, cap);
    return (like.D(0) * borel_log1p(like, 1, 1) * -Gauss::i()).exp();
}

/// (F (x) 1)(Delta_0 (x) id)F = (1 (x) F)(id (x) Delta_0)F in U(b)^{(x)3}.
inline Report cocycle_check_borel(const BorelTensor& F, std::string model, std::string twist_name)
{
    return timed_report(std::move(model), "cocycle", F.cap(), [&](Report& rep) {
        if (F.legs() != 2) throw std::invalid_argument("a twist has two legs");
        const BorelTensor lhs = F.map_legs(3, {0, 1}) * F.map_legs(3, {0, 2}, 0);
        const BorelTensor rhs = F.map_legs(3, {1, 2}) * F.map_legs(3, {0, 1}, 1);
        const BorelTensor diff = lhs - rhs;
        if (!diff.is_zero()) {
            rep.verdict = Verdict::fail;
            const auto& [k, c] = *diff.terms().begin();
            rep.discrepancy = ReportDiscrepancy{{}, diff.monomial_str(k), c};
        }
        rep.note = twist_name;
    });
}

}  // namespace ncphase
