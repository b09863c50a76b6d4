#pragma once

#include "ncphase/series.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <vector>

namespace ncphase {

/// Normal-ordered product on series whose coordinate bank s is conjugate to
/// momentum bank s, [p_mu, x_nu] = -i eta_{mu nu}. Banks beyond the
/// coordinate banks are central. Uses
///   f(p) x^B = sum_C binom(B, C) x^{B-C} (d^C f)(p),  d_nu = -i eta_nu d/dp_nu.
namespace detail {

/// binom(B, k) P!/(P-k)!, the integer weight of k contractions.
inline const mpz_class& contraction_weight(int B, int P, int k)
{
    constexpr int L = 24;
    static const std::vector<mpz_class> table = [] {
        std::vector<mpz_class> t(static_cast<std::size_t>(L * L * L));
        for (int b = 0; b < L; ++b)
            for (int p = 0; p < L; ++p)
                for (int j = 0; j <= std::min(b, p); ++j) {
                    mpz_class f;
                    mpz_bin_uiui(f.get_mpz_t(), static_cast<unsigned long>(b), static_cast<unsigned long>(j));
                    for (int q = p - j + 1; q <= p; ++q) f *= q;
                    t[static_cast<std::size_t>((b * L + p) * L + j)] = f;
                }
        return t;
    }();
    if (B < L && P < L) return table[static_cast<std::size_t>((B * L + P) * L + k)];
    thread_local mpz_class f;
    mpz_bin_uiui(f.get_mpz_t(), static_cast<unsigned long>(B), static_cast<unsigned long>(k));
    for (int q = P - k + 1; q <= P; ++q) f *= q;
    return f;
}

}  // namespace detail

inline Series normal_product(const Series& a, const Series& b)
{
    a.check_compatible(b);
    Series r(a.context(), a.layout(), min(a.trunc(), b.trunc()));
    if (a.is_zero() || b.is_zero()) return r;
    const int n = a.dim();
    const int slots = a.layout().xbanks;
    const int nv = a.num_vars();
    std::array<int, kMaxVars> xv{}, pv{}, eta{};
    int m = 0;
    for (int s = 0; s < slots; ++s)
        for (int mu = 0; mu < n; ++mu, ++m) {
            xv[static_cast<std::size_t>(m)] = a.x_var(s, mu);
            pv[static_cast<std::size_t>(m)] = a.mom_var(s, mu);
            eta[static_cast<std::size_t>(m)] = a.ctx().eta(mu);
        }
    const int pcap = r.trunc().par;
    // contractions pick up d_j^k = (-i eta_j)^k
    std::array<int, kMaxVars> lim{}, cnt{}, act{};
    mpz_class w;
    for (const auto& [ea, ca] : a.terms()) {
        const int pa = a.par_degree(ea);
        for (const auto& [eb, cb] : b.terms()) {
            if (pcap < kNoCap && pa + b.par_degree(eb) > pcap) continue;
            Exponents base{};
            for (int i = 0; i < nv; ++i) {
                const int s = ea[static_cast<std::size_t>(i)] + eb[static_cast<std::size_t>(i)];
                if (s > 255) throw DomainError("exponent overflow");
                base[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(s);
            }
            const Gauss c0 = ca * cb;
            // contraction counts C_j <= min(B_j, P_j), over the pairs that can contract
            int na = 0;
            for (int j = 0; j < m; ++j) {
                const int l = std::min(eb[static_cast<std::size_t>(xv[static_cast<std::size_t>(j)])], ea[static_cast<std::size_t>(pv[static_cast<std::size_t>(j)])]);
                if (l > 0) {
                    act[static_cast<std::size_t>(na)] = j;
                    lim[static_cast<std::size_t>(na)] = l;
                    cnt[static_cast<std::size_t>(na)] = 0;
                    ++na;
                }
            }
            if (na == 0) {
                if (r.within_caps(base)) r.add_term(base, c0);
                continue;
            }
            auto advance = [&] {
                int t = 0;
                while (t < na && cnt[static_cast<std::size_t>(t)] == lim[static_cast<std::size_t>(t)]) cnt[static_cast<std::size_t>(t++)] = 0;
                if (t == na) return false;
                ++cnt[static_cast<std::size_t>(t)];
                return true;
            };
            do {
                Exponents e = base;
                w = 1;
                int total = 0, sign = 1;
                for (int t = 0; t < na; ++t) {
                    const int k = cnt[static_cast<std::size_t>(t)];
                    if (k == 0) continue;
                    const auto j = static_cast<std::size_t>(act[static_cast<std::size_t>(t)]);
                    const auto xj = static_cast<std::size_t>(xv[j]), pj = static_cast<std::size_t>(pv[j]);
                    e[xj] = static_cast<std::uint8_t>(e[xj] - k);
                    e[pj] = static_cast<std::uint8_t>(e[pj] - k);
                    total += k;
                    if (eta[j] < 0 && k % 2) sign = -sign;
                }
                if (!r.within_caps(e)) continue;
                if (total == 0) {
                    r.add_term(e, c0);
                    continue;
                }
                for (int t = 0; t < na; ++t) {
                    const int k = cnt[static_cast<std::size_t>(t)];
                    if (k == 0) continue;
                    const auto j = static_cast<std::size_t>(act[static_cast<std::size_t>(t)]);
                    w *= detail::contraction_weight(eb[static_cast<std::size_t>(xv[j])], ea[static_cast<std::size_t>(pv[j])], k);
                }
                if (sign < 0) w = -w;
                Gauss c(c0.re() * w, c0.im() * w);
                r.add_term(e, c.rotate(-total));
            } while (advance());
        }
    }
    return r;
}

/// Element of the Weyl-Heisenberg enveloping algebra: sum_A x^A s_A(p) with
/// every x to the left of every p. Coefficients carry the deformation
/// parameters; the truncation caps parameter degree and (as an error) the
/// coordinate degree.
class PhaseOperator {
public:
    PhaseOperator() = default;
    explicit PhaseOperator(Series s) : s_(std::move(s))
    {
        if (s_.layout().banks != 1 || s_.layout().xbanks != 1) throw IncompatibleSeries("phase operators use one x bank and one p bank");
    }

    static PhaseOperator zero(ContextPtr ctx, Truncation trunc) { return PhaseOperator(Series::zero(std::move(ctx), Layout{1, 1}, trunc)); }
    static Truncation default_trunc(int order) { return Truncation::parameters(order, 2 * order + 2); }

    PhaseOperator x(int mu) const { return PhaseOperator(s_.coord(0, mu)); }
    PhaseOperator p(int mu) const { return PhaseOperator(s_.mom(0, mu)); }
    PhaseOperator one() const { return PhaseOperator(s_.one()); }
    PhaseOperator scalar(const Gauss& c) const { return PhaseOperator(s_.scalar(c)); }
    PhaseOperator param(int i) const { return PhaseOperator(s_.param(i)); }
    PhaseOperator zero() const { return PhaseOperator(s_.zero()); }

    /// x-independent series in p (Layout{1,0}) lifted into the algebra.
    PhaseOperator lift(const Series& f) const { return PhaseOperator(f.embed(Layout{1, 1}, {0}, {}, s_.trunc())); }

    /// Lorentz generator M_{mu nu} = x_mu p_nu - x_nu p_mu.
    PhaseOperator M(int mu, int nu) const { return x(mu) * p(nu) - x(nu) * p(mu); }
    /// Dilatation D = x.p (contracted with the metric).
    PhaseOperator dilatation() const
    {
        PhaseOperator r = zero();
        for (int a = 0; a < s_.dim(); ++a) r += x(a) * p(a) * Gauss(s_.ctx().eta(a));
        return r;
    }

    const Series& series() const { return s_; }
    const ContextPtr& context() const { return s_.context(); }
    int dim() const { return s_.dim(); }
    bool is_zero() const { return s_.is_zero(); }

    PhaseOperator& operator+=(const PhaseOperator& o) { s_ += o.s_; return *this; }
    PhaseOperator& operator-=(const PhaseOperator& o) { s_ -= o.s_; return *this; }
    PhaseOperator operator-() const { return PhaseOperator(-s_); }
    friend PhaseOperator operator+(PhaseOperator a, const PhaseOperator& b) { return a += b; }
    friend PhaseOperator operator-(PhaseOperator a, const PhaseOperator& b) { return a -= b; }
    friend PhaseOperator operator*(const PhaseOperator& a, const PhaseOperator& b) { return PhaseOperator(normal_product(a.s_, b.s_)); }
    friend PhaseOperator operator*(PhaseOperator a, const Gauss& c) { a.s_ *= c; return a; }
    friend PhaseOperator operator*(const Gauss& c, PhaseOperator a) { a.s_ *= c; return a; }
    friend bool operator==(const PhaseOperator& a, const PhaseOperator& b) { return a.s_ == b.s_; }

    PhaseOperator pow(unsigned e) const
    {
        PhaseOperator r = one();
        for (unsigned i = 0; i < e; ++i) r = r * *this;
        return r;
    }

    std::string str() const { return s_.str(); }

private:
    Series s_;
};

inline PhaseOperator commutator(const PhaseOperator& a, const PhaseOperator& b) { return a * b - b * a; }

/// A letter of a raw word: x_mu or p_mu.
struct Letter {
    bool is_x;
    int mu;
};

inline PhaseOperator normal_order(const PhaseOperator& like, const std::vector<Letter>& word)
{
    PhaseOperator r = like.one();
    for (const auto& l : word) r = r * (l.is_x ? like.x(l.mu) : like.p(l.mu));
    return r;
}

/// A |> f for f a polynomial in x (a PhaseOperator without momenta):
/// momenta act as -i eta d/dx and annihilate 1.
inline PhaseOperator act(const PhaseOperator& a, const PhaseOperator& f)
{
    const Series& s = f.series();
    for (const auto& [e, c] : s.terms())
        if (s.mom_degree(e) != 0) throw std::invalid_argument("act expects a polynomial in x");
    const Series prod = normal_product(a.series(), s);
    return PhaseOperator(prod.filter([&](const Exponents& e) { return prod.mom_degree(e) == 0; }));
}

/// One-dimensional sum_{k+l=n} sign_k x^k p x^l / (k! l!), with sign_k =
/// (-1)^k when `alternating` and +1 otherwise. The alternating sum is the
/// degree-n part of e^{-x} p e^{x} = p - i eta and vanishes for n >= 2.
inline PhaseOperator ordered_exponential_sum(int n, bool alternating, int eta = 1)
{
    const PhaseOperator like = PhaseOperator::zero(Context::make(1, {eta}, {}), Truncation::parameters(kNoCap, n + 1));
    PhaseOperator r = like.zero();
    for (int k = 0; k <= n; ++k) {
        const int l = n - k;
        Rational c = Rational(1) / (Rational(factorial(static_cast<unsigned>(k))) * Rational(factorial(static_cast<unsigned>(l))));
        if (alternating && k % 2 == 1) c = -c;
        r += like.x(0).pow(static_cast<unsigned>(k)) * like.p(0) * like.x(0).pow(static_cast<unsigned>(l)) * Gauss(c);
    }
    return r;
}

}  // namespace ncphase
