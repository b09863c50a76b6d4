#pragma once

#include "ncphase/phase_operator.hpp"
#include "ncphase/star.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ncphase {

// --- coproducts -----------------------------------------------------------

/// Delta p_mu as two-bank momentum series: bank 0 is p (x) 1, bank 1 is 1 (x) p.
struct Coproduct {
    std::string model;
    int order = 0;
    ContextPtr ctx;
    SeriesVec dp;
    int dim() const { return ctx->dim(); }
};

/// Delta p_mu = D_mu(p (x) 1, 1 (x) p).
inline Coproduct coproduct(const CompositionLaw& law) { return Coproduct{law.model, law.order, law.ctx, law.D}; }

/// Delta p_mu = exp(K^{-1}_b(p) (x) phi_{ab}(p) d/dp_a)(1 (x) p_mu): the flow of
/// the vector field with Weyl momenta frozen in the first leg.
inline Coproduct coproduct_flow(const Realization& R, int order)
{
    require_momentum_form(R);
    const CompositionLaw law = composition_law(R, order);
    const int n = R.dim();
    const Series like = law.like();
    const Matrix phi = phi_in_bank(R, like, 1);
    SeriesVec field(static_cast<std::size_t>(n), like.zero());
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (!phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].is_zero())
                field[static_cast<std::size_t>(a)] += law.Kinv[static_cast<std::size_t>(b)] * phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * Gauss(R.ctx->eta(b));
    Coproduct c{R.name, order, R.ctx, {}};
    for (int m = 0; m < n; ++m) {
        Series term = like.mom(1, m), sum = term;
        for (int j = 1; !term.is_zero(); ++j) {
            Series next = like.zero();
            for (int a = 0; a < n; ++a) {
                const Series d = term.derivative(like.mom_var(1, a));
                if (!d.is_zero()) next += field[static_cast<std::size_t>(a)] * d;
            }
            term = next * Gauss(Rational(1, j));
            sum += term;
        }
        c.dp.push_back(std::move(sum));
    }
    return c;
}

/// (Delta (x) id) Delta p = (id (x) Delta) Delta p on three banks.
inline Report coassociativity_check(const Coproduct& cop)
{
    return timed_report(cop.model, "coassoc", cop.order, [&](Report& rep) {
        const Truncation t = cop.dp.at(0).trunc();
        const Layout L3{3, 0};
        auto embv = [&](int b0, int b1) {
            SeriesVec r;
            for (const auto& s : cop.dp) r.push_back(s.embed(L3, {b0, b1}, {}, t));
            return r;
        };
        const SeriesVec left = Substitution(0, embv(0, 1))(embv(0, 2));
        const SeriesVec right = Substitution(1, embv(1, 2))(embv(0, 1));
        for (int m = 0; m < cop.dim(); ++m)
            if (!rep.expect_equal(left[static_cast<std::size_t>(m)], right[static_cast<std::size_t>(m)], {m})) return;
    });
}

inline Report coassociativity_check(const Realization& R, int order)
{
    if (!R.momentum_form())
        return timed_report(R.name, "coassoc", order, [&](Report& rep) { rep.skip("no momentum coproduct of this form for quadratic deformations"); });
    return coassociativity_check(coproduct_flow(R, order));
}

// --- tensor operators -----------------------------------------------------

/// sum (x^A s(p)) (x) (x^B t(p)) with each slot normal ordered: Layout{2,2},
/// slot s pairs coordinate bank s with momentum bank s; the slots commute.
class TensorOperator {
public:
    TensorOperator() = default;
    explicit TensorOperator(Series s) : s_(std::move(s))
    {
        if (s_.layout().banks != 2 || s_.layout().xbanks != 2) throw IncompatibleSeries("tensor operators use two slots");
    }

    /// Parameter degree <= par_cap; optionally momentum degree of slot 0 <= slot0_cap,
    /// which is an exact truncation only while slot 0 holds no coordinates.
    static Truncation trunc(int par_cap, int slot0_cap = kNoCap)
    {
        Truncation t = Truncation::parameters(par_cap, kNoCap);
        t.bank[0] = slot0_cap;
        return t;
    }
    static TensorOperator identity(ContextPtr ctx, Truncation t) { return TensorOperator(Series::constant(std::move(ctx), Layout{2, 2}, t, Gauss(1))); }

    TensorOperator x(int slot, int mu) const { return TensorOperator(s_.coord(slot, mu)); }
    TensorOperator p(int slot, int mu) const { return TensorOperator(s_.mom(slot, mu)); }
    TensorOperator one() const { return TensorOperator(s_.one()); }
    TensorOperator zero() const { return TensorOperator(s_.zero()); }

    /// Two-bank momentum series, bank b placed in slot b.
    TensorOperator momenta(const Series& f) const { return TensorOperator(f.embed(Layout{2, 2}, {0, 1}, {}, s_.trunc())); }
    /// One-bank momentum series in slot `slot`.
    TensorOperator momenta_in(int slot, const Series& f) const { return TensorOperator(f.embed(Layout{2, 2}, {slot}, {}, s_.trunc())); }
    /// op (x) 1 or 1 (x) op.
    TensorOperator in_slot(int slot, const PhaseOperator& op) const { return TensorOperator(op.series().embed(Layout{2, 2}, {slot}, {slot}, s_.trunc())); }

    const Series& series() const { return s_; }
    const ContextPtr& context() const { return s_.context(); }
    int dim() const { return s_.dim(); }
    bool is_zero() const { return s_.is_zero(); }

    TensorOperator& operator+=(const TensorOperator& o) { s_ += o.s_; return *this; }
    TensorOperator& operator-=(const TensorOperator& o) { s_ -= o.s_; return *this; }
    TensorOperator operator-() const { return TensorOperator(-s_); }
    friend TensorOperator operator+(TensorOperator a, const TensorOperator& b) { return a += b; }
    friend TensorOperator operator-(TensorOperator a, const TensorOperator& b) { return a -= b; }
    friend TensorOperator operator*(const TensorOperator& a, const TensorOperator& b) { return TensorOperator(normal_product(a.s_, b.s_)); }
    friend TensorOperator operator*(TensorOperator a, const Gauss& c) { a.s_ *= c; return a; }
    friend bool operator==(const TensorOperator& a, const TensorOperator& b) { return a.s_ == b.s_; }

    /// e^X as sum X^n/n!; the truncation has to make X nilpotent.
    TensorOperator exp() const
    {
        TensorOperator sum = one(), term = one();
        for (int j = 1; j <= 512; ++j) {
            term = term * *this * Gauss(Rational(1, j));
            if (term.is_zero()) return sum;
            sum += term;
        }
        throw DomainError("exponential does not terminate under the truncation");
    }

    /// :e^Y: for Y already normal ordered: the commutative exponential.
    static TensorOperator normal_exp(const Series& y)
    {
        const Series e = expand_fn(Fn::exp, y);
        return TensorOperator(e);
    }

    /// Inverse by the geometric series about the identity.
    TensorOperator inverse() const
    {
        const Series lead = s_.filter([&](const Exponents& e) { return s_.par_degree(e) == 0; });
        if (lead != s_.one()) throw DomainError("tensor operator is not the identity at zero deformation");
        const TensorOperator y = one() - *this;
        TensorOperator sum = one(), term = one();
        for (int j = 1; j <= 512; ++j) {
            term = term * y;
            if (term.is_zero()) return sum;
            sum += term;
        }
        throw DomainError("inverse does not terminate under the truncation");
    }

    std::string str() const { return s_.str(); }

private:
    Series s_;
};

/// A twist element: F^{-1}, and F when it is known in closed form.
struct Twist {
    std::string name;
    TensorOperator Finv;
    std::optional<TensorOperator> F;

    TensorOperator forward() const { return F ? *F : Finv.inverse(); }
};

// --- twists from the composition law ---------------------------------------

/// True when every deformation term of phi has momentum degree at most its
/// parameter degree and every term of chi has momentum degree below it. Then
/// the terms of D - k - q and G at parameter degree m have momentum degree at
/// most m + 1, so a law of momentum order N + 1 fixes twists to parameter
/// degree N.
inline bool momentum_bounded_by_parameters(const Realization& R)
{
    if (!R.momentum_form()) return false;
    const Series like = R.like();
    for (int a = 0; a < R.dim(); ++a)
        for (int m = 0; m < R.dim(); ++m) {
            const Series d = R.phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] - like.scalar(Gauss(a == m ? R.ctx->eta(a) : 0));
            for (const auto& [e, c] : d.terms())
                if (like.mom_degree(e) > like.par_degree(e)) return false;
        }
    for (const auto& f : R.chi)
        for (const auto& [e, c] : f.terms())
            if (like.mom_degree(e) >= like.par_degree(e)) return false;
    return true;
}

/// Composition law that determines twists of R to parameter degree `order`.
inline CompositionLaw twist_law(const Realization& R, int order)
{
    if (!momentum_bounded_by_parameters(R)) throw DomainError(R.name + ": twist expansion needs momentum degree bounded by parameter degree");
    return composition_law(R, order + 1);
}

inline int twist_order(const CompositionLaw& law) { return law.order - 1; }

/// F^{-1} = :exp((i(1-u) x_a (x) 1 + i u 1 (x) x_a)(Delta - Delta_0) p_a): exp(i G).
/// The optional caps bound total momentum degree and first-slot momentum
/// degree; both are ideals of the commutative exponential.
inline Twist twist_normal_ordered(const CompositionLaw& law, const Rational& u, int mom_cap = kNoCap, int slot0_cap = kNoCap)
{
    const int P = twist_order(law);
    Truncation t = TensorOperator::trunc(P, slot0_cap);
    t.mom = mom_cap;
    const Series like = Series::zero(law.ctx, Layout{2, 2}, t);
    const Gauss wl = Gauss::i() * Gauss(Rational(1) - u), wr = Gauss::i() * Gauss(u);
    Series y = law.G.embed(Layout{2, 2}, {0, 1}, {}, t) * Gauss::i();
    for (int a = 0; a < law.dim(); ++a) {
        const Series dd = law.D[static_cast<std::size_t>(a)].embed(Layout{2, 2}, {0, 1}, {}, t) - like.mom(0, a) - like.mom(1, a);
        if (dd.is_zero()) continue;
        y += (like.coord(0, a) * wl + like.coord(1, a) * wr) * dd * Gauss(law.ctx->eta(a));
    }
    Twist tw;
    tw.name = law.model + " normal-ordered u=" + u.get_str();
    tw.Finv = TensorOperator::normal_exp(y);
    return tw;
}

/// F^{-1} = e^{-i p_a (x) x_a} e^{i p^W_b (x) x^_b} e^{i G}, cut at momentum
/// degree `slot0_cap` in the first slot (which holds momenta only).
inline TensorOperator twist_exp_form(const Realization& R, const CompositionLaw& law, int slot0_cap)
{
    const int P = twist_order(law);
    const Truncation t = TensorOperator::trunc(P, slot0_cap);
    const TensorOperator one = TensorOperator::identity(law.ctx, t);
    const PhaseOperator op_like = PhaseOperator::zero(R.ctx, PhaseOperator::default_trunc(P));
    const auto xhat = R.xhat(op_like);
    TensorOperator px = one.zero(), pwx = one.zero();
    for (int a = 0; a < law.dim(); ++a) {
        const Gauss e(law.ctx->eta(a));
        px += one.p(0, a) * one.x(1, a) * e;
        const PhaseOperator xphi = xhat[static_cast<std::size_t>(a)] - op_like.lift(R.chi[static_cast<std::size_t>(a)]);
        pwx += one.momenta(law.Kinv[static_cast<std::size_t>(a)]) * one.in_slot(1, xphi) * e;
    }
    const TensorOperator phase = TensorOperator::normal_exp(one.momenta(law.G).series() * Gauss::i());
    return (px * -Gauss::i()).exp() * (pwx * Gauss::i()).exp() * phase;
}

// --- named twists -----------------------------------------------------------

namespace detail {

inline Series slot_dot(const Series& like, const std::string& base, int slot)
{
    Series s = like.zero();
    for (int a = 0; a < like.dim(); ++a) s += like.param(base + "_" + std::to_string(a)) * like.mom(slot, a) * Gauss(like.ctx().eta(a));
    return s;
}

/// Dilatation x.p in slot `slot`.
inline Series slot_dilatation(const Series& like, int slot)
{
    Series s = like.zero();
    for (int a = 0; a < like.dim(); ++a) s += like.coord(slot, a) * like.mom(slot, a) * Gauss(like.ctx().eta(a));
    return s;
}

inline Twist exp_twist(std::string name, const TensorOperator& X)
{
    return Twist{std::move(name), (-X).exp(), X.exp()};
}

}  // namespace detail

/// F = exp(-i ln(1 - a.p) (x) D).
inline Twist jordanian_right(const ContextPtr& ctx, int order)
{
    const Series like = Series::zero(ctx, Layout{2, 2}, TensorOperator::trunc(order));
    const Series ln = expand_fn(Fn::log1p, -detail::slot_dot(like, "a", 0));
    return detail::exp_twist("jordanian right", TensorOperator(ln * detail::slot_dilatation(like, 1) * -Gauss::i()));
}

/// F = exp(-i D (x) ln(1 + a.p)).
inline Twist jordanian_left(const ContextPtr& ctx, int order)
{
    const Series like = Series::zero(ctx, Layout{2, 2}, TensorOperator::trunc(order));
    const Series ln = expand_fn(Fn::log1p, detail::slot_dot(like, "a", 1));
    return detail::exp_twist("jordanian left", TensorOperator(detail::slot_dilatation(like, 0) * ln * -Gauss::i()));
}

/// F = exp(-i p^W_m (x) (x^_m - x_m)) for a linear realization: the exponent is
/// -i K_{b m a} p^W_m (x) x_a p_b.
inline Twist linear_twist(const LinearK& K, const CompositionLaw& law)
{
    const int n = K.dim();
    const Series like = Series::zero(law.ctx, Layout{2, 2}, TensorOperator::trunc(twist_order(law)));
    auto eta = [&](int i) { return Gauss(law.ctx->eta(i)); };
    Series X = like.zero();
    for (int m = 0; m < n; ++m) {
        const Series pw = law.Kinv[static_cast<std::size_t>(m)].embed(Layout{2, 2}, {0, -1}, {}, like.trunc());
        Series w = like.zero();
        for (int b = 0; b < n; ++b)
            for (int a = 0; a < n; ++a)
                if (!K(b, m, a).is_zero()) w += K(b, m, a).embed(Layout{2, 2}, {-1}, {}, like.trunc()) * like.coord(1, a) * like.mom(1, b) * (eta(a) * eta(b));
        X += pw * w * eta(m);
    }
    return detail::exp_twist(law.model + " linear", TensorOperator(X * -Gauss::i()));
}

/// Light-like Drinfeld twist F = exp(i a_a p_b ln(1 + a.p)/(a.p) (x) M_ab).
/// `mom_cap` drops terms above that total momentum degree; every factor of
/// the exponent adds at least one net momentum even after contraction, so
/// the kept part is exact.
inline Twist light_like_drinfeld(const ContextPtr& ctx, int order, int mom_cap = kNoCap)
{
    Truncation t = TensorOperator::trunc(order);
    t.mom = mom_cap;
    const Series like = Series::zero(ctx, Layout{2, 2}, t);
    const int n = like.dim();
    const Series f = expand_fn(Fn::log1p_over, detail::slot_dot(like, "a", 0));
    auto eta = [&](int i) { return Gauss(ctx->eta(i)); };
    Series X = like.zero();
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            const Series M = like.coord(1, a) * like.mom(1, b) - like.coord(1, b) * like.mom(1, a);
            X += like.param("a_" + std::to_string(a)) * like.mom(0, b) * M * (eta(a) * eta(b));
        }
    return detail::exp_twist("light-like drinfeld", TensorOperator(f * X * Gauss::i()));
}

// --- checks ---------------------------------------------------------------

/// m F^{-1} (|> (x) 1)(f (x) 1) for a polynomial f in x: the operator f^.
inline PhaseOperator twisted_left_operator(const TensorOperator& Finv, const Series& f, const PhaseOperator& like)
{
    const Series& s = Finv.series();
    const Series& ol = like.series();
    const int n = s.dim(), np = s.num_params();
    const PhaseOperator fop(f.embed(Layout{1, 1}, {}, {0}, ol.trunc()));
    // group by the slot-0 monomial
    std::map<Exponents, Series> groups;
    for (const auto& [e, c] : s.terms()) {
        Exponents slot0{}, rest{};
        for (int i = 0; i < np; ++i) rest[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];
        for (int m = 0; m < n; ++m) {
            slot0[static_cast<std::size_t>(ol.x_var(0, m))] = e[static_cast<std::size_t>(s.x_var(0, m))];
            slot0[static_cast<std::size_t>(ol.mom_var(0, m))] = e[static_cast<std::size_t>(s.mom_var(0, m))];
            rest[static_cast<std::size_t>(ol.x_var(0, m))] = e[static_cast<std::size_t>(s.x_var(1, m))];
            rest[static_cast<std::size_t>(ol.mom_var(0, m))] = e[static_cast<std::size_t>(s.mom_var(1, m))];
        }
        auto [it, ins] = groups.try_emplace(slot0, ol.zero());
        it->second.add_term(rest, c);
    }
    PhaseOperator out = like.zero();
    for (const auto& [e0, rest] : groups) {
        Series mono = ol.zero();
        mono.add_term(e0, Gauss(1));
        const PhaseOperator acted = act(PhaseOperator(mono), fop);
        if (acted.is_zero()) continue;
        out += acted * PhaseOperator(rest);
    }
    return out;
}

/// m F^{-1} (|> (x) |>)(f (x) g) for polynomials f, g in x.
inline Series twisted_star(const TensorOperator& Finv, const Series& f, const Series& g)
{
    const Series& s = Finv.series();
    const int n = s.dim(), np = s.num_params();
    const Layout L11{1, 1};
    const Truncation t = min(f.trunc(), s.trunc());
    Series out = f.zero().with_trunc(Truncation::parameters(t.par, kNoCap));
    auto slot_op = [&](const Exponents& e, int slot) {
        Series op = Series::zero(s.context(), L11, Truncation::parameters(t.par, kNoCap));
        Exponents x{};
        for (int m = 0; m < n; ++m) {
            x[static_cast<std::size_t>(op.x_var(0, m))] = e[static_cast<std::size_t>(s.x_var(slot, m))];
            x[static_cast<std::size_t>(op.mom_var(0, m))] = e[static_cast<std::size_t>(s.mom_var(slot, m))];
        }
        op.add_term(x, Gauss(1));
        return PhaseOperator(op);
    };
    const PhaseOperator fo(f.embed(L11, {}, {0}, Truncation::parameters(t.par, kNoCap)));
    const PhaseOperator go(g.embed(L11, {}, {0}, Truncation::parameters(t.par, kNoCap)));
    for (const auto& [e, c] : s.terms()) {
        const PhaseOperator a = act(slot_op(e, 0), fo);
        if (a.is_zero()) continue;
        const PhaseOperator b = act(slot_op(e, 1), go);
        if (b.is_zero()) continue;
        Exponents par{};
        for (int i = 0; i < np; ++i) par[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];
        out += (a * b).series().embed(Layout{0, 1}, {-1}, {0}, out.trunc()).shifted(par, c);
    }
    return out;
}

/// m F^{-1} (|> (x) 1)(x_mu (x) 1) = x^_mu for every mu, to the twist's parameter degree.
inline Report twist_consistency(const Realization& R, const Twist& tw, int order)
{
    return timed_report(R.name, "twist", order, [&](Report& rep) {
        const PhaseOperator like = PhaseOperator::zero(R.ctx, PhaseOperator::default_trunc(order));
        const auto xhat = R.xhat(like);
        const Series poly = Series::zero(R.ctx, Layout{0, 1}, Truncation::parameters(order, kNoCap));
        for (int m = 0; m < R.dim(); ++m) {
            const PhaseOperator got = twisted_left_operator(tw.Finv, poly.coord(0, m), like);
            if (!rep.expect_equal(got.series(), xhat[static_cast<std::size_t>(m)].series(), {m})) {
                rep.note = tw.name;
                return;
            }
        }
    });
}

/// F Delta_0 p_mu F^{-1} by direct multiplication.
inline TensorOperator conjugated_momentum(const Twist& tw, int mu)
{
    const TensorOperator F = tw.forward();
    return F * (F.p(0, mu) + F.p(1, mu)) * tw.Finv;
}

/// Delta p_mu = F Delta_0 p_mu F^{-1}, checked as F^{-1} Delta p_mu =
/// Delta_0 p_mu F^{-1} (equivalent for invertible F). Both sides are compared
/// where they are exact: parameter degree within the twist and total momentum
/// degree within the coproduct.
inline Report coproduct_conjugation_check(const Twist& tw, const Coproduct& cop, int order)
{
    return timed_report(cop.model, "conjugation", order, [&](Report& rep) {
        const Series& like = tw.Finv.series();
        if (like.filter([&](const Exponents& e) { return like.par_degree(e) == 0; }) != like.one()) {
            rep.fail(tw.name + ": twist is not the identity at zero deformation");
            return;
        }
        const int par = like.trunc().par;
        auto keep = [&](const Series& s) {
            return s.filter([&](const Exponents& e) { return s.mom_degree(e) <= cop.order && s.par_degree(e) <= par; });
        };
        // neither product below lowers momentum degree, so higher terms of
        // the twist cannot reach the compared range
        const TensorOperator Finv(keep(tw.Finv.series()));
        for (int m = 0; m < cop.dim(); ++m) {
            const TensorOperator dp = Finv.momenta(cop.dp[static_cast<std::size_t>(m)]);
            const TensorOperator lhs = Finv * dp;
            const TensorOperator rhs = (Finv.p(0, m) + Finv.p(1, m)) * Finv;
            if (!rep.expect_equal(keep(lhs.series()), keep(rhs.series()), {m})) {
                rep.note = tw.name;
                return;
            }
        }
    });
}

}  // namespace ncphase
