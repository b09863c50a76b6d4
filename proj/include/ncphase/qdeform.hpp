#pragma once

#include "ncphase/coalgebra.hpp"
#include "ncphase/phase_operator.hpp"
#include "ncphase/realization.hpp"
#include "ncphase/report.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace ncphase {

/// e^X for an operator X whose terms all carry parameters.
inline PhaseOperator operator_exp(const PhaseOperator& X)
{
    PhaseOperator sum = X.one(), term = X.one();
    for (int j = 1; j <= 512; ++j) {
        term = term * X * Gauss(Rational(1, j));
        if (term.is_zero()) return sum;
        sum += term;
    }
    throw DomainError("operator exponential does not terminate under the truncation");
}

enum class QMode { antisymmetric, symmetric };

inline std::string q_param_name(int a, int b) { return "a_" + std::to_string(a) + "_" + std::to_string(b); }

/// Dilatation twist F = exp(sum a_ab D_a (x) D_b) on Euclidean n-space with
/// D_a = x_a p_a (no summation). Antisymmetric mode: a_ba = -a_ab, a_aa = 0,
/// parameters a_a_b for a < b. Symmetric mode: a_ba = a_ab, parameters for a <= b.
struct QDeformation {
    ContextPtr ctx;
    QMode mode = QMode::antisymmetric;

    static QDeformation make(int n, QMode mode)
    {
        std::vector<std::string> names;
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                if (b > a || mode == QMode::symmetric) names.push_back(q_param_name(a, b));
        return QDeformation{Context::make(n, Context::euclidean(n), names), mode};
    }
    int dim() const { return ctx->dim(); }

    /// a_ab as a series in the layout of `like`.
    Series a(const Series& like, int al, int be) const
    {
        if (al == be) return mode == QMode::symmetric ? like.param(q_param_name(al, al)) : like.zero();
        if (al < be) return like.param(q_param_name(al, be));
        return mode == QMode::symmetric ? like.param(q_param_name(be, al)) : -like.param(q_param_name(be, al));
    }
    /// q_ab = exp(a_ab - a_ba) and c_ab = exp(a_ab).
    Series q(const Series& like, int al, int be) const { return expand_fn(Fn::exp, a(like, al, be) - a(like, be, al)); }
    Series c(const Series& like, int al, int be) const { return expand_fn(Fn::exp, a(like, al, be)); }

    PhaseOperator D(const PhaseOperator& like, int al) const { return like.x(al) * like.p(al); }
    /// phi_a = exp(i sum_b a_ab D_b), phi~_a = exp(i sum_b a_ba D_b).
    PhaseOperator phi(const PhaseOperator& like, int al, bool tilde = false) const
    {
        PhaseOperator X = like.zero();
        for (int b = 0; b < dim(); ++b) X += PhaseOperator(tilde ? a(like.series(), b, al) : a(like.series(), al, b)) * D(like, b);
        return operator_exp(X * Gauss::i());
    }
    PhaseOperator xhat(const PhaseOperator& like, int al) const { return like.x(al) * phi(like, al); }
    PhaseOperator yhat(const PhaseOperator& like, int al) const { return like.x(al) * phi(like, al, true); }

    /// sum a_ab D_a (x) D_b, or with a transposed when `op`.
    TensorOperator twist_exponent(const TensorOperator& like, bool op = false) const
    {
        const Series& s = like.series();
        Series X = s.zero();
        for (int al = 0; al < dim(); ++al)
            for (int be = 0; be < dim(); ++be) {
                const Series w = op ? a(s, be, al) : a(s, al, be);
                if (!w.is_zero()) X += w * s.coord(0, al) * s.mom(0, al) * s.coord(1, be) * s.mom(1, be);
            }
        return TensorOperator(X);
    }
    /// F^{-1} = exp(-sum a_ab D_a (x) D_b), or of F^op when `op`.
    TensorOperator twist_inverse(const TensorOperator& like, bool op = false) const { return (-twist_exponent(like, op)).exp(); }
    TensorOperator twist(const TensorOperator& like) const { return twist_exponent(like).exp(); }
};

/// The q-deformed coordinates as a realization given by operators.
inline Realization q_realization(const QDeformation& Q, int order)
{
    Realization R;
    R.name = Q.mode == QMode::antisymmetric ? "qdilatation" : "qdilatation_sym";
    R.ctx = Q.ctx;
    R.par_cap = order;
    R.operators = [Q](const PhaseOperator& like) {
        std::vector<PhaseOperator> r;
        for (int al = 0; al < Q.dim(); ++al) r.push_back(Q.xhat(like, al));
        return r;
    };
    return R;
}

/// x^A * x^B = exp(sum a_ab A_a B_b) x^{A+B}, extended bilinearly.
inline Series q_star(const Series& f, const Series& g, const QDeformation& Q)
{
    f.check_compatible(g);
    const int n = Q.dim();
    Series out = f.zero();
    for (const auto& [ea, ca] : f.terms())
        for (const auto& [eb, cb] : g.terms()) {
            Series w = f.zero();
            for (int al = 0; al < n; ++al)
                for (int be = 0; be < n; ++be) {
                    const int A = ea[static_cast<std::size_t>(f.x_var(0, al))], B = eb[static_cast<std::size_t>(g.x_var(0, be))];
                    if (A && B) w += Q.a(f, al, be) * Gauss(A * B);
                }
            Series mono = f.zero();
            Exponents e{};
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
            mono.add_term(e, ca * cb);
            out += expand_fn(Fn::exp, w) * mono;
        }
    return out;
}

/// m F^{-1}(|> (x) 1)(x_a (x) 1) = x^_a for the dilatation twist, compared
/// through parameter degree min(order, R.par_cap).
inline Report q_twist_consistency(const QDeformation& Q, const Realization& R, int order)
{
    const int P = std::min(order, R.par_cap);
    return timed_report(R.name, "twist", P, [&](Report& rep) {
        const PhaseOperator like = PhaseOperator::zero(Q.ctx, PhaseOperator::default_trunc(P));
        const TensorOperator Finv = Q.twist_inverse(TensorOperator::identity(Q.ctx, TensorOperator::trunc(P)));
        const Series f = Series::zero(Q.ctx, Layout{0, 1}, Truncation::parameters(P, kNoCap));
        const auto xh = R.xhat(like);
        for (int a = 0; a < Q.dim(); ++a)
            if (!rep.expect_equal(twisted_left_operator(Finv, f.coord(0, a), like).series(), xh[static_cast<std::size_t>(a)].series(), {a})) return;
        rep.note = "dilatation twist exp(sum a_ab D_a (x) D_b)";
    });
}

// --- first-order quadratic deformations -------------------------------------

/// Constant rank-4 tensor K_{m g b a} of parameter polynomials.
struct QuadraticK {
    ContextPtr ctx;
    std::vector<Series> k;  // index ((m*n + g)*n + b)*n + a

    static QuadraticK zero(ContextPtr ctx)
    {
        const int n = ctx->dim();
        const Series z = Series::zero(ctx, Layout{1, 0}, Truncation{});
        return QuadraticK{ctx, std::vector<Series>(static_cast<std::size_t>(n * n * n * n), z)};
    }
    int dim() const { return ctx->dim(); }
    Series& operator()(int m, int g, int b, int a) { return k[static_cast<std::size_t>(((m * dim() + g) * dim() + b) * dim() + a)]; }
    const Series& operator()(int m, int g, int b, int a) const { return k[static_cast<std::size_t>(((m * dim() + g) * dim() + b) * dim() + a)]; }
};

/// K_{m g b a} = a_{m b} delta_{g b} delta_{a m}: the dilatation model to first order.
inline QuadraticK quadratic_from_dilatation(const QDeformation& Q)
{
    QuadraticK K = QuadraticK::zero(Q.ctx);
    const Series like = K.k.front();
    for (int m = 0; m < Q.dim(); ++m)
        for (int b = 0; b < Q.dim(); ++b) K(m, b, b, m) = Q.a(like, m, b);
    return K;
}

/// x^_m = x_m + i K_{m g b a} x_a x_b p_g, kept to first order in K.
inline Realization quadratic_first_order(const QuadraticK& K, std::string name = "quadratic")
{
    Realization R;
    R.name = std::move(name);
    R.ctx = K.ctx;
    R.par_cap = 1;
    R.operators = [K](const PhaseOperator& like) {
        const int n = K.dim();
        auto eta = [&](int i) { return Gauss(K.ctx->eta(i)); };
        std::vector<PhaseOperator> r;
        for (int m = 0; m < n; ++m) {
            PhaseOperator s = like.x(m);
            for (int g = 0; g < n; ++g)
                for (int b = 0; b < n; ++b)
                    for (int a = 0; a < n; ++a) {
                        const Series& c = K(m, g, b, a);
                        if (c.is_zero()) continue;
                        s += PhaseOperator(c.embed(Layout{1, 1}, {-1}, {}, like.series().trunc())) * like.x(a) * like.x(b) * like.p(g) *
                             (Gauss::i() * eta(a) * eta(b) * eta(g));
                    }
            r.push_back(std::move(s));
        }
        return r;
    };
    return R;
}

/// [x^_m, x^_v] = Theta_{m v b a} x_a x_b + O(K^2), Theta_{m v..} = K_{m v..} - K_{v m..}.
inline Report quadratic_commutator_check(const QuadraticK& K)
{
    return timed_report("quadratic", "qdeform", 1, [&](Report& rep) {
        const Realization R = quadratic_first_order(K);
        const PhaseOperator like = PhaseOperator::zero(K.ctx, Truncation::parameters(1, 8));
        const auto xh = R.xhat(like);
        const int n = K.dim();
        for (int m = 0; m < n; ++m)
            for (int v = m + 1; v < n; ++v) {
                PhaseOperator want = like.zero();
                for (int b = 0; b < n; ++b)
                    for (int a = 0; a < n; ++a) {
                        const Series th = K(m, v, b, a) - K(v, m, b, a);
                        if (!th.is_zero())
                            want += PhaseOperator(th.embed(Layout{1, 1}, {-1}, {}, like.series().trunc())) * like.x(a) * like.x(b) *
                                    Gauss(K.ctx->eta(a) * K.ctx->eta(b));
                    }
                if (!rep.expect_equal(commutator(xh[static_cast<std::size_t>(m)], xh[static_cast<std::size_t>(v)]).series(), want.series(), {m, v})) {
                    rep.note = "first-order commutator differs from Theta x x";
                    return;
                }
            }
    });
}

// --- the q-deformation suite ------------------------------------------------

/// Delta D_a = Delta_0 D_a, Delta p_a = p_a (x) phi_a + phi~_a (x) p_a and
/// Delta phi_a = phi_a (x) phi_a, each as F Delta_0 F^{-1}.
inline Report q_coproduct_check(const QDeformation& Q, int order)
{
    const std::string model = Q.mode == QMode::antisymmetric ? "qdilatation" : "qdilatation_sym";
    return timed_report(model, "conjugation", order, [&](Report& rep) {
        const PhaseOperator like = PhaseOperator::zero(Q.ctx, PhaseOperator::default_trunc(order));
        const TensorOperator tl = TensorOperator::identity(Q.ctx, TensorOperator::trunc(order));
        const TensorOperator Finv = Q.twist_inverse(tl);
        // Delta X = F Delta_0 X F^{-1} in the form F^{-1} Delta X = Delta_0 X F^{-1}
        const int n = Q.dim();
        for (int a = 0; a < n; ++a) {
            const PhaseOperator Da = Q.D(like, a), ph = Q.phi(like, a), pt = Q.phi(like, a, true);
            const TensorOperator D0 = tl.in_slot(0, Da) + tl.in_slot(1, Da);
            if (!rep.expect_equal((Finv * D0).series(), (D0 * Finv).series(), {a})) {
                rep.note = "Delta D_a = Delta_0 D_a";
                return;
            }
            const TensorOperator dp = tl.p(0, a) * tl.in_slot(1, ph) + tl.in_slot(0, pt) * tl.p(1, a);
            if (!rep.expect_equal((Finv * dp).series(), ((tl.p(0, a) + tl.p(1, a)) * Finv).series(), {a})) {
                rep.note = "Delta p_a = p_a (x) phi_a + phi~_a (x) p_a";
                return;
            }
            // with Delta D_b = Delta_0 D_b, Delta phi_a = exp(i sum_b a_ab Delta D_b)
            TensorOperator X = tl.zero();
            for (int b = 0; b < n; ++b) X += TensorOperator(Q.a(tl.series(), a, b)) * (tl.in_slot(0, Q.D(like, b)) + tl.in_slot(1, Q.D(like, b))) * Gauss::i();
            if (!rep.expect_equal(X.exp().series(), (tl.in_slot(0, ph) * tl.in_slot(1, ph)).series(), {a})) {
                rep.note = "Delta phi_a = phi_a (x) phi_a";
                return;
            }
        }
    });
}

/// (f * g) * h = f * (g * h) for the eigenvalue star on all coordinate
/// triples and on products of them.
inline Report q_associativity_check(const QDeformation& Q, int order)
{
    const std::string model = Q.mode == QMode::antisymmetric ? "qdilatation" : "qdilatation_sym";
    return timed_report(model, "assoc", order, [&](Report& rep) {
        const Series P = Series::zero(Q.ctx, Layout{0, 1}, Truncation::parameters(order, kNoCap));
        const int n = Q.dim();
        for (int m = 0; m < n; ++m)
            for (int v = 0; v < n; ++v)
                for (int r = 0; r < n; ++r) {
                    const Series x = P.coord(0, m), y = P.coord(0, v) * P.coord(0, r) + P.coord(0, m), z = P.coord(0, r) * P.coord(0, v);
                    if (!rep.expect_equal(q_star(q_star(x, y, Q), z, Q), q_star(x, q_star(y, z, Q), Q), {m, v, r})) return;
                }
    });
}

/// All displayed relations of the dilatation model at parameter degree `order`.
inline Report qdeform_check(const QDeformation& Q, int order)
{
    const std::string model = Q.mode == QMode::antisymmetric ? "qdilatation" : "qdilatation_sym";
    return timed_report(model, "qdeform", order, [&](Report& rep) {
        const int n = Q.dim();
        const PhaseOperator like = PhaseOperator::zero(Q.ctx, PhaseOperator::default_trunc(order));
        const Series& s = like.series();
        auto lift = [&](const Series& c) { return PhaseOperator(c.with_trunc(s.trunc())); };
        std::vector<PhaseOperator> xh, yh, ph, pt, D;
        for (int a = 0; a < n; ++a) {
            xh.push_back(Q.xhat(like, a));
            yh.push_back(Q.yhat(like, a));
            ph.push_back(Q.phi(like, a));
            pt.push_back(Q.phi(like, a, true));
            D.push_back(Q.D(like, a));
        }
        auto fail = [&](const std::string& what) { rep.note = what; };
        const PhaseOperator one = like.one();
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const Gauss eab(a == b ? Q.ctx->eta(a) : 0);
                // dilatation relations
                if (!rep.expect_zero(commutator(D[a], D[b]).series(), {a, b})) return fail("[D_a, D_b] = 0");
                if (!rep.expect_equal(commutator(D[a], like.p(b)).series(), (like.p(a) * (Gauss::i() * eab)).series(), {a, b}))
                    return fail("[D_a, p_b] = i p_a eta_ab");
                if (!rep.expect_equal(commutator(D[a], like.x(b)).series(), (like.x(a) * (-Gauss::i() * eab)).series(), {a, b}))
                    return fail("[D_a, x_b] = -i x_a eta_ab");
                if (!rep.expect_equal(commutator(D[a], xh[b]).series(), (xh[a] * (-Gauss::i() * eab)).series(), {a, b}))
                    return fail("[D_a, x^_b] = -i x^_a eta_ab");
                // q-commutation of x^ and of y^
                const PhaseOperator q = lift(Q.q(s, a, b));
                if (!rep.expect_equal((xh[a] * xh[b]).series(), (q * xh[b] * xh[a]).series(), {a, b})) return fail("x^_a x^_b = q_ab x^_b x^_a");
                const PhaseOperator qy = lift(Q.q(s, b, a));
                if (!rep.expect_equal((yh[a] * yh[b]).series(), (qy * yh[b] * yh[a]).series(), {a, b})) return fail("y^_a y^_b = q_ba y^_b y^_a");
                if (!rep.expect_zero(commutator(xh[a], yh[b]).series(), {a, b})) return fail("[x^_a, y^_b] = 0");
                // p_a x^_b - e^{a_ba} x^_b p_a = -i eta_ab exp(i sum_g a_bg D_g)
                const PhaseOperator cba = lift(Q.c(s, b, a));
                if (!rep.expect_equal((like.p(a) * xh[b] - cba * xh[b] * like.p(a)).series(), (ph[b] * (-Gauss::i() * eab)).series(), {a, b}))
                    return fail("p_a x^_b - e^{a_ba} x^_b p_a = -i eta_ab phi_b");
                // phi_a x^_b = e^{a_ab} x^_b phi_a
                const PhaseOperator cab = lift(Q.c(s, a, b));
                if (!rep.expect_equal((ph[a] * xh[b]).series(), (cab * xh[b] * ph[a]).series(), {a, b})) return fail("phi_a x^_b = e^{a_ab} x^_b phi_a");
                if (Q.mode == QMode::symmetric && !rep.expect_zero(commutator(xh[a], xh[b]).series(), {a, b})) return fail("symmetric mode: [x^_a, x^_b] = 0");
            }
        // phi |> 1 = 1, x^ |> 1 = x, y^ |> 1 = x
        for (int a = 0; a < n; ++a) {
            if (!rep.expect_equal(act(ph[a], one).series(), one.series(), {a})) return fail("phi_a |> 1 = 1");
            if (!rep.expect_equal(act(xh[a], one).series(), like.x(a).series(), {a})) return fail("x^_a |> 1 = x_a");
            if (!rep.expect_equal(act(yh[a], one).series(), like.x(a).series(), {a})) return fail("y^_a |> 1 = x_a");
            if (Q.mode == QMode::antisymmetric && !rep.expect_equal((ph[a] * pt[a]).series(), one.series(), {a})) return fail("phi~_a = phi_a^{-1}");
            if (Q.mode == QMode::symmetric && !rep.expect_equal(ph[a].series(), pt[a].series(), {a})) return fail("symmetric mode: phi~_a = phi_a");
        }
        // star product: x_a * x_b = q_ab x_b * x_a
        const Series P = Series::zero(Q.ctx, Layout{0, 1}, Truncation::parameters(order, kNoCap));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const Series lhs = q_star(P.coord(0, a), P.coord(0, b), Q);
                if (!rep.expect_equal(lhs, Q.c(P, a, b) * P.coord(0, a) * P.coord(0, b), {a, b})) return fail("x_a * x_b = e^{a_ab} x_a x_b");
                if (!rep.expect_equal(lhs, Q.q(P, a, b) * q_star(P.coord(0, b), P.coord(0, a), Q), {a, b})) return fail("x_a * x_b = q_ab x_b * x_a");
            }
        const TensorOperator Finv_op = Q.twist_inverse(TensorOperator::identity(Q.ctx, TensorOperator::trunc(order)), true);
        for (int a = 0; a < n; ++a)
            if (!rep.expect_equal(twisted_left_operator(Finv_op, P.coord(0, a), like).series(), yh[a].series(), {a}))
                return fail("y^_a = m F~^{-1}(|> (x) 1)(x_a (x) 1), F~ = F^op");
        for (const Report& sub : {q_twist_consistency(Q, q_realization(Q, order), order), q_coproduct_check(Q, order)})
            if (!sub.passed()) {
                rep.verdict = sub.verdict;
                rep.discrepancy = sub.discrepancy;
                return fail(sub.note);
            }
    });
}

}  // namespace ncphase
