#pragma once

#include "ncphase/phase_operator.hpp"
#include "ncphase/report.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ncphase {

using Matrix = std::vector<SeriesVec>;

inline Matrix mat_mul(const Matrix& a, const Matrix& b)
{
    const std::size_t n = a.size();
    Matrix r(n, SeriesVec(n, a[0][0].zero()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            if (a[i][k].is_zero()) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (!b[k][j].is_zero()) r[i][j] += a[i][k] * b[k][j];
        }
    return r;
}

/// Metric as a constant matrix shaped like `like`.
inline Matrix metric_matrix(const Series& like)
{
    const int n = like.dim();
    Matrix m(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = like.scalar(Gauss(like.ctx().eta(i)));
    return m;
}

/// Inverse of phi = eta + Delta where Delta has positive parameter degree:
/// sum_k (-eta Delta)^k eta, finite under the parameter cap.
inline Matrix inverse_near_metric(const Matrix& phi)
{
    const std::size_t n = phi.size();
    const Series& like = phi[0][0];
    if (like.trunc().par >= kNoCap) throw DomainError("metric-perturbation inverse needs a parameter cap");
    const Matrix eta = metric_matrix(like);
    Matrix step(n, SeriesVec(n, like.zero()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            step[i][j] = -(eta[i][i] * (phi[i][j] - eta[i][j]));
            if (!step[i][j].filter([&](const Exponents& e) { return like.par_degree(e) == 0; }).is_zero())
                throw DomainError("phi differs from the metric at zeroth order");
        }
    Matrix term = eta;
    Matrix sum = eta;
    for (int k = 0; k <= like.trunc().par; ++k) {
        term = mat_mul(step, term);
        bool zero = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                sum[i][j] += term[i][j];
                zero = zero && term[i][j].is_zero();
            }
        if (zero) break;
    }
    return sum;
}

/// x^_mu = x_alpha phi_{alpha mu}(p) + chi_mu(p), repeated indices contracted
/// with the metric. phi and chi are series in one momentum bank truncated in
/// parameter degree (and momentum degree at least as high).
///
/// Models that are not of this form (quadratic deformations) supply their
/// coordinate operators directly through `operators`.
struct Realization {
    std::string name;
    ContextPtr ctx;
    int par_cap = 0;
    Matrix phi;
    SeriesVec chi;
    std::function<std::vector<PhaseOperator>(const PhaseOperator&)> operators;

    int dim() const { return ctx->dim(); }
    bool momentum_form() const { return !operators; }

    Series like() const { return Series::zero(ctx, Layout{1, 0}, Truncation{par_cap, par_cap, {kNoCap, kNoCap, kNoCap, kNoCap}, kNoCap}); }

    PhaseOperator operator_like(int order) const { return PhaseOperator::zero(ctx, PhaseOperator::default_trunc(order)); }

    std::vector<PhaseOperator> xhat(const PhaseOperator& like) const
    {
        if (operators) return operators(like);
        const int n = dim();
        std::vector<PhaseOperator> r;
        for (int mu = 0; mu < n; ++mu) {
            PhaseOperator s = like.lift(chi[static_cast<std::size_t>(mu)]);
            for (int a = 0; a < n; ++a) {
                const Series& f = phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)];
                if (!f.is_zero()) s += like.x(a) * like.lift(f) * Gauss(ctx->eta(a));
            }
            r.push_back(std::move(s));
        }
        return r;
    }

    /// phi at zero parameters is the metric and chi vanishes there.
    void validate() const
    {
        if (!momentum_form()) return;
        const int n = dim();
        if (phi.size() != static_cast<std::size_t>(n) || chi.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument(name + ": phi/chi shape does not match the dimension");
        auto zeroth = [](const Series& s) { return s.filter([&](const Exponents& e) { return s.par_degree(e) == 0; }); };
        for (int a = 0; a < n; ++a) {
            for (int mu = 0; mu < n; ++mu) {
                const Series z = zeroth(phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)]);
                const Series expected = z.scalar(Gauss(a == mu ? ctx->eta(a) : 0));
                if (z != expected)
                    throw std::invalid_argument(name + ": phi[" + std::to_string(a) + "][" + std::to_string(mu) + "] at zero deformation is " +
                                                (z.is_zero() ? std::string("0") : z.str()) + ", expected the metric");
            }
            if (!zeroth(chi[static_cast<std::size_t>(a)]).is_zero())
                throw std::invalid_argument(name + ": chi[" + std::to_string(a) + "] does not vanish at zero deformation");
        }
    }
};

// --- linear realizations --------------------------------------------------

/// Constant rank-3 tensor K_{beta mu alpha} of parameter polynomials.
struct LinearK {
    ContextPtr ctx;
    std::vector<Series> k;  // index (beta*n + mu)*n + alpha

    static LinearK zero(ContextPtr ctx)
    {
        const int n = ctx->dim();
        const Series z = Series::zero(ctx, Layout{1, 0}, Truncation{});
        return LinearK{ctx, std::vector<Series>(static_cast<std::size_t>(n * n * n), z)};
    }
    int dim() const { return ctx->dim(); }
    Series& operator()(int b, int m, int a) { return k[static_cast<std::size_t>((b * dim() + m) * dim() + a)]; }
    const Series& operator()(int b, int m, int a) const { return k[static_cast<std::size_t>((b * dim() + m) * dim() + a)]; }
    Series scalar_like() const { return k.front().zero(); }
};

/// phi_{alpha mu} = eta_{alpha mu} + K_{beta mu alpha} p_beta.
inline Realization linear_realization(std::string name, const LinearK& K, int par_cap)
{
    Realization R;
    R.name = std::move(name);
    R.ctx = K.ctx;
    R.par_cap = par_cap;
    const Series like = R.like();
    const int n = K.dim();
    R.phi = metric_matrix(like);
    R.chi.assign(static_cast<std::size_t>(n), like.zero());
    for (int a = 0; a < n; ++a)
        for (int mu = 0; mu < n; ++mu)
            for (int b = 0; b < n; ++b) {
                const Series& c = K(b, mu, a);
                if (!c.is_zero()) R.phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] += c.with_trunc(like.trunc()) * like.mom(0, b) * Gauss(K.ctx->eta(b));
            }
    return R;
}

/// C_{mu nu alpha}, antisymmetric in (mu, nu).
struct StructureConstants {
    std::vector<Series> c;  // (mu*n + nu)*n + alpha
    int n = 0;
    const Series& operator()(int m, int v, int a) const { return c[static_cast<std::size_t>((m * n + v) * n + a)]; }
};

struct ClosureResult {
    bool closed = false;
    StructureConstants C;
    std::vector<int> first_failure;  // (beta, mu, nu, alpha)
    Series residual;
};

/// K_{beta mu lambda} K_{lambda nu alpha} - K_{beta nu lambda} K_{lambda mu alpha}
///   = (K_{mu nu lambda} - K_{nu mu lambda}) K_{beta lambda alpha}
/// with lambda contracted through the metric.
inline ClosureResult lie_closure_check(const LinearK& K)
{
    const int n = K.dim();
    ClosureResult res;
    res.C.n = n;
    for (int m = 0; m < n; ++m)
        for (int v = 0; v < n; ++v)
            for (int a = 0; a < n; ++a) res.C.c.push_back(K(m, v, a) - K(v, m, a));
    res.closed = true;
    for (int b = 0; b < n; ++b)
        for (int m = 0; m < n; ++m)
            for (int v = 0; v < n; ++v)
                for (int a = 0; a < n; ++a) {
                    Series s = K.scalar_like();
                    for (int l = 0; l < n; ++l) {
                        const Gauss e(K.ctx->eta(l));
                        s += (K(b, m, l) * K(l, v, a) - K(b, v, l) * K(l, m, a) - res.C(m, v, l) * K(b, l, a)) * e;
                    }
                    if (!s.is_zero() && res.closed) {
                        res.closed = false;
                        res.first_failure = {b, m, v, a};
                        res.residual = s;
                    }
                }
    return res;
}

// --- commutator decomposition ---------------------------------------------

/// [x^_mu, x^_nu] = i x^_alpha C_{mu nu alpha}(p) + i d_{mu nu}(p).
struct DeformedCommutators {
    bool decomposed = true;
    int n = 0;
    std::vector<Series> C;  // (mu*n + nu)*n + alpha
    std::vector<Series> d;  // mu*n + nu
    std::vector<int> failed_pair;
    PhaseOperator raw;  // commutator that could not be decomposed

    const Series& c(int m, int v, int a) const { return C[static_cast<std::size_t>((m * n + v) * n + a)]; }
    const Series& dd(int m, int v) const { return d[static_cast<std::size_t>(m * n + v)]; }
};

/// Splits a phase operator of x-degree <= 1 into sum_beta x_beta A_beta(p) + B(p).
inline std::optional<std::pair<SeriesVec, Series>> split_x_linear(const PhaseOperator& op, const Series& like)
{
    const Series& s = op.series();
    const int n = s.dim();
    SeriesVec A(static_cast<std::size_t>(n), like.zero());
    Series B = like.zero();
    for (const auto& [e, c] : s.terms()) {
        const int xd = s.x_degree(e);
        if (xd >= 2) return std::nullopt;
        Exponents t{};
        for (int i = 0; i < s.num_params(); ++i) t[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];
        for (int mu = 0; mu < n; ++mu) t[static_cast<std::size_t>(like.mom_var(0, mu))] = e[static_cast<std::size_t>(s.mom_var(0, mu))];
        if (xd == 0) {
            B.add_term(t, c);
            continue;
        }
        for (int b = 0; b < n; ++b)
            if (e[static_cast<std::size_t>(s.x_var(0, b))] == 1) A[static_cast<std::size_t>(b)].add_term(t, c);
    }
    return std::make_pair(std::move(A), std::move(B));
}

inline DeformedCommutators deformed_commutators(const Realization& R, int order)
{
    if (!R.momentum_form()) throw std::invalid_argument(R.name + ": coordinates are not of the form x phi(p) + chi(p)");
    const int n = R.dim();
    const PhaseOperator L = R.operator_like(order);
    const auto xh = R.xhat(L);
    const Series like = Series::zero(R.ctx, Layout{1, 0}, Truncation::parameters(order, kNoCap));
    Matrix phi(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    for (int a = 0; a < n; ++a)
        for (int m = 0; m < n; ++m) phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] = R.phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)].with_trunc(like.trunc());
    const Matrix inv = inverse_near_metric(phi);
    DeformedCommutators out;
    out.n = n;
    out.C.assign(static_cast<std::size_t>(n * n * n), like.zero());
    out.d.assign(static_cast<std::size_t>(n * n), like.zero());
    const Gauss mi(make_rational(0), make_rational(-1));
    for (int m = 0; m < n; ++m)
        for (int v = m + 1; v < n; ++v) {
            const PhaseOperator com = commutator(xh[static_cast<std::size_t>(m)], xh[static_cast<std::size_t>(v)]);
            auto split = split_x_linear(com, like);
            if (!split) {
                if (out.decomposed) {
                    out.decomposed = false;
                    out.failed_pair = {m, v};
                    out.raw = com;
                }
                continue;
            }
            const auto& [A, B] = *split;
            // i sum_alpha phi_{beta alpha} c_alpha = eta_beta A_beta
            SeriesVec c(static_cast<std::size_t>(n), like.zero());
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    c[static_cast<std::size_t>(a)] += inv[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * A[static_cast<std::size_t>(b)] * (mi * Gauss(R.ctx->eta(b)));
            Series d = B * mi;
            for (int a = 0; a < n; ++a) {
                d -= R.chi[static_cast<std::size_t>(a)].with_trunc(like.trunc()) * c[static_cast<std::size_t>(a)];
                const Series Ca = c[static_cast<std::size_t>(a)] * Gauss(R.ctx->eta(a));
                out.C[static_cast<std::size_t>((m * n + v) * n + a)] = Ca;
                out.C[static_cast<std::size_t>((v * n + m) * n + a)] = -Ca;
            }
            out.d[static_cast<std::size_t>(m * n + v)] = d;
            out.d[static_cast<std::size_t>(v * n + m)] = -d;
        }
    return out;
}

/// Coordinates close a Lie algebra: C momentum independent and d = 0.
inline Report closure_check(const Realization& R, int order)
{
    return timed_report(R.name, "closure", order, [&](Report& rep) {
        if (!R.momentum_form()) {
            const PhaseOperator L = R.operator_like(order);
            const auto xh = R.xhat(L);
            for (int m = 0; m < R.dim(); ++m)
                for (int v = m + 1; v < R.dim(); ++v) {
                    const auto com = commutator(xh[static_cast<std::size_t>(m)], xh[static_cast<std::size_t>(v)]);
                    const Series nonlinear = com.series().filter([&](const Exponents& e) { return com.series().x_degree(e) >= 2; });
                    if (!rep.expect_zero(nonlinear, {m, v})) {
                        rep.note = "commutator is not linear in the coordinates";
                        return;
                    }
                }
            rep.skip("linear commutators but no momentum-form realization to decompose");
            return;
        }
        const auto dc = deformed_commutators(R, order);
        if (!dc.decomposed) {
            rep.expect_zero(dc.raw.series().filter([&](const Exponents& e) { return dc.raw.series().x_degree(e) >= 2; }), dc.failed_pair);
            rep.note = "commutator is not linear in the coordinates";
            return;
        }
        const int n = R.dim();
        for (int m = 0; m < n; ++m)
            for (int v = m + 1; v < n; ++v) {
                for (int a = 0; a < n; ++a) {
                    const Series& c = dc.c(m, v, a);
                    if (!rep.expect_zero(c.filter([&](const Exponents& e) { return c.mom_degree(e) > 0; }), {m, v, a})) {
                        rep.note = "structure function C depends on momenta";
                        return;
                    }
                }
                if (!rep.expect_zero(dc.dd(m, v), {m, v})) {
                    rep.note = "nonzero momentum remainder d";
                    return;
                }
            }
    });
}

/// sum over cyclic permutations of [x^_mu, [x^_nu, x^_rho]].
inline Report jacobi_check(const Realization& R, int order)
{
    return timed_report(R.name, "jacobi", order, [&](Report& rep) {
        const int n = R.dim();
        const PhaseOperator L = R.operator_like(order);
        const auto xh = R.xhat(L);
        std::vector<PhaseOperator> com(static_cast<std::size_t>(n * n), L.zero());
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                com[static_cast<std::size_t>(a * n + b)] = commutator(xh[static_cast<std::size_t>(a)], xh[static_cast<std::size_t>(b)]);
                com[static_cast<std::size_t>(b * n + a)] = -com[static_cast<std::size_t>(a * n + b)];
            }
        auto C = [&](int a, int b) -> const PhaseOperator& { return com[static_cast<std::size_t>(a * n + b)]; };
        // the cyclic sum is totally antisymmetric, so distinct ordered triples suffice
        for (int m = 0; m < n; ++m)
            for (int v = m + 1; v < n; ++v)
                for (int r = v + 1; r < n; ++r) {
                    const PhaseOperator j = commutator(xh[static_cast<std::size_t>(m)], C(v, r)) + commutator(xh[static_cast<std::size_t>(v)], C(r, m)) +
                                            commutator(xh[static_cast<std::size_t>(r)], C(m, v));
                    if (!rep.expect_zero(j.series(), {m, v, r})) return;
                }
    });
}

}  // namespace ncphase
