#pragma once

#include "ncphase/catalog.hpp"
#include "ncphase/realization.hpp"
#include "ncphase/report.hpp"

#include <map>
#include <string>
#include <vector>

namespace ncphase {

/// Momentum series in banks (k, q); total momentum degree <= order and
/// parameter degree <= 2 order.
inline Series two_bank_like(const ContextPtr& ctx, int order) { return Series::zero(ctx, Layout{2, 0}, Truncation::momentum(order, 2 * order)); }

/// phi and chi of R as functions of bank `bank` in the layout of `like`.
inline Matrix phi_in_bank(const Realization& R, const Series& like, int bank)
{
    std::vector<int> map{bank};
    Matrix m;
    for (const auto& row : R.phi) {
        SeriesVec r;
        for (const auto& f : row) r.push_back(f.embed(like.layout(), map, {}, like.trunc()));
        m.push_back(std::move(r));
    }
    return m;
}
inline SeriesVec chi_in_bank(const Realization& R, const Series& like, int bank)
{
    SeriesVec v;
    for (const auto& f : R.chi) v.push_back(f.embed(like.layout(), {bank}, {}, like.trunc()));
    return v;
}

/// J_mu(k, q) and h(k, q) in banks (k, q).
struct JPair {
    SeriesVec J;
    Series h;
};

inline void require_momentum_form(const Realization& R)
{
    if (!R.momentum_form()) throw std::invalid_argument(R.name + ": quadratic deformations have no momentum-space composition law");
}

/// Solves dJ_mu/dt = k_b phi_{mu b}(J), dh/dt = k_b chi_b(J) with J(0) = q,
/// h(0) = 0 at t = 1, as the Lie series J = e^V q, h = sum V^m(k.chi)/(m+1)!
/// of the vector field V = k_b phi_{mu b}(q) d/dq_mu. V never lowers the total
/// momentum degree, so the truncation is exact.
inline JPair solve_J_h(const Realization& R, int order)
{
    require_momentum_form(R);
    const int n = R.dim();
    const Series like = two_bank_like(R.ctx, order);
    const Matrix phi = phi_in_bank(R, like, 1);
    const SeriesVec chi = chi_in_bank(R, like, 1);
    SeriesVec field(static_cast<std::size_t>(n), like.zero());
    for (int m = 0; m < n; ++m)
        for (int b = 0; b < n; ++b)
            if (!phi[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)].is_zero())
                field[static_cast<std::size_t>(m)] += like.mom(0, b) * phi[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)] * Gauss(R.ctx->eta(b));
    auto V = [&](const Series& f) {
        Series r = like.zero();
        for (int m = 0; m < n; ++m) {
            const Series d = f.derivative(like.mom_var(1, m));
            if (!d.is_zero()) r += field[static_cast<std::size_t>(m)] * d;
        }
        return r;
    };
    JPair out;
    for (int m = 0; m < n; ++m) {
        Series term = like.mom(1, m);
        Series sum = term;
        for (int j = 1; !term.is_zero(); ++j) {
            term = V(term) * Gauss(Rational(1, j));
            sum += term;
        }
        out.J.push_back(std::move(sum));
    }
    Series kchi = like.zero();
    for (int b = 0; b < n; ++b) kchi += like.mom(0, b) * chi[static_cast<std::size_t>(b)] * Gauss(R.ctx->eta(b));
    out.h = like.zero();
    Series term = kchi;
    for (int j = 1; !term.is_zero(); ++j) {
        out.h += term * Gauss(Rational(1, j));
        term = V(term) * Gauss(Rational(1, j));
    }
    return out;
}

/// Euler operator in bank k: each term scaled by its k-degree, i.e. d/dt at
/// t = 1 of F(tk, q).
inline Series euler_k(const Series& f)
{
    Series r = f.zero();
    for (const auto& [e, c] : f.terms()) r.add_term(e, c * Gauss(f.bank_degree(e, 0)));
    return r;
}

/// Residual of the defining PDE after substituting (J, h) back into phi and
/// chi by composition. Zero vectors mean an exact solution.
inline JPair pde_residual(const Realization& R, const JPair& sol)
{
    require_momentum_form(R);
    const int n = R.dim();
    const Series& like = sol.J.at(0);
    const Matrix phi = phi_in_bank(R, like, 1);
    const SeriesVec chi = chi_in_bank(R, like, 1);
    Substitution at_J(1, sol.J);
    JPair res;
    for (int m = 0; m < n; ++m) {
        Series r = euler_k(sol.J[static_cast<std::size_t>(m)]);
        for (int b = 0; b < n; ++b) {
            const Series& f = phi[static_cast<std::size_t>(m)][static_cast<std::size_t>(b)];
            if (!f.is_zero()) r -= like.mom(0, b) * at_J(f) * Gauss(R.ctx->eta(b));
        }
        res.J.push_back(std::move(r));
    }
    res.h = euler_k(sol.h);
    for (int b = 0; b < n; ++b)
        if (!chi[static_cast<std::size_t>(b)].is_zero()) res.h -= like.mom(0, b) * at_J(chi[static_cast<std::size_t>(b)]) * Gauss(R.ctx->eta(b));
    return res;
}

inline Report pde_check(const Realization& R, int order)
{
    return timed_report(R.name, "pde", order, [&](Report& rep) {
        if (!R.momentum_form()) {
            rep.skip("no momentum-space PDE for quadratic deformations");
            return;
        }
        const JPair sol = solve_J_h(R, order);
        const JPair res = pde_residual(R, sol);
        for (int m = 0; m < R.dim(); ++m)
            if (!rep.expect_zero(res.J[static_cast<std::size_t>(m)], {m})) return;
        rep.expect_zero(res.h);
        // boundary values J(0, q) = q, h(0, q) = 0
        for (int m = 0; m < R.dim(); ++m)
            if (!rep.expect_equal(sol.J[static_cast<std::size_t>(m)].bank_to_zero(0), sol.J[0].mom(1, m), {m})) return;
        rep.expect_zero(sol.h.bank_to_zero(0));
    });
}

/// J for a linear realization from the matrix ODE J' = k + J A with
/// A_{g m} = eta_b eta_g k_b K_{g b m}: J = q e^A + k (e^A - 1)/A.
inline JPair closed_form_linear(const LinearK& K, int order)
{
    const int n = K.dim();
    const Series like = two_bank_like(K.ctx, order);
    auto eta = [&](int i) { return Gauss(K.ctx->eta(i)); };
    Matrix A(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    for (int g = 0; g < n; ++g)
        for (int m = 0; m < n; ++m)
            for (int b = 0; b < n; ++b) {
                const Series& c = K(g, b, m);
                if (!c.is_zero()) A[static_cast<std::size_t>(g)][static_cast<std::size_t>(m)] += c.embed(like.layout(), {0}, {}, like.trunc()) * like.mom(0, b) * (eta(b) * eta(g));
            }
    Matrix id(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    for (int i = 0; i < n; ++i) id[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = like.one();
    // e^A = sum A^m/m!, (e^A - 1)/A = sum A^m/(m+1)!; A^m has k-degree m.
    Matrix power = id, expA = id, phiA = id;
    for (int m = 1; m <= order; ++m) {
        power = mat_mul(power, A);
        const Gauss c1(Rational(1) / factorial(static_cast<unsigned>(m)));
        const Gauss c2(Rational(1) / factorial(static_cast<unsigned>(m + 1)));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                expA[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += power[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * c1;
                phiA[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += power[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * c2;
            }
    }
    JPair out;
    for (int m = 0; m < n; ++m) {
        Series s = like.zero();
        for (int a = 0; a < n; ++a) {
            s += like.mom(1, a) * expA[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)];
            s += like.mom(0, a) * phiA[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)];
        }
        out.J.push_back(std::move(s));
    }
    out.h = like.zero();
    return out;
}

/// Momentum composition k (+) q = D(k, q), phase G(k, q), the map K(k) = J(k, 0)
/// and its inverse (Weyl momenta). All in banks (k, q); K and Kinv only use k.
struct CompositionLaw {
    std::string model;
    int order = 0;
    ContextPtr ctx;
    SeriesVec D;
    Series G;
    SeriesVec K;
    SeriesVec Kinv;
    int dim() const { return ctx->dim(); }
    Series like() const { return D.at(0).zero(); }
};

inline CompositionLaw composition_law(const Realization& R, int order)
{
    const JPair sol = solve_J_h(R, order);
    CompositionLaw law;
    law.model = R.name;
    law.order = order;
    law.ctx = R.ctx;
    for (const auto& j : sol.J) law.K.push_back(j.bank_to_zero(1));
    law.Kinv = revert(law.K, 0);
    Substitution at_kinv(0, law.Kinv);
    law.D = at_kinv(sol.J);
    law.G = at_kinv(sol.h);
    law.G -= at_kinv(sol.h.bank_to_zero(1));
    return law;
}

// --- star products on polynomials -----------------------------------------

/// Polynomials in x: one coordinate bank, no momenta.
inline Series poly_like(const ContextPtr& ctx, int par_cap) { return Series::zero(ctx, Layout{0, 1}, Truncation::parameters(par_cap, kNoCap)); }

/// f * g for polynomials f, g in x, by coefficient extraction from
///   e^{ikx} * e^{iqx} = e^{i x.D(k,q) + i G(k,q)},
/// using x^A = (-i)^|A| eta^A A! [k^A] e^{ikx}.
inline Series star(const Series& f, const Series& g, const CompositionLaw& law)
{
    f.check_compatible(g);
    const int n = law.dim();
    int da = 0, db = 0;
    for (const auto& [e, c] : f.terms()) da = std::max(da, f.x_degree(e));
    for (const auto& [e, c] : g.terms()) db = std::max(db, g.x_degree(e));
    if (da + db > law.order) throw DomainError("star product degree " + std::to_string(da + db) + " exceeds the composition-law order " + std::to_string(law.order));
    const int par = std::min(f.trunc().par, law.D[0].trunc().par);
    Truncation t = Truncation::momentum(da + db, par);
    t.bank[0] = da;
    t.bank[1] = db;
    const Series like = Series::zero(law.ctx, Layout{2, 1}, t);
    Series u = law.G.embed(Layout{2, 1}, {0, 1}, {}, t);
    for (int m = 0; m < n; ++m) u += like.coord(0, m) * law.D[static_cast<std::size_t>(m)].embed(Layout{2, 1}, {0, 1}, {}, t) * Gauss(law.ctx->eta(m));
    const Series E = expand_fn(Fn::exp, u * Gauss::i());
    // group E by (k, q) exponents
    using Key = std::array<std::uint8_t, 16>;
    std::map<Key, Series> coeff;
    const Series out_like = f.with_trunc(Truncation::parameters(par, kNoCap)).zero();
    for (const auto& [e, c] : E.terms()) {
        Key k{};
        Exponents rest{};
        for (int i = 0; i < like.num_params(); ++i) rest[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];
        for (int m = 0; m < n; ++m) {
            k[static_cast<std::size_t>(m)] = e[static_cast<std::size_t>(like.mom_var(0, m))];
            k[static_cast<std::size_t>(8 + m)] = e[static_cast<std::size_t>(like.mom_var(1, m))];
            rest[static_cast<std::size_t>(out_like.x_var(0, m))] = e[static_cast<std::size_t>(like.x_var(0, m))];
        }
        auto [it, ins] = coeff.try_emplace(k, out_like);
        it->second.add_term(rest, c);
    }
    auto weight = [&](const Exponents& e, const Series& s, Key& key, int off) {
        Gauss w(1);
        for (int m = 0; m < n; ++m) {
            const int a = e[static_cast<std::size_t>(s.x_var(0, m))];
            key[static_cast<std::size_t>(off + m)] = static_cast<std::uint8_t>(a);
            w = w * Gauss(factorial(static_cast<unsigned>(a))) * ((a % 2 == 1 && law.ctx->eta(m) < 0) ? Gauss(-1) : Gauss(1)) * i_pow(-a);
        }
        return w;
    };
    Series out = out_like;
    for (const auto& [ea, ca] : f.terms()) {
        Key key{};
        const Gauss wa = weight(ea, f, key, 0);
        Exponents pa{};
        for (int i = 0; i < f.num_params(); ++i) pa[static_cast<std::size_t>(i)] = ea[static_cast<std::size_t>(i)];
        for (const auto& [eb, cb] : g.terms()) {
            const Gauss wb = weight(eb, g, key, 8);
            Exponents pb{};
            for (int i = 0; i < g.num_params(); ++i) pb[static_cast<std::size_t>(i)] = eb[static_cast<std::size_t>(i)];
            auto it = coeff.find(key);
            if (it == coeff.end()) continue;
            out += it->second.shifted(pa).shifted(pb) * (ca * cb * wa * wb);
        }
    }
    return out;
}

/// (A, B) -> D(D(A, B), C) style substitutions on three banks k1, k2, k3.
struct ThreeBank {
    SeriesVec left;   // D(D(k1, k2), k3)
    SeriesVec right;  // D(k1, D(k2, k3))
    Series gleft;     // G(k1, k2) + G(D(k1, k2), k3)
    Series gright;    // G(k2, k3) + G(k1, D(k2, k3))
};

inline ThreeBank three_bank_sides(const CompositionLaw& law)
{
    const Truncation t = law.D[0].trunc();
    const Layout L3{3, 0};
    auto emb = [&](const Series& s, int b0, int b1) { return s.embed(L3, {b0, b1}, {}, t); };
    auto embv = [&](const SeriesVec& v, int b0, int b1) {
        SeriesVec r;
        for (const auto& s : v) r.push_back(emb(s, b0, b1));
        return r;
    };
    const SeriesVec D12 = embv(law.D, 0, 1), D23 = embv(law.D, 1, 2);
    ThreeBank out;
    Substitution first(0, D12);
    Substitution second(1, D23);
    out.left = first(embv(law.D, 0, 2));
    out.right = second(embv(law.D, 0, 1));
    out.gleft = emb(law.G, 0, 1) + first(emb(law.G, 0, 2));
    out.gright = emb(law.G, 1, 2) + second(emb(law.G, 0, 1));
    return out;
}

inline Report associativity_check(const CompositionLaw& law)
{
    return timed_report(law.model, "assoc", law.order, [&](Report& rep) {
        // coordinate associator (x_m * x_v) * x_r - x_m * (x_v * x_r) first
        if (law.order >= 3) {
            const Series P = poly_like(law.ctx, law.D[0].trunc().par);
            const int n = law.dim();
            for (int m = 0; m < n; ++m)
                for (int v = 0; v < n; ++v)
                    for (int r = 0; r < n; ++r) {
                        const Series a = star(star(P.coord(0, m), P.coord(0, v), law), P.coord(0, r), law) -
                                         star(P.coord(0, m), star(P.coord(0, v), P.coord(0, r), law), law);
                        if (!rep.expect_zero(a, {m, v, r})) {
                            rep.note = "(x_m * x_v) * x_r - x_m * (x_v * x_r) = " + a.str();
                            return;
                        }
                    }
        }
        const ThreeBank tb = three_bank_sides(law);
        for (int m = 0; m < law.dim(); ++m)
            if (!rep.expect_equal(tb.left[static_cast<std::size_t>(m)], tb.right[static_cast<std::size_t>(m)], {m})) {
                rep.note = "D(D(k1,k2),k3) != D(k1,D(k2,k3)) for component " + std::to_string(m);
                return;
            }
        if (!rep.expect_equal(tb.gleft, tb.gright)) rep.note = "G fails the pentagon relation";
    });
}

inline Report associativity_check(const Realization& R, int order)
{
    if (!R.momentum_form())
        return timed_report(R.name, "assoc", order, [&](Report& rep) { rep.skip("no momentum-space composition law for quadratic deformations"); });
    return associativity_check(composition_law(R, order));
}

}  // namespace ncphase
