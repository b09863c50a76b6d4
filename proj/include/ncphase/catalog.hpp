#pragma once

#include "ncphase/realization.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace ncphase {

/// Levi-Civita symbol on {0, 1, 2}.
inline int levi_civita(int i, int j, int k)
{
    if (i == j || j == k || i == k) return 0;
    const int p = (i - j) * (j - k) * (k - i);
    return p > 0 ? 1 : -1;
}

inline std::vector<std::string> vector_params(const std::string& base, int n)
{
    std::vector<std::string> v;
    for (int i = 0; i < n; ++i) v.push_back(base + "_" + std::to_string(i));
    return v;
}

/// sum_mu eta_mu u_mu v_mu.
inline Series dot(const SeriesVec& u, const SeriesVec& v)
{
    Series s = u.at(0).zero();
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i] * Gauss(s.ctx().eta(static_cast<int>(i)));
    return s;
}

inline SeriesVec momenta(const Series& like, int bank = 0)
{
    SeriesVec v;
    for (int mu = 0; mu < like.dim(); ++mu) v.push_back(like.mom(bank, mu));
    return v;
}

inline SeriesVec vector_param(const Series& like, const std::string& base)
{
    SeriesVec v;
    for (int mu = 0; mu < like.dim(); ++mu) v.push_back(like.param(base + "_" + std::to_string(mu)));
    return v;
}

inline Realization realization_from_phi(std::string name, ContextPtr ctx, int par_cap, const std::function<Series(const Series& like, int a, int mu)>& phi)
{
    Realization R;
    R.name = std::move(name);
    R.ctx = std::move(ctx);
    R.par_cap = par_cap;
    const Series like = R.like();
    const int n = R.dim();
    R.phi.assign(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    for (int a = 0; a < n; ++a)
        for (int mu = 0; mu < n; ++mu) R.phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(mu)] = phi(like, a, mu);
    R.chi.assign(static_cast<std::size_t>(n), like.zero());
    R.validate();
    return R;
}

/// Realizations keep enough parameter degree for momentum order `order`.
inline int realization_par_cap(int order) { return 2 * order + 2; }

inline Realization undeformed(int n, int order)
{
    return realization_from_phi("undeformed", Context::make(n, Context::lorentzian(n), {}), realization_par_cap(order),
                                [](const Series& s, int a, int mu) { return s.scalar(Gauss(a == mu ? s.ctx().eta(a) : 0)); });
}

/// x^_mu = x_mu phi1(l^2 p^2) + l^2 (x.p) p_mu phi2(l^2 p^2); phi1, phi2 are
/// power series given by their coefficients, phi1(0) = 1.
inline Realization generalized_snyder(int n, int order, const std::vector<Rational>& phi1, const std::vector<Rational>& phi2, std::string name = "snyder_gen")
{
    if (phi1.empty() || phi1[0] != 1) throw std::invalid_argument("phi1 must start with 1");
    auto ctx = Context::make(n, Context::lorentzian(n), {"l"});
    const int cap = realization_par_cap(order);
    const Series like = Series::zero(ctx, Layout{1, 0}, Truncation{cap, cap, {kNoCap, kNoCap, kNoCap, kNoCap}, kNoCap});
    const Series l2 = like.param("l").pow(2);
    const Series t = l2 * dot(momenta(like), momenta(like));
    auto eval = [&](const std::vector<Rational>& c) {
        Series r = like.zero(), tk = like.one();
        for (const auto& ck : c) {
            r += tk * Gauss(ck);
            tk = tk * t;
        }
        return r;
    };
    const Series f1 = eval(phi1), f2 = eval(phi2);
    return realization_from_phi(std::move(name), ctx, cap, [&](const Series& s, int a, int mu) {
        return (a == mu ? f1 * Gauss(s.ctx().eta(a)) : s.zero()) + l2 * s.mom(0, a) * s.mom(0, mu) * f2;
    });
}

inline Realization snyder(int n, int order) { return generalized_snyder(n, order, {Rational(1)}, {Rational(1)}, "snyder"); }

/// Coefficients psi_k of [x^_mu, x^_nu] = i l^2 M_{mu nu} psi(l^2 p^2),
/// M_{mu nu} = x_mu p_nu - x_nu p_mu, read off [x^_0, x^_1] through l-degree
/// `order` and then confirmed on every pair. Empty if the commutators do not
/// have this form.
inline std::optional<std::vector<Gauss>> snyder_psi(const Realization& R, int order)
{
    const int n = R.dim();
    if (n < 2 || !R.momentum_form() || !R.ctx->find_param("l")) return std::nullopt;
    const PhaseOperator L = PhaseOperator::zero(R.ctx, Truncation::parameters(order, 2 * order + 2));
    const auto xh = R.xhat(L);
    const Series& s = L.series();
    const Series l = s.param("l");
    const Series com01 = commutator(xh[0], xh[1]).series();
    std::vector<Gauss> psi;
    for (int k = 0; 2 * k + 2 <= order; ++k) {
        const Series mono = l.pow(static_cast<unsigned>(2 * k + 2)) * s.coord(0, 0) * s.mom(0, 1).pow(static_cast<unsigned>(2 * k + 1));
        const auto it = com01.terms().find(mono.terms().begin()->first);
        const Gauss c = it == com01.terms().end() ? Gauss(0) : it->second;
        psi.push_back(c * -Gauss::i() * Gauss(k % 2 == 1 ? R.ctx->eta(1) : 1));
    }
    const Series t = l * l * dot(momenta(s), momenta(s));
    Series f = s.zero(), tk = s.one();
    for (const auto& c : psi) {
        f += tk * c;
        tk = tk * t;
    }
    for (int m = 0; m < n; ++m)
        for (int v = m + 1; v < n; ++v) {
            const Series M = s.coord(0, m) * s.mom(0, v) - s.coord(0, v) * s.mom(0, m);
            if (commutator(xh[static_cast<std::size_t>(m)], xh[static_cast<std::size_t>(v)]).series() != M * l * l * f * Gauss::i()) return std::nullopt;
        }
    return psi;
}

/// su(2) on Euclidean 3-space: phi_{ji} = delta_ji sqrt(1 - l^2 p^2) + l eps_{jik} p_k.
inline Realization su2(int order)
{
    auto ctx = Context::make(3, Context::euclidean(3), {"l"});
    const int cap = realization_par_cap(order);
    const Series like = Series::zero(ctx, Layout{1, 0}, Truncation{cap, cap, {kNoCap, kNoCap, kNoCap, kNoCap}, kNoCap});
    const Series l = like.param("l");
    const Series root = expand_fn(Fn::sqrt1p, -(l * l * dot(momenta(like), momenta(like))));
    return realization_from_phi("su2", ctx, cap, [&](const Series& s, int j, int i) {
        Series r = j == i ? root : s.zero();
        for (int k = 0; k < 3; ++k)
            if (levi_civita(j, i, k) != 0) r += l * s.mom(0, k) * Gauss(levi_civita(j, i, k));
        return r;
    });
}

enum class KappaKind { right, left, light, snyder };

/// Linear kappa realizations through their K tensors:
///   right  K_{bma} = -a_m eta_{ab}           x^ = x - a (x.p)
///   left   K_{bma} =  a_b eta_{am}           x^ = x (1 + a.p)
///   light  K_{bma} =  a_b eta_{am} - a_a eta_{bm}, with a.a = 0
///   snyder same tensor as light with a.a unconstrained.
inline LinearK kappa_tensor(KappaKind kind, int n)
{
    ContextPtr ctx;
    const auto metric = Context::lorentzian(n);
    std::vector<int> comps(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comps[static_cast<std::size_t>(i)] = i;
    if (kind == KappaKind::light)
        ctx = Context::make(n, metric, vector_params("a", n), null_vector_constraint(metric, comps));
    else
        ctx = Context::make(n, metric, vector_params("a", n));
    LinearK K = LinearK::zero(ctx);
    const Series s = K.scalar_like();
    auto eta = [&](int i, int j) { return Gauss(i == j ? metric[static_cast<std::size_t>(i)] : 0); };
    for (int b = 0; b < n; ++b)
        for (int m = 0; m < n; ++m)
            for (int a = 0; a < n; ++a) {
                switch (kind) {
                case KappaKind::right: K(b, m, a) = -(s.param(m) * eta(a, b)); break;
                case KappaKind::left: K(b, m, a) = s.param(b) * eta(a, m); break;
                case KappaKind::light:
                case KappaKind::snyder: K(b, m, a) = s.param(b) * eta(a, m) - s.param(a) * eta(b, m); break;
                }
            }
    return K;
}

inline Realization kappa(KappaKind kind, int n, int order)
{
    static const char* names[] = {"kappa_right", "kappa_left", "kappa_light", "kappa_snyder"};
    Realization R = linear_realization(names[static_cast<int>(kind)], kappa_tensor(kind, n), realization_par_cap(order));
    R.validate();
    return R;
}

/// Linear change of coordinates x = S y, p = T pi with T = eta S^{-T} eta,
/// applied to x^ = x + W x p and followed by y^ = S^{-1} x^. The result is
/// again linear, and closes a Lie algebra exactly when K does.
inline LinearK transform_linear(const LinearK& K, const std::vector<std::vector<Rational>>& S)
{
    const int n = K.dim();
    std::vector<std::vector<Gauss>> sg(static_cast<std::size_t>(n), std::vector<Gauss>(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Gauss(S[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    const auto inv = invert_matrix(sg);
    if (!inv) throw DomainError("coordinate transformation is singular");
    auto eta = [&](int i) { return Gauss(K.ctx->eta(i)); };
    auto Sinv = [&](int i, int j) { return (*inv)[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    auto Sm = [&](int i, int j) { return sg[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
    // T_{bd} = eta_b (S^{-1})_{db} eta_d
    auto T = [&](int b, int d) { return eta(b) * Sinv(d, b) * eta(d); };
    // W_{m a b} = eta_a eta_b K_{b m a}
    auto W = [&](int m, int a, int b) { return K(b, m, a) * (eta(a) * eta(b)); };
    LinearK out = LinearK::zero(K.ctx);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
                Series w = K.scalar_like();
                for (int m = 0; m < n; ++m) {
                    if (Sinv(a, m).is_zero()) continue;
                    for (int al = 0; al < n; ++al) {
                        if (Sm(al, c).is_zero()) continue;
                        for (int b = 0; b < n; ++b) {
                            const Gauss f = Sinv(a, m) * Sm(al, c) * T(b, d);
                            if (!f.is_zero()) w += W(m, al, b) * f;
                        }
                    }
                }
                out(d, a, c) = w * (eta(c) * eta(d));
            }
    return out;
}

}  // namespace ncphase
