#include "ncphase/star.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ncphase;

namespace {

Gauss eta(const ContextPtr& c, int a, int b) { return Gauss(a == b ? c->eta(a) : 0); }

Series ksum_dot(const Series& like, int b1, int b2)
{
    return dot(momenta(like, b1), momenta(like, b2));
}

/// x_mu * g through the operator route x^_mu |> g (chi = 0).
Series left_multiply(const Realization& R, int mu, const Series& g, int order)
{
    const PhaseOperator L = R.operator_like(order);
    const auto xh = R.xhat(L);
    const PhaseOperator gop(g.embed(Layout{1, 1}, {}, {0}, L.series().trunc()));
    const PhaseOperator r = act(xh[static_cast<std::size_t>(mu)], gop);
    return r.series().embed(Layout{0, 1}, {-1}, {0}, g.trunc());
}

}  // namespace

TEST(SolveJ, UndeformedIsPlainAddition)
{
    const auto R = undeformed(4, 4);
    const auto s = solve_J_h(R, 4);
    for (int m = 0; m < 4; ++m) EXPECT_EQ(s.J[m], s.J[m].mom(0, m) + s.J[m].mom(1, m));
    EXPECT_TRUE(s.h.is_zero());
}

TEST(SolveJ, RightCovariantClosedForm)
{
    const int N = 6;
    const auto R = kappa(KappaKind::right, 4, N);
    const auto s = solve_J_h(R, N);
    const Series like = s.J[0].zero();
    const Series ak = dot(vector_param(like, "a"), momenta(like, 0));
    const Series e = expand_fn(Fn::exp, -ak);
    const Series f = expand_fn(Fn::expm1_over, -ak);  // (1 - e^{-ak})/(ak)
    for (int m = 0; m < 4; ++m) EXPECT_EQ(s.J[m], like.mom(0, m) * f + like.mom(1, m) * e);
}

TEST(SolveJ, LeftCovariantClosedForm)
{
    const int N = 6;
    const auto R = kappa(KappaKind::left, 4, N);
    const auto s = solve_J_h(R, N);
    const Series like = s.J[0].zero();
    const Series ak = dot(vector_param(like, "a"), momenta(like, 0));
    const Series aq = dot(vector_param(like, "a"), momenta(like, 1));
    const Series f = expand_fn(Fn::expm1_over, ak);
    for (int m = 0; m < 4; ++m) EXPECT_EQ(s.J[m], like.mom(0, m) * f * (like.one() + aq) + like.mom(1, m));
}

TEST(SolveJ, PdeResidualVanishesAcrossCatalog)
{
    for (const auto& R : {snyder(4, 5), su2(5), kappa(KappaKind::right, 4, 5), kappa(KappaKind::light, 4, 5), kappa(KappaKind::snyder, 4, 5)})
        EXPECT_TRUE(pde_check(R, 5).passed()) << R.name;
}

TEST(SolveJ, ChiProducesPhase)
{
    auto ctx = Context::make(2, Context::euclidean(2), {"l"});
    Realization R = realization_from_phi("chi", ctx, 8, [](const Series& s, int a, int m) {
        return s.scalar(Gauss(a == m ? 1 : 0)) + (a == m ? s.param(0) * s.mom(0, 0) : s.zero());
    });
    R.chi[1] = R.like().param(0) * R.like().mom(0, 0) * R.like().mom(0, 1);
    const auto s = solve_J_h(R, 4);
    EXPECT_FALSE(s.h.is_zero());
    EXPECT_TRUE(pde_check(R, 4).passed());
    const auto law = composition_law(R, 4);
    EXPECT_TRUE(law.G.bank_to_zero(1).is_zero());
    EXPECT_TRUE(law.G.bank_to_zero(0).is_zero());
}

TEST(ClosedFormLinear, ZeroTensorIsAddition)
{
    const auto K = LinearK::zero(Context::make(3, Context::lorentzian(3), {}));
    const auto s = closed_form_linear(K, 4);
    for (int m = 0; m < 3; ++m) EXPECT_EQ(s.J[m], s.J[m].mom(0, m) + s.J[m].mom(1, m));
}

TEST(ClosedFormLinear, MatchesSolverOnKappaAndRandomTensors)
{
    for (auto kind : {KappaKind::right, KappaKind::left, KappaKind::light}) {
        const auto K = kappa_tensor(kind, 4);
        EXPECT_EQ(closed_form_linear(K, 5).J, solve_J_h(linear_realization("k", K, 12), 5).J);
    }
    std::mt19937 rng(31);
    std::uniform_int_distribution<int> d(-3, 3), coin(0, 1);
    for (int trial = 0; trial < 4; ++trial) {
        auto ctx = Context::make(3, Context::lorentzian(3), {"l"});
        LinearK K = LinearK::zero(ctx);
        for (auto& k : K.k)
            if (coin(rng)) k = K.scalar_like().param(0) * Gauss::frac(d(rng), 1 + coin(rng));
        EXPECT_EQ(closed_form_linear(K, 4).J, solve_J_h(linear_realization("r", K, 10), 4).J);
    }
}

TEST(CompositionLaw, RightCovariantIsFinite)
{
    const auto law = composition_law(kappa(KappaKind::right, 4, 6), 6);
    const Series like = law.like();
    const Series ak = dot(vector_param(like, "a"), momenta(like, 0));
    for (int m = 0; m < 4; ++m) EXPECT_EQ(law.D[m], like.mom(0, m) + like.mom(1, m) * (like.one() - ak));
    EXPECT_TRUE(law.G.is_zero());
}

TEST(CompositionLaw, LeftCovariant)
{
    const auto law = composition_law(kappa(KappaKind::left, 4, 6), 6);
    const Series like = law.like();
    const Series aq = dot(vector_param(like, "a"), momenta(like, 1));
    for (int m = 0; m < 4; ++m) EXPECT_EQ(law.D[m], like.mom(0, m) * (like.one() + aq) + like.mom(1, m));
}

TEST(CompositionLaw, SnyderClosedForm)
{
    const int N = 5;
    const auto law = composition_law(snyder(4, N), N);
    const Series like = law.like();
    const Series l2 = like.param("l").pow(2);
    const Series kq = ksum_dot(like, 0, 1);
    const Series root = expand_fn(Fn::sqrt1p, l2 * ksum_dot(like, 0, 0));
    const Series pre = expand_fn(Fn::inv1p, -(l2 * kq));
    const Series frac = expand_fn(Fn::inv1p, (root - like.one()) * Gauss::frac(1, 2)) * Gauss::frac(1, 2);  // 1/(1 + root)
    for (int m = 0; m < 4; ++m) {
        const Series expected = pre * (like.mom(0, m) - l2 * frac * like.mom(0, m) * kq + root * like.mom(1, m));
        EXPECT_EQ(law.D[m], expected) << m;
    }
}

TEST(CompositionLaw, Su2ClosedForm)
{
    const int N = 5;
    const auto law = composition_law(su2(N), N);
    const Series like = law.like();
    const Series l = like.param("l");
    const Series rk = expand_fn(Fn::sqrt1p, -(l * l * ksum_dot(like, 0, 0)));
    const Series rq = expand_fn(Fn::sqrt1p, -(l * l * ksum_dot(like, 1, 1)));
    for (int i = 0; i < 3; ++i) {
        Series expected = like.mom(0, i) * rq + rk * like.mom(1, i);
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                if (levi_civita(i, j, k)) expected += l * like.mom(0, j) * like.mom(1, k) * Gauss(levi_civita(i, j, k));
        EXPECT_EQ(law.D[i], expected) << i;
    }
}

TEST(CompositionLaw, Invariants)
{
    for (const auto& R : {snyder(3, 5), su2(5), kappa(KappaKind::light, 4, 5)}) {
        const auto law = composition_law(R, 5);
        const Series like = law.like();
        for (int m = 0; m < R.dim(); ++m) {
            EXPECT_EQ(law.D[m].bank_to_zero(1), like.mom(0, m));
            EXPECT_EQ(law.D[m].bank_to_zero(0), like.mom(1, m));
            EXPECT_EQ(law.D[m].filter([&](const Exponents& e) { return like.par_degree(e) == 0; }), like.mom(0, m) + like.mom(1, m));
        }
        EXPECT_EQ(compose(law.K, 0, law.Kinv), identity_map(like));
        EXPECT_TRUE(law.G.is_zero());
    }
}

TEST(Star, UndeformedIsPointwise)
{
    const auto law = composition_law(undeformed(3, 4), 4);
    const Series P = poly_like(law.ctx, 8);
    const Series f = P.coord(0, 0) * P.coord(0, 1) + P.coord(0, 2) * Gauss(3);
    const Series g = P.coord(0, 1) - P.one();
    EXPECT_EQ(star(f, g, law), f * g);
}

TEST(Star, SnyderCoordinateProducts)
{
    const auto R = snyder(4, 4);
    const auto law = composition_law(R, 4);
    const Series P = poly_like(law.ctx, 8);
    const Series l2 = P.param("l").pow(2);
    auto x = [&](int m) { return P.coord(0, m); };
    for (int m = 0; m < 4; ++m)
        for (int v = 0; v < 4; ++v) {
            EXPECT_EQ(star(x(m), x(v), law), x(m) * x(v));
            for (int r = 0; r < 4; ++r) {
                const Series right = star(x(m), star(x(v), x(r), law), law);
                const Series left = star(star(x(m), x(v), law), x(r), law);
                EXPECT_EQ(right, x(m) * x(v) * x(r) - l2 * (x(r) * eta(law.ctx, m, v) + x(v) * eta(law.ctx, m, r)));
                EXPECT_EQ(left, x(m) * x(v) * x(r) - l2 * Gauss::frac(1, 2) * (x(v) * eta(law.ctx, m, r) + x(m) * eta(law.ctx, v, r) + x(r) * eta(law.ctx, m, v) * Gauss(2)));
                EXPECT_EQ(left - right, l2 * Gauss::frac(1, 2) * (x(v) * eta(law.ctx, m, r) - x(m) * eta(law.ctx, v, r)));
            }
        }
}

TEST(Star, LeftMultiplicationMatchesOperatorRoute)
{
    for (const auto& R : {snyder(3, 4), su2(4), kappa(KappaKind::left, 3, 4), kappa(KappaKind::snyder, 3, 4)}) {
        const auto law = composition_law(R, 4);
        const Series P = poly_like(law.ctx, 8);
        const Series g = P.coord(0, 1) * P.coord(0, 2) + P.coord(0, 0) * P.coord(0, 0) * P.coord(0, 1) * Gauss::frac(1, 3);
        for (int m = 0; m < R.dim(); ++m) EXPECT_EQ(star(P.coord(0, m), g, law), left_multiply(R, m, g, 8)) << R.name << " " << m;
    }
}

TEST(Star, DegreeBeyondOrderIsRejected)
{
    const auto law = composition_law(snyder(2, 2), 2);
    const Series P = poly_like(law.ctx, 4);
    EXPECT_THROW(star(P.coord(0, 0) * P.coord(0, 1), P.coord(0, 0), law), DomainError);
}

TEST(Associativity, Verdicts)
{
    EXPECT_TRUE(associativity_check(kappa(KappaKind::right, 4, 4), 4).passed());
    EXPECT_TRUE(associativity_check(su2(4), 4).passed());
    EXPECT_TRUE(associativity_check(kappa(KappaKind::light, 4, 4), 4).passed());
    const auto sn = associativity_check(snyder(4, 4), 4);
    EXPECT_FALSE(sn.passed());
    ASSERT_TRUE(sn.discrepancy.has_value());
    EXPECT_FALSE(associativity_check(kappa(KappaKind::snyder, 4, 4), 4).passed());
}

TEST(Associativity, SnyderReportsCoordinateAssociator)
{
    const auto rep = associativity_check(snyder(4, 4), 4);
    ASSERT_TRUE(rep.discrepancy.has_value());
    const auto& d = *rep.discrepancy;
    ASSERT_EQ(d.indices.size(), 3u);
    const auto ctx = snyder(4, 4).ctx;
    const int m = d.indices[0], v = d.indices[1], r = d.indices[2];
    const Series P = poly_like(ctx, 8);
    const Series l2 = P.param("l").pow(2);
    const Series expected = l2 * Gauss::frac(1, 2) * (P.coord(0, v) * eta(ctx, m, r) - P.coord(0, m) * eta(ctx, v, r));
    ASSERT_FALSE(expected.is_zero());
    const auto t = expected.canonical_terms();
    EXPECT_EQ(d.monomial, expected.monomial_str(t.front().first));
    EXPECT_EQ(d.coeff, t.front().second);
}
