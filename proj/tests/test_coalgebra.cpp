#include "ncphase/coalgebra.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ncphase;

namespace {

Coproduct light_like_formula(const Series& like)
{
    const Series ak = dot(vector_param(like, "a"), momenta(like, 0));
    const Series aq = dot(vector_param(like, "a"), momenta(like, 1));
    const Series kq = dot(momenta(like, 0), momenta(like, 1));
    const Series k2 = dot(momenta(like, 0), momenta(like, 0));
    const Series inv = expand_fn(Fn::inv1p, ak);
    Coproduct c{"formula", 0, like.context(), {}};
    for (int m = 0; m < like.dim(); ++m) {
        const Series am = like.param("a_" + std::to_string(m));
        c.dp.push_back(like.mom(0, m) + like.mom(1, m) + like.mom(0, m) * aq - am * (kq + aq * k2 * Gauss::frac(1, 2)) * inv);
    }
    return c;
}

}  // namespace

TEST(Coproduct, RightCovariant)
{
    const auto cop = coproduct_flow(kappa(KappaKind::right, 4, 5), 5);
    const Series like = cop.dp[0].zero();
    const Series ak = dot(vector_param(like, "a"), momenta(like, 0));
    for (int m = 0; m < 4; ++m) EXPECT_EQ(cop.dp[m], like.mom(0, m) + (like.one() - ak) * like.mom(1, m));
}

TEST(Coproduct, LightLikeMatchesClosedForm)
{
    const auto cop = coproduct(composition_law(kappa(KappaKind::light, 4, 5), 5));
    const auto formula = light_like_formula(cop.dp[0].zero());
    for (int m = 0; m < 4; ++m) EXPECT_EQ(cop.dp[m], formula.dp[m]) << m;
}

TEST(Coproduct, FlowRouteAgreesWithComposition)
{
    for (const auto& R : {snyder(3, 5), su2(5), kappa(KappaKind::left, 4, 5), kappa(KappaKind::snyder, 3, 5)}) {
        const auto flow = coproduct_flow(R, 5);
        const auto law = composition_law(R, 5);
        for (int m = 0; m < R.dim(); ++m) EXPECT_EQ(flow.dp[m], law.D[m]) << R.name;
    }
}

TEST(Coproduct, CounitCompatibility)
{
    const auto cop = coproduct_flow(snyder(4, 5), 5);
    for (int m = 0; m < 4; ++m) {
        EXPECT_EQ(cop.dp[m].bank_to_zero(1), cop.dp[m].mom(0, m));
        EXPECT_EQ(cop.dp[m].bank_to_zero(0), cop.dp[m].mom(1, m));
    }
}

TEST(Coassociativity, VerdictsMatchAssociativity)
{
    for (const auto& R : {undeformed(4, 4), snyder(4, 4), su2(4), kappa(KappaKind::right, 4, 4), kappa(KappaKind::left, 4, 4),
                          kappa(KappaKind::light, 4, 4), kappa(KappaKind::snyder, 4, 4)}) {
        const auto co = coassociativity_check(R, 4);
        EXPECT_EQ(co.verdict, associativity_check(R, 4).verdict) << R.name;
    }
    const auto sn = coassociativity_check(snyder(4, 4), 4);
    EXPECT_EQ(sn.verdict, Verdict::fail);
    ASSERT_TRUE(sn.discrepancy.has_value());
}

TEST(TensorOperator, ExpAndInverse)
{
    const auto ctx = kappa_tensor(KappaKind::right, 2).ctx;
    const TensorOperator one = TensorOperator::identity(ctx, TensorOperator::trunc(4));
    const TensorOperator X = one.p(0, 0) * one.x(1, 1) * TensorOperator(one.series().param(0));
    EXPECT_EQ(X.exp() * (-X).exp(), one);
    EXPECT_EQ(X.exp().inverse(), (-X).exp());
    EXPECT_THROW((one + one).inverse(), DomainError);
}

TEST(TensorOperator, SlotsCommute)
{
    const auto ctx = kappa_tensor(KappaKind::right, 2).ctx;
    const TensorOperator one = TensorOperator::identity(ctx, TensorOperator::trunc(4));
    EXPECT_EQ(one.p(0, 0) * one.x(1, 0), one.x(1, 0) * one.p(0, 0));
    EXPECT_EQ(one.p(1, 0) * one.x(1, 0) - one.x(1, 0) * one.p(1, 0), one * (-Gauss::i() * Gauss(ctx->eta(0))));
}

TEST(Twist, UndeformedIsIdentity)
{
    const auto law = twist_law(undeformed(3, 4), 4);
    for (const Rational& u : {Rational(0), Rational(1, 2), Rational(1)}) {
        const auto tw = twist_normal_ordered(law, u);
        EXPECT_EQ(tw.Finv, TensorOperator::identity(law.ctx, TensorOperator::trunc(4)));
    }
}

TEST(Twist, RightCovariantIsJordanian)
{
    const int N = 5;
    const auto R = kappa(KappaKind::right, 4, N + 1);
    const auto law = twist_law(R, N);
    const auto jr = jordanian_right(R.ctx, N);
    EXPECT_EQ(twist_normal_ordered(law, Rational(1)).Finv, jr.Finv);
    EXPECT_EQ(*linear_twist(kappa_tensor(KappaKind::right, 4), law).F, *jr.F);
}

TEST(Twist, ExpFormMatchesNormalOrderedAtUOne)
{
    const int N = 3;
    for (const auto& R : {kappa(KappaKind::right, 3, N + 1), snyder(3, N + 1), su2(N + 1), kappa(KappaKind::light, 3, N + 1)}) {
        const auto law = twist_law(R, N);
        const int cap = 2 * N;
        const TensorOperator e = twist_exp_form(R, law, cap);
        const Series no = twist_normal_ordered(law, Rational(1)).Finv.series();
        EXPECT_EQ(e.series(), no.with_trunc(e.series().trunc())) << R.name;
    }
}

TEST(Twist, ConsistencyAcrossCatalogAndU)
{
    const int N = 3;
    for (const auto& R : {snyder(3, N + 1), su2(N + 1), kappa(KappaKind::right, 3, N + 1), kappa(KappaKind::left, 3, N + 1),
                          kappa(KappaKind::light, 4, N + 1), kappa(KappaKind::snyder, 3, N + 1)}) {
        const auto law = twist_law(R, N);
        for (const Rational& u : {Rational(0), Rational(1, 2), Rational(1)})
            EXPECT_TRUE(twist_consistency(R, twist_normal_ordered(law, u), N).passed()) << R.name << " u=" << u;
        EXPECT_TRUE(twist_consistency(R, Twist{"exp", twist_exp_form(R, law, 1), std::nullopt}, N).passed()) << R.name;
    }
}

TEST(Twist, ChiEntersThroughPhase)
{
    auto ctx = Context::make(2, Context::euclidean(2), {"l"});
    Realization R = realization_from_phi("chi", ctx, 8, [](const Series& s, int a, int m) {
        return s.scalar(Gauss(a == m ? 1 : 0)) + (a == m ? s.param(0) * s.mom(0, 0) : s.zero());
    });
    R.chi[1] = R.like().param(0).pow(2) * R.like().mom(0, 0);
    const auto law = twist_law(R, 3);
    EXPECT_FALSE(law.G.is_zero());
    EXPECT_TRUE(twist_consistency(R, twist_normal_ordered(law, Rational(1, 2)), 3).passed());
    EXPECT_TRUE(twist_consistency(R, Twist{"exp", twist_exp_form(R, law, 1), std::nullopt}, 3).passed());
}

TEST(Twist, RejectsUnboundedMomentumDegree)
{
    auto ctx = Context::make(1, Context::euclidean(1), {"l"});
    Realization R = realization_from_phi("odd", ctx, 8, [](const Series& s, int, int) { return s.one() + s.param(0) * s.mom(0, 0).pow(2); });
    EXPECT_THROW(twist_law(R, 3), DomainError);
}

TEST(Conjugation, RightCovariantFamily)
{
    const int N = 4;
    const auto R = kappa(KappaKind::right, 4, N + 1);
    const auto law = twist_law(R, N);
    const auto cop = coproduct(law);
    EXPECT_TRUE(coproduct_conjugation_check(jordanian_right(R.ctx, N), cop, N).passed());
    for (const Rational& u : {Rational(0), Rational(1, 2), Rational(1)})
        EXPECT_TRUE(coproduct_conjugation_check(twist_normal_ordered(law, u), cop, N).passed()) << u;
}

TEST(Conjugation, LeftCovariantTwistsGiveSameCoproduct)
{
    const int N = 4;
    const auto R = kappa(KappaKind::left, 4, N + 1);
    const auto law = twist_law(R, N);
    const auto cop = coproduct(law);
    EXPECT_TRUE(coproduct_conjugation_check(jordanian_left(R.ctx, N), cop, N).passed());
    EXPECT_TRUE(coproduct_conjugation_check(linear_twist(kappa_tensor(KappaKind::left, 4), law), cop, N).passed());
    EXPECT_NE(*jordanian_left(R.ctx, N).F, *linear_twist(kappa_tensor(KappaKind::left, 4), law).F);
}

TEST(Conjugation, LightLikeDrinfeld)
{
    const int N = 4;
    const auto R = kappa(KappaKind::light, 4, N + 1);
    const auto law = twist_law(R, N);
    const auto formula = light_like_formula(law.like());
    EXPECT_TRUE(coproduct_conjugation_check(light_like_drinfeld(R.ctx, N), Coproduct{"light", N + 1, R.ctx, formula.dp}, N).passed());
}

TEST(Conjugation, DirectProductMatchesCoproduct)
{
    const int N = 3;
    const auto R = kappa(KappaKind::right, 3, N + 1);
    const auto law = twist_law(R, N);
    for (const Rational& u : {Rational(0), Rational(1)}) {
        const auto tw = twist_normal_ordered(law, u);
        for (int m = 0; m < 3; ++m) {
            const Series got = conjugated_momentum(tw, m).series();
            const Series want = tw.Finv.momenta(law.D[m]).series();
            auto keep = [&](const Series& s) { return s.filter([&](const Exponents& e) { return s.mom_degree(e) <= N + 1; }); };
            EXPECT_EQ(keep(got), keep(want)) << u << " " << m;
        }
    }
}

TEST(Conjugation, WrongCoproductFails)
{
    const int N = 3;
    const auto R = kappa(KappaKind::right, 3, N + 1);
    const auto law = twist_law(R, N);
    const auto left = coproduct(twist_law(kappa(KappaKind::left, 3, N + 1), N));
    EXPECT_FALSE(coproduct_conjugation_check(jordanian_right(R.ctx, N), left, N).passed());
}

TEST(TwistedStar, MatchesCompositionStar)
{
    const int N = 3;
    for (const auto& R : {snyder(3, N + 1), kappa(KappaKind::right, 3, N + 1)}) {
        const auto law = twist_law(R, N);
        const auto slaw = composition_law(R, N);
        const Series P = poly_like(R.ctx, N);
        const Series f = P.coord(0, 0) * P.coord(0, 1), g = P.coord(0, 1) + P.coord(0, 2);
        for (const Rational& u : {Rational(0), Rational(1)})
            EXPECT_EQ(twisted_star(twist_normal_ordered(law, u).Finv, f, g), star(f, g, slaw).with_trunc(Truncation::parameters(N, kNoCap))) << R.name << u;
    }
}
