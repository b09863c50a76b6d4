#include "ncphase/series.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ncphase;

namespace {

ContextPtr ctx1(int n = 1, std::vector<std::string> params = {"a"})
{
    return Context::make(n, Context::euclidean(n), std::move(params));
}

Series base(int order, int banks = 1, int n = 1)
{
    return Series::zero(ctx1(n), Layout{banks, 0}, Truncation::momentum(order, 2 * order));
}

}  // namespace

TEST(GaussScalar, FieldAxiomsOnSample)
{
    const Gauss a(make_rational(3, 4), make_rational(-1, 2));
    const Gauss b(make_rational(-5, 3), make_rational(2, 7));
    const Gauss c(make_rational(1, 9), make_rational(0));
    EXPECT_EQ((a + b) + c, a + (b + c));
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a * b, b * a);
    EXPECT_EQ((a / b) * b, a);
    EXPECT_EQ(Gauss::i() * Gauss::i(), Gauss(-1));
    EXPECT_EQ(i_pow(7), -Gauss::i());
    EXPECT_THROW(a / Gauss(0), std::domain_error);
}

TEST(GaussScalar, CanonicalText)
{
    EXPECT_EQ(Gauss::frac(-3, 6).str(), "-1/2");
    EXPECT_EQ(Gauss::i().str(), "i");
    EXPECT_EQ((-Gauss::i()).str(), "-i");
    EXPECT_EQ(Gauss(make_rational(1), make_rational(2)).str(), "(1 + 2*i)");
    EXPECT_EQ(Gauss(make_rational(0), make_rational(-3, 2)).str(), "-3/2*i");
}

TEST(SeriesArithmetic, DifferenceOfSquares)
{
    const Series s = base(4);
    const Series k = s.mom(0, 0);
    const Series prod = (s.one() + k) * (s.one() - k);
    EXPECT_EQ(prod, s.one() - k * k);
    EXPECT_EQ(prod.str(), "1 - p_0^2");
}

TEST(SeriesArithmetic, MultiplyByZero)
{
    const Series s = base(4);
    const Series k = s.mom(0, 0);
    EXPECT_TRUE(((s.one() + k) * s.zero()).is_zero());
}

TEST(SeriesArithmetic, GeometricSumTimesOneMinusTruncates)
{
    const int N = 6;
    const Series s = base(N);
    const Series k = s.mom(0, 0);
    Series geo = s.zero();
    for (int j = 0; j <= N; ++j) geo += k.pow(static_cast<unsigned>(j));
    EXPECT_EQ(geo * (s.one() - k), s.one());
}

TEST(SeriesArithmetic, TruncationIsMinimumOfOperands)
{
    const Series a = Series::zero(ctx1(), Layout{1, 0}, Truncation::momentum(3, 6)).mom(0, 0);
    const Series b = Series::zero(ctx1(), Layout{1, 0}, Truncation::momentum(5, 10)).mom(0, 0);
    const Series r = a.pow(2) * b.pow(2);
    EXPECT_TRUE(r.is_zero());
    EXPECT_EQ(r.trunc().mom, 3);
}

TEST(SeriesArithmetic, BankMismatchIsRejected)
{
    const Series a = base(4, 1).mom(0, 0);
    const Series b = base(4, 2).mom(1, 0);
    EXPECT_THROW(a + b, IncompatibleSeries);
    EXPECT_THROW(a * b, IncompatibleSeries);
}

TEST(SeriesArithmetic, RingAxiomsOnRandomTriples)
{
    std::mt19937 rng(7);
    const Series like = Series::zero(ctx1(2, {"a", "l"}), Layout{2, 0}, Truncation::momentum(5, 6));
    for (int trial = 0; trial < 20; ++trial) {
        const Series a = test_support::random_series(like, rng, 6, 0, 3);
        const Series b = test_support::random_series(like, rng, 6, 0, 3);
        const Series c = test_support::random_series(like, rng, 6, 0, 3);
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) - b, a);
    }
}

TEST(Compose, IdentityMapLeavesSeriesUnchanged)
{
    std::mt19937 rng(3);
    const Series like = Series::zero(ctx1(2), Layout{1, 0}, Truncation::momentum(6, 12));
    const Series f = test_support::random_series(like, rng, 10, 0, 5);
    EXPECT_EQ(compose(f, 0, identity_map(like)), f);
}

TEST(Compose, SquareOfShiftedVariable)
{
    const Series s = base(6);
    const Series k = s.mom(0, 0);
    const Series r = compose(k * k, 0, {k + k * k});
    EXPECT_EQ(r, k.pow(2) + k.pow(3) * Gauss(2) + k.pow(4));
}

TEST(Compose, ConstantTermIsADomainError)
{
    const Series s = base(6);
    EXPECT_THROW(compose(s.mom(0, 0), 0, {s.one() + s.mom(0, 0)}), DomainError);
}

TEST(ExpandFn, LogOfExpIsIdentity)
{
    std::mt19937 rng(11);
    const Series like = Series::zero(ctx1(2), Layout{1, 0}, Truncation::momentum(6, 12));
    for (int trial = 0; trial < 5; ++trial) {
        const Series u = test_support::random_series(like, rng, 5, 1, 3);
        EXPECT_EQ(expand_fn(Fn::log1p, expand_fn(Fn::exp, u) - u.one()), u);
    }
}

TEST(ExpandFn, SqrtMatchesBinomialSeries)
{
    const int N = 8;
    const Series s = Series::zero(Context::make(1, {1}, {"l"}), Layout{1, 0}, Truncation::momentum(N, 2 * N));
    const Series l = s.param("l");
    const Series p = s.mom(0, 0);
    const Series u = -(l * l * p * p);
    const Series r = expand_fn(Fn::sqrt1p, u);
    // binom(1/2, k): 1, 1/2, -1/8, 1/16, -5/128
    const Series expected = s.one() + u * Gauss::frac(1, 2) + u.pow(2) * Gauss::frac(-1, 8) +
                            u.pow(3) * Gauss::frac(1, 16) + u.pow(4) * Gauss::frac(-5, 128);
    EXPECT_EQ(r, expected);
    EXPECT_EQ(r * r, s.one() + u);
}

TEST(ExpandFn, InverseOfOnePlusIsGeometric)
{
    const int N = 6;
    const Series s = base(N);
    const Series ap = s.param("a") * s.mom(0, 0);
    Series geo = s.zero();
    for (int j = 0; j <= N; ++j) geo += (-ap).pow(static_cast<unsigned>(j));
    EXPECT_EQ(expand_fn(Fn::inv1p, ap), geo);
    EXPECT_EQ(expand_fn(Fn::inv1p, ap) * (s.one() + ap), s.one());
}

TEST(ExpandFn, ExponentialIsAHomomorphism)
{
    std::mt19937 rng(5);
    const Series like = Series::zero(ctx1(3), Layout{2, 0}, Truncation::momentum(5, 10));
    for (int trial = 0; trial < 5; ++trial) {
        const Series u = test_support::random_series(like, rng, 4, 1, 2);
        const Series v = test_support::random_series(like, rng, 4, 1, 2);
        EXPECT_EQ(expand_fn(Fn::exp, u + v), expand_fn(Fn::exp, u) * expand_fn(Fn::exp, v));
    }
}

TEST(ExpandFn, NonzeroConstantIsADomainError)
{
    const Series s = base(4);
    EXPECT_THROW(expand_fn(Fn::exp, s.one() + s.mom(0, 0)), DomainError);
}

namespace {

/// -k ln(1 - a.k)/(a.k) = k * sum_j (a.k)^j / (j+1), written out directly.
SeriesVec right_covariant_weyl_oracle(const Series& like, int order)
{
    const int n = like.dim();
    Series ak = like.zero();
    for (int mu = 0; mu < n; ++mu) ak += like.param(mu) * like.mom(0, mu) * Gauss(like.ctx().eta(mu));
    Series f = like.zero();
    for (int j = 0; j <= order; ++j) f += ak.pow(static_cast<unsigned>(j)) * Gauss::frac(1, j + 1);
    SeriesVec out;
    for (int mu = 0; mu < n; ++mu) out.push_back(like.mom(0, mu) * f);
    return out;
}

}  // namespace

TEST(Revert, IdentityIsItsOwnInverse)
{
    const Series like = Series::zero(ctx1(3), Layout{1, 0}, Truncation::momentum(6, 12));
    EXPECT_EQ(revert(identity_map(like)), identity_map(like));
}

TEST(Revert, RightCovariantWeylMap)
{
    const int N = 6;
    const int n = 3;
    auto ctx = Context::make(n, Context::lorentzian(n), {"a_0", "a_1", "a_2"});
    const Series like = Series::zero(ctx, Layout{1, 0}, Truncation::momentum(N, 2 * N));
    Series ak = like.zero();
    for (int mu = 0; mu < n; ++mu) ak += like.param(mu) * like.mom(0, mu) * Gauss(ctx->eta(mu));
    SeriesVec K;
    const Series g = expand_fn(Fn::expm1_over, -ak);  // (1 - e^{-a.k})/(a.k)
    for (int mu = 0; mu < n; ++mu) K.push_back(like.mom(0, mu) * g);
    const SeriesVec Kinv = revert(K);
    EXPECT_EQ(Kinv, right_covariant_weyl_oracle(like, N));
    EXPECT_EQ(compose(K, 0, Kinv), identity_map(like));
    EXPECT_EQ(compose(Kinv, 0, K), identity_map(like));
}

TEST(Revert, LeftCovariantComposesToIdentity)
{
    const int N = 6;
    const int n = 4;
    auto ctx = Context::make(n, Context::lorentzian(n), {"a_0", "a_1", "a_2", "a_3"});
    const Series like = Series::zero(ctx, Layout{1, 0}, Truncation::momentum(N, 2 * N));
    Series ak = like.zero();
    for (int mu = 0; mu < n; ++mu) ak += like.param(mu) * like.mom(0, mu) * Gauss(ctx->eta(mu));
    SeriesVec K, expected;
    const Series g = expand_fn(Fn::expm1_over, ak);
    Series lg = like.zero();
    for (int j = 0; j <= N; ++j) lg += ak.pow(static_cast<unsigned>(j)) * Gauss::frac(j % 2 == 0 ? 1 : -1, j + 1);
    for (int mu = 0; mu < n; ++mu) {
        K.push_back(like.mom(0, mu) * g);
        expected.push_back(like.mom(0, mu) * lg);  // k ln(1 + a.k)/(a.k)
    }
    const SeriesVec Kinv = revert(K);
    EXPECT_EQ(Kinv, expected);
    EXPECT_EQ(compose(K, 0, Kinv), identity_map(like));
}

TEST(Revert, RandomPerturbationsAreTwoSidedInverses)
{
    std::mt19937 rng(19);
    const Series like = Series::zero(ctx1(2, {"l"}), Layout{1, 0}, Truncation::momentum(5, 8));
    for (int trial = 0; trial < 6; ++trial) {
        SeriesVec K = identity_map(like);
        for (auto& k : K) k += test_support::random_series(like, rng, 4, 2, 4, 1) + test_support::random_series(like, rng, 2, 1, 1, 1).filter([&](const Exponents& e) { return like.par_degree(e) > 0; });
        const SeriesVec inv = revert(K);
        EXPECT_EQ(compose(K, 0, inv), identity_map(like));
        EXPECT_EQ(compose(inv, 0, K), identity_map(like));
    }
}

TEST(Revert, GeneralInvertibleLinearPart)
{
    const Series like = Series::zero(ctx1(2, {}), Layout{1, 0}, Truncation::momentum(5, 8));
    const Series k0 = like.mom(0, 0), k1 = like.mom(0, 1);
    SeriesVec K{k0 * Gauss(2) + k1 + k1 * k1, k0 - k1 + k0 * k0 * k1};
    const SeriesVec inv = revert(K);
    EXPECT_EQ(compose(K, 0, inv), identity_map(like));
}

TEST(Revert, SingularLinearPartIsAnError)
{
    const Series like = Series::zero(ctx1(2, {}), Layout{1, 0}, Truncation::momentum(5, 8));
    const Series k0 = like.mom(0, 0), k1 = like.mom(0, 1);
    EXPECT_THROW(revert(SeriesVec{k0 + k1, k0 + k1 + k0 * k0}), DomainError);
}

TEST(NullConstraint, SquareOfNullVectorVanishes)
{
    const int n = 4;
    auto metric = Context::lorentzian(n);
    auto ctx = Context::make(n, metric, {"a_0", "a_1", "a_2", "a_3"}, null_vector_constraint(metric, {0, 1, 2, 3}));
    const Series like = Series::zero(ctx, Layout{1, 0}, Truncation::momentum(4, 8));
    Series aa = like.zero();
    for (int mu = 0; mu < n; ++mu) aa += like.param(mu) * like.param(mu) * Gauss(metric[static_cast<std::size_t>(mu)]);
    EXPECT_TRUE(aa.is_zero());
    EXPECT_EQ(like.param(0).pow(3), like.param(0) * (like.param(1).pow(2) + like.param(2).pow(2) + like.param(3).pow(2)));
}
