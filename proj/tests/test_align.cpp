#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "mslr/align.hpp"
#include "mslr/model.hpp"

using namespace mslr;

namespace
{
    GridMixture mix(std::vector<std::int64_t> u)
    {
        std::sort(u.begin(), u.end());
        return GridMixture{u.size(), 0.0, 1.0, u};
    }

    // components (base, r): (1, 2), (6, -1), (-1, 5) with q = 3
    TripletRecord reference()
    {
        TripletRecord t;
        t.q = 3;
        t.a = mix({3, 5, 4});
        t.b = mix({4, -2, 10});
        t.c = mix({7, 3, 14});
        return t;
    }

    // same components, (base, r'): (5, 0), (-3, 1), (10, 4) with q = 2
    TripletRecord candidate()
    {
        TripletRecord t;
        t.q = 2;
        t.a = mix({5, -2, 14});
        t.b = mix({0, 1, 4});
        t.c = mix({5, -1, 18});
        return t;
    }

    SignalSet fixture()
    {
        std::ifstream f(MSLR_FIXTURES "/signals_n20_k3_L3.txt");
        return read_signal_set(f);
    }
} // namespace

TEST(Constants, DeltaPointFour)
{
    EXPECT_NEAR(rip_margin(0.4), 0.01 - 0.064 / 48, 1e-15);
    const AlignConstants c = compute_constants(0.4, 3);
    EXPECT_EQ(c.c_prime, 116.0);
    EXPECT_NEAR(alpha_exponent(c.alpha_star), rip_margin(0.4) - 1.0 / 116, 1e-12);
    EXPECT_FALSE(c.alpha_overridden);
    EXPECT_GT(c.alpha_star, 1.0);
}

TEST(Constants, Override)
{
    const AlignConstants c = compute_constants(0.4, 3, 4.0);
    EXPECT_TRUE(c.alpha_overridden);
    EXPECT_EQ(c.alpha_star, 4.0);
    EXPECT_EQ(c.z_star, smallest_z_star(3, 4.0));
}

TEST(Constants, Infeasible)
{
    EXPECT_THROW(compute_constants(0.0, 2), InfeasibleDelta);
    EXPECT_THROW(compute_constants(0.5, 2), InfeasibleDelta);
    EXPECT_NO_THROW(compute_constants(0.41, 2));
}

TEST(Constants, AlphaExponent)
{
    EXPECT_EQ(alpha_exponent(1.0), 0.0);
    EXPECT_NEAR(alpha_exponent(2.0), 2 * std::log(2.0), 1e-12);
    double prev = 0;
    for (double a = 1.1; a < 20; a += 0.3) {
        EXPECT_GT(alpha_exponent(a), prev);
        prev = alpha_exponent(a);
    }
}

TEST(Constants, SmallestZStar)
{
    auto holds = [](std::size_t L, double alpha, std::int64_t z) {
        const double u = 4.0 * static_cast<double>(z) + 1;
        const double Lc = std::pow(static_cast<double>(L), 3);
        return 1 - Lc * (3 / u - 1 / (u * u)) >= 1 / std::sqrt(alpha);
    };
    for (std::size_t L : {2u, 3u, 4u})
        for (double alpha : {2.0, 4.0, 50.0}) {
            const std::int64_t z = smallest_z_star(L, alpha);
            EXPECT_TRUE(holds(L, alpha, z));
            if (z > 1)
                EXPECT_FALSE(holds(L, alpha, z - 1));
        }
    EXPECT_NEAR(static_cast<double>(smallest_z_star(3, 4.0)), 40, 1);
}

TEST(Pair, Goodness)
{
    const std::vector<double> a = {1.0, 1.0}, b = {1.0, 2.0};
    EXPECT_FALSE(is_good_pair(a));
    EXPECT_TRUE(is_good_pair(b));
}

TEST(Pair, Align)
{
    // <v,b1> = 1, <v,b2> = 3, <b,b1> = 5, <b,b2> = -2
    const std::vector<double> mv = {1, 3}, mb = {-2, 5}, msum = {0.5, 3}, mdiff = {-2, 2.5};
    const PairAlignment p = align_pair_L2(mv, mb, msum, mdiff);
    EXPECT_EQ(p.reference, (std::array<double, 2>{1, 3}));
    EXPECT_EQ(p.partner, (std::array<double, 2>{5, -2}));
}

TEST(Pair, RepeatedPartnerAndMismatch)
{
    // b has a repeated mean, so both pairings give the same answer
    const std::vector<double> mv = {1, 3}, mb = {2, 2}, msum = {1.5, 2.5}, mdiff = {-0.5, 0.5};
    EXPECT_EQ(align_pair_L2(mv, mb, msum, mdiff).partner, (std::array<double, 2>{2, 2}));
    // with a loose tolerance both pairings fit
    const std::vector<double> mb2 = {2, 2.3}, msum2 = {1.55, 2.6}, mdiff2 = {-0.55, 0.4};
    EXPECT_THROW(align_pair_L2(mv, mb2, msum2, mdiff2, 0.2), AmbiguousPairing);
    const std::vector<double> bad = {100, 200};
    EXPECT_THROW(align_pair_L2(mv, std::vector<double>{-2, 5}, bad, bad), NoPairing);
}

TEST(Pair, GoodProbability)
{
    // a +-1 vector separates two distinct vectors at least half the time
    const SignalSet f = fixture();
    Rng r(3);
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = a + 1; b < 3; ++b) {
            int good = 0;
            for (int t = 0; t < 4000; ++t) {
                Eigen::VectorXd v(20);
                for (int i = 0; i < 20; ++i)
                    v(i) = r.sign();
                const std::vector<double> m = {v.dot(f[a]), v.dot(f[b])};
                good += is_good_pair(m);
            }
            EXPECT_GE(good, 1900);
        }
}

TEST(Triplet, GoodnessExamples)
{
    const std::vector<double> A = {3, 5, 4}, B = {4, -2, 10}, C = {7, 3, 14};
    EXPECT_TRUE(is_good_triplet(A, B, C));
    const std::vector<double> C2 = {7, 3, 9}; // 5 + 4 hits component 3
    EXPECT_FALSE(is_good_triplet(A, B, C2));
}

TEST(Triplet, DeriveComponents)
{
    const auto comps = derive_components(reference());
    ASSERT_EQ(comps.size(), 3u);
    EXPECT_EQ(comps[0].a, 3);
    EXPECT_EQ(comps[0].b, 4);
    EXPECT_EQ(comps[0].r, 2);
    EXPECT_EQ(comps[0].base, 1);
    EXPECT_EQ(comps[1].base, -1);
    EXPECT_EQ(comps[1].r, 5);
    EXPECT_EQ(comps[2].base, 6);
    EXPECT_EQ(comps[2].r, -1);
    EXPECT_EQ(derive_base_means(reference()), (std::vector<double>{-1, 1, 6}));
}

TEST(Triplet, NotGood)
{
    TripletRecord t = reference();
    t.b = mix({4, 4, 10});
    EXPECT_THROW(derive_components(t), NotGood);
    t = reference();
    t.c = mix({7, 3, 9});
    EXPECT_THROW(derive_components(t), NotGood);
    t = reference();
    t.b = mix({5, -2, 10}); // (q - 1) r must be even
    t.c = mix({8, 3, 14});
    EXPECT_THROW(derive_components(t), NotGood);
}

TEST(Triplet, LabelWithReference)
{
    const auto out = label_with_reference(reference(), candidate(), mix({2, 0, 9}));
    ASSERT_EQ(out.size(), 3u);
    EXPECT_EQ(out[0].label, -1);
    EXPECT_EQ(out[0].value, -3);
    EXPECT_EQ(out[1].label, 2);
    EXPECT_EQ(out[1].value, 5);
    EXPECT_EQ(out[2].label, 5);
    EXPECT_EQ(out[2].value, 10);
}

TEST(Triplet, LabelAmbiguous)
{
    EXPECT_THROW(label_with_reference(reference(), candidate(), mix({3, 3, 3})), NotMatchingGood);
    // r' = 4 then fits no label
    EXPECT_THROW(label_with_reference(reference(), candidate(), mix({2, 0, 8})), NotMatchingGood);
}

TEST(Triplet, GoodProbability)
{
    const SignalSet f = fixture();
    const AlignConstants c = compute_constants(0.4, 3, 4.0);
    Rng r(7);
    const int N = 2000;
    int good = 0;
    for (int t = 0; t < N; ++t) {
        Eigen::VectorXd v(20), rr(20);
        for (int i = 0; i < 20; ++i) {
            v(i) = r.sign();
            rr(i) = static_cast<double>(r.between(-2 * c.z_star, 2 * c.z_star));
        }
        const double q = static_cast<double>(r.between(2, 4 * c.z_star + 1));
        std::vector<double> A, B, C;
        for (const auto& b : f.vectors()) {
            A.push_back((v + rr).dot(b));
            B.push_back(((q - 1) * rr).dot(b));
            C.push_back((v + q * rr).dot(b));
        }
        good += is_good_triplet(A, B, C);
    }
    EXPECT_GE(good, N / 2);
}
