#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "mslr/model.hpp"
#include "mslr/rng.hpp"

using namespace mslr;

namespace
{
    SignalSet fixture()
    {
        std::ifstream f(MSLR_FIXTURES "/signals_n20_k3_L3.txt");
        return read_signal_set(f);
    }
} // namespace

TEST(SignalSet, RejectsDuplicates)
{
    Eigen::VectorXd a(2);
    a << 1, 0;
    EXPECT_THROW(SignalSet(2, 1, {a, a}, 1.0), ModelError);
}

TEST(SignalSet, RejectsDenseAndOffGrid)
{
    Eigen::VectorXd a(2), b(2);
    a << 1, 1;
    b << 0.3, 0;
    EXPECT_THROW(SignalSet(2, 1, {a}, 1.0), ModelError);
    EXPECT_THROW(SignalSet(2, 1, {b}, 0.25), ModelError);
    EXPECT_NO_THROW(SignalSet(2, 2, {a}, 1.0));
    EXPECT_NO_THROW(SignalSet(2, 1, {a}, std::nullopt, false));
}

TEST(Generate, SingleCoordinate)
{
    const SignalSet s = generate_signal_set(1, 1, 1, 1.0, 1.0, 5);
    ASSERT_EQ(s.L(), 1u);
    EXPECT_EQ(std::abs(s[0](0)), 1.0);
}

TEST(Generate, OneSparseHalfGrid)
{
    const SignalSet s = generate_signal_set(4, 1, 2, 0.5, 2.0, 11);
    ASSERT_EQ(s.L(), 2u);
    for (const auto& v : s.vectors()) {
        EXPECT_EQ((v.array() != 0.0).count(), 1);
        for (int i = 0; i < 4; ++i)
            EXPECT_TRUE(on_grid(v(i), 0.5));
    }
    EXPECT_GT((s[0] - s[1]).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Generate, ImpossibleRequests)
{
    EXPECT_THROW(generate_signal_set(1, 1, 3, 1.0, 1.0, 1), ModelError);
    EXPECT_THROW(generate_signal_set(3, 4, 1, 1.0, 1.0, 1), ModelError);
    EXPECT_THROW(generate_signal_set(3, 1, 1, 1.0, 0.5, 1), ModelError);
}

TEST(Generate, Deterministic)
{
    const SignalSet a = generate_signal_set(30, 4, 3, 0.25, 2.0, 99);
    const SignalSet b = generate_signal_set(30, 4, 3, 0.25, 2.0, 99);
    for (std::size_t l = 0; l < 3; ++l)
        EXPECT_EQ(a[l], b[l]);
}

TEST(Generate, FrozenFixture)
{
    const SignalSet f = fixture();
    EXPECT_EQ(f.n(), 20u);
    EXPECT_EQ(f.k(), 3u);
    EXPECT_EQ(f.L(), 3u);
    ASSERT_TRUE(f.epsilon());
    EXPECT_EQ(*f.epsilon(), 0.25);
    for (const auto& v : f.vectors()) {
        EXPECT_EQ((v.array() != 0.0).count(), 3);
        EXPECT_LE(v.cwiseAbs().maxCoeff(), 2.0);
    }
    // the generator still reproduces the checked-in file
    const SignalSet g = generate_signal_set(20, 3, 3, 0.25, 2.0, 7);
    for (std::size_t l = 0; l < 3; ++l)
        EXPECT_EQ(f[l], g[l]);
}

TEST(Serialize, RoundTrip)
{
    const SignalSet s = generate_signal_set(10, 2, 3, std::nullopt, 1.5, 3);
    std::stringstream ss;
    write_signal_set(ss, s);
    const SignalSet t = read_signal_set(ss);
    EXPECT_FALSE(t.epsilon());
    for (std::size_t l = 0; l < 3; ++l)
        EXPECT_EQ(s[l], t[l]);
}

TEST(BestK, Examples)
{
    Eigen::Vector3d v(3, -5, 1);
    EXPECT_EQ(best_k_approx(v, 1), Eigen::Vector3d(0, -5, 0));
    EXPECT_EQ(best_k_approx(v, 3), v);
    EXPECT_EQ(best_k_approx(Eigen::Vector3d(2, -2, 0), 1), Eigen::Vector3d(2, 0, 0));
}

TEST(BestK, IdempotentAndShrinking)
{
    Rng r(5);
    for (int t = 0; t < 50; ++t) {
        Eigen::VectorXd v(8);
        for (int i = 0; i < 8; ++i)
            v(i) = r.normal();
        const Eigen::Index k = static_cast<Eigen::Index>(r.below(9));
        const Eigen::VectorXd b = best_k_approx(v, k);
        EXPECT_EQ(best_k_approx(b, k), b);
        EXPECT_LE(b.lpNorm<1>(), v.lpNorm<1>());
    }
}

TEST(BestK, OptimalOverSupports)
{
    Rng r(6);
    for (int t = 0; t < 20; ++t) {
        const int n = 6;
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i)
            v(i) = r.normal();
        const Eigen::Index k = 2;
        const double err = (v - best_k_approx(v, k)).lpNorm<1>();
        // the best w on a support keeps v there, so enumerate supports
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
                w(a) = v(a);
                w(b) = v(b);
                EXPECT_LE(err, (v - w).lpNorm<1>() + 1e-12);
            }
    }
}

TEST(Match, IdentityAndPermutations)
{
    const SignalSet f = fixture();
    std::vector<std::size_t> perm = {0, 1, 2};
    do {
        std::vector<Eigen::VectorXd> est;
        for (auto p : perm)
            est.push_back(f[p]);
        const RecoveryReport r = match_and_score(f, est);
        EXPECT_TRUE(r.all_exact());
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_EQ(perm[r.matching[i]], i);
            EXPECT_EQ(r.per_signal_l1_ratio[i], 0.0);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Match, SwappedPair)
{
    Eigen::VectorXd a(3), b(3);
    a << 1, 0, 0;
    b << 0, 2, 0;
    const SignalSet s(3, 1, {a, b}, 1.0);
    const RecoveryReport r = match_and_score(s, {b, a});
    EXPECT_EQ(r.matching, (std::vector<std::size_t>{1, 0}));
}

TEST(Match, PerturbedRatio)
{
    const SignalSet f = fixture();
    std::vector<Eigen::VectorXd> est = f.vectors();
    est[1](0) += 0.5;
    est[1](5) -= 0.25;
    const RecoveryReport r = match_and_score(f, est);
    // exactly 3-sparse truth: the denominator is zero
    EXPECT_EQ(r.per_signal_l1_ratio[1], std::numeric_limits<double>::infinity());
    EXPECT_FALSE(r.exact[1]);
    EXPECT_TRUE(r.exact[0] && r.exact[2]);

    // dense truth: |b - est|_1 / |b - b*|_1 by hand
    Eigen::VectorXd d(4), e(4);
    d << 4, -3, 0.5, 0.25;
    e << 4, -3, 0, 0;
    const SignalSet dense(4, 2, {d}, std::nullopt, false);
    Eigen::VectorXd guess = e;
    guess(0) = 3.5;
    const RecoveryReport q = match_and_score(dense, {guess});
    EXPECT_DOUBLE_EQ(q.per_signal_l1_ratio[0], (0.5 + 0.5 + 0.25) / 0.75);
}

TEST(Match, LengthMismatch)
{
    const SignalSet f = fixture();
    EXPECT_THROW(match_and_score(f, {f[0]}), std::invalid_argument);
}
