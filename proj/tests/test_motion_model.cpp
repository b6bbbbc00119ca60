#include "tbd/motion_model.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace tbd;

namespace {

LabeledParticleTrack cloud(std::size_t n, const State& mean, const State& spread, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n01;
    LabeledParticleTrack t;
    t.label = Label{3, 1};
    t.states.resize(n);
    t.weights.assign(n, 1.0 / static_cast<double>(n));
    for (auto& s : t.states) {
        for (int i = 0; i < 5; ++i) s(i) = mean(i) + spread(i) * n01(rng);
    }
    return t;
}

State empirical_mean(const LabeledParticleTrack& t) {
    State m = State::Zero();
    for (const auto& s : t.states) m += s;
    return m / static_cast<double>(t.size());
}

Matrix5 empirical_cov(const LabeledParticleTrack& t) {
    const State m = empirical_mean(t);
    Matrix5 c = Matrix5::Zero();
    for (const auto& s : t.states) c += (s - m) * (s - m).transpose();
    return c / static_cast<double>(t.size() - 1);
}

} // namespace

TEST(TransitionMatrix, ZeroStepIsIdentity) {
    MotionParams p;
    p.dt = 0.0;
    EXPECT_TRUE(transition_matrix(p).isIdentity(0.0));
}

TEST(TransitionMatrix, UnitStepBlocks) {
    MotionParams p;
    p.dt = 1.0;
    const Matrix5 a = transition_matrix(p);
    Matrix5 expected = Matrix5::Identity();
    expected(0, 1) = 1.0;
    expected(2, 3) = 1.0;
    EXPECT_EQ(a, expected);
}

TEST(TransitionMatrix, PropagatesUnitVelocity) {
    MotionParams p;
    State s;
    s << 0.0, 1.0, 0.0, 0.0, 0.4;
    const State out = transition_matrix(p) * s;
    EXPECT_NEAR(out(kX), 0.07, 1e-15);
    EXPECT_EQ(out(kXDot), 1.0);
    EXPECT_EQ(out(kY), 0.0);
    EXPECT_EQ(out(kYDot), 0.0);
    EXPECT_EQ(out(kTheta), 0.4);
}

TEST(TransitionMatrix, Semigroup) {
    MotionParams a;
    MotionParams b;
    MotionParams ab;
    a.dt = 0.031;
    b.dt = 0.27;
    ab.dt = a.dt + b.dt;
    EXPECT_TRUE((transition_matrix(a) * transition_matrix(b)).isApprox(transition_matrix(ab), 1e-14));
}

TEST(ProcessNoiseCov, UnitBlock) {
    MotionParams p;
    p.dt = 1.0;
    p.sigma_ax2 = 1.0;
    const Matrix5 q = process_noise_cov(p);
    EXPECT_DOUBLE_EQ(q(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(q(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(q(1, 0), 0.5);
    EXPECT_DOUBLE_EQ(q(1, 1), 1.0);
}

TEST(ProcessNoiseCov, ThetaEntry) {
    MotionParams p;
    p.dt = 0.07;
    p.sigma_theta_dot2 = 1e-3;
    EXPECT_NEAR(process_noise_cov(p)(4, 4), 4.9e-6, 1e-20);
}

TEST(ProcessNoiseCov, SymmetricPsdAndBlockDiagonal) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 4.0);
    for (int trial = 0; trial < 100; ++trial) {
        MotionParams p;
        p.dt = u(rng) * 0.25;
        p.sigma_ax2 = u(rng);
        p.sigma_ay2 = u(rng);
        p.sigma_theta_dot2 = u(rng) * 1e-2;
        const Matrix5 q = process_noise_cov(p);
        EXPECT_TRUE(q == q.transpose());
        Eigen::SelfAdjointEigenSolver<Matrix5> es(q);
        EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
        EXPECT_EQ((q.block<2, 2>(0, 2).norm()), 0.0);
        EXPECT_EQ((q.block<2, 1>(0, 4).norm()), 0.0);
        EXPECT_EQ((q.block<2, 1>(2, 4).norm()), 0.0);
    }
}

TEST(ProcessNoiseCov, LinearInEachVariance) {
    MotionParams p;
    p.dt = 0.13;
    p.sigma_ax2 = 0.7;
    p.sigma_ay2 = 1.9;
    p.sigma_theta_dot2 = 3e-3;
    const Matrix5 q = process_noise_cov(p);
    MotionParams p2 = p;
    p2.sigma_ax2 *= 3.0;
    const Matrix5 q2 = process_noise_cov(p2);
    EXPECT_TRUE((q2.block<2, 2>(0, 0).isApprox(3.0 * q.block<2, 2>(0, 0), 1e-14)));
    EXPECT_TRUE((q2.block<3, 3>(2, 2) == q.block<3, 3>(2, 2)));
    MotionParams p3 = p;
    p3.sigma_ay2 *= 0.5;
    p3.sigma_theta_dot2 *= 7.0;
    const Matrix5 q3 = process_noise_cov(p3);
    EXPECT_TRUE((q3.block<2, 2>(2, 2).isApprox(0.5 * q.block<2, 2>(2, 2), 1e-14)));
    EXPECT_NEAR(q3(4, 4), 7.0 * q(4, 4), 1e-18);
}

TEST(PropagateParticles, NoiselessConstantVelocityStep) {
    MotionParams p;
    p.dt = 0.5;
    p.sigma_ax2 = 0.0;
    p.sigma_ay2 = 0.0;
    p.sigma_theta_dot2 = 0.0;
    LabeledParticleTrack t;
    t.label = Label{1, 2};
    State s;
    s << 10.0, 2.0, 0.0, 0.0, 0.8;
    t.states = {s, s};
    t.weights = {0.4, 0.6};
    Rng rng(1);
    const auto out = propagate_particles(t, p, rng);
    State expected;
    expected << 11.0, 2.0, 0.0, 0.0, 0.8;
    for (const auto& x : out.states) EXPECT_EQ(x, expected);
    EXPECT_EQ(out.weights, t.weights);
    EXPECT_EQ(out.label, t.label);
}

TEST(PropagateParticles, ThetaUnchangedWithoutThetaNoise) {
    MotionParams p;
    p.sigma_theta_dot2 = 0.0;
    State mean;
    mean << 20.0, 1.0, -3.0, 0.5, 2.0;
    State spread;
    spread << 1.0, 0.5, 1.0, 0.5, 0.3;
    const auto t = cloud(500, mean, spread, 9);
    Rng rng(4);
    const auto out = propagate_particles(t, p, rng);
    for (std::size_t j = 0; j < t.size(); ++j) EXPECT_EQ(out.states[j](kTheta), t.states[j](kTheta));
}

TEST(PropagateParticles, ThetaClampedAtZero) {
    MotionParams p;
    p.sigma_theta_dot2 = 100.0;
    LabeledParticleTrack t;
    State s;
    s << 5.0, 0.0, 0.0, 0.0, 1e-6;
    t.states.assign(2000, s);
    t.weights.assign(2000, 1.0 / 2000.0);
    Rng rng(2);
    const auto out = propagate_particles(t, p, rng);
    std::size_t zeros = 0;
    for (const auto& x : out.states) {
        EXPECT_GE(x(kTheta), 0.0);
        zeros += x(kTheta) == 0.0;
    }
    EXPECT_GT(zeros, 800u);
}

TEST(PropagateParticles, DeterministicForSeed) {
    MotionParams p;
    State mean;
    mean << 20.0, 1.0, -3.0, 0.5, 2.0;
    const auto t = cloud(100, mean, State::Ones(), 1);
    Rng a(77);
    Rng b(77);
    const auto x = propagate_particles(t, p, a);
    const auto y = propagate_particles(t, p, b);
    for (std::size_t j = 0; j < t.size(); ++j) EXPECT_EQ(x.states[j], y.states[j]);
}

// Monte-Carlo moment checks against A mu and A Sigma A^T + Q over random,
// seeded motion parameters.
class PropagationMoments : public ::testing::TestWithParam<int> {};

TEST_P(PropagationMoments, MeanAndCovarianceMatchAnalytic) {
    const int seed = GetParam();
    std::mt19937_64 prng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> u(0.2, 1.0);
    MotionParams p;
    p.dt = 0.3 * u(prng);
    p.sigma_ax2 = 10.0 * u(prng);
    p.sigma_ay2 = 10.0 * u(prng);
    p.sigma_theta_dot2 = 0.5 * u(prng);

    State mean;
    mean << 30.0 * u(prng), 2.0 * u(prng), -5.0 * u(prng), u(prng), 50.0;
    State spread;
    spread << u(prng), 0.5 * u(prng), u(prng), 0.5 * u(prng), 0.2 * u(prng);
    const std::size_t n = 15000;
    const auto prior = cloud(n, mean, spread, 1000 + static_cast<std::uint64_t>(seed));
    Rng rng(static_cast<std::uint64_t>(seed) * 31 + 5);
    const auto post = propagate_particles(prior, p, rng);

    const Matrix5 a = transition_matrix(p);
    const Matrix5 q = process_noise_cov(p);
    const State mu_expected = a * empirical_mean(prior);
    const Matrix5 cov_expected = a * empirical_cov(prior) * a.transpose() + q;

    const State mu = empirical_mean(post);
    for (int i = 0; i < 5; ++i) {
        const double se = std::sqrt(cov_expected(i, i) / static_cast<double>(n));
        EXPECT_LE(std::abs(mu(i) - mu_expected(i)), 5.0 * se) << "dimension " << i;
    }
    const Matrix5 cov = empirical_cov(post);
    EXPECT_LE((cov - cov_expected).norm(), 0.05 * cov_expected.norm());
}

INSTANTIATE_TEST_SUITE_P(Seeds, PropagationMoments, ::testing::Range(1, 11));

TEST(MotionParams, Validation) {
    MotionParams p;
    EXPECT_NO_THROW(p.validate());
    p.dt = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = MotionParams{};
    p.sigma_ay2 = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
