#include "tbd/log_math.hpp"
#include "tbd/rfs_core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace tbd;

namespace {

State make_state(double x) {
    State s;
    s << x, 0.0, 0.0, 0.0, 1.0;
    return s;
}

Hypothesis hyp(std::vector<Label> labels, double log_weight) {
    Hypothesis h;
    std::sort(labels.begin(), labels.end());
    for (const auto& l : labels) {
        auto t = std::make_shared<LabeledParticleTrack>();
        t->label = l;
        t->states = {make_state(1.0)};
        t->weights = {1.0};
        h.tracks.push_back(t);
    }
    h.labels = std::move(labels);
    h.log_weight = log_weight;
    return h;
}

double weight_total(const GlmbDensity& d) {
    double s = 0.0;
    for (const auto& h : d.hypotheses) s += std::exp(h.log_weight);
    return s;
}

} // namespace

TEST(Label, OrdersLexicographically) {
    EXPECT_LT((Label{1, 5}), (Label{2, 0}));
    EXPECT_LT((Label{2, 0}), (Label{2, 1}));
    EXPECT_EQ((Label{3, 4}), (Label{3, 4}));
    EXPECT_EQ(to_string(Label{3, 4}), "3:4");
}

TEST(DistinctLabelIndicator, EmptyListIsDistinct) {
    EXPECT_EQ(distinct_label_indicator({}), 1);
}

TEST(DistinctLabelIndicator, DuplicateLabel) {
    const Label l1{0, 1};
    EXPECT_EQ(distinct_label_indicator({{make_state(1), l1}, {make_state(2), l1}}), 0);
}

TEST(DistinctLabelIndicator, TwoDistinctLabels) {
    EXPECT_EQ(distinct_label_indicator({{make_state(1), Label{0, 1}}, {make_state(2), Label{0, 2}}}), 1);
}

TEST(DistinctLabelIndicator, PermutationInvariant) {
    std::mt19937 rng(7);
    std::vector<LabeledState> xs;
    for (std::uint32_t i = 0; i < 6; ++i) xs.emplace_back(make_state(i), Label{i % 4, 0});
    const int ref = distinct_label_indicator(xs);
    EXPECT_EQ(ref, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(xs.begin(), xs.end(), rng);
        EXPECT_EQ(distinct_label_indicator(xs), ref);
    }
    xs.resize(4);
    for (std::uint32_t i = 0; i < 4; ++i) xs[i].second = Label{i, i};
    for (int trial = 0; trial < 20; ++trial) {
        std::shuffle(xs.begin(), xs.end(), rng);
        EXPECT_EQ(distinct_label_indicator(xs), 1);
    }
}

TEST(MultiTargetExponential, EmptySetIsOne) {
    const std::vector<State> none;
    EXPECT_EQ(multi_target_exponential([](const State&) { return 7.0; }, none), 1.0);
}

TEST(MultiTargetExponential, UnitFunction) {
    const std::vector<State> xs{make_state(1), make_state(2), make_state(3), make_state(4)};
    EXPECT_EQ(multi_target_exponential([](const State&) { return 1.0; }, xs), 1.0);
}

TEST(MultiTargetExponential, ConstantTwoOnThreeStates) {
    const std::vector<State> xs{make_state(1), make_state(2), make_state(3)};
    EXPECT_EQ(multi_target_exponential([](const State&) { return 2.0; }, xs), 8.0);
}

TEST(MultiTargetExponential, FactorsOverDisjointUnion) {
    auto h = [](const State& s) { return 0.5 + s(kX) * s(kX); };
    const std::vector<State> a{make_state(0.3), make_state(1.7)};
    const std::vector<State> b{make_state(-2.0), make_state(0.1), make_state(4.0)};
    std::vector<State> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    const double lhs = multi_target_exponential(h, ab);
    const double rhs = multi_target_exponential(h, a) * multi_target_exponential(h, b);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(rhs));
}

TEST(Normalize, SingleHypothesisGetsUnitWeight) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({Label{1, 0}}, -1234.5));
    d = normalize(d);
    EXPECT_NEAR(std::exp(d.hypotheses[0].log_weight), 1.0, 1e-15);
}

TEST(Normalize, EqualWeightsSplitEvenly) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({}, 42.0));
    d.hypotheses.push_back(hyp({Label{0, 0}}, 42.0));
    d = normalize(d);
    EXPECT_NEAR(std::exp(d.hypotheses[0].log_weight), 0.5, 1e-15);
    EXPECT_NEAR(std::exp(d.hypotheses[1].log_weight), 0.5, 1e-15);
}

TEST(Normalize, OneToThree) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({}, std::log(1.0)));
    d.hypotheses.push_back(hyp({Label{0, 0}}, std::log(3.0)));
    d = normalize(d);
    EXPECT_NEAR(std::exp(d.hypotheses[0].log_weight), 0.25, 1e-15);
    EXPECT_NEAR(std::exp(d.hypotheses[1].log_weight), 0.75, 1e-15);
}

TEST(Normalize, KeepsOrderAndSurvivesHugeLogWeights) {
    GlmbDensity d;
    const std::vector<double> lw{900.0, 1000.0, 950.0, -1e6};
    for (std::size_t i = 0; i < lw.size(); ++i) d.hypotheses.push_back(hyp({Label{1, static_cast<std::uint32_t>(i)}}, lw[i]));
    d = normalize(d);
    for (std::size_t i = 0; i < lw.size(); ++i) EXPECT_EQ(d.hypotheses[i].labels[0].birth_index, i);
    EXPECT_NEAR(weight_total(d), 1.0, 1e-12);
    EXPECT_GT(d.hypotheses[1].log_weight, d.hypotheses[2].log_weight);
    EXPECT_GT(d.hypotheses[2].log_weight, d.hypotheses[0].log_weight);
}

TEST(Normalize, AllZeroWeightsIsDegenerate) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({}, kNegInf));
    d.hypotheses.push_back(hyp({Label{0, 0}}, kNegInf));
    EXPECT_THROW(normalize(d), DegeneratePosteriorError);
    EXPECT_THROW(normalize(GlmbDensity{}), DegeneratePosteriorError);
}

TEST(Normalize, RandomDensitiesSumToOne) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-700.0, 700.0);
    for (int trial = 0; trial < 50; ++trial) {
        GlmbDensity d;
        for (std::uint32_t i = 0; i < 1 + trial % 17; ++i) d.hypotheses.push_back(hyp({Label{i, 0}}, u(rng)));
        d = normalize(d);
        EXPECT_NEAR(weight_total(d), 1.0, 1e-12);
    }
}

TEST(CardinalityDistribution, PointMass) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({Label{0, 0}, Label{0, 1}}, 0.0));
    const auto c = cardinality_distribution(d);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], 0.0);
    EXPECT_EQ(c[1], 0.0);
    EXPECT_NEAR(c[2], 1.0, 1e-15);
}

TEST(CardinalityDistribution, DirectPartition) {
    GlmbDensity d;
    d.hypotheses.push_back(hyp({}, std::log(0.3)));
    d.hypotheses.push_back(hyp({Label{0, 0}}, std::log(0.7)));
    const auto c = cardinality_distribution(d);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_NEAR(c[0], 0.3, 1e-15);
    EXPECT_NEAR(c[1], 0.7, 1e-15);
}

TEST(CardinalityDistribution, SumsToOneAndIgnoresOrder) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    GlmbDensity d;
    for (std::uint32_t i = 0; i < 30; ++i) {
        std::vector<Label> ls;
        for (std::uint32_t j = 0; j < i % 5; ++j) ls.push_back(Label{i, j});
        d.hypotheses.push_back(hyp(ls, u(rng)));
    }
    d = normalize(d);
    const auto c = cardinality_distribution(d);
    EXPECT_NEAR(std::accumulate(c.begin(), c.end(), 0.0), 1.0, 1e-12);
    std::shuffle(d.hypotheses.begin(), d.hypotheses.end(), rng);
    const auto c2 = cardinality_distribution(d);
    ASSERT_EQ(c.size(), c2.size());
    for (std::size_t n = 0; n < c.size(); ++n) EXPECT_NEAR(c[n], c2[n], 1e-15);
}

TEST(Hypothesis, TrackLookup) {
    const Hypothesis h = hyp({Label{2, 0}, Label{1, 3}}, 0.0);
    EXPECT_TRUE(h.contains(Label{1, 3}));
    EXPECT_FALSE(h.contains(Label{1, 4}));
    EXPECT_EQ(h.track(Label{2, 0}).label, (Label{2, 0}));
    EXPECT_THROW(static_cast<void>(h.track(Label{9, 9})), std::out_of_range);
}

TEST(LabeledParticleTrack, MeanAndEss) {
    LabeledParticleTrack t;
    t.states = {make_state(0.0), make_state(4.0)};
    t.weights = {0.25, 0.75};
    EXPECT_NEAR(t.mean()(kX), 3.0, 1e-15);
    EXPECT_NEAR(t.weight_sum(), 1.0, 1e-15);
    EXPECT_NEAR(t.effective_sample_size(), 1.0 / (0.0625 + 0.5625), 1e-12);
}

TEST(GlmbDensity, EmptyDensityAndLabelUnion) {
    const GlmbDensity e = GlmbDensity::empty(4);
    EXPECT_EQ(e.time, 4u);
    ASSERT_EQ(e.hypotheses.size(), 1u);
    EXPECT_EQ(e.hypotheses[0].cardinality(), 0u);
    EXPECT_NEAR(e.weight_sum(), 1.0, 1e-15);

    GlmbDensity d;
    d.hypotheses.push_back(hyp({Label{3, 0}, Label{1, 0}}, 0.0));
    d.hypotheses.push_back(hyp({Label{1, 0}, Label{2, 1}}, 0.0));
    const auto all = d.all_labels();
    EXPECT_EQ(all, (std::vector<Label>{Label{1, 0}, Label{2, 1}, Label{3, 0}}));
}
