#include "tbd/radar_sim.hpp"

#include "stat_oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace tbd;

namespace {

CellGrid small_grid() {
    CellGrid g;
    g.n_range = 7;
    g.n_velocity = 5;
    g.n_azimuth = 5;
    g.range_offset = 20.0;
    g.velocity_offset = -2.0;
    g.azimuth_offset = -2.0 * g.azimuth_res;
    return g;
}

TruthState at_cell(const SensorModel& sensor, std::size_t cell, double rcs) {
    const auto c = cell_center(sensor.grid, cell);
    TruthState ts;
    ts.id = 1;
    ts.state << c[kRange] * std::cos(c[kAzimuth]), c[kVelocity] * std::cos(c[kAzimuth]), c[kRange] * std::sin(c[kAzimuth]),
        c[kVelocity] * std::sin(c[kAzimuth]), 0.0;
    ts.state(kTheta) = theta_from_reflection_power(rcs, c[kRange], sensor.gain(c[kAzimuth]));
    return ts;
}

TruthTarget straight_target(int id, double x0, double x1, double y, double t1) {
    TruthTarget t;
    t.id = id;
    t.spawn_frame = 0;
    t.despawn_frame = 1000;
    t.trajectory = {{0.0, x0, y, 0.0}, {t1, x1, y, 0.0}};
    return t;
}

} // namespace

TEST(TruthStates, AbsentBeforeSpawn) {
    SimConfig cfg;
    auto t = straight_target(1, 10.0, 30.0, 0.0, 10.0);
    t.spawn_frame = 5;
    EXPECT_TRUE(truth_states(cfg, {t}, 4).empty());
    EXPECT_EQ(truth_states(cfg, {t}, 5).size(), 1u);
    t.despawn_frame = 6;
    EXPECT_TRUE(truth_states(cfg, {t}, 6).empty());
}

TEST(TruthStates, LinearInterpolationMidpoint) {
    SimConfig cfg;
    cfg.frame_period = 0.5;
    const auto t = straight_target(1, 10.0, 30.0, 0.0, 10.0);
    const auto s = truth_states(cfg, {t}, 10);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].state(kX), 20.0, 1e-12);
    EXPECT_EQ(s[0].state(kXDot), 2.0);
    EXPECT_EQ(s[0].state(kYDot), 0.0);
}

TEST(TruthStates, ThetaFollowsRcsPower) {
    SimConfig cfg;
    cfg.sensor.gain = GainProfile::constant(300.0);
    auto t = straight_target(1, 12.0, 40.0, 1.0, 10.0);
    t.rcs_power = 3.3e-5;
    for (std::uint32_t k : {0u, 50u, 120u}) {
        const auto s = truth_states(cfg, {t}, k);
        ASSERT_EQ(s.size(), 1u);
        EXPECT_NEAR(reflection_power(s[0].state, cfg.sensor), 3.3e-5, 1e-15);
    }
}

TEST(MarkOcclusions, InLineTargetIsShadowed) {
    SimConfig cfg;
    const std::vector<TruthTarget> targets{straight_target(1, 20.0, 20.0, 0.0, 1.0),
                                           straight_target(2, 35.0, 35.0, 0.2, 1.0)};
    const auto s = truth_states(cfg, targets, 0);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_FALSE(s[0].occluded);
    EXPECT_TRUE(s[1].occluded);
}

TEST(MarkOcclusions, OffsetBeyondHalfCell) {
    SimConfig cfg;
    const double half = 0.5 * cfg.sensor.grid.azimuth_res;
    const double y_far = 35.0 * std::tan(half * 1.2);
    const std::vector<TruthTarget> targets{straight_target(1, 20.0, 20.0, 0.0, 1.0),
                                           straight_target(2, 35.0, 35.0, y_far, 1.0)};
    const auto s = truth_states(cfg, targets, 0);
    EXPECT_FALSE(s[1].occluded);
}

TEST(MarkOcclusions, NonOccludableTarget) {
    SimConfig cfg;
    auto far = straight_target(2, 35.0, 35.0, 0.0, 1.0);
    far.occludable = false;
    const auto s = truth_states(cfg, {straight_target(1, 20.0, 20.0, 0.0, 1.0), far}, 0);
    EXPECT_FALSE(s[1].occluded);
}

TEST(RenderCube, NoTargetsMeanIsNoiseFloor) {
    SimConfig cfg;
    cfg.sensor = SensorModel::for_grid(CellGrid{}, 2e-6);
    std::vector<double> xs;
    for (std::uint64_t f = 0; f < 4; ++f) {
        Rng rng(100 + f);
        const auto cube = render_cube({}, cfg.sensor, cfg, 0.0, rng);
        xs.insert(xs.end(), cube.intensities.begin(), cube.intensities.end());
    }
    const auto m = tbd::testing::sample_mean(xs);
    EXPECT_LE(std::abs(m.mean - 4e-6), 3.0 * m.standard_error);
    for (double z : xs) EXPECT_GE(z, 0.0);
}

TEST(RenderCube, TargetCellMeanAndExponentialLaw) {
    SimConfig cfg;
    cfg.sensor = SensorModel::for_grid(small_grid(), 2e-6);
    cfg.sensor.gain = GainProfile::constant(50.0);
    const std::size_t cell = cfg.sensor.grid.flat_index(3, 2, 2);
    const double rcs = 5e-6;
    const TruthState target = at_cell(cfg.sensor, cell, rcs);
    ASSERT_NEAR(psf_value(target.state, cell, cfg.sensor), 1.0, 1e-12);
    std::vector<double> xs;
    Rng rng(7);
    for (int f = 0; f < 20000; ++f) xs.push_back(render_cube({target}, cfg.sensor, cfg, 0.0, rng).intensities[cell]);
    const double mu_z = 2.0 * cfg.sensor.sigma_w2 + 2.0 * rcs;
    const auto m = tbd::testing::sample_mean(xs);
    EXPECT_LE(std::abs(m.mean - mu_z), 3.0 * m.standard_error);
    xs.resize(10000);
    const double d = tbd::testing::ks_statistic_exponential(xs, mu_z);
    EXPECT_GT(tbd::testing::ks_p_value(d, xs.size()), 0.01);
}

TEST(RenderCube, OcclusionScalesSignalPower) {
    SimConfig cfg;
    cfg.sensor = SensorModel::for_grid(small_grid(), 2e-6);
    cfg.occlusion_attenuation = 0.1;
    const std::size_t cell = cfg.sensor.grid.flat_index(3, 2, 2);
    TruthState target = at_cell(cfg.sensor, cell, 4e-5);
    target.occluded = true;
    std::vector<double> xs;
    Rng rng(9);
    for (int f = 0; f < 20000; ++f) xs.push_back(render_cube({target}, cfg.sensor, cfg, 0.0, rng).intensities[cell]);
    const auto m = tbd::testing::sample_mean(xs);
    EXPECT_LE(std::abs(m.mean - (4e-6 + 2.0 * 0.1 * 4e-5)), 3.0 * m.standard_error);
}

TEST(Simulate, DeterministicAndTimestamped) {
    Scenario sc = paper_scenario();
    sc.config.n_frames = 3;
    const auto a = simulate(sc);
    const auto b = simulate(sc);
    ASSERT_EQ(a.cubes.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(a.cubes[k].intensities, b.cubes[k].intensities);
        EXPECT_DOUBLE_EQ(a.cubes[k].timestamp, 0.07 * static_cast<double>(k));
    }
    sc.config.seed = 2;
    EXPECT_NE(simulate(sc).cubes[0].intensities, a.cubes[0].intensities);
}

TEST(PaperScenario, InLineGeometry) {
    const Scenario sc = paper_scenario();
    EXPECT_EQ(sc.config.sensor.sigma_w2, 2e-6);
    EXPECT_EQ(sc.config.frame_period, 0.07);
    ASSERT_EQ(sc.targets.size(), 2u);
    bool any_occluded = false;
    for (std::uint32_t k = 0; k < sc.config.n_frames; ++k) {
        const auto s = truth_states(sc.config, sc.targets, k);
        ASSERT_EQ(s.size(), 2u);
        for (const auto& t : s) EXPECT_LE(std::abs(t.state(kY)), 1.0);
        EXPECT_GT(std::hypot(s[1].state(kX), s[1].state(kY)), std::hypot(s[0].state(kX), s[0].state(kY)));
        any_occluded |= s[1].occluded;
    }
    EXPECT_TRUE(any_occluded);
}

TEST(TruthCsv, HeaderAndRows) {
    SimConfig cfg;
    const auto t = straight_target(4, 10.0, 30.0, 0.0, 10.0);
    const std::vector<std::vector<TruthState>> truth{truth_states(cfg, {t}, 0), truth_states(cfg, {t}, 1)};
    const auto path = std::filesystem::temp_directory_path() / "tbd_truth_test.csv";
    write_truth_csv(path, truth);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,id,x,y,xdot,ydot,theta");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
    std::filesystem::remove(path);
}

TEST(SimValidation, RejectsBadConfig) {
    SimConfig cfg;
    cfg.frame_period = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = SimConfig{};
    cfg.occlusion_attenuation = 1.5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    auto t = straight_target(1, 0.0, 1.0, 0.0, 1.0);
    t.spawn_frame = 10;
    t.despawn_frame = 10;
    EXPECT_THROW(t.validate(), std::invalid_argument);
    t = straight_target(1, 0.0, 1.0, 0.0, 1.0);
    t.trajectory[1].t = 0.0;
    EXPECT_THROW(t.validate(), std::invalid_argument);
}
