#pragma once

#include "tbd/radar_measurement.hpp"
#include "tbd/rfs_core.hpp"
#include "tbd/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace tbd {

struct Waypoint {
    double t = 0.0;      ///< s
    double x = 0.0;      ///< m
    double y = 0.0;      ///< m
    double speed = 0.0;  ///< m/s, informational; velocities follow the segment slopes
};

/// Ground-truth target played back from waypoints.
struct TruthTarget {
    int id = 0;
    std::uint32_t spawn_frame = 0;
    std::uint32_t despawn_frame = 0;  ///< exclusive
    std::vector<Waypoint> trajectory;
    double rcs_power = 1e-4;  ///< sigma_rho^2
    bool occludable = true;

    void validate() const;
};

struct SimConfig {
    SensorModel sensor;
    /// Std of an optional Gaussian jitter on truth positions (m); 0 disables.
    double truth_jitter = 0.0;
    /// Power factor applied to an occluded target.
    double occlusion_attenuation = 0.25;
    double frame_period = 0.07;
    std::uint32_t n_frames = 200;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TruthState {
    int id = 0;
    State state;
    bool occluded = false;
};

/// Targets present at frame k with their states; theta follows rcs_power
/// through the current range and gain.
std::vector<TruthState> truth_states(const SimConfig& config, const std::vector<TruthTarget>& targets,
                                     std::uint32_t k);

/// Whether target i is shadowed: another target within half an azimuth cell
/// at a smaller range.
void mark_occlusions(std::vector<TruthState>& states, const std::vector<TruthTarget>& targets,
                     const CellGrid& grid);

/// One Swerling-1 frame: per target one complex amplitude with per-component
/// variance sigma_rho^2, superposed through the point-spread function over
/// complex Gaussian noise, squared modulus per cell.
RadarCube render_cube(const std::vector<TruthState>& truth, const SensorModel& sensor, const SimConfig& config,
                      double timestamp, Rng& rng);

struct Scenario {
    SimConfig config;
    std::vector<TruthTarget> targets;
};

/// Two cars ahead of the ego vehicle on a straight road. The near car starts
/// half a lane to the left and moves into line, occluding the far car.
Scenario paper_scenario();

struct SimulationResult {
    std::vector<RadarCube> cubes;
    std::vector<std::vector<TruthState>> truth;  ///< per frame
};

/// Renders all frames; frame k draws from substream (seed, k).
SimulationResult simulate(const Scenario& scenario);

/// CSV with header k,id,x,y,xdot,ydot,theta.
void write_truth_csv(const std::filesystem::path& path, const std::vector<std::vector<TruthState>>& truth);

} // namespace tbd
