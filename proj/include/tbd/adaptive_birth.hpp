#pragma once

#include "tbd/motion_model.hpp"
#include "tbd/radar_measurement.hpp"
#include "tbd/rfs_core.hpp"
#include "tbd/rng.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tbd {

struct BirthParams {
    double z_threshold = 1e-5;
    double r_birth_init = 0.3;
    std::uint32_t max_births_per_step = 5;
    /// Half-axes of the equal illumination ellipsoids (m, m/s, rad).
    std::array<double, 3> ellipsoid_radii{2.0, 1.0, 0.069813170079773182};
    /// Tangential velocity std in units of sqrt(sigma_a^2) * dt.
    double tangential_velocity_steps = 10.0;
    /// theta is jittered uniformly by +-this fraction.
    double theta_jitter = 0.5;

    void validate() const;
    bool operator==(const BirthParams&) const = default;
};

/// A labeled Bernoulli birth component: existence probability plus particle cloud.
struct BirthCandidate {
    Label label;
    double r_birth = 0.0;
    LabeledParticleTrack track;
    std::size_t cell = 0;
    MeasurementPoint center{};
};

/// Cells with intensity above the threshold, strongest first (ties by index).
std::vector<std::size_t> significant_cells(const RadarCube& cube, const BirthParams& params);

/// Whether two equal axis-aligned ellipsoids centered at a and b intersect.
bool ellipsoids_overlap(const MeasurementPoint& a, const MeasurementPoint& b, const std::array<double, 3>& radii);

/// Greedy strongest-first birth proposal: a significant cell is accepted when
/// its ellipsoid overlaps neither an existing region nor an accepted cell.
std::vector<BirthCandidate> propose_births(const RadarCube& cube, std::span<const MeasurementPoint> existing_regions,
                                           const BirthParams& params, const SensorModel& sensor,
                                           const MotionParams& motion, std::uint32_t k,
                                           std::size_t particles_per_track, Rng& rng);

} // namespace tbd
