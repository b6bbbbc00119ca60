#pragma once

#include "tbd/rfs_core.hpp"

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tbd {

/// Measurement-space dimensions of the radar cube.
enum Dim : int { kRange = 0, kVelocity = 1, kAzimuth = 2 };

/// Discretization of (range, radial velocity, azimuth). Cell i along a
/// dimension is centered at offset + i * res and spans +-res/2.
struct CellGrid {
    std::uint32_t n_range = 64;
    std::uint32_t n_velocity = 32;
    std::uint32_t n_azimuth = 16;
    double range_res = 1.0;          ///< m
    double velocity_res = 0.5;       ///< m/s
    double azimuth_res = 0.034906585039886591;  ///< rad (2 deg)
    double range_offset = 0.0;
    double velocity_offset = -8.0;
    double azimuth_offset = -0.27925268031909273;  ///< rad (-16 deg)

    [[nodiscard]] std::size_t cell_count() const {
        return std::size_t{n_range} * n_velocity * n_azimuth;
    }
    [[nodiscard]] std::uint32_t size(int dim) const;
    [[nodiscard]] double res(int dim) const;
    [[nodiscard]] double offset(int dim) const;
    [[nodiscard]] double center(int dim, std::int64_t i) const { return offset(dim) + static_cast<double>(i) * res(dim); }

    /// Range-major, then velocity, then azimuth.
    [[nodiscard]] std::size_t flat_index(std::uint32_t ir, std::uint32_t iv, std::uint32_t ia) const {
        return (std::size_t{ir} * n_velocity + iv) * n_azimuth + ia;
    }
    [[nodiscard]] std::array<std::uint32_t, 3> unflatten(std::size_t flat) const;

    void validate() const;
    bool operator==(const CellGrid&) const = default;
};

/// A point in measurement space: range (m), radial velocity (m/s), azimuth (rad).
using MeasurementPoint = std::array<double, 3>;

/// Center of a cell in measurement space.
MeasurementPoint cell_center(const CellGrid& grid, std::size_t flat);

/// Squared-modulus intensities, flattened in CellGrid::flat_index order.
struct RadarCube {
    CellGrid grid;
    std::vector<double> intensities;
    double timestamp = 0.0;  ///< s

    static RadarCube zeros(const CellGrid& grid, double timestamp = 0.0);
    void validate() const;
};

/// Piecewise-linear antenna gain over azimuth, held constant beyond the table.
class GainProfile {
public:
    GainProfile() = default;
    static GainProfile constant(double gain);
    /// Nodes (azimuth rad, gain) sorted by azimuth.
    explicit GainProfile(std::vector<std::pair<double, double>> nodes);

    double operator()(double azimuth) const;
    [[nodiscard]] const std::vector<std::pair<double, double>>& nodes() const { return nodes_; }
    bool operator==(const GainProfile&) const = default;

private:
    std::vector<std::pair<double, double>> nodes_{{0.0, 1.0}};
};

struct SensorModel {
    CellGrid grid;
    double sigma_w2 = 2e-6;
    /// Per-dimension standard widths of the point-spread profile.
    std::array<double, 3> psf_widths{1.0, 0.5, 0.034906585039886591};
    GainProfile gain;
    /// Half-axes of the illumination ellipsoid (m, m/s, rad).
    std::array<double, 3> illumination_radii{2.0, 1.0, 0.069813170079773182};

    /// Sensor with widths of one cell and radii of two cells on the given grid.
    static SensorModel for_grid(const CellGrid& grid, double sigma_w2 = 2e-6);
    void validate() const;
    bool operator==(const SensorModel&) const = default;
};

/// Sensor position and heading in the frame the target state lives in.
struct SensorPose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

class SingularGeometryError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class OutOfBeamError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// (range, radial velocity, azimuth) of a state, x axis forward.
MeasurementPoint state_to_measurement(const State& state, const SensorPose& pose = {});

/// |h| of the cell for a target in state: separable Gaussian profile with peak 1,
/// zero outside the illumination region.
double psf_value(const State& state, std::size_t cell, const SensorModel& sensor);

/// Flat indices (ascending) of the cells whose centers fall inside the
/// illumination ellipsoid around the target's measurement point.
std::vector<std::size_t> illumination_region(const State& state, const SensorModel& sensor);

/// sigma_rho^2 = theta r^4 / G^2.
double reflection_power(const State& state, const SensorModel& sensor);

/// theta = sigma_rho^2 G^2 / r^4.
double theta_from_reflection_power(double sigma_rho2, double range, double gain);

/// log of the Swerling-1 likelihood ratio for a cell with intensity z, given the
/// expected signal power sigma_rho^2 |h|^2 in that cell.
inline double log_likelihood_ratio(double z, double signal_power, double sigma_w2);

/// Swerling-1 likelihood ratio l(z | x) for one cell.
double likelihood_ratio(double z, const State& state, std::size_t cell, const SensorModel& sensor);

/// log psi_z(x): sum of log likelihood ratios over the illumination region.
double target_pseudolikelihood(const State& state, const RadarCube& cube, const SensorModel& sensor);

/// Evaluates log psi_z for many particles against one cube.
class PseudoLikelihood {
public:
    PseudoLikelihood(const RadarCube& cube, const SensorModel& sensor);

    [[nodiscard]] double log_psi(const State& state) const;
    /// out[j] = log psi_z(states[j]).
    void log_psi(std::span<const State> states, std::span<double> out) const;

private:
    const RadarCube& cube_;
    const SensorModel& sensor_;
    std::array<double, 3> inv_radius_;
    std::array<double, 3> inv_two_width2_;
};

// ---- inline ----

inline double log_likelihood_ratio(double z, double signal_power, double sigma_w2) {
    if (signal_power <= 0.0) return 0.0;
    const double varsigma = signal_power / sigma_w2;
    const double mu = 2.0 * sigma_w2 + 2.0 * signal_power;
    return -std::log1p(varsigma) + z * varsigma / mu;
}

} // namespace tbd
