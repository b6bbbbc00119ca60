#include "tbd/adaptive_birth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace tbd {

void BirthParams::validate() const {
    if (!(z_threshold > 0.0)) throw std::invalid_argument("birth.z_threshold must be > 0");
    if (!(r_birth_init > 0.0 && r_birth_init <= 1.0)) throw std::invalid_argument("birth.r_birth must be in (0, 1]");
    if (max_births_per_step == 0) throw std::invalid_argument("birth.max_births_per_step must be >= 1");
    for (double r : ellipsoid_radii) {
        if (!(r > 0.0)) throw std::invalid_argument("birth.ellipsoid_radii must be > 0");
    }
    if (!(tangential_velocity_steps >= 0.0)) throw std::invalid_argument("birth.tangential_velocity_steps must be >= 0");
    if (!(theta_jitter >= 0.0 && theta_jitter < 1.0)) throw std::invalid_argument("birth.theta_jitter must be in [0, 1)");
}

std::vector<std::size_t> significant_cells(const RadarCube& cube, const BirthParams& params) {
    std::vector<std::size_t> cells;
    for (std::size_t i = 0; i < cube.intensities.size(); ++i) {
        if (cube.intensities[i] > params.z_threshold) cells.push_back(i);
    }
    std::stable_sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
        return cube.intensities[a] > cube.intensities[b];
    });
    return cells;
}

bool ellipsoids_overlap(const MeasurementPoint& a, const MeasurementPoint& b, const std::array<double, 3>& radii) {
    double d2 = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double u = (a[d] - b[d]) / (2.0 * radii[d]);
        d2 += u * u;
    }
    return d2 < 1.0;
}

namespace {

LabeledParticleTrack sample_cell(const RadarCube& cube, std::size_t cell, const SensorModel& sensor,
                                 const BirthParams& params, const MotionParams& motion, std::size_t n, Rng& rng) {
    const CellGrid& g = cube.grid;
    const MeasurementPoint c = cell_center(g, cell);
    const double z = cube.intensities[cell];
    // mu_z = z with |h| = 1.
    const double sigma_rho2 = std::max(0.5 * (z - 2.0 * sensor.sigma_w2), 1e-3 * sensor.sigma_w2);
    const double v_t_std = std::sqrt(std::max(motion.sigma_ax2, motion.sigma_ay2)) *
                           params.tangential_velocity_steps * motion.dt;

    const double r_lo = std::max(c[kRange] - 0.5 * g.range_res, 1e-3 * g.range_res);
    const double r_hi = std::max(c[kRange] + 0.5 * g.range_res, r_lo);
    std::uniform_real_distribution<double> u_r(r_lo, r_hi);
    std::uniform_real_distribution<double> u_v(c[kVelocity] - 0.5 * g.velocity_res, c[kVelocity] + 0.5 * g.velocity_res);
    std::uniform_real_distribution<double> u_a(c[kAzimuth] - 0.5 * g.azimuth_res, c[kAzimuth] + 0.5 * g.azimuth_res);
    std::uniform_real_distribution<double> u_j(1.0 - params.theta_jitter, 1.0 + params.theta_jitter);
    std::normal_distribution<double> n_t(0.0, 1.0);

    LabeledParticleTrack t;
    t.states.resize(n);
    t.weights.assign(n, 1.0 / static_cast<double>(n));
    for (State& s : t.states) {
        const double r = u_r(rng);
        const double vr = u_v(rng);
        const double az = u_a(rng);
        const double vt = v_t_std * n_t(rng);
        const double ca = std::cos(az);
        const double sa = std::sin(az);
        s(kX) = r * ca;
        s(kY) = r * sa;
        s(kXDot) = vr * ca - vt * sa;
        s(kYDot) = vr * sa + vt * ca;
        s(kTheta) = theta_from_reflection_power(sigma_rho2, r, sensor.gain(az)) * u_j(rng);
    }
    return t;
}

} // namespace

std::vector<BirthCandidate> propose_births(const RadarCube& cube, std::span<const MeasurementPoint> existing_regions,
                                           const BirthParams& params, const SensorModel& sensor,
                                           const MotionParams& motion, std::uint32_t k,
                                           std::size_t particles_per_track, Rng& rng) {
    std::vector<BirthCandidate> out;
    for (std::size_t cell : significant_cells(cube, params)) {
        if (out.size() >= params.max_births_per_step) break;
        const MeasurementPoint c = cell_center(cube.grid, cell);
        const auto overlaps = [&](const MeasurementPoint& other) {
            return ellipsoids_overlap(c, other, params.ellipsoid_radii);
        };
        if (std::any_of(existing_regions.begin(), existing_regions.end(), overlaps)) continue;
        if (std::any_of(out.begin(), out.end(), [&](const BirthCandidate& b) { return overlaps(b.center); })) continue;

        BirthCandidate b;
        b.label = Label{k, static_cast<std::uint32_t>(out.size())};
        b.r_birth = params.r_birth_init;
        b.cell = cell;
        b.center = c;
        b.track = sample_cell(cube, cell, sensor, params, motion, particles_per_track, rng);
        b.track.label = b.label;
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace tbd
