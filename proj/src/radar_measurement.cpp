#include "tbd/radar_measurement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tbd {

std::uint32_t CellGrid::size(int dim) const {
    switch (dim) {
        case kRange: return n_range;
        case kVelocity: return n_velocity;
        default: return n_azimuth;
    }
}

double CellGrid::res(int dim) const {
    switch (dim) {
        case kRange: return range_res;
        case kVelocity: return velocity_res;
        default: return azimuth_res;
    }
}

double CellGrid::offset(int dim) const {
    switch (dim) {
        case kRange: return range_offset;
        case kVelocity: return velocity_offset;
        default: return azimuth_offset;
    }
}

std::array<std::uint32_t, 3> CellGrid::unflatten(std::size_t flat) const {
    const auto ia = static_cast<std::uint32_t>(flat % n_azimuth);
    flat /= n_azimuth;
    const auto iv = static_cast<std::uint32_t>(flat % n_velocity);
    const auto ir = static_cast<std::uint32_t>(flat / n_velocity);
    return {ir, iv, ia};
}

void CellGrid::validate() const {
    if (n_range == 0 || n_velocity == 0 || n_azimuth == 0) {
        throw std::invalid_argument("grid: cell counts must be positive");
    }
    if (!(range_res > 0.0)) throw std::invalid_argument("grid.range_res must be > 0");
    if (!(velocity_res > 0.0)) throw std::invalid_argument("grid.velocity_res must be > 0");
    if (!(azimuth_res > 0.0)) throw std::invalid_argument("grid.azimuth_res must be > 0");
}

MeasurementPoint cell_center(const CellGrid& grid, std::size_t flat) {
    const auto idx = grid.unflatten(flat);
    return {grid.center(kRange, idx[0]), grid.center(kVelocity, idx[1]), grid.center(kAzimuth, idx[2])};
}

RadarCube RadarCube::zeros(const CellGrid& grid, double timestamp) {
    return RadarCube{grid, std::vector<double>(grid.cell_count(), 0.0), timestamp};
}

void RadarCube::validate() const {
    grid.validate();
    if (intensities.size() != grid.cell_count()) {
        throw std::invalid_argument("cube: intensity count " + std::to_string(intensities.size()) +
                                    " does not match grid cell count " + std::to_string(grid.cell_count()));
    }
    for (double z : intensities) {
        if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("cube: intensities must be finite and >= 0");
    }
}

GainProfile GainProfile::constant(double gain) {
    return GainProfile({{0.0, gain}});
}

GainProfile::GainProfile(std::vector<std::pair<double, double>> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw std::invalid_argument("gain profile needs at least one node");
    if (!std::is_sorted(nodes_.begin(), nodes_.end(), [](auto& a, auto& b) { return a.first < b.first; })) {
        throw std::invalid_argument("gain profile nodes must be sorted by azimuth");
    }
    for (const auto& [az, g] : nodes_) {
        if (!(g >= 0.0) || !std::isfinite(g) || !std::isfinite(az)) {
            throw std::invalid_argument("gain profile values must be finite and >= 0");
        }
    }
}

double GainProfile::operator()(double azimuth) const {
    if (nodes_.size() == 1 || azimuth <= nodes_.front().first) return nodes_.front().second;
    if (azimuth >= nodes_.back().first) return nodes_.back().second;
    auto hi = std::upper_bound(nodes_.begin(), nodes_.end(), azimuth,
                               [](double a, const auto& n) { return a < n.first; });
    auto lo = hi - 1;
    const double t = (azimuth - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

SensorModel SensorModel::for_grid(const CellGrid& grid, double sigma_w2) {
    SensorModel s;
    s.grid = grid;
    s.sigma_w2 = sigma_w2;
    s.psf_widths = {grid.range_res, grid.velocity_res, grid.azimuth_res};
    s.illumination_radii = {2.0 * grid.range_res, 2.0 * grid.velocity_res, 2.0 * grid.azimuth_res};
    return s;
}

void SensorModel::validate() const {
    grid.validate();
    if (!(sigma_w2 > 0.0)) throw std::invalid_argument("sensor.sigma_w2 must be > 0");
    for (int d = 0; d < 3; ++d) {
        if (!(psf_widths[d] > 0.0)) throw std::invalid_argument("sensor.psf_widths must be > 0");
        if (!(illumination_radii[d] > 0.0)) throw std::invalid_argument("sensor.illumination_radii must be > 0");
    }
}

MeasurementPoint state_to_measurement(const State& state, const SensorPose& pose) {
    const double c = std::cos(pose.heading);
    const double s = std::sin(pose.heading);
    const double dx = state(kX) - pose.x;
    const double dy = state(kY) - pose.y;
    const double x = c * dx + s * dy;
    const double y = -s * dx + c * dy;
    const double vx = c * state(kXDot) + s * state(kYDot);
    const double vy = -s * state(kXDot) + c * state(kYDot);
    const double r = std::hypot(x, y);
    if (r == 0.0) throw SingularGeometryError("target at the sensor origin");
    return {r, (x * vx + y * vy) / r, std::atan2(y, x)};
}

namespace {

// Normalized squared ellipsoid distance and squared-offset profile exponent.
bool inside_region(const MeasurementPoint& c, const MeasurementPoint& m, const std::array<double, 3>& radii) {
    double d2 = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double u = (c[d] - m[d]) / radii[d];
        d2 += u * u;
    }
    return d2 <= 1.0;
}

} // namespace

double psf_value(const State& state, std::size_t cell, const SensorModel& sensor) {
    const MeasurementPoint m = state_to_measurement(state);
    const MeasurementPoint c = cell_center(sensor.grid, cell);
    if (!inside_region(c, m, sensor.illumination_radii)) return 0.0;
    double e = 0.0;
    for (int d = 0; d < 3; ++d) {
        const double off = c[d] - m[d];
        e += off * off / (2.0 * sensor.psf_widths[d] * sensor.psf_widths[d]);
    }
    return std::exp(-e);
}

namespace {

// Index window [lo, hi] of cells along dim whose centers lie within +-radius of v.
std::pair<std::int64_t, std::int64_t> window(const CellGrid& g, int dim, double v, double radius) {
    const double res = g.res(dim);
    const double off = g.offset(dim);
    auto lo = static_cast<std::int64_t>(std::ceil((v - radius - off) / res));
    auto hi = static_cast<std::int64_t>(std::floor((v + radius - off) / res));
    lo = std::max<std::int64_t>(lo, 0);
    hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(g.size(dim)) - 1);
    return {lo, hi};
}

} // namespace

std::vector<std::size_t> illumination_region(const State& state, const SensorModel& sensor) {
    const MeasurementPoint m = state_to_measurement(state);
    const CellGrid& g = sensor.grid;
    std::vector<std::size_t> out;
    const auto [r0, r1] = window(g, kRange, m[kRange], sensor.illumination_radii[kRange]);
    const auto [v0, v1] = window(g, kVelocity, m[kVelocity], sensor.illumination_radii[kVelocity]);
    const auto [a0, a1] = window(g, kAzimuth, m[kAzimuth], sensor.illumination_radii[kAzimuth]);
    for (auto ir = r0; ir <= r1; ++ir) {
        for (auto iv = v0; iv <= v1; ++iv) {
            for (auto ia = a0; ia <= a1; ++ia) {
                const MeasurementPoint c{g.center(kRange, ir), g.center(kVelocity, iv), g.center(kAzimuth, ia)};
                if (inside_region(c, m, sensor.illumination_radii)) {
                    out.push_back(g.flat_index(static_cast<std::uint32_t>(ir), static_cast<std::uint32_t>(iv),
                                               static_cast<std::uint32_t>(ia)));
                }
            }
        }
    }
    return out;
}

double reflection_power(const State& state, const SensorModel& sensor) {
    const MeasurementPoint m = state_to_measurement(state);
    const double g = sensor.gain(m[kAzimuth]);
    if (!(g > 0.0)) throw OutOfBeamError("antenna gain is zero at the target azimuth");
    const double r2 = m[kRange] * m[kRange];
    return state(kTheta) * r2 * r2 / (g * g);
}

double theta_from_reflection_power(double sigma_rho2, double range, double gain) {
    const double r2 = range * range;
    return sigma_rho2 * gain * gain / (r2 * r2);
}

double likelihood_ratio(double z, const State& state, std::size_t cell, const SensorModel& sensor) {
    const double h = psf_value(state, cell, sensor);
    if (h == 0.0) return 1.0;
    const double s = reflection_power(state, sensor) * h * h;
    if (s <= 0.0) return 1.0;
    const double varsigma = s / sensor.sigma_w2;
    const double mu = 2.0 * sensor.sigma_w2 + 2.0 * s;
    return std::exp(z * varsigma / mu) / (1.0 + varsigma);
}

double target_pseudolikelihood(const State& state, const RadarCube& cube, const SensorModel& sensor) {
    return PseudoLikelihood(cube, sensor).log_psi(state);
}

PseudoLikelihood::PseudoLikelihood(const RadarCube& cube, const SensorModel& sensor)
    : cube_(cube), sensor_(sensor) {
    if (!(cube.grid == sensor.grid)) throw std::invalid_argument("cube grid does not match the sensor grid");
    for (int d = 0; d < 3; ++d) {
        inv_radius_[d] = 1.0 / sensor.illumination_radii[d];
        inv_two_width2_[d] = 1.0 / (2.0 * sensor.psf_widths[d] * sensor.psf_widths[d]);
    }
}

double PseudoLikelihood::log_psi(const State& state) const {
    const MeasurementPoint m = state_to_measurement(state);
    const CellGrid& g = sensor_.grid;
    const auto [r0, r1] = window(g, kRange, m[kRange], sensor_.illumination_radii[kRange]);
    const auto [v0, v1] = window(g, kVelocity, m[kVelocity], sensor_.illumination_radii[kVelocity]);
    const auto [a0, a1] = window(g, kAzimuth, m[kAzimuth], sensor_.illumination_radii[kAzimuth]);
    if (r0 > r1 || v0 > v1 || a0 > a1) return 0.0;

    const double gain = sensor_.gain(m[kAzimuth]);
    if (!(gain > 0.0)) throw OutOfBeamError("antenna gain is zero at the target azimuth");
    const double r2 = m[kRange] * m[kRange];
    const double sigma_rho2 = state(kTheta) * r2 * r2 / (gain * gain);
    if (sigma_rho2 <= 0.0) return 0.0;

    // Per-dimension normalized ellipsoid offsets and |h|^2 factors; |h|^2 is
    // separable so the squared profile is exp(-2 * sum off^2 / (2 w^2)).
    constexpr int kMaxWindow = 64;
    std::array<std::array<double, kMaxWindow>, 3> u2{};
    std::array<std::array<double, kMaxWindow>, 3> h2{};
    const std::array<std::pair<std::int64_t, std::int64_t>, 3> win{{{r0, r1}, {v0, v1}, {a0, a1}}};
    for (int d = 0; d < 3; ++d) {
        if (win[d].second - win[d].first + 1 > kMaxWindow) {
            throw std::invalid_argument("illumination radius spans too many cells");
        }
        for (auto i = win[d].first; i <= win[d].second; ++i) {
            const double off = g.center(d, i) - m[d];
            const auto k = static_cast<std::size_t>(i - win[d].first);
            const double u = off * inv_radius_[d];
            u2[d][k] = u * u;
            h2[d][k] = std::exp(-2.0 * off * off * inv_two_width2_[d]);
        }
    }

    const double sw2 = sensor_.sigma_w2;
    const double* z = cube_.intensities.data();
    double acc = 0.0;
    for (auto ir = r0; ir <= r1; ++ir) {
        const auto kr = static_cast<std::size_t>(ir - r0);
        for (auto iv = v0; iv <= v1; ++iv) {
            const auto kv = static_cast<std::size_t>(iv - v0);
            const double urv = u2[0][kr] + u2[1][kv];
            if (urv > 1.0) continue;
            const double hrv = sigma_rho2 * h2[0][kr] * h2[1][kv];
            const std::size_t base = (static_cast<std::size_t>(ir) * g.n_velocity + static_cast<std::size_t>(iv)) *
                                     g.n_azimuth;
            for (auto ia = a0; ia <= a1; ++ia) {
                const auto ka = static_cast<std::size_t>(ia - a0);
                if (urv + u2[2][ka] > 1.0) continue;
                acc += log_likelihood_ratio(z[base + static_cast<std::size_t>(ia)], hrv * h2[2][ka], sw2);
            }
        }
    }
    return acc;
}

void PseudoLikelihood::log_psi(std::span<const State> states, std::span<double> out) const {
    for (std::size_t j = 0; j < states.size(); ++j) out[j] = log_psi(states[j]);
}

} // namespace tbd
