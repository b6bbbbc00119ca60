#include "tbd/radar_sim.hpp"

#include "tbd/parallel.hpp"

#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace tbd {

void TruthTarget::validate() const {
    if (spawn_frame >= despawn_frame) throw std::invalid_argument("truth target: spawn must precede despawn");
    if (trajectory.empty()) throw std::invalid_argument("truth target: empty trajectory");
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        if (!(trajectory[i].t > trajectory[i - 1].t)) throw std::invalid_argument("truth target: waypoints not time-sorted");
    }
    if (!(rcs_power >= 0.0)) throw std::invalid_argument("truth target: rcs_power must be >= 0");
}

void SimConfig::validate() const {
    sensor.validate();
    if (!(frame_period > 0.0)) throw std::invalid_argument("sim.frame_period must be > 0");
    if (!(occlusion_attenuation >= 0.0 && occlusion_attenuation <= 1.0)) {
        throw std::invalid_argument("sim.occlusion_attenuation must be in [0, 1]");
    }
    if (!(truth_jitter >= 0.0)) throw std::invalid_argument("sim.truth_jitter must be >= 0");
}

namespace {

State interpolate(const std::vector<Waypoint>& wp, double t) {
    State s = State::Zero();
    if (wp.size() == 1) {
        s(kX) = wp[0].x;
        s(kY) = wp[0].y;
        return s;
    }
    std::size_t seg = 0;
    while (seg + 2 < wp.size() && t >= wp[seg + 1].t) ++seg;
    const Waypoint& a = wp[seg];
    const Waypoint& b = wp[seg + 1];
    const double span = b.t - a.t;
    const double vx = (b.x - a.x) / span;
    const double vy = (b.y - a.y) / span;
    s(kX) = a.x + vx * (t - a.t);
    s(kY) = a.y + vy * (t - a.t);
    s(kXDot) = vx;
    s(kYDot) = vy;
    return s;
}

} // namespace

void mark_occlusions(std::vector<TruthState>& states, const std::vector<TruthTarget>& targets, const CellGrid& grid) {
    const double half_cell = 0.5 * grid.azimuth_res;
    for (auto& s : states) {
        s.occluded = false;
        const auto* def = [&]() -> const TruthTarget* {
            for (const auto& t : targets) {
                if (t.id == s.id) return &t;
            }
            return nullptr;
        }();
        if (def != nullptr && !def->occludable) continue;
        const MeasurementPoint m = state_to_measurement(s.state);
        for (const auto& o : states) {
            if (o.id == s.id) continue;
            const MeasurementPoint mo = state_to_measurement(o.state);
            if (mo[kRange] < m[kRange] && std::abs(mo[kAzimuth] - m[kAzimuth]) <= half_cell) {
                s.occluded = true;
                break;
            }
        }
    }
}

std::vector<TruthState> truth_states(const SimConfig& config, const std::vector<TruthTarget>& targets,
                                     std::uint32_t k) {
    std::vector<TruthState> out;
    const double t = k * config.frame_period;
    for (const auto& target : targets) {
        if (k < target.spawn_frame || k >= target.despawn_frame) continue;
        TruthState ts;
        ts.id = target.id;
        ts.state = interpolate(target.trajectory, t);
        if (config.truth_jitter > 0.0) {
            Rng r = make_rng(config.seed, {0x7275746875ULL, static_cast<std::uint64_t>(target.id), k});
            std::normal_distribution<double> n(0.0, config.truth_jitter);
            ts.state(kX) += n(r);
            ts.state(kY) += n(r);
        }
        const MeasurementPoint m = state_to_measurement(ts.state);
        ts.state(kTheta) = theta_from_reflection_power(target.rcs_power, m[kRange], config.sensor.gain(m[kAzimuth]));
        out.push_back(ts);
    }
    mark_occlusions(out, targets, config.sensor.grid);
    return out;
}

RadarCube render_cube(const std::vector<TruthState>& truth, const SensorModel& sensor, const SimConfig& config,
                      double timestamp, Rng& rng) {
    const std::size_t cells = sensor.grid.cell_count();
    std::normal_distribution<double> n01;
    const double sw = std::sqrt(sensor.sigma_w2);
    std::vector<std::complex<double>> field(cells);
    for (auto& c : field) {
        const double re = n01(rng);
        const double im = n01(rng);
        c = {sw * re, sw * im};
    }
    for (const auto& ts : truth) {
        const double sr = std::sqrt(reflection_power(ts.state, sensor));
        const double re = n01(rng);
        const double im = n01(rng);
        std::complex<double> rho{sr * re, sr * im};
        if (ts.occluded) rho *= std::sqrt(config.occlusion_attenuation);
        for (std::size_t cell : illumination_region(ts.state, sensor)) {
            field[cell] += rho * psf_value(ts.state, cell, sensor);
        }
    }
    RadarCube cube{sensor.grid, std::vector<double>(cells), timestamp};
    for (std::size_t i = 0; i < cells; ++i) cube.intensities[i] = std::norm(field[i]);
    return cube;
}

Scenario paper_scenario() {
    Scenario sc;
    SimConfig& cfg = sc.config;
    cfg.sensor = SensorModel::for_grid(CellGrid{}, 2e-6);
    cfg.sensor.gain = GainProfile::constant(1e6);
    for (auto& w : cfg.sensor.psf_widths) w *= 0.6;
    cfg.frame_period = 0.07;
    cfg.n_frames = 200;
    cfg.occlusion_attenuation = 0.25;
    cfg.seed = 1;

    // Piecewise-constant acceleration profile sampled every 0.25 s.
    auto profile = [](double x0, double t_acc0, double t_acc1, double v_end, auto lateral) {
        std::vector<Waypoint> wp;
        const double a = v_end / (t_acc1 - t_acc0);
        for (int i = 0; i <= 64; ++i) {
            const double t = 0.25 * i;
            double x;
            double v;
            if (t <= t_acc0) {
                x = x0;
                v = 0.0;
            } else if (t <= t_acc1) {
                const double dt = t - t_acc0;
                x = x0 + 0.5 * a * dt * dt;
                v = a * dt;
            } else {
                x = x0 + 0.5 * v_end * (t_acc1 - t_acc0) + v_end * (t - t_acc1);
                v = v_end;
            }
            wp.push_back({t, x, lateral(t), v});
        }
        return wp;
    };

    TruthTarget near;
    near.id = 1;
    near.spawn_frame = 0;
    near.despawn_frame = cfg.n_frames;
    near.rcs_power = 5e-5;
    near.occludable = true;
    near.trajectory = profile(20.0, 1.0, 3.0, 0.5, [](double t) {
        if (t <= 3.5) return 1.0;
        if (t >= 5.5) return 0.0;
        return 1.0 - (t - 3.5) / 2.0;
    });

    TruthTarget far;
    far.id = 2;
    far.spawn_frame = 0;
    far.despawn_frame = cfg.n_frames;
    far.rcs_power = 5e-5;
    far.occludable = true;
    far.trajectory = profile(30.0, 2.0, 5.0, 0.8, [](double) { return 0.0; });

    sc.targets = {near, far};
    return sc;
}

SimulationResult simulate(const Scenario& scenario) {
    scenario.config.validate();
    for (const auto& t : scenario.targets) t.validate();
    const auto n = scenario.config.n_frames;
    SimulationResult res;
    res.cubes.resize(n);
    res.truth.resize(n);
    parallel_for(n, [&](std::size_t k) {
        const auto frame = static_cast<std::uint32_t>(k);
        res.truth[k] = truth_states(scenario.config, scenario.targets, frame);
        Rng rng = make_rng(scenario.config.seed, {0x63756265ULL, frame});
        res.cubes[k] = render_cube(res.truth[k], scenario.config.sensor, scenario.config,
                                   frame * scenario.config.frame_period, rng);
    });
    return res;
}

void write_truth_csv(const std::filesystem::path& path, const std::vector<std::vector<TruthState>>& truth) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "k,id,x,y,xdot,ydot,theta\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < truth.size(); ++k) {
        for (const auto& t : truth[k]) {
            out << k << ',' << t.id << ',' << t.state(kX) << ',' << t.state(kY) << ',' << t.state(kXDot) << ','
                << t.state(kYDot) << ',' << t.state(kTheta) << '\n';
        }
    }
}

} // namespace tbd
