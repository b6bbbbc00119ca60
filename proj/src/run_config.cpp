#include "tbd/run_config.hpp"

#include "tbd/radar_sim.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

namespace tbd {

namespace pt = boost::property_tree;

RunConfig::RunConfig() {
    const Scenario sc = paper_scenario();
    sensor = sc.config.sensor;
    birth.ellipsoid_radii = sensor.illumination_radii;
    birth.max_births_per_step = 1;
    motion.dt = sc.config.frame_period;
    frame_period = sc.config.frame_period;
    n_frames = sc.config.n_frames;
    occlusion_attenuation = sc.config.occlusion_attenuation;
}

void RunConfig::validate() const {
    try {
        filter.validate();
        birth.validate();
        motion.validate();
        sensor.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (scenario != "paper") throw ConfigError("sim.scenario must be 'paper'");
    if (!(occlusion_attenuation >= 0.0 && occlusion_attenuation <= 1.0)) {
        throw ConfigError("sim.occlusion_attenuation must be in [0, 1]");
    }
    if (!(frame_period > 0.0)) throw ConfigError("sim.frame_period must be > 0");
    if (n_frames == 0) throw ConfigError("sim.n_frames must be >= 1");
    if (!(truth_jitter >= 0.0)) throw ConfigError("sim.truth_jitter must be >= 0");
    if (!(ospa_cutoff > 0.0)) throw ConfigError("eval.ospa_cutoff must be > 0");
    if (!(ospa_order >= 1.0)) throw ConfigError("eval.ospa_order must be >= 1");
    if (!(association_gate > 0.0)) throw ConfigError("eval.association_gate must be > 0");
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

template <typename T>
std::string fmt_int(T v) {
    return std::to_string(v);
}

std::string fmt_gain(const GainProfile& g) {
    std::string out;
    for (const auto& [az, gain] : g.nodes()) {
        if (!out.empty()) out += ' ';
        out += fmt(az) + ':' + fmt(gain);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    }
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        const unsigned long long d = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
    }
}

GainProfile parse_gain(const std::string& key, const std::string& v) {
    std::vector<std::pair<double, double>> nodes;
    std::istringstream is(v);
    std::string tok;
    while (is >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) {
            nodes.emplace_back(0.0, parse_double(key, tok));
        } else {
            nodes.emplace_back(parse_double(key, tok.substr(0, colon)), parse_double(key, tok.substr(colon + 1)));
        }
    }
    try {
        return GainProfile(std::move(nodes));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

// One configurable field: how to print it and how to set it.
struct Field {
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string& key, const std::string&)> set;
};

#define TBD_DOUBLE(path, member)                                                                  \
    {path, Field{[](const RunConfig& c) { return fmt(c.member); },                                \
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.member = parse_double(k, v); }}}
#define TBD_UINT(path, member, type)                                                               \
    {path, Field{[](const RunConfig& c) { return fmt_int(c.member); },                             \
                 [](RunConfig& c, const std::string& k, const std::string& v) {                    \
                     c.member = static_cast<type>(parse_uint(k, v));                               \
                 }}}

const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        TBD_UINT("run.seed", seed, std::uint64_t),
        TBD_UINT("run.frames", frames, std::uint32_t),
        TBD_DOUBLE("filter.p_survival", filter.p_survival),
        TBD_DOUBLE("filter.p_survival_outside_fov", filter.p_survival_outside_fov),
        TBD_UINT("filter.max_hypotheses", filter.max_hypotheses, std::size_t),
        TBD_UINT("filter.particles_per_track", filter.particles_per_track, std::size_t),
        TBD_UINT("filter.gibbs_iterations", filter.gibbs_iterations, std::size_t),
        TBD_DOUBLE("filter.resample_fraction", filter.resample_fraction),
        TBD_DOUBLE("birth.z_threshold", birth.z_threshold),
        TBD_DOUBLE("birth.r_birth", birth.r_birth_init),
        TBD_UINT("birth.max_births_per_step", birth.max_births_per_step, std::uint32_t),
        TBD_DOUBLE("birth.radius_range", birth.ellipsoid_radii[0]),
        TBD_DOUBLE("birth.radius_velocity", birth.ellipsoid_radii[1]),
        TBD_DOUBLE("birth.radius_azimuth", birth.ellipsoid_radii[2]),
        TBD_DOUBLE("birth.tangential_velocity_steps", birth.tangential_velocity_steps),
        TBD_DOUBLE("birth.theta_jitter", birth.theta_jitter),
        TBD_DOUBLE("motion.dt", motion.dt),
        TBD_DOUBLE("motion.sigma_ax2", motion.sigma_ax2),
        TBD_DOUBLE("motion.sigma_ay2", motion.sigma_ay2),
        TBD_DOUBLE("motion.sigma_theta_dot2", motion.sigma_theta_dot2),
        TBD_DOUBLE("sensor.sigma_w2", sensor.sigma_w2),
        TBD_UINT("sensor.n_range", sensor.grid.n_range, std::uint32_t),
        TBD_UINT("sensor.n_velocity", sensor.grid.n_velocity, std::uint32_t),
        TBD_UINT("sensor.n_azimuth", sensor.grid.n_azimuth, std::uint32_t),
        TBD_DOUBLE("sensor.range_res", sensor.grid.range_res),
        TBD_DOUBLE("sensor.velocity_res", sensor.grid.velocity_res),
        TBD_DOUBLE("sensor.azimuth_res", sensor.grid.azimuth_res),
        TBD_DOUBLE("sensor.range_offset", sensor.grid.range_offset),
        TBD_DOUBLE("sensor.velocity_offset", sensor.grid.velocity_offset),
        TBD_DOUBLE("sensor.azimuth_offset", sensor.grid.azimuth_offset),
        TBD_DOUBLE("sensor.psf_width_range", sensor.psf_widths[0]),
        TBD_DOUBLE("sensor.psf_width_velocity", sensor.psf_widths[1]),
        TBD_DOUBLE("sensor.psf_width_azimuth", sensor.psf_widths[2]),
        TBD_DOUBLE("sensor.radius_range", sensor.illumination_radii[0]),
        TBD_DOUBLE("sensor.radius_velocity", sensor.illumination_radii[1]),
        TBD_DOUBLE("sensor.radius_azimuth", sensor.illumination_radii[2]),
        {"sensor.gain", Field{[](const RunConfig& c) { return fmt_gain(c.sensor.gain); },
                              [](RunConfig& c, const std::string& k, const std::string& v) {
                                  c.sensor.gain = parse_gain(k, v);
                              }}},
        {"sim.scenario", Field{[](const RunConfig& c) { return c.scenario; },
                               [](RunConfig& c, const std::string&, const std::string& v) { c.scenario = v; }}},
        TBD_DOUBLE("sim.occlusion_attenuation", occlusion_attenuation),
        TBD_DOUBLE("sim.frame_period", frame_period),
        TBD_UINT("sim.n_frames", n_frames, std::uint32_t),
        TBD_DOUBLE("sim.truth_jitter", truth_jitter),
        TBD_DOUBLE("eval.ospa_cutoff", ospa_cutoff),
        TBD_DOUBLE("eval.ospa_order", ospa_order),
        TBD_DOUBLE("eval.association_gate", association_gate),
    };
    return table;
}

#undef TBD_DOUBLE
#undef TBD_UINT

} // namespace

RunConfig parse_run_config(std::istream& in, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    std::map<std::string, const Field*> by_key;
    for (const auto& [k, f] : fields()) by_key.emplace(k, &f);

    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ConfigError(source + ": key '" + section + "' outside of a section");
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            auto it = by_key.find(full);
            if (it == by_key.end()) throw ConfigError(source + ": unknown key '" + full + "'");
            it->second->set(cfg, full, value.data());
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_run_config(in, path.string());
}

std::string serialize_run_config(const RunConfig& config) {
    std::ostringstream out;
    std::string current;
    for (const auto& [key, field] : fields()) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);
        if (section != current) {
            if (!current.empty()) out << '\n';
            out << '[' << section << "]\n";
            current = section;
        }
        out << key.substr(dot + 1) << " = " << field.get(config) << '\n';
    }
    return out.str();
}

} // namespace tbd
