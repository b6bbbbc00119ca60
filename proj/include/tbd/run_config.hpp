#pragma once

#include "tbd/adaptive_birth.hpp"
#include "tbd/glmb_filter.hpp"
#include "tbd/motion_model.hpp"
#include "tbd/radar_measurement.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace tbd {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a simulate/track/eval run needs. Defaults are the published
/// tuning of the two-car experiment on the default 64 x 32 x 16 grid.
struct RunConfig {
    std::uint64_t seed = 1;
    std::uint32_t frames = 0;  ///< 0 = all

    FilterParams filter;
    BirthParams birth;
    MotionParams motion;
    SensorModel sensor;

    std::string scenario = "paper";
    double occlusion_attenuation = 0.25;
    double frame_period = 0.07;
    std::uint32_t n_frames = 200;
    double truth_jitter = 0.0;

    double ospa_cutoff = 5.0;
    double ospa_order = 1.0;
    double association_gate = 2.0;

    RunConfig();

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

/// INI-style text: [section] headers and key = value lines; '#' or ';'
/// start comments. Unknown sections or keys are errors.
RunConfig parse_run_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);
std::string serialize_run_config(const RunConfig& config);

} // namespace tbd
