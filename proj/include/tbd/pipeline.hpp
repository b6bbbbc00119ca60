#pragma once

#include "tbd/evaluation.hpp"
#include "tbd/radar_sim.hpp"
#include "tbd/run_config.hpp"

#include <filesystem>
#include <vector>

namespace tbd {

/// Scenario described by a run configuration.
Scenario scenario_from_config(const RunConfig& config);

/// Writes <out_dir>/cubes.bin and <out_dir>/truth.csv.
void run_simulate(const RunConfig& config, const std::filesystem::path& out_dir);

struct TrackRunSummary {
    std::vector<std::size_t> map_cardinality;
    std::vector<double> mean_cardinality;
    std::vector<std::size_t> hypothesis_count;
    std::vector<std::size_t> label_count;
    std::vector<double> frame_seconds;
    double total_seconds = 0.0;
};

/// Filters a cube stream and returns the MAP estimates per frame.
std::vector<TrackRecord> track_cubes(const RunConfig& config, const std::vector<RadarCube>& cubes,
                                     TrackRunSummary* summary = nullptr);

/// Writes the track CSV to out and a JSON summary next to it (<out>.summary.json).
void run_track(const RunConfig& config, const std::filesystem::path& cubes, const std::filesystem::path& out);

/// Writes the per-frame metrics CSV; returns the label consistency.
double run_eval(const std::filesystem::path& tracks, const std::filesystem::path& truth,
                const std::filesystem::path& out, double cutoff = 5.0, double order = 1.0, double gate = 2.0,
                std::uint32_t n_frames = 0);

/// simulate, track and eval into out_dir.
void run_all(const RunConfig& config, const std::filesystem::path& out_dir);

std::filesystem::path summary_path(const std::filesystem::path& tracks_csv);

} // namespace tbd
