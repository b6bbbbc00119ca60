#include "tbd/pipeline.hpp"

#include "tbd/cube_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>

namespace tbd {

Scenario scenario_from_config(const RunConfig& config) {
    config.validate();
    Scenario sc = paper_scenario();
    sc.config.sensor = config.sensor;
    sc.config.occlusion_attenuation = config.occlusion_attenuation;
    sc.config.frame_period = config.frame_period;
    sc.config.n_frames = config.frames > 0 ? std::min(config.frames, config.n_frames) : config.n_frames;
    sc.config.truth_jitter = config.truth_jitter;
    sc.config.seed = config.seed;
    for (auto& t : sc.targets) t.despawn_frame = std::min(t.despawn_frame, std::max(sc.config.n_frames, 1u));
    return sc;
}

void run_simulate(const RunConfig& config, const std::filesystem::path& out_dir) {
    const Scenario sc = scenario_from_config(config);
    std::filesystem::create_directories(out_dir);
    const SimulationResult res = simulate(sc);
    write_cube_file(out_dir / "cubes.bin", res.cubes);
    write_truth_csv(out_dir / "truth.csv", res.truth);
}

std::vector<TrackRecord> track_cubes(const RunConfig& config, const std::vector<RadarCube>& cubes,
                                     TrackRunSummary* summary) {
    config.validate();
    TbdGlmbFilter filter(config.sensor, config.motion, config.birth, config.filter, config.seed);
    std::vector<TrackRecord> records;
    const std::size_t n = config.frames > 0 ? std::min<std::size_t>(config.frames, cubes.size()) : cubes.size();
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < n; ++k) {
        if (!(cubes[k].grid == config.sensor.grid)) {
            throw std::runtime_error("cube " + std::to_string(k) + " grid does not match the configured sensor grid");
        }
        const auto t0 = std::chrono::steady_clock::now();
        const GlmbDensity& post = filter.process(cubes[k]);
        for (const auto& e : extract_estimates(post)) {
            records.push_back(TrackRecord{static_cast<std::uint32_t>(k), e.label, e.mean(kX), e.mean(kY),
                                          e.mean(kXDot), e.mean(kYDot), e.mean(kTheta), e.hypothesis_weight});
        }
        if (summary != nullptr) {
            const auto card = cardinality_distribution(post);
            double mean = 0.0;
            std::size_t map = 0;
            for (std::size_t c = 0; c < card.size(); ++c) {
                mean += static_cast<double>(c) * card[c];
                if (card[c] > card[map]) map = c;
            }
            summary->map_cardinality.push_back(map);
            summary->mean_cardinality.push_back(mean);
            summary->hypothesis_count.push_back(post.hypotheses.size());
            summary->label_count.push_back(post.all_labels().size());
            summary->frame_seconds.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        }
    }
    if (summary != nullptr) {
        summary->total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return records;
}

std::filesystem::path summary_path(const std::filesystem::path& tracks_csv) {
    return std::filesystem::path(tracks_csv.string() + ".summary.json");
}

void run_track(const RunConfig& config, const std::filesystem::path& cubes, const std::filesystem::path& out) {
    const auto stream = read_cube_file(cubes);
    if (stream.empty()) throw CubeFormatError("cube file " + cubes.string() + " holds no frames");
    TrackRunSummary summary;
    const auto records = track_cubes(config, stream, &summary);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_track_csv(out, records);

    nlohmann::json j;
    j["frames"] = summary.map_cardinality.size();
    j["seed"] = config.seed;
    j["map_cardinality"] = summary.map_cardinality;
    j["mean_cardinality"] = summary.mean_cardinality;
    j["hypothesis_count"] = summary.hypothesis_count;
    j["label_count"] = summary.label_count;
    j["wall_time"] = {{"total_seconds", summary.total_seconds}, {"frame_seconds", summary.frame_seconds}};
    std::ofstream js(summary_path(out));
    js << j.dump(2) << '\n';
}

double run_eval(const std::filesystem::path& tracks, const std::filesystem::path& truth,
                const std::filesystem::path& out, double cutoff, double order, double gate, std::uint32_t n_frames) {
    const auto records = read_track_csv(tracks);
    const auto truth_records = read_truth_csv(truth);
    if (n_frames == 0) {
        for (const auto& r : records) n_frames = std::max(n_frames, r.k + 1);
        for (const auto& t : truth_records) n_frames = std::max(n_frames, t.k + 1);
    }
    const auto metrics = evaluate_frames(records, truth_records, n_frames, cutoff, order);
    const double lc = label_consistency(records, truth_records, gate);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    write_metrics_csv(out, metrics, lc);
    return lc;
}

void run_all(const RunConfig& config, const std::filesystem::path& out_dir) {
    run_simulate(config, out_dir);
    run_track(config, out_dir / "cubes.bin", out_dir / "tracks.csv");
    run_eval(out_dir / "tracks.csv", out_dir / "truth.csv", out_dir / "metrics.csv", config.ospa_cutoff,
             config.ospa_order, config.association_gate, scenario_from_config(config).config.n_frames);
}

} // namespace tbd
