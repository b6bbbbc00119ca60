#include "tbd/cube_io.hpp"
#include "tbd/pipeline.hpp"
#include "tbd/run_config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

tbd::RunConfig load(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::uint32_t> frames) {
    tbd::RunConfig cfg = path.empty() ? tbd::RunConfig{} : tbd::load_run_config(path);
    if (seed) cfg.seed = *seed;
    if (frames) cfg.frames = *frames;
    cfg.validate();
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Track-before-detect delta-GLMB tracker for radar cubes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string cubes;
    std::string out;
    std::string tracks;
    std::string truth;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> frames;
    double cutoff = 5.0;
    double order = 1.0;
    double gate = 2.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Override the configured RNG seed");
        sub->add_option("--frames", frames, "Process only the first n frames");
    };

    auto* simulate = app.add_subcommand("simulate", "Render the canned scenario to cubes.bin and truth.csv");
    simulate->add_option("--config", config_path, "Run configuration (INI)")->check(CLI::ExistingFile);
    simulate->add_option("--out-dir", out_dir, "Output directory")->required();
    add_common(simulate);

    auto* track = app.add_subcommand("track", "Run the filter over a cube file");
    track->add_option("--config", config_path, "Run configuration (INI)")->check(CLI::ExistingFile);
    track->add_option("--cubes", cubes, "Cube file")->required();
    track->add_option("--out", out, "Track CSV")->required();
    add_common(track);

    auto* eval = app.add_subcommand("eval", "Score tracks against truth");
    eval->add_option("--tracks", tracks, "Track CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", truth, "Truth CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", out, "Metrics CSV")->required();
    eval->add_option("--cutoff", cutoff, "OSPA cutoff (m)");
    eval->add_option("--order", order, "OSPA order");
    eval->add_option("--gate", gate, "Association gate for label consistency (m)");
    eval->add_option("--frames", frames, "Number of frames to score");

    auto* all = app.add_subcommand("all", "simulate, track and eval");
    all->add_option("--config", config_path, "Run configuration (INI)")->check(CLI::ExistingFile);
    all->add_option("--out-dir", out_dir, "Output directory")->required();
    add_common(all);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            tbd::run_simulate(load(config_path, seed, frames), out_dir);
        } else if (track->parsed()) {
            tbd::run_track(load(config_path, seed, frames), cubes, out);
        } else if (eval->parsed()) {
            const double lc = tbd::run_eval(tracks, truth, out, cutoff, order, gate, frames.value_or(0));
            std::cout << "label_consistency " << lc << '\n';
        } else if (all->parsed()) {
            tbd::run_all(load(config_path, seed, frames), out_dir);
        }
    } catch (const tbd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const tbd::CubeFormatError& e) {
        std::cerr << "cube error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
