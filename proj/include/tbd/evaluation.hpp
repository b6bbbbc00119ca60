#pragma once

#include "tbd/rfs_core.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

namespace tbd {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// Minimum-cost assignment of every row to a distinct column (rows <= cols).
/// Returns the column chosen for each row.
std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost);

/// OSPA distance of order p with cutoff c. Two empty sets are at distance 0.
double ospa(std::span<const Point2> estimates, std::span<const Point2> truth, double cutoff = 5.0,
            double order = 1.0);

/// One output row of the tracker.
struct TrackRecord {
    std::uint32_t k = 0;
    Label label;
    double x = 0.0;
    double y = 0.0;
    double xdot = 0.0;
    double ydot = 0.0;
    double theta = 0.0;
    double hypothesis_weight = 0.0;
};

struct TruthRecord {
    std::uint32_t k = 0;
    int id = 0;
    double x = 0.0;
    double y = 0.0;
    double xdot = 0.0;
    double ydot = 0.0;
    double theta = 0.0;
};

/// Per truth id: share of its gated nearest-neighbour associations that carry
/// the modal label; averaged over truth ids. 0 when nothing associates.
double label_consistency(const std::vector<TrackRecord>& records, const std::vector<TruthRecord>& truth,
                         double gate = 2.0);

/// The per-truth-id shares behind label_consistency.
std::map<int, double> label_consistency_per_target(const std::vector<TrackRecord>& records,
                                                   const std::vector<TruthRecord>& truth, double gate = 2.0);

struct FrameMetrics {
    std::uint32_t k = 0;
    double ospa = 0.0;
    std::size_t n_estimates = 0;
    std::size_t n_truth = 0;
    long cardinality_error = 0;  ///< n_estimates - n_truth
};

std::vector<FrameMetrics> evaluate_frames(const std::vector<TrackRecord>& records,
                                          const std::vector<TruthRecord>& truth, std::uint32_t n_frames,
                                          double cutoff = 5.0, double order = 1.0);

/// Header: k,label_birth_time,label_index,x,y,xdot,ydot,theta,hypothesis_weight
void write_track_csv(const std::filesystem::path& path, const std::vector<TrackRecord>& records);
std::vector<TrackRecord> read_track_csv(const std::filesystem::path& path);

/// Header: k,id,x,y,xdot,ydot,theta
std::vector<TruthRecord> read_truth_csv(const std::filesystem::path& path);

/// Header: k,ospa,n_estimates,n_truth,cardinality_error,label_consistency
/// (the last column repeats the run's final label consistency).
void write_metrics_csv(const std::filesystem::path& path, const std::vector<FrameMetrics>& metrics,
                       double label_consistency);

} // namespace tbd
