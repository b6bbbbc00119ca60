#pragma once

#include "tbd/adaptive_birth.hpp"
#include "tbd/motion_model.hpp"
#include "tbd/radar_measurement.hpp"
#include "tbd/rfs_core.hpp"
#include "tbd/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace tbd {

struct FilterParams {
    double p_survival = 0.99;
    /// Survival probability of a particle outside the range/azimuth extent of
    /// the grid. Equal to p_survival gives a state-independent p_S.
    double p_survival_outside_fov = 0.05;
    std::size_t max_hypotheses = 200;
    std::size_t particles_per_track = 15000;
    /// Gibbs sweeps per parent hypothesis; 0 means 10 x number of cost rows.
    std::size_t gibbs_iterations = 0;
    /// Resample when ESS < fraction * particle count.
    double resample_fraction = 0.5;

    void validate() const;
    bool operator==(const FilterParams&) const = default;
};

class NumericallyDeadTrackError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using SurvivalFunction = std::function<double(const State&)>;

/// True when the state's range and azimuth fall inside the grid's cell extent.
bool in_field_of_view(const State& state, const CellGrid& grid);

/// p_S(x): p_survival inside the field of view, p_survival_outside_fov outside.
SurvivalFunction field_of_view_survival(const FilterParams& filter, const CellGrid& grid);

/// <p, p_S>: expected survival probability under the particle cloud.
double survival_integral(const LabeledParticleTrack& track, double p_survival);
double survival_integral(const LabeledParticleTrack& track, const SurvivalFunction& p_survival);

/// Predicted density of label. A surviving label (prior != nullptr) is
/// reweighted by p_S / p_bar_S and propagated; a newborn label takes the
/// matching birth candidate's cloud. Throws std::logic_error otherwise.
LabeledParticleTrack predicted_track(const Label& label, const LabeledParticleTrack* prior,
                                     std::span<const BirthCandidate> births, const MotionParams& motion, Rng& rng,
                                     const SurvivalFunction* p_survival = nullptr);

/// log <p, psi_z>. When per_particle is given it receives log psi_z of every particle.
double psi_bar(const LabeledParticleTrack& predicted, const PseudoLikelihood& likelihood,
               std::vector<double>* per_particle = nullptr);
double psi_bar(const LabeledParticleTrack& predicted, const RadarCube& cube, const SensorModel& sensor);

/// Systematic resampling to n equally weighted particles.
LabeledParticleTrack systematic_resample(const LabeledParticleTrack& track, std::size_t n, Rng& rng);

/// Bayes update p psi / psi_bar from precomputed per-particle log psi, then
/// systematic resampling to n particles when ESS < resample_fraction * n.
LabeledParticleTrack update_track(LabeledParticleTrack predicted, std::span<const double> log_psi,
                                  double log_psi_bar, std::size_t n, double resample_fraction, Rng& rng);
LabeledParticleTrack update_track(LabeledParticleTrack predicted, const RadarCube& cube, const SensorModel& sensor,
                                  std::size_t n, double resample_fraction, Rng& rng);

/// Per-label factors entering the hypothesis weight.
struct LabelFactors {
    /// p_bar_S for a surviving label, r_B for a birth label.
    double existence = 0.0;
    double log_psi_bar = 0.0;
};

using FactorTable = std::map<Label, LabelFactors>;

/// log omega_z^{(I_prev, I_next)}: death, survival, non-birth, birth and psi_bar
/// factors. Throws std::invalid_argument if I_next is not inside I_prev u births.
double hypothesis_weight(std::span<const Label> prev, std::span<const Label> next, std::span<const Label> births,
                         const FactorTable& factors);

/// Two-branch Gibbs row of one label.
struct CostMatrixRow {
    Label label;
    double log_alive = 0.0;  ///< log(p_bar_S psi_bar) or log(r_B psi_bar)
    double log_dead = 0.0;   ///< log(1 - p_bar_S) or log(1 - r_B)
    bool newborn = false;
    int merge_group = -1;    ///< rows sharing a group id are mutually exclusive
};

/// Connected components (size >= 2) of the pairwise-overlap graph of the
/// given measurement-space centroids.
std::vector<std::vector<Label>> merge_groups(const std::vector<std::pair<Label, MeasurementPoint>>& centroids,
                                             const std::array<double, 3>& radii);

std::vector<CostMatrixRow> build_cost_rows(std::span<const Label> prev, std::span<const Label> births,
                                           const FactorTable& factors,
                                           const std::vector<std::vector<Label>>& groups);

struct LabelSetSample {
    std::vector<Label> labels;  ///< sorted
    double log_weight = 0.0;    ///< exact log omega_z of the set
};

/// Discovers up to max_sets distinct label sets with a per-label Gibbs chain
/// started at all-survive/no-birth. Sets are weighted exactly, not by visits.
std::vector<LabelSetSample> gibbs_truncate(const std::vector<CostMatrixRow>& rows, std::size_t max_sets,
                                           std::size_t iterations, Rng& rng);

/// Optional diagnostics of one recursion step.
struct StepTrace {
    std::vector<Label> birth_labels;
    /// Factors of every predicted track, keyed by label.
    FactorTable factors;
    /// Merge groups per parent hypothesis.
    std::vector<std::vector<std::vector<Label>>> merge_groups;
    std::size_t pooled_children = 0;
};

/// One joint prediction-update step at time prior.time + 1. Births are proposed
/// from birth_cube (the previous frame) and advanced one step; nullptr disables
/// birth. dt of the motion model is used as given.
GlmbDensity step(const GlmbDensity& prior, const RadarCube& cube, const RadarCube* birth_cube,
                 const SensorModel& sensor, const MotionParams& motion, const BirthParams& birth,
                 const FilterParams& filter, Rng& rng, StepTrace* trace = nullptr);

struct TrackEstimate {
    Label label;
    State mean;
    double hypothesis_weight = 0.0;
};

/// MAP-cardinality estimate: highest-weight hypothesis of the most probable
/// cardinality (ties to the smaller one), with particle-mean states.
std::vector<TrackEstimate> extract_estimates(const GlmbDensity& density);

/// Runs the recursion over a cube stream.
class TbdGlmbFilter {
public:
    TbdGlmbFilter(SensorModel sensor, MotionParams motion, BirthParams birth, FilterParams filter,
                  std::uint64_t seed);

    /// Processes one frame. dt is taken from the timestamp difference when positive.
    const GlmbDensity& process(const RadarCube& cube);

    [[nodiscard]] const GlmbDensity& density() const { return density_; }
    [[nodiscard]] std::vector<TrackEstimate> estimates() const { return extract_estimates(density_); }
    [[nodiscard]] const StepTrace& last_trace() const { return trace_; }

private:
    SensorModel sensor_;
    MotionParams motion_;
    BirthParams birth_;
    FilterParams filter_;
    Rng rng_;
    GlmbDensity density_ = GlmbDensity::empty();
    std::optional<RadarCube> previous_;
    StepTrace trace_;
};

} // namespace tbd
