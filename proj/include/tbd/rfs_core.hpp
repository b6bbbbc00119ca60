#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tbd {

/// Single-target state [x, xdot, y, ydot, theta] in the sensor frame.
/// theta is the range/gain corrected reflection power coefficient.
using State = Eigen::Matrix<double, 5, 1>;

enum StateIndex : int { kX = 0, kXDot = 1, kY = 2, kYDot = 3, kTheta = 4 };

/// Track label (birth time, index among targets born at that step).
/// Ordered lexicographically.
struct Label {
    std::uint32_t birth_time = 0;
    std::uint32_t birth_index = 0;

    auto operator<=>(const Label&) const = default;
};

std::string to_string(const Label& label);

/// Labeled particle approximation of p(., l).
struct LabeledParticleTrack {
    Label label;
    std::vector<State> states;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return states.size(); }
    [[nodiscard]] State mean() const;
    [[nodiscard]] double weight_sum() const;
    [[nodiscard]] double effective_sample_size() const;
};

using TrackPtr = std::shared_ptr<const LabeledParticleTrack>;

/// One label set I with its weight. tracks[i] is p^{(I)}(., labels[i]);
/// labels are kept sorted and distinct.
struct Hypothesis {
    std::vector<Label> labels;
    std::vector<TrackPtr> tracks;
    double log_weight = 0.0;
    /// Index of the parent hypothesis in the previous posterior, -1 for none.
    std::int64_t parent = -1;

    [[nodiscard]] std::size_t cardinality() const { return labels.size(); }
    [[nodiscard]] bool contains(const Label& l) const;
    /// Track for label l; throws std::out_of_range if l is not in the set.
    [[nodiscard]] const LabeledParticleTrack& track(const Label& l) const;
};

/// delta-GLMB density: weighted mixture of label-set hypotheses.
struct GlmbDensity {
    std::uint32_t time = 0;
    std::vector<Hypothesis> hypotheses;

    /// The posterior that certainly contains no target.
    static GlmbDensity empty(std::uint32_t time = 0);

    [[nodiscard]] const LabeledParticleTrack& track(std::size_t hypothesis, const Label& l) const {
        return hypotheses.at(hypothesis).track(l);
    }
    /// Union of labels over all hypotheses, sorted.
    [[nodiscard]] std::vector<Label> all_labels() const;
    [[nodiscard]] double weight_sum() const;
};

class DegeneratePosteriorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using LabeledState = std::pair<State, Label>;

/// 1 iff all labels in the list are distinct.
int distinct_label_indicator(const std::vector<LabeledState>& states);

/// prod_{x in X} h(x), with h^{empty} = 1.
template <typename F, typename Range>
double multi_target_exponential(F&& h, const Range& states) {
    double prod = 1.0;
    for (const auto& s : states) prod *= h(s);
    return prod;
}

/// Rescales the hypothesis weights to sum to one (log-sum-exp).
/// Throws DegeneratePosteriorError if every weight is zero.
GlmbDensity normalize(GlmbDensity density);

/// P(|X| = n) for n = 0..max cardinality.
std::vector<double> cardinality_distribution(const GlmbDensity& density);

} // namespace tbd
