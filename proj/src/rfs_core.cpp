#include "tbd/rfs_core.hpp"

#include "tbd/log_math.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tbd {

std::string to_string(const Label& label) {
    return std::to_string(label.birth_time) + ":" + std::to_string(label.birth_index);
}

State LabeledParticleTrack::mean() const {
    State m = State::Zero();
    for (std::size_t j = 0; j < states.size(); ++j) m += weights[j] * states[j];
    return m;
}

double LabeledParticleTrack::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double LabeledParticleTrack::effective_sample_size() const {
    double s2 = 0.0;
    for (double w : weights) s2 += w * w;
    return s2 > 0.0 ? 1.0 / s2 : 0.0;
}

bool Hypothesis::contains(const Label& l) const {
    return std::binary_search(labels.begin(), labels.end(), l);
}

const LabeledParticleTrack& Hypothesis::track(const Label& l) const {
    auto it = std::lower_bound(labels.begin(), labels.end(), l);
    if (it == labels.end() || *it != l) {
        throw std::out_of_range("label " + to_string(l) + " not in hypothesis");
    }
    return *tracks[static_cast<std::size_t>(it - labels.begin())];
}

GlmbDensity GlmbDensity::empty(std::uint32_t time) {
    GlmbDensity d;
    d.time = time;
    d.hypotheses.push_back(Hypothesis{});
    return d;
}

std::vector<Label> GlmbDensity::all_labels() const {
    std::set<Label> out;
    for (const auto& h : hypotheses) out.insert(h.labels.begin(), h.labels.end());
    return {out.begin(), out.end()};
}

double GlmbDensity::weight_sum() const {
    double s = 0.0;
    for (const auto& h : hypotheses) s += std::exp(h.log_weight);
    return s;
}

int distinct_label_indicator(const std::vector<LabeledState>& states) {
    std::set<Label> labels;
    for (const auto& s : states) labels.insert(s.second);
    return labels.size() == states.size() ? 1 : 0;
}

GlmbDensity normalize(GlmbDensity density) {
    std::vector<double> lw;
    lw.reserve(density.hypotheses.size());
    for (const auto& h : density.hypotheses) lw.push_back(h.log_weight);
    const double total = log_sum_exp(lw);
    if (!std::isfinite(total)) {
        throw DegeneratePosteriorError("all hypothesis weights vanished");
    }
    for (auto& h : density.hypotheses) h.log_weight -= total;
    return density;
}

std::vector<double> cardinality_distribution(const GlmbDensity& density) {
    std::size_t max_n = 0;
    for (const auto& h : density.hypotheses) max_n = std::max(max_n, h.cardinality());
    std::vector<double> p(max_n + 1, 0.0);
    for (const auto& h : density.hypotheses) p[h.cardinality()] += std::exp(h.log_weight);
    return p;
}

} // namespace tbd
