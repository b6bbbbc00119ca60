#include "tbd/glmb_filter.hpp"

#include "tbd/log_math.hpp"
#include "tbd/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

namespace tbd {

void FilterParams::validate() const {
    if (!(p_survival > 0.0 && p_survival <= 1.0)) throw std::invalid_argument("filter.p_survival must be in (0, 1]");
    if (!(p_survival_outside_fov >= 0.0 && p_survival_outside_fov <= 1.0)) {
        throw std::invalid_argument("filter.p_survival_outside_fov must be in [0, 1]");
    }
    if (max_hypotheses < 1) throw std::invalid_argument("filter.max_hypotheses must be >= 1");
    if (particles_per_track < 1) throw std::invalid_argument("filter.particles_per_track must be >= 1");
    if (!(resample_fraction >= 0.0 && resample_fraction <= 1.0)) {
        throw std::invalid_argument("filter.resample_fraction must be in [0, 1]");
    }
}

double survival_integral(const LabeledParticleTrack& track, double p_survival) {
    double s = 0.0;
    for (double w : track.weights) s += w * p_survival;
    return s;
}

double survival_integral(const LabeledParticleTrack& track, const SurvivalFunction& p_survival) {
    double s = 0.0;
    for (std::size_t j = 0; j < track.size(); ++j) s += track.weights[j] * p_survival(track.states[j]);
    return s;
}

bool in_field_of_view(const State& state, const CellGrid& grid) {
    const double r = std::hypot(state(kX), state(kY));
    const double az = std::atan2(state(kY), state(kX));
    const double r_lo = grid.range_offset - 0.5 * grid.range_res;
    const double r_hi = r_lo + grid.n_range * grid.range_res;
    const double a_lo = grid.azimuth_offset - 0.5 * grid.azimuth_res;
    const double a_hi = a_lo + grid.n_azimuth * grid.azimuth_res;
    return r >= r_lo && r <= r_hi && az >= a_lo && az <= a_hi;
}

SurvivalFunction field_of_view_survival(const FilterParams& filter, const CellGrid& grid) {
    return [inside = filter.p_survival, outside = filter.p_survival_outside_fov, grid](const State& x) {
        return in_field_of_view(x, grid) ? inside : outside;
    };
}

LabeledParticleTrack predicted_track(const Label& label, const LabeledParticleTrack* prior,
                                     std::span<const BirthCandidate> births, const MotionParams& motion, Rng& rng,
                                     const SurvivalFunction* p_survival) {
    if (prior != nullptr && prior->label == label) {
        LabeledParticleTrack t = *prior;
        if (p_survival != nullptr) {
            const double p_bar = survival_integral(t, *p_survival);
            if (!(p_bar > 0.0)) throw std::logic_error("label " + to_string(label) + " cannot survive");
            for (std::size_t j = 0; j < t.size(); ++j) t.weights[j] *= (*p_survival)(t.states[j]) / p_bar;
        }
        return propagate_particles(std::move(t), motion, rng);
    }
    for (const auto& b : births) {
        if (b.label == label) return b.track;
    }
    throw std::logic_error("label " + to_string(label) + " is neither surviving nor newborn");
}

namespace {

constexpr std::size_t kLikelihoodChunk = 2048;

void evaluate_log_psi(const LabeledParticleTrack& t, const PseudoLikelihood& likelihood, std::vector<double>& out) {
    out.resize(t.size());
    const std::size_t chunks = (t.size() + kLikelihoodChunk - 1) / kLikelihoodChunk;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t lo = c * kLikelihoodChunk;
        const std::size_t hi = std::min(t.size(), lo + kLikelihoodChunk);
        likelihood.log_psi(std::span<const State>(t.states).subspan(lo, hi - lo),
                           std::span<double>(out).subspan(lo, hi - lo));
    });
}

double weighted_log_mean(const LabeledParticleTrack& t, std::span<const double> log_psi) {
    std::vector<double> terms(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) {
        terms[j] = t.weights[j] > 0.0 ? std::log(t.weights[j]) + log_psi[j] : kNegInf;
    }
    return log_sum_exp(terms);
}

} // namespace

double psi_bar(const LabeledParticleTrack& predicted, const PseudoLikelihood& likelihood,
               std::vector<double>* per_particle) {
    std::vector<double> local;
    std::vector<double>& lp = per_particle != nullptr ? *per_particle : local;
    evaluate_log_psi(predicted, likelihood, lp);
    const double v = weighted_log_mean(predicted, lp);
    if (!std::isfinite(v)) {
        throw NumericallyDeadTrackError("psi_bar of label " + to_string(predicted.label) + " is not finite");
    }
    return v;
}

double psi_bar(const LabeledParticleTrack& predicted, const RadarCube& cube, const SensorModel& sensor) {
    return psi_bar(predicted, PseudoLikelihood(cube, sensor));
}

LabeledParticleTrack systematic_resample(const LabeledParticleTrack& track, std::size_t n, Rng& rng) {
    LabeledParticleTrack out;
    out.label = track.label;
    out.states.reserve(n);
    const double total = track.weight_sum();
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double step = total / static_cast<double>(n);
    double u = u01(rng) * step;
    double cum = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (j + 1 < track.size() && cum + track.weights[j] < u) {
            cum += track.weights[j];
            ++j;
        }
        out.states.push_back(track.states[j]);
        u += step;
    }
    out.weights.assign(n, 1.0 / static_cast<double>(n));
    return out;
}

LabeledParticleTrack update_track(LabeledParticleTrack predicted, std::span<const double> log_psi,
                                  double log_psi_bar, std::size_t n, double resample_fraction, Rng& rng) {
    if (!std::isfinite(log_psi_bar)) {
        throw NumericallyDeadTrackError("psi_bar of label " + to_string(predicted.label) + " vanished");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < predicted.size(); ++j) {
        predicted.weights[j] *= std::exp(log_psi[j] - log_psi_bar);
        sum += predicted.weights[j];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        throw NumericallyDeadTrackError("posterior weights of label " + to_string(predicted.label) + " degenerated");
    }
    for (double& w : predicted.weights) w /= sum;
    if (predicted.effective_sample_size() < resample_fraction * static_cast<double>(n) || predicted.size() != n) {
        return systematic_resample(predicted, n, rng);
    }
    return predicted;
}

LabeledParticleTrack update_track(LabeledParticleTrack predicted, const RadarCube& cube, const SensorModel& sensor,
                                  std::size_t n, double resample_fraction, Rng& rng) {
    std::vector<double> lp;
    const double lpb = psi_bar(predicted, PseudoLikelihood(cube, sensor), &lp);
    return update_track(std::move(predicted), lp, lpb, n, resample_fraction, rng);
}

namespace {

double log_or_neg_inf(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

const LabelFactors& factor_of(const FactorTable& factors, const Label& l) {
    auto it = factors.find(l);
    if (it == factors.end()) throw std::invalid_argument("no factors for label " + to_string(l));
    return it->second;
}

} // namespace

double hypothesis_weight(std::span<const Label> prev, std::span<const Label> next, std::span<const Label> births,
                         const FactorTable& factors) {
    const auto in = [](std::span<const Label> s, const Label& l) { return std::find(s.begin(), s.end(), l) != s.end(); };
    for (const Label& l : next) {
        if (!in(prev, l) && !in(births, l)) {
            throw std::invalid_argument("label " + to_string(l) + " in I_next is neither surviving nor newborn");
        }
    }
    double lw = 0.0;
    for (const Label& l : prev) {
        const LabelFactors& f = factor_of(factors, l);
        lw += in(next, l) ? log_or_neg_inf(f.existence) : log_or_neg_inf(1.0 - f.existence);
    }
    for (const Label& l : births) {
        if (in(prev, l)) continue;
        const LabelFactors& f = factor_of(factors, l);
        lw += in(next, l) ? log_or_neg_inf(f.existence) : log_or_neg_inf(1.0 - f.existence);
    }
    for (const Label& l : next) lw += factor_of(factors, l).log_psi_bar;
    return lw;
}

std::vector<std::vector<Label>> merge_groups(const std::vector<std::pair<Label, MeasurementPoint>>& centroids,
                                             const std::array<double, 3>& radii) {
    const std::size_t n = centroids.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (ellipsoids_overlap(centroids[i].second, centroids[j].second, radii)) {
                parent[find(j)] = find(i);
            }
        }
    }
    std::map<std::size_t, std::vector<Label>> comps;
    for (std::size_t i = 0; i < n; ++i) comps[find(i)].push_back(centroids[i].first);
    std::vector<std::vector<Label>> out;
    for (auto& [root, labels] : comps) {
        if (labels.size() < 2) continue;
        std::sort(labels.begin(), labels.end());
        out.push_back(std::move(labels));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CostMatrixRow> build_cost_rows(std::span<const Label> prev, std::span<const Label> births,
                                           const FactorTable& factors,
                                           const std::vector<std::vector<Label>>& groups) {
    std::vector<CostMatrixRow> rows;
    rows.reserve(prev.size() + births.size());
    auto group_of = [&](const Label& l) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            if (std::find(groups[g].begin(), groups[g].end(), l) != groups[g].end()) return static_cast<int>(g);
        }
        return -1;
    };
    auto add = [&](const Label& l, bool newborn) {
        const LabelFactors& f = factor_of(factors, l);
        rows.push_back(CostMatrixRow{l, log_or_neg_inf(f.existence) + f.log_psi_bar,
                                     log_or_neg_inf(1.0 - f.existence), newborn, group_of(l)});
    };
    for (const Label& l : prev) add(l, false);
    for (const Label& l : births) add(l, true);
    return rows;
}

namespace {

double set_log_weight(const std::vector<CostMatrixRow>& rows, const std::vector<char>& alive) {
    double lw = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) lw += alive[i] ? rows[i].log_alive : rows[i].log_dead;
    return lw;
}

bool group_member_alive(const std::vector<CostMatrixRow>& rows, const std::vector<char>& alive, std::size_t i) {
    if (rows[i].merge_group < 0) return false;
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j != i && alive[j] && rows[j].merge_group == rows[i].merge_group) return true;
    }
    return false;
}

} // namespace

std::vector<LabelSetSample> gibbs_truncate(const std::vector<CostMatrixRow>& rows, std::size_t max_sets,
                                           std::size_t iterations, Rng& rng) {
    const std::size_t n = rows.size();
    // Initial state: every surviving label alive, no births; inside a merge
    // group only the member with the strongest survival odds.
    std::vector<char> alive(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].newborn || rows[i].log_alive == kNegInf) continue;
        alive[i] = 1;
        if (rows[i].merge_group < 0) continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (!alive[j] || rows[j].merge_group != rows[i].merge_group) continue;
            const double odds_i = rows[i].log_alive - rows[i].log_dead;
            const double odds_j = rows[j].log_alive - rows[j].log_dead;
            if (odds_i > odds_j) alive[j] = 0; else alive[i] = 0;
            break;
        }
    }

    std::set<std::vector<char>> seen;
    std::vector<std::vector<char>> order;
    auto record = [&] {
        if (order.size() < max_sets && seen.insert(alive).second) order.push_back(alive);
    };
    record();

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (std::size_t it = 0; it < iterations && order.size() < max_sets; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            if (group_member_alive(rows, alive, i)) {
                alive[i] = 0;
                continue;
            }
            const double a = rows[i].log_alive;
            const double d = rows[i].log_dead;
            double p_alive;
            if (a == kNegInf) p_alive = 0.0;
            else if (d == kNegInf) p_alive = 1.0;
            else p_alive = 1.0 / (1.0 + std::exp(d - a));
            alive[i] = u01(rng) < p_alive ? 1 : 0;
        }
        record();
    }

    std::vector<LabelSetSample> out;
    out.reserve(order.size());
    for (const auto& s : order) {
        LabelSetSample sample;
        for (std::size_t i = 0; i < n; ++i) {
            if (s[i]) sample.labels.push_back(rows[i].label);
        }
        std::sort(sample.labels.begin(), sample.labels.end());
        sample.log_weight = set_log_weight(rows, s);
        out.push_back(std::move(sample));
    }
    return out;
}

namespace {

enum Stream : std::uint64_t { kPredict = 1, kBirth = 2, kBirthAdvance = 3, kUpdate = 4, kGibbs = 5 };

std::uint64_t label_key(const Label& l) { return (std::uint64_t{l.birth_time} << 32) | l.birth_index; }

std::optional<MeasurementPoint> centroid(const LabeledParticleTrack& t) {
    try {
        return state_to_measurement(t.mean());
    } catch (const SingularGeometryError&) {
        return std::nullopt;
    }
}

// Working record of one distinct track flowing through a step.
struct TrackWork {
    const LabeledParticleTrack* prior = nullptr;  // nullptr for births
    const BirthCandidate* birth = nullptr;
    std::uint64_t occurrence = 0;
    LabeledParticleTrack predicted;
    std::optional<MeasurementPoint> predicted_centroid;
    LabelFactors factors;
    std::vector<double> log_psi;
    TrackPtr updated;
};

} // namespace

GlmbDensity step(const GlmbDensity& prior, const RadarCube& cube, const RadarCube* birth_cube,
                 const SensorModel& sensor, const MotionParams& motion, const BirthParams& birth,
                 const FilterParams& filter, Rng& rng, StepTrace* trace) {
    const std::uint32_t k = prior.time + 1;
    const std::uint64_t base = rng();
    const std::size_t n_particles = filter.particles_per_track;

    // Distinct prior tracks in first-appearance order.
    std::vector<TrackWork> work;
    std::unordered_map<const LabeledParticleTrack*, std::size_t> work_of;
    std::map<Label, std::uint64_t> occurrences;
    for (const auto& h : prior.hypotheses) {
        for (const auto& t : h.tracks) {
            if (work_of.contains(t.get())) continue;
            work_of.emplace(t.get(), work.size());
            TrackWork w;
            w.prior = t.get();
            w.occurrence = occurrences[t->label]++;
            work.push_back(std::move(w));
        }
    }
    const std::size_t n_prior_tracks = work.size();

    // Births from the previous frame, outside every existing track region.
    std::vector<BirthCandidate> births;
    if (birth_cube != nullptr) {
        std::vector<MeasurementPoint> regions;
        for (std::size_t i = 0; i < n_prior_tracks; ++i) {
            if (auto c = centroid(*work[i].prior)) regions.push_back(*c);
        }
        Rng birth_rng = make_rng(base, {kBirth});
        births = propose_births(*birth_cube, regions, birth, sensor, motion, k, n_particles, birth_rng);
        for (auto& b : births) {
            Rng adv = make_rng(base, {kBirthAdvance, label_key(b.label)});
            b.track = propagate_particles(std::move(b.track), motion, adv);
        }
    }
    std::vector<Label> birth_labels;
    for (const auto& b : births) {
        birth_labels.push_back(b.label);
        TrackWork w;
        w.birth = &b;
        work.push_back(std::move(w));
    }

    // Predict and update every distinct track once; hypotheses share the results.
    const PseudoLikelihood likelihood(cube, sensor);
    const bool constant_survival = filter.p_survival_outside_fov == filter.p_survival;
    const SurvivalFunction p_s = field_of_view_survival(filter, sensor.grid);
    for (std::size_t i = 0; i < work.size(); ++i) {
        TrackWork& w = work[i];
        if (w.prior != nullptr) {
            Rng r = make_rng(base, {kPredict, label_key(w.prior->label), w.occurrence});
            if (constant_survival) {
                w.factors.existence = survival_integral(*w.prior, filter.p_survival);
                w.predicted = predicted_track(w.prior->label, w.prior, {}, motion, r);
            } else {
                w.factors.existence = survival_integral(*w.prior, p_s);
                w.predicted = w.factors.existence > 0.0 ? predicted_track(w.prior->label, w.prior, {}, motion, r, &p_s)
                                                        : predicted_track(w.prior->label, w.prior, {}, motion, r);
            }
        } else {
            Rng unused(0);
            w.predicted = predicted_track(w.birth->label, nullptr, births, motion, unused);
            w.factors.existence = w.birth->r_birth;
        }
        w.predicted_centroid = centroid(w.predicted);
        w.factors.log_psi_bar = psi_bar(w.predicted, likelihood, &w.log_psi);
    }
    parallel_for(work.size(), [&](std::size_t i) {
        TrackWork& w = work[i];
        Rng r = make_rng(base, {kUpdate, label_key(w.predicted.label), w.occurrence, w.prior == nullptr ? 1u : 0u});
        w.updated = std::make_shared<const LabeledParticleTrack>(update_track(
            w.predicted, w.log_psi, w.factors.log_psi_bar, n_particles, filter.resample_fraction, r));
        w.log_psi.clear();
        w.log_psi.shrink_to_fit();
        w.predicted = LabeledParticleTrack{};
    });

    if (trace != nullptr) {
        *trace = StepTrace{};
        trace->birth_labels = birth_labels;
        for (const auto& w : work) trace->factors[w.updated->label] = w.factors;
    }

    // Per-parent Gibbs truncation, weighted exactly.
    std::vector<std::vector<Hypothesis>> children(prior.hypotheses.size());
    std::vector<std::vector<std::vector<Label>>> groups_per_parent(prior.hypotheses.size());
    parallel_for(prior.hypotheses.size(), [&](std::size_t p) {
        const Hypothesis& parent = prior.hypotheses[p];
        FactorTable factors;
        std::map<Label, TrackPtr> updated;
        std::vector<std::pair<Label, MeasurementPoint>> centroids;
        for (std::size_t i = 0; i < parent.labels.size(); ++i) {
            const TrackWork& w = work[work_of.at(parent.tracks[i].get())];
            factors[parent.labels[i]] = w.factors;
            updated[parent.labels[i]] = w.updated;
            if (w.predicted_centroid) centroids.emplace_back(parent.labels[i], *w.predicted_centroid);
        }
        for (std::size_t i = n_prior_tracks; i < work.size(); ++i) {
            factors[work[i].birth->label] = work[i].factors;
            updated[work[i].birth->label] = work[i].updated;
        }
        auto groups = merge_groups(centroids, sensor.illumination_radii);
        const auto rows = build_cost_rows(parent.labels, birth_labels, factors, groups);
        const std::size_t iterations =
            filter.gibbs_iterations > 0 ? filter.gibbs_iterations : 10 * std::max<std::size_t>(rows.size(), 1);
        Rng r = make_rng(base, {kGibbs, p});
        for (auto& s : gibbs_truncate(rows, filter.max_hypotheses, iterations, r)) {
            Hypothesis h;
            h.log_weight = parent.log_weight + hypothesis_weight(parent.labels, s.labels, birth_labels, factors);
            if (h.log_weight == kNegInf) continue;
            h.labels = std::move(s.labels);
            for (const Label& l : h.labels) h.tracks.push_back(updated.at(l));
            h.parent = static_cast<std::int64_t>(p);
            children[p].push_back(std::move(h));
        }
        groups_per_parent[p] = std::move(groups);
    });

    // Pool; children with the same label set and the same track densities merge.
    GlmbDensity post;
    post.time = k;
    std::map<std::vector<const LabeledParticleTrack*>, std::size_t> index;
    std::size_t pooled = 0;
    for (auto& list : children) {
        for (auto& h : list) {
            ++pooled;
            std::vector<const LabeledParticleTrack*> key;
            for (const auto& t : h.tracks) key.push_back(t.get());
            auto [it, inserted] = index.try_emplace(std::move(key), post.hypotheses.size());
            if (inserted) {
                post.hypotheses.push_back(std::move(h));
            } else {
                Hypothesis& existing = post.hypotheses[it->second];
                existing.log_weight = log_add(existing.log_weight, h.log_weight);
            }
        }
    }
    if (trace != nullptr) {
        trace->merge_groups = std::move(groups_per_parent);
        trace->pooled_children = pooled;
    }
    if (post.hypotheses.empty()) throw DegeneratePosteriorError("no hypothesis with non-zero weight");

    post = normalize(std::move(post));
    std::stable_sort(post.hypotheses.begin(), post.hypotheses.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.log_weight > b.log_weight; });
    if (post.hypotheses.size() > filter.max_hypotheses) {
        post.hypotheses.resize(filter.max_hypotheses);
        post = normalize(std::move(post));
    }
    return post;
}

std::vector<TrackEstimate> extract_estimates(const GlmbDensity& density) {
    const auto card = cardinality_distribution(density);
    std::size_t n_star = 0;
    for (std::size_t n = 1; n < card.size(); ++n) {
        if (card[n] > card[n_star]) n_star = n;
    }
    const Hypothesis* best = nullptr;
    for (const auto& h : density.hypotheses) {
        if (h.cardinality() == n_star && (best == nullptr || h.log_weight > best->log_weight)) best = &h;
    }
    std::vector<TrackEstimate> out;
    if (best == nullptr) return out;
    for (std::size_t i = 0; i < best->labels.size(); ++i) {
        out.push_back(TrackEstimate{best->labels[i], best->tracks[i]->mean(), std::exp(best->log_weight)});
    }
    return out;
}

TbdGlmbFilter::TbdGlmbFilter(SensorModel sensor, MotionParams motion, BirthParams birth, FilterParams filter,
                             std::uint64_t seed)
    : sensor_(std::move(sensor)), motion_(motion), birth_(birth), filter_(filter), rng_(seed) {
    sensor_.validate();
    motion_.validate();
    birth_.validate();
    filter_.validate();
}

const GlmbDensity& TbdGlmbFilter::process(const RadarCube& cube) {
    MotionParams motion = motion_;
    if (previous_) {
        const double dt = cube.timestamp - previous_->timestamp;
        if (dt > 0.0) motion.dt = dt;
    }
    density_ = step(density_, cube, previous_ ? &*previous_ : nullptr, sensor_, motion, birth_, filter_, rng_, &trace_);
    previous_ = cube;
    return density_;
}

} // namespace tbd
