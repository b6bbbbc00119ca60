#include "tbd/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tbd {

std::vector<std::size_t> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    // Hungarian method with potentials, 1-based internally.
    const std::size_t n = cost.size();
    if (n == 0) return {};
    const std::size_t m = cost[0].size();
    if (m < n) throw std::invalid_argument("assignment needs rows <= columns");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> row_to_col(n);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

double ospa(std::span<const Point2> estimates, std::span<const Point2> truth, double cutoff, double order) {
    if (!(cutoff > 0.0) || !(order >= 1.0)) throw std::invalid_argument("ospa needs cutoff > 0 and order >= 1");
    std::span<const Point2> small = estimates.size() <= truth.size() ? estimates : truth;
    std::span<const Point2> large = estimates.size() <= truth.size() ? truth : estimates;
    const std::size_t m = small.size();
    const std::size_t n = large.size();
    if (n == 0) return 0.0;
    const double cp = std::pow(cutoff, order);
    double total = 0.0;
    if (m > 0) {
        std::vector<std::vector<double>> cost(m, std::vector<double>(n));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                const double d = std::hypot(small[i].x - large[j].x, small[i].y - large[j].y);
                cost[i][j] = std::pow(std::min(d, cutoff), order);
            }
        }
        const auto assign = min_cost_assignment(cost);
        for (std::size_t i = 0; i < m; ++i) total += cost[i][assign[i]];
    }
    total += cp * static_cast<double>(n - m);
    return std::pow(total / static_cast<double>(n), 1.0 / order);
}

std::map<int, double> label_consistency_per_target(const std::vector<TrackRecord>& records,
                                                   const std::vector<TruthRecord>& truth, double gate) {
    std::map<std::uint32_t, std::vector<const TrackRecord*>> by_frame;
    for (const auto& r : records) by_frame[r.k].push_back(&r);
    std::map<int, std::map<Label, std::size_t>> counts;
    std::map<int, std::size_t> associated;
    for (const auto& t : truth) {
        counts[t.id];
        auto it = by_frame.find(t.k);
        if (it == by_frame.end()) continue;
        const TrackRecord* best = nullptr;
        double best_d = gate;
        for (const auto* r : it->second) {
            const double d = std::hypot(r->x - t.x, r->y - t.y);
            if (d <= best_d) {
                best_d = d;
                best = r;
            }
        }
        if (best == nullptr) continue;
        ++counts[t.id][best->label];
        ++associated[t.id];
    }
    std::map<int, double> out;
    for (const auto& [id, labels] : counts) {
        std::size_t modal = 0;
        for (const auto& [l, c] : labels) modal = std::max(modal, c);
        const std::size_t n = associated[id];
        out[id] = n > 0 ? static_cast<double>(modal) / static_cast<double>(n) : 0.0;
    }
    return out;
}

double label_consistency(const std::vector<TrackRecord>& records, const std::vector<TruthRecord>& truth,
                         double gate) {
    const auto shares = label_consistency_per_target(records, truth, gate);
    if (shares.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [id, share] : shares) sum += share;
    return sum / static_cast<double>(shares.size());
}

std::vector<FrameMetrics> evaluate_frames(const std::vector<TrackRecord>& records,
                                          const std::vector<TruthRecord>& truth, std::uint32_t n_frames,
                                          double cutoff, double order) {
    std::vector<std::vector<Point2>> est(n_frames), tru(n_frames);
    for (const auto& r : records) {
        if (r.k < n_frames) est[r.k].push_back({r.x, r.y});
    }
    for (const auto& t : truth) {
        if (t.k < n_frames) tru[t.k].push_back({t.x, t.y});
    }
    std::vector<FrameMetrics> out(n_frames);
    for (std::uint32_t k = 0; k < n_frames; ++k) {
        out[k].k = k;
        out[k].ospa = ospa(est[k], tru[k], cutoff, order);
        out[k].n_estimates = est[k].size();
        out[k].n_truth = tru[k].size();
        out[k].cardinality_error = static_cast<long>(est[k].size()) - static_cast<long>(tru[k].size());
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::ifstream open_csv(const std::filesystem::path& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != expected_header) {
        throw std::runtime_error(path.string() + ": unexpected header '" + header + "'");
    }
    return in;
}

double to_double(const std::string& s, const std::filesystem::path& path, std::size_t line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
    }
}

constexpr const char* kTrackHeader = "k,label_birth_time,label_index,x,y,xdot,ydot,theta,hypothesis_weight";
constexpr const char* kTruthHeader = "k,id,x,y,xdot,ydot,theta";

} // namespace

void write_track_csv(const std::filesystem::path& path, const std::vector<TrackRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << kTrackHeader << '\n' << std::setprecision(17);
    for (const auto& r : records) {
        out << r.k << ',' << r.label.birth_time << ',' << r.label.birth_index << ',' << r.x << ',' << r.y << ','
            << r.xdot << ',' << r.ydot << ',' << r.theta << ',' << r.hypothesis_weight << '\n';
    }
}

std::vector<TrackRecord> read_track_csv(const std::filesystem::path& path) {
    auto in = open_csv(path, kTrackHeader);
    std::vector<TrackRecord> out;
    std::string line;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 9) throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": expected 9 columns");
        TrackRecord r;
        r.k = static_cast<std::uint32_t>(to_double(c[0], path, n));
        r.label = Label{static_cast<std::uint32_t>(to_double(c[1], path, n)),
                        static_cast<std::uint32_t>(to_double(c[2], path, n))};
        r.x = to_double(c[3], path, n);
        r.y = to_double(c[4], path, n);
        r.xdot = to_double(c[5], path, n);
        r.ydot = to_double(c[6], path, n);
        r.theta = to_double(c[7], path, n);
        r.hypothesis_weight = to_double(c[8], path, n);
        out.push_back(r);
    }
    return out;
}

std::vector<TruthRecord> read_truth_csv(const std::filesystem::path& path) {
    auto in = open_csv(path, kTruthHeader);
    std::vector<TruthRecord> out;
    std::string line;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 7) throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": expected 7 columns");
        TruthRecord t;
        t.k = static_cast<std::uint32_t>(to_double(c[0], path, n));
        t.id = static_cast<int>(to_double(c[1], path, n));
        t.x = to_double(c[2], path, n);
        t.y = to_double(c[3], path, n);
        t.xdot = to_double(c[4], path, n);
        t.ydot = to_double(c[5], path, n);
        t.theta = to_double(c[6], path, n);
        out.push_back(t);
    }
    return out;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<FrameMetrics>& metrics,
                       double label_consistency) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "k,ospa,n_estimates,n_truth,cardinality_error,label_consistency\n" << std::setprecision(17);
    for (const auto& m : metrics) {
        out << m.k << ',' << m.ospa << ',' << m.n_estimates << ',' << m.n_truth << ',' << m.cardinality_error << ','
            << label_consistency << '\n';
    }
}

} // namespace tbd
