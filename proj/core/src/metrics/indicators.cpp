#include "opgfn/metrics/indicators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "opgfn/errors.hpp"
#include "opgfn/util/format.hpp"

namespace opgfn::metrics {

namespace {

void require_nonempty(PointSpan a, char const* what) {
    if (a.empty()) { throw ContractViolation(std::string(what) + " must be non-empty"); }
}

double euclidean(env::ObjectiveVector const& a, env::ObjectiveVector const& b) {
    if (a.size() != b.size()) { throw ContractViolation("objective vectors differ in dimension"); }
    double sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) { sq += (a[i] - b[i]) * (a[i] - b[i]); }
    return std::sqrt(sq);
}

// ||max(p - s, 0)||: how far s falls short of p.
double shortfall(env::ObjectiveVector const& p, env::ObjectiveVector const& s) {
    if (p.size() != s.size()) { throw ContractViolation("objective vectors differ in dimension"); }
    double sq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double const d = std::max(p[i] - s[i], 0.0);
        sq += d * d;
    }
    return std::sqrt(sq);
}

template <typename Dist>
double mean_min(PointSpan outer, PointSpan inner, Dist dist) {
    double total = 0.0;
    for (auto const& a : outer) {
        double best = std::numeric_limits<double>::infinity();
        for (auto const& b : inner) { best = std::min(best, dist(a, b)); }
        total += best;
    }
    return total / static_cast<double>(outer.size());
}

} // namespace

double gd(PointSpan s, PointSpan p) {
    require_nonempty(s, "generated set");
    require_nonempty(p, "reference set");
    return mean_min(s, p, euclidean);
}

double igd(PointSpan s, PointSpan p) {
    require_nonempty(s, "generated set");
    require_nonempty(p, "reference set");
    return mean_min(p, s, euclidean);
}

double gd_plus(PointSpan s, PointSpan p) {
    require_nonempty(s, "generated set");
    require_nonempty(p, "reference set");
    return mean_min(s, p, [](auto const& si, auto const& pj) { return shortfall(pj, si); });
}

double igd_plus(PointSpan s, PointSpan p) {
    require_nonempty(s, "generated set");
    require_nonempty(p, "reference set");
    return mean_min(p, s, [](auto const& pj, auto const& si) { return shortfall(pj, si); });
}

double d_h(PointSpan s, PointSpan p) { return std::max(gd(s, p), igd(s, p)); }

namespace {

double hv_recursive(std::vector<env::ObjectiveVector> pts, std::span<double const> ref) {
    std::size_t const d = ref.size();
    if (pts.empty()) { return 0.0; }
    if (d == 1) {
        double best = ref[0];
        for (auto const& p : pts) { best = std::max(best, p[0]); }
        return best - ref[0];
    }
    if (d == 2) {
        std::sort(pts.begin(), pts.end(), [](auto const& a, auto const& b) {
            return a[0] != b[0] ? a[0] > b[0] : a[1] > b[1];
        });
        double area = 0.0;
        double y = ref[1];
        for (auto const& p : pts) {
            if (p[1] > y) {
                area += (p[0] - ref[0]) * (p[1] - y);
                y = p[1];
            }
        }
        return area;
    }
    // Slice along the last coordinate: between consecutive levels the section
    // is the (d-1)-volume of every point at or above the slab.
    std::sort(pts.begin(), pts.end(), [d](auto const& a, auto const& b) { return a[d - 1] > b[d - 1]; });
    double volume = 0.0;
    std::vector<env::ObjectiveVector> section;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        section.emplace_back(pts[k].begin(), pts[k].end() - 1);
        double const next = k + 1 < pts.size() ? pts[k + 1][d - 1] : ref[d - 1];
        double const height = pts[k][d - 1] - next;
        if (height > 0.0) { volume += height * hv_recursive(section, ref.first(d - 1)); }
    }
    return volume;
}

} // namespace

double hypervolume(PointSpan front, std::span<double const> ref) {
    if (ref.empty() || ref.size() > 4) { throw ContractViolation("hypervolume supports 1 to 4 objectives"); }
    for (auto const& p : front) {
        if (p.size() != ref.size()) { throw ContractViolation("hypervolume point and reference differ in dimension"); }
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] < ref[i]) {
                throw ContractViolation("hypervolume point (" + util::join_doubles(p, ", ") +
                                        ") does not dominate the reference point");
            }
        }
    }
    return hv_recursive(std::vector<env::ObjectiveVector>(front.begin(), front.end()), ref);
}

double pc_entropy(PointSpan estimated, PointSpan reference) {
    require_nonempty(reference, "reference set");
    if (estimated.empty()) { return 0.0; }
    std::vector<std::size_t> counts(reference.size(), 0);
    for (auto const& e : estimated) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < reference.size(); ++j) {
            double const d = euclidean(e, reference[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        ++counts[best];
    }
    double const n = static_cast<double>(reference.size());
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) { continue; }
        double const q = static_cast<double>(c) / n;
        h -= q * std::log(q);
    }
    return h;
}

double r2_indicator(PointSpan s, PointSpan weights, std::span<double const> utopia) {
    require_nonempty(s, "generated set");
    require_nonempty(weights, "weight set");
    double total = 0.0;
    for (auto const& w : weights) {
        if (w.size() != utopia.size()) { throw ContractViolation("weight and utopia dimensions differ"); }
        double best = std::numeric_limits<double>::infinity();
        for (auto const& p : s) {
            if (p.size() != utopia.size()) { throw ContractViolation("point and utopia dimensions differ"); }
            double worst = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i) { worst = std::max(worst, w[i] * std::abs(utopia[i] - p[i])); }
            best = std::min(best, worst);
        }
        total += best;
    }
    return total / static_cast<double>(weights.size());
}

Points das_dennis(std::size_t dim, std::size_t divisions) {
    if (dim == 0 || divisions == 0) { throw ContractViolation("Das-Dennis lattice needs dim >= 1 and divisions >= 1"); }
    Points out;
    std::vector<std::size_t> k(dim, 0);
    auto rec = [&](auto&& self, std::size_t pos, std::size_t left) -> void {
        if (pos + 1 == dim) {
            k[pos] = left;
            env::ObjectiveVector w(dim);
            for (std::size_t i = 0; i < dim; ++i) { w[i] = static_cast<double>(k[i]) / static_cast<double>(divisions); }
            out.push_back(std::move(w));
            return;
        }
        for (std::size_t c = 0; c <= left; ++c) {
            k[pos] = c;
            self(self, pos + 1, left - c);
        }
    };
    rec(rec, 0, divisions);
    return out;
}

std::vector<std::pair<std::string, double>> IndicatorReport::items() const {
    return {{"gd", gd},
            {"igd", igd},
            {"gd_plus", gd_plus},
            {"igd_plus", igd_plus},
            {"d_h", d_h},
            {"hv", hv},
            {"pc_ent", pc_ent},
            {"r2", r2},
            {"n_candidates", static_cast<double>(n_candidates)},
            {"n_estimated_front", static_cast<double>(n_estimated_front)},
            {"n_reference_front", static_cast<double>(n_reference_front)}};
}

IndicatorReport evaluate_indicators(PointSpan candidates, PointSpan reference, IndicatorOptions const& options) {
    require_nonempty(candidates, "candidate set");
    require_nonempty(reference, "reference set");
    auto const dim = candidates.front().size();
    auto const est = pareto_front(candidates).points;
    IndicatorReport r;
    r.n_candidates = candidates.size();
    r.n_estimated_front = est.size();
    r.n_reference_front = reference.size();
    r.gd = gd(candidates, reference);
    r.igd = igd(candidates, reference);
    r.d_h = std::max(r.gd, r.igd);
    r.gd_plus = gd_plus(est, reference);
    r.igd_plus = igd_plus(est, reference);
    r.pc_ent = pc_entropy(est, reference);
    std::vector<double> ref = options.hv_ref.empty() ? std::vector<double>(dim, 0.0) : options.hv_ref;
    r.hv = dim <= 4 ? hypervolume(est, ref) : std::numeric_limits<double>::quiet_NaN();
    auto const weights = das_dennis(dim, options.r2_divisions);
    std::vector<double> const utopia(dim, 1.0);
    r.r2 = r2_indicator(est, weights, utopia);
    return r;
}

} // namespace opgfn::metrics
