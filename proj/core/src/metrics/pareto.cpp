#include "opgfn/metrics/pareto.hpp"

#include <algorithm>
#include <numeric>

namespace opgfn::metrics {

std::string to_string(FrontProvenance p) {
    switch (p) {
    case FrontProvenance::true_front: return "true-front";
    case FrontProvenance::estimated: return "estimated";
    case FrontProvenance::reference_discretization: return "reference-discretization";
    }
    return "?";
}

std::vector<std::size_t> pareto_indices(std::span<env::ObjectiveVector const> points) {
    // Candidates sorted by descending coordinate sum: a point can only be
    // strictly dominated by one with a strictly larger sum, so each point is
    // compared against the current front only.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto sum = [&](std::size_t i) { return std::accumulate(points[i].begin(), points[i].end(), 0.0); };
    std::vector<double> sums(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) { sums[i] = sum(i); }
    // Lexicographic tie-break covers dominating pairs whose sums round equal.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (sums[a] != sums[b]) { return sums[a] > sums[b]; }
        return points[a] > points[b];
    });
    std::vector<std::size_t> front;
    for (auto i : order) {
        bool dominated = false;
        for (auto j : front) {
            if (env::strictly_dominated(points[i], points[j])) {
                dominated = true;
                break;
            }
        }
        if (!dominated) { front.push_back(i); }
    }
    std::sort(front.begin(), front.end());
    return front;
}

FrontSet pareto_front(std::span<env::ObjectiveVector const> points, FrontProvenance provenance) {
    FrontSet out;
    out.provenance = provenance;
    for (auto i : pareto_indices(points)) { out.points.push_back(points[i]); }
    return out;
}

} // namespace opgfn::metrics
