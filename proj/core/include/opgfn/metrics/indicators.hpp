#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opgfn/metrics/pareto.hpp"

namespace opgfn::metrics {

using PointSpan = std::span<env::ObjectiveVector const>;

// Generated set S against reference set P. Distances are Euclidean; the
// plus variants measure ||max(p - s, 0)||.
[[nodiscard]] double gd(PointSpan s, PointSpan p);
[[nodiscard]] double igd(PointSpan s, PointSpan p);
[[nodiscard]] double gd_plus(PointSpan s, PointSpan p);
[[nodiscard]] double igd_plus(PointSpan s, PointSpan p);
// max(GD, IGD).
[[nodiscard]] double d_h(PointSpan s, PointSpan p);

// Volume dominated by the front and bounded below by `ref` (maximization).
// Every point must weakly dominate the reference; D <= 4.
[[nodiscard]] double hypervolume(PointSpan front, std::span<double const> ref);

// Entropy of the histogram of estimated points assigned to their nearest
// reference point (ties to the lowest index), normalized by |P|.
[[nodiscard]] double pc_entropy(PointSpan estimated, PointSpan reference);

// (1/|L|) sum_l min_s max_i l_i |z_i - s_i|.
[[nodiscard]] double r2_indicator(PointSpan s, PointSpan weights, std::span<double const> utopia);

// Simplex-lattice weight vectors with `divisions` steps per axis.
[[nodiscard]] Points das_dennis(std::size_t dim, std::size_t divisions);

struct IndicatorReport {
    double gd = 0.0;
    double igd = 0.0;
    double gd_plus = 0.0;
    double igd_plus = 0.0;
    double d_h = 0.0;
    double hv = 0.0;
    double pc_ent = 0.0;
    double r2 = 0.0;
    std::size_t n_candidates = 0;
    std::size_t n_estimated_front = 0;
    std::size_t n_reference_front = 0;

    // Flat key=value pairs, in a fixed order.
    [[nodiscard]] std::vector<std::pair<std::string, double>> items() const;
};

struct IndicatorOptions {
    std::vector<double> hv_ref;  // defaults to the origin
    std::size_t r2_divisions = 10;
};

// GD, IGD and d_H measure all candidates S; GD+, IGD+, HV, R2 and PC-ent
// measure the estimated front P' of S. HV and R2 need no reference front.
[[nodiscard]] IndicatorReport evaluate_indicators(PointSpan candidates, PointSpan reference,
                                                  IndicatorOptions const& options);

} // namespace opgfn::metrics
