#include "opgfn/ad/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace opgfn::ad {

GradCheckResult gradcheck(ParamStore& params, LossBuilder const& build, std::span<std::size_t const> coords, double h) {
    Tape tape(params);
    auto const grad = tape.backward(build(tape));
    double diff = 0.0;
    double fd_sq = 0.0;
    double ad_sq = 0.0;
    for (auto c : coords) {
        double const saved = params[c];
        params[c] = saved + h;
        Tape plus(params);
        double const up = build(plus).value();
        params[c] = saved - h;
        Tape minus(params);
        double const down = build(minus).value();
        params[c] = saved;
        double const fd = (up - down) / (2.0 * h);
        diff += (fd - grad[c]) * (fd - grad[c]);
        fd_sq += fd * fd;
        ad_sq += grad[c] * grad[c];
    }
    GradCheckResult r;
    r.fd_norm = std::sqrt(fd_sq);
    r.ad_norm = std::sqrt(ad_sq);
    double const d = std::sqrt(diff);
    r.relative_error = r.fd_norm > 0.0 ? d / r.fd_norm : d;
    return r;
}

std::vector<std::size_t> random_coordinates(std::size_t n, std::size_t count, std::uint64_t seed) {
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(std::min(n, count));
    std::sort(all.begin(), all.end());
    return all;
}

} // namespace opgfn::ad
