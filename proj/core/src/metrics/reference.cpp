#include "opgfn/metrics/reference.hpp"

#include "opgfn/errors.hpp"

namespace opgfn::metrics {

Points discretized_upper_faces(std::size_t dim, std::size_t resolution) {
    if (dim == 0 || resolution < 2) { throw ConfigError("front discretization needs dim >= 1 and resolution >= 2"); }
    Points out;
    std::vector<std::size_t> k(dim, 0);
    double const step = 1.0 / static_cast<double>(resolution - 1);
    while (true) {
        bool on_face = false;
        for (auto v : k) { on_face = on_face || v + 1 == resolution; }
        if (on_face) {
            env::ObjectiveVector p(dim);
            for (std::size_t i = 0; i < dim; ++i) {
                p[i] = k[i] + 1 == resolution ? 1.0 : static_cast<double>(k[i]) * step;
            }
            out.push_back(std::move(p));
        }
        std::size_t i = dim;
        while (i > 0 && ++k[i - 1] == resolution) { k[--i] = 0; }
        if (i == 0) { break; }
    }
    return out;
}

FrontSet reference_front(env::Environment const& env, std::size_t resolution) {
    if (env.enumerable()) {
        Points all;
        env.for_each_terminal([&](env::State const& x) { all.push_back(env.objective(x)); });
        return pareto_front(all, FrontProvenance::true_front);
    }
    return FrontSet{discretized_upper_faces(env.objective_dim(), resolution),
                    FrontProvenance::reference_discretization};
}

} // namespace opgfn::metrics
