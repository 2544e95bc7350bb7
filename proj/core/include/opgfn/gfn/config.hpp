#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace opgfn::gfn {

enum class Criterion { fm, db, tb, subtb };
enum class BackwardMode { uniform, trainable, trainable_kl };
// auto resolves to sorted-neighbors for scalar objectives and pareto-batch otherwise.
enum class Pairing { automatic, sorted_neighbors, all_pairs, pareto_batch };
enum class Preference { none, fixed, dirichlet };

struct LossConfig {
    Criterion criterion = Criterion::tb;
    bool order_preserving = true;
    double lambda_op = 1.0;
    // Weight of the backward-KL regularizer; active only with BackwardMode::trainable_kl.
    double lambda_kl = 1.0;
    double lambda_subtb = 0.9;
    // Reward exponent for targets R(x) = u(x)^beta when order preservation is off.
    double beta = 1.0;
    BackwardMode backward = BackwardMode::uniform;
    Pairing pairing = Pairing::automatic;
    // Sampling-time exploration and temperature; never used inside losses.
    double epsilon = 0.0;
    double temperature = 1.0;
    Preference preference = Preference::none;
    std::vector<double> preference_weights;
    double dirichlet_alpha = 1.5;

    [[nodiscard]] bool kl_active() const { return backward == BackwardMode::trainable_kl && lambda_kl > 0.0; }
    [[nodiscard]] bool trainable_backward() const { return backward != BackwardMode::uniform; }
};

[[nodiscard]] std::string to_string(Criterion c);
[[nodiscard]] std::string to_string(BackwardMode m);
[[nodiscard]] std::string to_string(Pairing p);
[[nodiscard]] std::string to_string(Preference p);
[[nodiscard]] Criterion parse_criterion(std::string const& text);
[[nodiscard]] BackwardMode parse_backward_mode(std::string const& text);
[[nodiscard]] Pairing parse_pairing(std::string const& text);
[[nodiscard]] Preference parse_preference(std::string const& text);

// Pairing after resolving `automatic` for an objective of dimension D.
[[nodiscard]] Pairing resolve_pairing(Pairing p, std::size_t objective_dim);

// Throws ConfigError naming the offending field.
void validate(LossConfig const& config, std::size_t objective_dim);

} // namespace opgfn::gfn
