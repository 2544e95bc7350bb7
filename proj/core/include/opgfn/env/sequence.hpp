#pragma once

#include <string>
#include <vector>

#include "opgfn/env/environment.hpp"

namespace opgfn::env {

// Sequences over an alphabet of size K grown by prepending or appending one
// symbol at a time up to length l.
//
// Forward actions: k < K prepends symbol k, K + k appends symbol k, 2K
// terminates. Backward actions: 0 drops the first symbol, 1 drops the last,
// 2 undoes termination. A length-one state has the single parent edge
// "drop last", so every terminal of length l has 2^(l-1) build orders.
class SequenceEnv final : public Environment {
public:
    // Objective names: "bag", or "ngram:<gram>" with the gram spelled in the
    // amino vocabulary (symbol k is the k-th letter).
    SequenceEnv(int alphabet_size, int max_length, std::vector<std::string> objectives,
                std::uint64_t seed = 0, bool early_stop = false,
                std::uint64_t enumeration_cap = default_enumeration_cap);

    [[nodiscard]] EnvKind kind() const override { return EnvKind::sequence; }
    [[nodiscard]] std::string describe() const override;

    [[nodiscard]] int alphabet_size() const { return alphabet_; }
    [[nodiscard]] int max_length() const { return length_; }
    [[nodiscard]] bool early_stop() const { return early_stop_; }

    static constexpr std::uint32_t drop_first = 0;
    static constexpr std::uint32_t drop_last = 1;
    static constexpr std::uint32_t undo_terminal = 2;

    [[nodiscard]] ActionId prepend(int symbol) const;
    [[nodiscard]] ActionId append(int symbol) const;
    [[nodiscard]] ActionId terminate() const;

    [[nodiscard]] State initial_state() const override;
    [[nodiscard]] std::size_t num_forward_actions() const override;
    [[nodiscard]] std::size_t num_backward_actions() const override { return 3; }
    [[nodiscard]] std::vector<ActionId> forward_actions(State const& s) const override;
    [[nodiscard]] std::vector<ActionId> backward_actions(State const& s) const override;
    [[nodiscard]] State step(State const& s, ActionId forward) const override;
    [[nodiscard]] State unstep(State const& s, ActionId backward) const override;
    [[nodiscard]] ActionId backward_inverse(State const& parent, ActionId forward) const override;
    [[nodiscard]] ActionId forward_inverse(State const& child, ActionId backward) const override;

    [[nodiscard]] std::size_t objective_dim() const override { return objectives_.size(); }
    [[nodiscard]] ObjectiveVector objective(State const& terminal) const override;
    [[nodiscard]] std::vector<std::string> objective_names() const override { return objectives_; }

    [[nodiscard]] std::size_t max_trajectory_length() const override;
    [[nodiscard]] std::optional<std::uint64_t> terminal_count() const override;
    [[nodiscard]] std::uint64_t enumeration_cap() const override { return cap_; }
    [[nodiscard]] std::size_t terminal_index(State const& terminal) const override;
    [[nodiscard]] State terminal_at(std::size_t index) const override;
    [[nodiscard]] std::optional<std::uint64_t> state_count() const override;
    [[nodiscard]] std::size_t state_index(State const& s) const override;
    [[nodiscard]] std::size_t feature_width() const override;
    void featurize(State const& s, std::span<double> out) const override;

    // Parses a gram spelled in the amino vocabulary into symbol indices.
    [[nodiscard]] static std::vector<int> parse_gram(std::string const& text, int alphabet);

private:
    void check_state(State const& s) const;
    // K^j for j <= l, or nullopt once it overflows.
    [[nodiscard]] std::optional<std::uint64_t> power(int j) const;
    [[nodiscard]] std::optional<std::uint64_t> nonterminal_offset(std::size_t length) const;
    [[nodiscard]] std::uint64_t base_k(State const& s) const;

    int alphabet_;
    int length_;
    std::vector<std::string> objectives_;
    std::vector<std::vector<int>> grams_;
    std::uint64_t seed_;
    bool early_stop_;
    std::uint64_t cap_;
};

} // namespace opgfn::env
