#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Closed-form objective functions of the in-scope environments. Grid
// objectives take coordinates already mapped to [0, 1].
namespace opgfn::env::objectives {

// R0 + 0.5 * prod 1[|x-0.5| in (0.25, 0.5]] + 2 * prod 1[|x-0.5| in (0.3, 0.4)]
[[nodiscard]] double hypergrid(std::span<double const> x, double r0);

// R0 + prod (cos(50 x) + 1) (phi(0) - phi(5 x)), phi the standard normal pdf.
[[nodiscard]] double cosine(std::span<double const> x, double r0);

[[nodiscard]] double standard_normal_pdf(double z);

// Normalized two-dimensional test functions; values lie in [0, 1] on [0, 1]^2.
[[nodiscard]] double branin(double x1, double x2);
// The factor 1 - exp(-1/(2 x2)) is taken as its right limit 1 at x2 = 0.
[[nodiscard]] double currin(double x1, double x2);
[[nodiscard]] double shubert(double x1, double x2);
[[nodiscard]] double beale(double x1, double x2);

[[nodiscard]] bool is_grid_objective(std::string const& name);
[[nodiscard]] double grid_objective(std::string const& name, std::span<double const> x, double r0);

// Bag: 13 symbols over a 7-letter alphabet, evaluated as a multiset.
inline constexpr std::size_t bag_size = 13;
inline constexpr int bag_alphabet = 7;
inline constexpr std::size_t bag_repeat_threshold = 7;
inline constexpr double bag_base_value = 0.01;
inline constexpr double bag_common_value = 10.0;
inline constexpr double bag_rare_value = 30.0;
inline constexpr double bag_rare_probability = 0.25;

// Symbol counts of a bag (the canonical multiset form).
[[nodiscard]] std::vector<int> bag_counts(std::span<int const> symbols, int alphabet);
// Value of a multiset given by its counts. A bag with a substructure gets the
// rare value when a seeded hash of the counts falls below the rare probability.
[[nodiscard]] double bag_value_from_counts(std::span<int const> counts, std::uint64_t seed);
[[nodiscard]] double bag(std::span<int const> symbols, std::uint64_t seed);

// Overlapping occurrences of `gram` in `seq`.
[[nodiscard]] std::size_t count_occurrences(std::span<int const> seq, std::span<int const> gram);
// Occurrence count divided by the largest count possible at `max_length`
// (max_length - |gram| + 1), clipped to [0, 1].
[[nodiscard]] double ngram(std::span<int const> seq, std::span<int const> gram, std::size_t max_length);

// Twenty amino-acid letters; the n-gram vocabulary and the default symbol names.
inline constexpr char const* amino_vocabulary = "ARNDCQEGHILKMFPSTWYV";

} // namespace opgfn::env::objectives
