#include "opgfn/env/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "opgfn/errors.hpp"
#include "opgfn/util/hash.hpp"

namespace opgfn::env::objectives {

double hypergrid(std::span<double const> x, double r0) {
    bool plateau = true;
    bool peak = true;
    for (double xd : x) {
        double const a = std::abs(xd - 0.5);
        plateau = plateau && (a > 0.25 && a <= 0.5);
        peak = peak && (a > 0.3 && a < 0.4);
    }
    return r0 + 0.5 * (plateau ? 1.0 : 0.0) + 2.0 * (peak ? 1.0 : 0.0);
}

double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double cosine(std::span<double const> x, double r0) {
    double prod = 1.0;
    double const phi0 = standard_normal_pdf(0.0);
    for (double xd : x) {
        prod *= (std::cos(50.0 * xd) + 1.0) * (phi0 - standard_normal_pdf(5.0 * xd));
    }
    return r0 + prod;
}

double branin(double x1, double x2) {
    using std::numbers::pi;
    double const a = 15.0 * x1 - 5.0;
    double const t1 = 15.0 * x2 - 5.1 / (4.0 * pi * pi) * a * a + 5.0 / pi * a - 6.0;
    double const t2 = (10.0 - 10.0 / (8.0 * pi)) * std::cos(a);
    return 1.0 - (t1 * t1 + t2 + 10.0) / 308.13;
}

double currin(double x1, double x2) {
    double const factor = x2 == 0.0 ? 1.0 : 1.0 - std::exp(-1.0 / (2.0 * x2));
    double const num = 2300.0 * x1 * x1 * x1 + 1900.0 * x1 * x1 + 2092.0 * x1 + 60.0;
    double const den = 100.0 * x1 * x1 * x1 + 500.0 * x1 * x1 + 4.0 * x1 + 20.0;
    return factor * num / (13.77 * den);
}

double shubert(double x1, double x2) {
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 1; i <= 5; ++i) {
        s1 += i * std::cos((i + 1) * x1 + i);
        s2 += i * std::cos((i + 1) * x2 + i);
    }
    return s1 * s2 / 397.0 + 186.8 / 397.0;
}

double beale(double x1, double x2) {
    double const a = 1.5 - x1 + x1 * x2;
    double const b = 2.25 - x1 + x1 * x2 * x2;
    double const c = 2.625 - x1 + x1 * x2 * x2 * x2;
    return (a * a + b * b + c * c) / 38.8;
}

bool is_grid_objective(std::string const& name) {
    return name == "hypergrid" || name == "cosine" || name == "branin" || name == "currin"
        || name == "shubert" || name == "beale";
}

double grid_objective(std::string const& name, std::span<double const> x, double r0) {
    if (name == "hypergrid") { return hypergrid(x, r0); }
    if (name == "cosine") { return cosine(x, r0); }
    if (x.size() != 2) {
        throw ConfigError("objective '" + name + "' is defined on two-dimensional grids only");
    }
    if (name == "branin") { return branin(x[0], x[1]); }
    if (name == "currin") { return currin(x[0], x[1]); }
    if (name == "shubert") { return shubert(x[0], x[1]); }
    if (name == "beale") { return beale(x[0], x[1]); }
    throw ConfigError("unknown grid objective '" + name + "'");
}

std::vector<int> bag_counts(std::span<int const> symbols, int alphabet) {
    std::vector<int> counts(static_cast<std::size_t>(alphabet), 0);
    for (int s : symbols) {
        if (s < 0 || s >= alphabet) { throw ContractViolation("bag symbol out of range"); }
        ++counts[static_cast<std::size_t>(s)];
    }
    return counts;
}

double bag_value_from_counts(std::span<int const> counts, std::uint64_t seed) {
    bool substructure = std::any_of(counts.begin(), counts.end(), [](int c) {
        return c >= static_cast<int>(bag_repeat_threshold);
    });
    if (!substructure) { return bag_base_value; }
    std::uint64_t h = util::splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (int c : counts) { h = util::splitmix64(h ^ static_cast<std::uint64_t>(c)); }
    return util::unit_interval(h) < bag_rare_probability ? bag_rare_value : bag_common_value;
}

double bag(std::span<int const> symbols, std::uint64_t seed) {
    if (symbols.size() != bag_size) {
        throw ContractViolation("bag objective expects exactly 13 symbols, got "
                                + std::to_string(symbols.size()));
    }
    auto const counts = bag_counts(symbols, bag_alphabet);
    return bag_value_from_counts(counts, seed);
}

std::size_t count_occurrences(std::span<int const> seq, std::span<int const> gram) {
    if (gram.empty()) { throw ConfigError("n-gram objective with an empty gram"); }
    if (gram.size() > seq.size()) { return 0; }
    std::size_t count = 0;
    for (std::size_t i = 0; i + gram.size() <= seq.size(); ++i) {
        if (std::equal(gram.begin(), gram.end(), seq.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++count;
        }
    }
    return count;
}

double ngram(std::span<int const> seq, std::span<int const> gram, std::size_t max_length) {
    std::size_t const occurrences = count_occurrences(seq, gram);
    if (gram.size() > max_length) { return 0.0; }
    double const cap = static_cast<double>(max_length - gram.size() + 1);
    return std::clamp(static_cast<double>(occurrences) / cap, 0.0, 1.0);
}

} // namespace opgfn::env::objectives
