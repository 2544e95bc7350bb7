#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace opgfn::ad {

struct Slice {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;
};

// Flat parameter array partitioned into named, contiguous slices.
class ParamStore {
public:
    // Appends a zero-initialized slice and returns its offset.
    std::size_t add_slice(std::string name, std::size_t size);

    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<double const> values() const { return values_; }
    [[nodiscard]] double& operator[](std::size_t i) { return values_[i]; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    [[nodiscard]] std::vector<Slice> const& slices() const { return slices_; }
    // Throws ContractViolation when absent.
    [[nodiscard]] Slice const& slice(std::string const& name) const;
    [[nodiscard]] bool has_slice(std::string const& name) const;
    [[nodiscard]] std::span<double> view(Slice const& s) { return std::span<double>(values_).subspan(s.offset, s.size); }
    [[nodiscard]] std::span<double const> view(Slice const& s) const {
        return std::span<double const>(values_).subspan(s.offset, s.size);
    }

    [[nodiscard]] bool all_finite() const;

private:
    std::vector<double> values_;
    std::vector<Slice> slices_;
};

} // namespace opgfn::ad
