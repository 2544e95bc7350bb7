#include "opgfn/ad/param_store.hpp"

#include <algorithm>
#include <cmath>

#include "opgfn/errors.hpp"

namespace opgfn::ad {

std::size_t ParamStore::add_slice(std::string name, std::size_t size) {
    if (has_slice(name)) { throw ContractViolation("duplicate parameter slice '" + name + "'"); }
    std::size_t const offset = values_.size();
    slices_.push_back(Slice{std::move(name), offset, size});
    values_.resize(offset + size, 0.0);
    return offset;
}

Slice const& ParamStore::slice(std::string const& name) const {
    auto it = std::find_if(slices_.begin(), slices_.end(), [&](Slice const& s) { return s.name == name; });
    if (it == slices_.end()) { throw ContractViolation("no parameter slice named '" + name + "'"); }
    return *it;
}

bool ParamStore::has_slice(std::string const& name) const {
    return std::any_of(slices_.begin(), slices_.end(), [&](Slice const& s) { return s.name == name; });
}

bool ParamStore::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

} // namespace opgfn::ad
