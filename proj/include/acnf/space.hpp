#pragma once

#include <acnf/errors.hpp>

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace acnf {

/// One categorical axis of the search (network, framework, compression, ...).
struct Dimension {
    std::string name;
    std::vector<std::string> values;

    std::size_t size() const noexcept { return values.size(); }

    std::optional<std::size_t> index_of(std::string_view label) const {
        auto it = std::find(values.begin(), values.end(), label);
        if (it == values.end()) return std::nullopt;
        return static_cast<std::size_t>(it - values.begin());
    }

    friend bool operator==(const Dimension&, const Dimension&) = default;
};

/// One value index per dimension, in dimension order.
struct Combination {
    std::vector<std::size_t> indices;

    std::size_t operator[](std::size_t d) const { return indices[d]; }
    std::size_t size() const noexcept { return indices.size(); }

    friend bool operator==(const Combination&, const Combination&) = default;
};

/// Ordered list of dimensions; the candidate set is their Cartesian product,
/// flattened row-major (last dimension varies fastest).
class SearchSpace {
public:
    /// Dense per-combination state is allocated, so the product is capped.
    static constexpr std::size_t max_combinations = std::size_t{1} << 24;

    SearchSpace() = default;

    explicit SearchSpace(std::vector<Dimension> dimensions) : dims_(std::move(dimensions)) {
        if (dims_.size() < 2)
            throw SpaceError("search space needs at least 2 dimensions, got " + std::to_string(dims_.size()));
        std::unordered_set<std::string> names;
        count_ = 1;
        for (const auto& d : dims_) {
            if (d.name.empty()) throw SpaceError("dimension with empty name");
            if (!names.insert(d.name).second) throw SpaceError("duplicate dimension name '" + d.name + "'");
            if (d.values.empty()) throw SpaceError("dimension '" + d.name + "' has no values");
            std::unordered_set<std::string_view> labels;
            for (const auto& v : d.values) {
                if (v.empty()) throw SpaceError("dimension '" + d.name + "' has an empty label");
                if (!labels.insert(v).second)
                    throw SpaceError("dimension '" + d.name + "' repeats label '" + v + "'");
            }
            if (count_ > max_combinations / d.size())
                throw SpaceError("search space exceeds " + std::to_string(max_combinations) + " combinations");
            count_ *= d.size();
        }
    }

    const std::vector<Dimension>& dimensions() const noexcept { return dims_; }
    const Dimension& dimension(std::size_t d) const { return dims_.at(d); }
    std::size_t dimension_count() const noexcept { return dims_.size(); }
    std::size_t combination_count() const noexcept { return count_; }

    /// Number of unordered dimension pairs, C(D, 2).
    std::size_t pair_count() const noexcept { return dims_.size() * (dims_.size() - 1) / 2; }

    std::optional<std::size_t> dimension_index(std::string_view name) const {
        for (std::size_t d = 0; d < dims_.size(); ++d)
            if (dims_[d].name == name) return d;
        return std::nullopt;
    }

    bool contains(const Combination& c) const noexcept {
        if (c.size() != dims_.size()) return false;
        for (std::size_t d = 0; d < dims_.size(); ++d)
            if (c[d] >= dims_[d].size()) return false;
        return true;
    }

    std::size_t encode(const Combination& c) const {
        if (!contains(c)) throw std::domain_error("combination does not belong to this search space");
        std::size_t flat = 0;
        for (std::size_t d = 0; d < dims_.size(); ++d) flat = flat * dims_[d].size() + c[d];
        return flat;
    }

    Combination decode(std::size_t flat) const {
        if (flat >= count_) throw std::out_of_range("flat index " + std::to_string(flat) + " out of range");
        Combination c{std::vector<std::size_t>(dims_.size())};
        for (std::size_t d = dims_.size(); d-- > 0;) {
            c.indices[d] = flat % dims_[d].size();
            flat /= dims_[d].size();
        }
        return c;
    }

    std::vector<std::string> labels(const Combination& c) const {
        if (!contains(c)) throw std::domain_error("combination does not belong to this search space");
        std::vector<std::string> out;
        out.reserve(c.size());
        for (std::size_t d = 0; d < dims_.size(); ++d) out.push_back(dims_[d].values[c[d]]);
        return out;
    }

    /// Inverse of labels(); nullopt if any label is unknown.
    std::optional<Combination> find(std::span<const std::string> labels) const {
        if (labels.size() != dims_.size()) return std::nullopt;
        Combination c{std::vector<std::size_t>(dims_.size())};
        for (std::size_t d = 0; d < dims_.size(); ++d) {
            auto i = dims_[d].index_of(labels[d]);
            if (!i) return std::nullopt;
            c.indices[d] = *i;
        }
        return c;
    }

    /// "(a, b, c)"
    std::string describe(const Combination& c) const {
        std::string s = "(";
        for (std::size_t d = 0; d < c.size(); ++d) {
            if (d) s += ", ";
            s += (d < dims_.size() && c[d] < dims_[d].size()) ? dims_[d].values[c[d]] : "?";
        }
        return s + ")";
    }

    friend bool operator==(const SearchSpace& a, const SearchSpace& b) { return a.dims_ == b.dims_; }

private:
    std::vector<Dimension> dims_;
    std::size_t count_ = 0;
};

/// Advances `c` to the next combination in flat order; false after the last.
inline bool next_combination(const SearchSpace& space, Combination& c) {
    for (std::size_t d = space.dimension_count(); d-- > 0;) {
        if (++c.indices[d] < space.dimension(d).size()) return true;
        c.indices[d] = 0;
    }
    return false;
}

namespace detail {

inline std::size_t agreeing_coordinates(const Combination& a, const Combination& b) noexcept {
    std::size_t q = 0;
    for (std::size_t d = 0; d < a.size(); ++d) q += a[d] == b[d];
    return q;
}

} // namespace detail

/// Number of unordered dimension pairs {i, j} on which `a` and `b` agree in
/// both coordinates. With q agreeing coordinates that is q(q-1)/2.
inline std::size_t shared_pair_count(const SearchSpace& space, const Combination& a, const Combination& b) {
    if (!space.contains(a) || !space.contains(b))
        throw std::domain_error("shared_pair_count: combinations are not from the same search space");
    const std::size_t q = detail::agreeing_coordinates(a, b);
    return q * (q - (q > 0)) / 2;
}

} // namespace acnf
