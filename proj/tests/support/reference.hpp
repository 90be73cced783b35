#pragma once

// Brute-force references used as test oracles. Deliberately naive and
// independent of the library's update and dominance code paths.

#include <acnf/results.hpp>

#include <cstddef>
#include <optional>
#include <vector>

namespace acnf::reference {

/// Every index tuple of a mixed-radix space, odometer order (last digit fastest).
inline std::vector<std::vector<std::size_t>> enumerate(const std::vector<std::size_t>& sizes) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(sizes.size(), 0);
    while (true) {
        out.push_back(cur);
        std::size_t d = sizes.size();
        while (d > 0) {
            --d;
            if (++cur[d] < sizes[d]) break;
            cur[d] = 0;
            if (d == 0) return out;
        }
    }
}

/// Counts dimension pairs {i < j} where both coordinates agree.
inline std::size_t shared_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a[i] == b[i] && a[j] == b[j]) ++n;
    return n;
}

struct Outcome {
    std::vector<double> u;
    std::vector<bool> excluded;
};

/// One pairwise multiplicative update with exclusion, written out longhand.
inline Outcome pair_update(const std::vector<std::size_t>& sizes, std::vector<double> u, std::vector<bool> excluded,
                           const std::vector<std::size_t>& sampled, double gamma, bool per_pair, double floor) {
    const auto all = enumerate(sizes);
    if (gamma == 1.0) return {u, excluded};
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (excluded[i]) continue;
        const std::size_t p = shared_pairs(all[i], sampled);
        if (p == 0) continue;
        double f = 1.0;
        if (per_pair)
            for (std::size_t k = 0; k < p; ++k) f *= gamma;
        else
            f = gamma;
        u[i] *= f;
    }
    auto normalise = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!excluded[i]) s += u[i];
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!excluded[i]) u[i] /= s;
    };
    normalise();
    if (floor > 0.0) {
        const double cut = floor / static_cast<double>(u.size());
        std::vector<std::size_t> low;
        std::size_t active = 0;
        std::optional<std::size_t> top;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (excluded[i]) continue;
            ++active;
            if (u[i] < cut) low.push_back(i);
            if (!top || u[i] > u[*top]) top = i;
        }
        if (!low.empty()) {
            for (std::size_t i : low) {
                if (low.size() == active && i == *top) continue;
                u[i] = 0.0;
                excluded[i] = true;
            }
            normalise();
        }
    }
    return {u, excluded};
}

/// r is dominated iff some other record is no slower and no less accurate,
/// strictly better on one axis.
inline std::vector<std::size_t> pareto_flat_indices(const std::vector<ResultRecord>& rows) {
    std::vector<std::size_t> out;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        bool dominated = false;
        for (const auto& o : rows) {
            if (!o.ok()) continue;
            if (*o.time_s <= *r.time_s && *o.accuracy >= *r.accuracy &&
                (*o.time_s < *r.time_s || *o.accuracy > *r.accuracy))
                dominated = true;
        }
        if (!dominated) out.push_back(r.flat_index);
    }
    return out;
}

} // namespace acnf::reference
