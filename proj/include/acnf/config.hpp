#pragma once

#include <acnf/errors.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace acnf {

/// How entries matching several pairs of the sampled combination are scaled.
enum class UpdatePolicy {
    once,     ///< factor applied once, however many pairs match
    per_pair, ///< factor raised to the number of matching pairs
};

inline std::string_view to_string(UpdatePolicy p) { return p == UpdatePolicy::once ? "once" : "per-pair"; }

/// Threshold against which each score is compared.
struct AlphaMode {
    enum class Kind { fixed, running_median };

    Kind kind = Kind::running_median;
    double value = 0.0; ///< only meaningful for Kind::fixed

    static AlphaMode fixed(double v) { return {Kind::fixed, v}; }
    static AlphaMode running_median() { return {Kind::running_median, 0.0}; }

    friend bool operator==(const AlphaMode&, const AlphaMode&) = default;
};

struct SearchConfig {
    std::size_t iterations = 60;
    AlphaMode alpha = AlphaMode::running_median();
    UpdatePolicy policy = UpdatePolicy::per_pair;
    double gamma_min = 0.1;
    double gamma_max = 10.0;
    double failure_factor = 0.25;
    /// Entries below floor * (1 / combination_count) are excluded; 0 disables.
    double exclusion_floor = 0.01;
    bool cache_evaluations = true;
    std::uint64_t seed = 0;

    void validate() const {
        if (iterations < 1) throw ConfigError("iterations: k must be >= 1");
        if (alpha.kind == AlphaMode::Kind::fixed && !(alpha.value > 0.0 && std::isfinite(alpha.value)))
            throw ConfigError("alpha: fixed threshold must be > 0");
        if (!(gamma_min > 0.0 && std::isfinite(gamma_min)) || gamma_min > 1.0)
            throw ConfigError("clamp-min: must satisfy 0 < gamma_min <= 1");
        if (!std::isfinite(gamma_max) || gamma_max < 1.0)
            throw ConfigError("clamp-max: must satisfy 1 <= gamma_max < inf");
        if (!(failure_factor > 0.0 && failure_factor < 1.0))
            throw ConfigError("failure-factor: must lie in (0, 1)");
        if (!(exclusion_floor >= 0.0 && exclusion_floor < 1.0))
            throw ConfigError("floor: must lie in [0, 1)");
    }

    friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

} // namespace acnf
