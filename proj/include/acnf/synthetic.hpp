#pragma once

#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/space.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace acnf {

/// Two (dimension, label) coordinates; a combination carries the pair when it
/// matches both.
struct PlantedPair {
    std::string first_dimension;
    std::string first_value;
    std::string second_dimension;
    std::string second_value;
    /// Multiplies m of every carrier. >1 plants a good pair, <1 a penalty.
    double multiplier = 1.0;
    /// Chance that a carrier fails as `incompatible` (fixed per combination).
    double failure_probability = 0.0;

    friend bool operator==(const PlantedPair&, const PlantedPair&) = default;
};

struct LandscapeSpec {
    SearchSpace space;
    double base_m = 1.0;
    /// Per-combination log-uniform perturbation: m *= exp(noise * z), z in [-1, 1].
    double noise = 0.0;
    std::vector<PlantedPair> good_pairs;
    std::vector<PlantedPair> bad_pairs;

    friend bool operator==(const LandscapeSpec&, const LandscapeSpec&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline double hash_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t h = splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace detail

/// Deterministic evaluator over a synthetic score landscape with planted good
/// and bad pairs. m is split as accuracy = m * t0, time = t0 with t0 chosen so
/// every accuracy fits in [0, 1]; score() therefore recovers m.
class SyntheticLandscape final : public Evaluator {
public:
    SyntheticLandscape(LandscapeSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
        if (!(spec_.base_m > 0.0) || !std::isfinite(spec_.base_m)) throw ConfigError("landscape base_m must be > 0");
        if (!(spec_.noise >= 0.0) || !std::isfinite(spec_.noise)) throw ConfigError("landscape noise must be >= 0");
        for (const auto* list : {&spec_.good_pairs, &spec_.bad_pairs})
            for (const auto& p : *list) resolved_.push_back(resolve(p, list == &spec_.bad_pairs));

        double max_m = 0.0;
        Combination c{std::vector<std::size_t>(spec_.space.dimension_count(), 0)};
        do max_m = std::max(max_m, m(c));
        while (next_combination(spec_.space, c));
        t0_ = 1.0 / max_m;
    }

    const LandscapeSpec& spec() const noexcept { return spec_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double t0() const noexcept { return t0_; }

    /// Closed-form score of `c`, ignoring failure draws.
    double m(const Combination& c) const {
        double v = spec_.base_m;
        if (spec_.noise > 0.0) {
            const double z = 2.0 * detail::hash_unit(seed_, spec_.space.encode(c), 0) - 1.0;
            v *= std::exp(spec_.noise * z);
        }
        for (const auto& p : resolved_)
            if (carries(p, c)) v *= p.multiplier;
        return v;
    }

    bool fails(const Combination& c) const {
        const std::size_t flat = spec_.space.encode(c);
        for (std::size_t i = 0; i < resolved_.size(); ++i) {
            const auto& p = resolved_[i];
            if (!p.bad || p.failure_probability <= 0.0 || !carries(p, c)) continue;
            if (p.failure_probability >= 1.0 || detail::hash_unit(seed_, flat, i + 1) < p.failure_probability)
                return true;
        }
        return false;
    }

    Evaluation evaluate(const Combination& c) override {
        if (fails(c)) return Evaluation::failure(Status::incompatible, "planted failing pair");
        return Evaluation::success(std::min(1.0, m(c) * t0_), t0_);
    }

private:
    struct Resolved {
        std::size_t dim_a, value_a, dim_b, value_b;
        double multiplier;
        double failure_probability;
        bool bad;
    };

    Resolved resolve(const PlantedPair& p, bool bad) const {
        auto lookup = [&](const std::string& dim, const std::string& value) {
            auto d = spec_.space.dimension_index(dim);
            if (!d) throw ConfigError("planted pair names unknown dimension '" + dim + "'");
            auto v = spec_.space.dimension(*d).index_of(value);
            if (!v) throw ConfigError("planted pair names unknown value '" + value + "' in '" + dim + "'");
            return std::make_pair(*d, *v);
        };
        const auto [da, va] = lookup(p.first_dimension, p.first_value);
        const auto [db, vb] = lookup(p.second_dimension, p.second_value);
        if (da == db) throw ConfigError("planted pair must span two different dimensions");
        if (!(p.multiplier > 0.0) || !std::isfinite(p.multiplier))
            throw ConfigError("planted pair multiplier must be > 0");
        if (!(p.failure_probability >= 0.0 && p.failure_probability <= 1.0))
            throw ConfigError("planted pair failure probability must lie in [0, 1]");
        return {da, va, db, vb, p.multiplier, p.failure_probability, bad};
    }

    static bool carries(const Resolved& p, const Combination& c) {
        return c[p.dim_a] == p.value_a && c[p.dim_b] == p.value_b;
    }

    LandscapeSpec spec_;
    std::uint64_t seed_;
    std::vector<Resolved> resolved_;
    double t0_ = 1.0;
};

} // namespace acnf
