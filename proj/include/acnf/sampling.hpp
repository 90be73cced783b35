#pragma once

#include <acnf/config.hpp>
#include <acnf/errors.hpp>
#include <acnf/space.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace acnf {

/// Resolves the threshold alpha from the configured mode and the scores seen so far.
class AlphaEstimator {
public:
    AlphaEstimator() = default;
    explicit AlphaEstimator(AlphaMode mode, std::vector<double> history = {})
        : mode_(mode), history_(std::move(history)) {}

    const AlphaMode& mode() const noexcept { return mode_; }
    /// Scores in observation order.
    const std::vector<double>& history() const noexcept { return history_; }

    void observe(double m) { history_.push_back(m); }

    std::optional<double> current() const {
        if (mode_.kind == AlphaMode::Kind::fixed) return mode_.value;
        if (history_.empty()) return std::nullopt;
        std::vector<double> v = history_;
        const std::size_t mid = v.size() / 2;
        std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
        const double upper = v[mid];
        if (v.size() % 2) return upper;
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        return lower + (upper - lower) / 2.0;
    }

    friend bool operator==(const AlphaEstimator&, const AlphaEstimator&) = default;

private:
    AlphaMode mode_;
    std::vector<double> history_;
};

/// Probability vector over every flat combination index plus exclusion flags.
/// Excluded entries hold exactly 0 and stay excluded.
struct SamplingState {
    std::vector<double> u;
    std::vector<std::uint8_t> excluded;
    AlphaEstimator alpha;
    std::mt19937_64 rng;

    std::size_t size() const noexcept { return u.size(); }

    std::size_t active_count() const noexcept {
        return static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), std::uint8_t{0}));
    }

    /// Highest-probability active entry, ties to the lowest flat index.
    std::size_t argmax() const {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!excluded[i] && (!best || u[i] > u[*best])) best = i;
        if (!best) throw SearchExhausted();
        return *best;
    }

    friend bool operator==(const SamplingState&, const SamplingState&) = default;
};

/// What a single multiplicative update did.
struct UpdateOutcome {
    bool applied = false;     ///< false when the update was a no-op
    double factor = 1.0;      ///< clamped gamma
    std::size_t newly_excluded = 0;
    bool degenerate = false;  ///< every entry fell under the floor; the largest was kept
};

inline SamplingState init_state(const SearchSpace& space, const SearchConfig& config) {
    if (space.combination_count() == 0) throw SpaceError("cannot initialise sampling over an empty search space");
    SamplingState s;
    const std::size_t n = space.combination_count();
    s.u.assign(n, 1.0 / static_cast<double>(n));
    s.excluded.assign(n, 0);
    s.alpha = AlphaEstimator(config.alpha);
    s.rng.seed(config.seed);
    return s;
}

namespace detail {

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace detail

/// Draws a flat index with probability proportional to its u-entry.
inline std::size_t sample_index(SamplingState& state) {
    double total = 0.0;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < state.u.size(); ++i) {
        if (state.excluded[i] || state.u[i] <= 0.0) continue;
        total += state.u[i];
        last = i;
    }
    if (!last) throw SearchExhausted();
    const double target = detail::unit_draw(state.rng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < *last; ++i) {
        if (state.excluded[i] || state.u[i] <= 0.0) continue;
        acc += state.u[i];
        if (target < acc) return i;
    }
    return *last;
}

inline Combination sample(const SearchSpace& space, SamplingState& state) {
    return space.decode(sample_index(state));
}

/// m = acc / time; low is bad, high is good.
inline double score(double accuracy, double time_s) {
    if (!(time_s > 0.0) || !std::isfinite(time_s))
        throw std::domain_error("score: inference time must be > 0");
    if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw std::domain_error("score: accuracy must lie in [0, 1]");
    return accuracy / time_s;
}

/// Multiplies every active entry sharing at least one dimension pair with
/// `sampled` by `factor` (or factor^pairs under per_pair), renormalises and
/// applies the exclusion floor. No clamping here; callers clamp.
inline UpdateOutcome apply_pair_factor(const SearchSpace& space, SamplingState& state, const Combination& sampled,
                                       double factor, const SearchConfig& config) {
    if (!space.contains(sampled)) throw std::domain_error("sampled combination is not from this search space");
    UpdateOutcome out;
    out.factor = factor;
    if (factor == 1.0) return out;
    out.applied = true;

    const std::size_t n = state.u.size();
    Combination c{std::vector<std::size_t>(space.dimension_count(), 0)};
    for (std::size_t i = 0; i < n; ++i, next_combination(space, c)) {
        if (state.excluded[i]) continue;
        const std::size_t q = detail::agreeing_coordinates(c, sampled);
        const std::size_t pairs = q * (q - (q > 0)) / 2;
        if (pairs == 0) continue;
        state.u[i] *= config.policy == UpdatePolicy::once ? factor : std::pow(factor, static_cast<double>(pairs));
    }

    auto renormalise = [&] {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!state.excluded[i]) total += state.u[i];
        for (std::size_t i = 0; i < n; ++i)
            if (!state.excluded[i]) state.u[i] /= total;
    };
    renormalise();

    if (config.exclusion_floor > 0.0) {
        const double cutoff = config.exclusion_floor / static_cast<double>(n);
        std::size_t below = 0, active = 0;
        std::optional<std::size_t> largest;
        for (std::size_t i = 0; i < n; ++i) {
            if (state.excluded[i]) continue;
            ++active;
            if (state.u[i] < cutoff) ++below;
            if (!largest || state.u[i] > state.u[*largest]) largest = i;
        }
        if (below > 0) {
            out.degenerate = below == active;
            for (std::size_t i = 0; i < n; ++i) {
                if (state.excluded[i] || state.u[i] >= cutoff) continue;
                if (out.degenerate && i == *largest) continue;
                state.u[i] = 0.0;
                state.excluded[i] = 1;
                ++out.newly_excluded;
            }
            renormalise();
        }
    }
    return out;
}

/// Score-driven update: gamma = clamp(m / alpha). Under a running median the
/// first observation only seeds alpha.
inline UpdateOutcome pair_checker(const SearchSpace& space, SamplingState& state, const Combination& sampled,
                                  double m, const SearchConfig& config) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::domain_error("pair_checker: score must be finite and >= 0");
    if (state.alpha.mode().kind == AlphaMode::Kind::running_median) {
        state.alpha.observe(m);
        if (state.alpha.history().size() == 1) return {};
    }
    const double alpha = *state.alpha.current();
    double gamma;
    if (alpha > 0.0)
        gamma = m / alpha;
    else // every score so far was 0: any positive score is maximal evidence
        gamma = m > 0.0 ? config.gamma_max : 1.0;
    gamma = std::clamp(gamma, config.gamma_min, config.gamma_max);
    return apply_pair_factor(space, state, sampled, gamma, config);
}

/// Penalises a failed evaluation by the fixed failure factor; alpha is untouched.
inline UpdateOutcome record_failure(const SearchSpace& space, SamplingState& state, const Combination& sampled,
                                    const SearchConfig& config) {
    return apply_pair_factor(space, state, sampled, config.failure_factor, config);
}

} // namespace acnf
