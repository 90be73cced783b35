#pragma once

#include <acnf/config.hpp>
#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/results.hpp>
#include <acnf/sampling.hpp>
#include <acnf/space.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace acnf {

enum class Termination {
    completed,       ///< all k iterations ran
    search_exhausted, ///< nothing left to sample
    degenerate,      ///< ran to k, but the floor wanted to exclude everything at some point
};

inline std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::completed: return "completed";
    case Termination::search_exhausted: return "search_exhausted";
    case Termination::degenerate: return "degenerate";
    }
    return "?";
}

inline std::optional<Termination> parse_termination(std::string_view s) {
    for (Termination t : {Termination::completed, Termination::search_exhausted, Termination::degenerate})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

/// How the evaluator of a run was built, so a saved run can be resumed.
struct EvaluatorSource {
    std::string kind = "oracle"; ///< oracle | synthetic | external
    std::string path;            ///< oracle CSV or landscape JSON
    std::string command;         ///< external child command
    double timeout_s = 10.0;
    std::uint64_t seed = 0;      ///< landscape seed

    friend bool operator==(const EvaluatorSource&, const EvaluatorSource&) = default;
};

/// Everything needed to continue a search exactly where it stopped.
struct RunState {
    SearchConfig config;
    SearchSpace space;
    int input_size = 513;
    SamplingState state;
    ResultsTable table;
    std::size_t iterations_done = 0;
    std::optional<Termination> termination;
    bool degenerate = false;
    EvaluatorSource evaluator;

    bool finished() const noexcept { return termination.has_value(); }

    friend bool operator==(const RunState&, const RunState&) = default;
};

inline RunState start_run(SearchSpace space, const SearchConfig& config, int input_size) {
    config.validate();
    RunState run;
    run.config = config;
    run.state = init_state(space, config);
    run.space = std::move(space);
    run.input_size = input_size;
    return run;
}

/// Runs one sample -> evaluate -> record -> update iteration. Returns false
/// when the run is (or just became) finished.
inline bool step(RunState& run, Evaluator& evaluator) {
    if (run.finished()) return false;
    if (run.iterations_done >= run.config.iterations) {
        run.termination = run.degenerate ? Termination::degenerate : Termination::completed;
        return false;
    }
    Combination c;
    try {
        c = sample(run.space, run.state);
    } catch (const SearchExhausted&) {
        run.termination = Termination::search_exhausted;
        return false;
    }
    const std::size_t iteration = run.iterations_done + 1;
    const ResultRecord* cached = run.config.cache_evaluations ? run.table.find(run.space.encode(c)) : nullptr;
    const Evaluation e = cached ? cached->evaluation() : evaluator.evaluate(c);
    if (e.status() == Status::protocol_error)
        throw SearchAborted(iteration, run.space.describe(c), e.detail());

    run.table.record(run.space, c, e, iteration, run.input_size);
    const UpdateOutcome outcome = e.ok() ? pair_checker(run.space, run.state, c, *e.m(), run.config)
                                         : record_failure(run.space, run.state, c, run.config);
    run.degenerate = run.degenerate || outcome.degenerate;
    run.iterations_done = iteration;
    if (run.iterations_done >= run.config.iterations) {
        run.termination = run.degenerate ? Termination::degenerate : Termination::completed;
        return false;
    }
    return true;
}

/// Advances up to `max_steps` iterations (all remaining by default).
inline void advance(RunState& run, Evaluator& evaluator, std::size_t max_steps = static_cast<std::size_t>(-1)) {
    for (std::size_t i = 0; i < max_steps && step(run, evaluator); ++i) {
    }
}

/// The full search: k iterations of sampling, evaluation and pairwise update.
inline RunState run_search(const SearchSpace& space, Evaluator& evaluator, const SearchConfig& config,
                           int input_size = 513) {
    RunState run = start_run(space, config, input_size);
    advance(run, evaluator);
    return run;
}

} // namespace acnf
