#pragma once

#include <acnf/acnf.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#ifndef ACNF_DEFAULT_ORACLE
#define ACNF_DEFAULT_ORACLE "data/table1.csv"
#endif

namespace acnf::cli {

enum Exit : int {
    exit_ok = 0,
    exit_config = 2,
    exit_input = 3,
    exit_evaluator = 4,
    exit_degenerate = 5,
};

namespace detail {

struct Options {
    std::string space_path;
    std::string oracle_path;
    int input_size = 513;
    std::size_t iterations = 60;
    std::uint64_t seed = 0;
    std::string alpha_mode = "median";
    std::optional<double> alpha;
    std::string update_policy = "per-pair";
    double clamp_min = 0.1;
    double clamp_max = 10.0;
    double failure_factor = 0.25;
    double floor = 0.01;
    bool no_cache = false;
    std::string evaluator = "oracle";
    std::string landscape_path;
    std::optional<std::uint64_t> landscape_seed;
    std::string external_cmd;
    double timeout_s = 10.0;
    std::string out_path;
    std::string report_path;
    std::string format;
    std::optional<std::size_t> stop_after;
};

/// Failure carrying the exit code it maps to.
struct CliError : std::runtime_error {
    CliError(Exit code, const std::string& what) : std::runtime_error(what), code(code) {}
    Exit code;
};

inline void add_search_flags(CLI::App& app, Options& o) {
    app.add_option("--space", o.space_path, "Search space JSON file");
    app.add_option("--oracle", o.oracle_path, "Oracle CSV (default: bundled comparison table)");
    app.add_option("--input-size", o.input_size, "Input size (pixels per side) the oracle is read at");
    app.add_option("--iterations", o.iterations, "Iteration budget k (>= 1)");
    app.add_option("--seed", o.seed, "Sampling seed");
    app.add_option("--alpha-mode", o.alpha_mode, "Threshold mode")->check(CLI::IsMember({"fixed", "median"}));
    app.add_option("--alpha", o.alpha, "Fixed threshold (with --alpha-mode fixed)");
    app.add_option("--update-policy", o.update_policy, "Pairwise factor policy")
        ->check(CLI::IsMember({"once", "per-pair"}));
    app.add_option("--clamp-min", o.clamp_min, "Lower clamp of the update factor");
    app.add_option("--clamp-max", o.clamp_max, "Upper clamp of the update factor");
    app.add_option("--failure-factor", o.failure_factor, "Factor applied on failed evaluations, in (0, 1)");
    app.add_option("--floor", o.floor, "Exclusion floor as a fraction of uniform mass, in [0, 1)");
    app.add_flag("--no-cache", o.no_cache, "Re-evaluate combinations drawn again");
    app.add_option("--evaluator", o.evaluator, "Evaluator source")
        ->check(CLI::IsMember({"oracle", "synthetic", "external"}));
    app.add_option("--landscape", o.landscape_path, "Synthetic landscape JSON (with --evaluator synthetic)");
    app.add_option("--landscape-seed", o.landscape_seed, "Synthetic landscape seed (default: --seed)");
    app.add_option("--external-cmd", o.external_cmd, "Evaluator child command (with --evaluator external)");
    app.add_option("--timeout-s", o.timeout_s, "Per-request timeout of the external evaluator");
}

inline void add_output_flags(CLI::App& app, Options& o) {
    app.add_option("--out", o.out_path, "Run-state file to write");
    app.add_option("--report", o.report_path, "Report file to write");
    app.add_option("--format", o.format, "Report format (default from --report extension)")
        ->check(CLI::IsMember({"csv", "markdown"}));
}

inline SearchConfig config_from(const Options& o, const CLI::App& app) {
    SearchConfig c;
    c.iterations = o.iterations;
    c.seed = o.seed;
    if (o.alpha_mode == "fixed") {
        if (!o.alpha) throw CliError(exit_config, "--alpha: required with --alpha-mode fixed");
        c.alpha = AlphaMode::fixed(*o.alpha);
    } else {
        if (app.count("--alpha")) throw CliError(exit_config, "--alpha: only valid with --alpha-mode fixed");
        c.alpha = AlphaMode::running_median();
    }
    c.policy = o.update_policy == "once" ? UpdatePolicy::once : UpdatePolicy::per_pair;
    c.gamma_min = o.clamp_min;
    c.gamma_max = o.clamp_max;
    c.failure_factor = o.failure_factor;
    c.exclusion_floor = o.floor;
    c.cache_evaluations = !o.no_cache;
    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw CliError(exit_config, std::string("--") + e.what());
    }
    return c;
}

inline ReportFormat report_format(const Options& o) {
    if (o.format == "csv") return ReportFormat::csv;
    if (o.format == "markdown") return ReportFormat::markdown;
    return std::filesystem::path(o.report_path).extension() == ".csv" ? ReportFormat::csv : ReportFormat::markdown;
}

inline std::string oracle_path(const std::string& given) { return given.empty() ? ACNF_DEFAULT_ORACLE : given; }

/// Evaluator plus the space it answers for.
struct Built {
    SearchSpace space;
    std::unique_ptr<Evaluator> evaluator;
};

inline Built build_evaluator(const EvaluatorSource& src, const std::string& space_path, int input_size,
                             std::ostream& err) {
    Built b;
    std::optional<SearchSpace> given;
    if (!space_path.empty()) given = load_space(space_path);

    if (src.kind == "oracle") {
        OracleLoad load = load_oracle(src.path, input_size);
        for (const auto& w : load.warnings) err << "warning: " << w << '\n';
        b.space = given ? *given : load.space;
        b.evaluator = std::make_unique<TableOracle>(b.space, load.dataset, input_size);
    } else if (src.kind == "synthetic") {
        if (src.path.empty()) throw CliError(exit_config, "--landscape: required with --evaluator synthetic");
        LandscapeSpec spec = load_landscape(src.path);
        if (given && !(*given == spec.space))
            throw CliError(exit_config, "--space: does not match the landscape's dimensions");
        b.space = spec.space;
        b.evaluator = std::make_unique<SyntheticLandscape>(std::move(spec), src.seed);
    } else if (src.kind == "external") {
        if (src.command.empty()) throw CliError(exit_config, "--external-cmd: required with --evaluator external");
        if (given) {
            b.space = *given;
        } else {
            b.space = load_oracle(src.path, input_size).space;
        }
        b.evaluator = std::make_unique<ExternalEvaluator>(b.space, src.command, src.timeout_s, input_size);
    } else {
        throw CliError(exit_config, "--evaluator: unknown kind '" + src.kind + "'");
    }
    return b;
}

inline std::string percent(double fraction) { return acnf::detail::format_trimmed(fraction * 100.0, 2, 1) + "%"; }

inline void print_summary(const RunState& run, std::ostream& out) {
    out << "iterations: " << run.iterations_done << '/' << run.config.iterations << " ("
        << (run.termination ? to_string(*run.termination) : std::string_view("paused")) << ")\n";
    out << "evaluated: " << run.table.size() << " distinct combinations, " << run.state.active_count() << " of "
        << run.space.combination_count() << " still active\n";
    try {
        const auto& best = best_by_m(run.table);
        out << "best by m: " << run.space.describe(run.space.decode(best.flat_index))
            << " m=" << acnf::detail::format_fixed(*best.m, 4) << " time=" << acnf::detail::format_shortest(*best.time_s)
            << "s mIoU=" << percent(*best.accuracy) << '\n';
    } catch (const NoResult&) {
        out << "best by m: none (no successful evaluation)\n";
    }
    const auto front = pareto_front(run.table);
    out << "pareto front (" << front.size() << "):\n";
    for (const auto& r : front)
        out << "  " << acnf::detail::format_shortest(*r.time_s) << "s " << percent(*r.accuracy) << ' '
            << run.space.describe(run.space.decode(r.flat_index)) << '\n';
    const std::size_t top = run.state.argmax();
    out << "most probable: " << run.space.describe(run.space.decode(top))
        << " p=" << acnf::detail::format_fixed(run.state.u[top], 6) << '\n';
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw CliError(exit_input, "cannot write " + path);
    f << text;
}

/// Advances the run, writes artifacts and maps the outcome to an exit code.
inline int drive(RunState& run, Evaluator& evaluator, const Options& o, std::optional<std::size_t> stop_after,
                 std::ostream& out, std::ostream& err) {
    try {
        advance(run, evaluator, stop_after.value_or(static_cast<std::size_t>(-1)));
    } catch (const SearchAborted& e) {
        if (!o.out_path.empty()) save_run(o.out_path, run);
        err << "error: " << e.what() << '\n';
        return exit_evaluator;
    }
    if (!o.out_path.empty()) save_run(o.out_path, run);
    if (!o.report_path.empty()) write_text(o.report_path, emit_report(run.space, run.table, run.state, report_format(o)));
    print_summary(run, out);
    if (run.termination == Termination::degenerate || run.termination == Termination::search_exhausted) {
        err << "warning: search ended " << to_string(*run.termination) << '\n';
        return exit_degenerate;
    }
    return exit_ok;
}

inline int cmd_search(const Options& o, const CLI::App& app, std::ostream& out, std::ostream& err) {
    const SearchConfig config = config_from(o, app);
    if (o.input_size <= 0) throw CliError(exit_config, "--input-size: must be > 0");
    if (o.stop_after && *o.stop_after == 0) throw CliError(exit_config, "--stop-after: must be >= 1");
    EvaluatorSource src;
    src.kind = o.evaluator;
    src.path = o.evaluator == "synthetic" ? o.landscape_path : oracle_path(o.oracle_path);
    src.command = o.external_cmd;
    src.timeout_s = o.timeout_s;
    src.seed = o.landscape_seed.value_or(o.seed);
    if (!(o.timeout_s > 0.0)) throw CliError(exit_config, "--timeout-s: must be > 0");

    Built built = build_evaluator(src, o.space_path, o.input_size, err);
    RunState run = start_run(built.space, config, o.input_size);
    run.evaluator = src;
    return drive(run, *built.evaluator, o, o.stop_after, out, err);
}

inline int cmd_resume(const std::string& run_path, std::optional<std::size_t> extend, Options o, const CLI::App& app,
                      std::ostream& out, std::ostream& err) {
    RunState run = load_run(run_path);
    if (extend) {
        if (*extend == 0) throw CliError(exit_config, "--extend: must be >= 1");
        run.config.iterations += *extend;
        run.termination.reset();
    } else if (run.finished() || run.iterations_done >= run.config.iterations) {
        throw CliError(exit_config, "run already complete after " + std::to_string(run.iterations_done) +
                                        " iterations; pass --extend N to continue");
    }
    if (app.count("--oracle")) run.evaluator.path = o.oracle_path;
    if (app.count("--landscape")) run.evaluator.path = o.landscape_path;
    if (app.count("--external-cmd")) run.evaluator.command = o.external_cmd;
    if (app.count("--timeout-s")) run.evaluator.timeout_s = o.timeout_s;

    Built built = build_evaluator(run.evaluator, {}, run.input_size, err);
    if (!(built.space == run.space)) throw CliError(exit_input, "evaluator space differs from the saved run's space");
    if (o.out_path.empty()) o.out_path = run_path;
    return drive(run, *built.evaluator, o, std::nullopt, out, err);
}

inline int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    auto plural = [](const Dimension& d) { return std::to_string(d.size()) + " " + d.name + "s"; };
    if (std::filesystem::path(path).extension() == ".json") {
        const SearchSpace space = load_space(path);
        std::string dims;
        for (const auto& d : space.dimensions()) dims += (dims.empty() ? "" : " × ") + plural(d);
        out << dims << " = " << space.combination_count() << " combinations\n";
        return exit_ok;
    }
    std::vector<std::string> warnings;
    const OracleDataset ds = read_oracle(path, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    const SearchSpace space = ds.infer_space();
    std::string line;
    for (const auto& d : space.dimensions()) line += (line.empty() ? "" : " × ") + plural(d);
    auto sizes = ds.input_sizes();
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    std::string ok_counts, failed;
    for (int s : sizes) {
        ok_counts += (ok_counts.empty() ? "" : ", ") + std::to_string(ds.count(s, Status::ok)) +
                     (ok_counts.empty() ? " ok rows @" : " @") + std::to_string(s);
        std::size_t f = 0;
        for (const auto& r : ds.rows) f += r.input_size == s && r.status != Status::ok;
        if (f) failed += (failed.empty() ? "" : ", ") + std::to_string(f) + " @" + std::to_string(s);
    }
    out << line << "; " << ok_counts;
    if (!failed.empty()) out << "; failure rows " << failed;
    out << '\n';
    return exit_ok;
}

inline int cmd_protocol_check(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.external_cmd.empty()) throw CliError(exit_config, "--external-cmd: required");
    if (!(o.timeout_s > 0.0)) throw CliError(exit_config, "--timeout-s: must be > 0");
    const OracleLoad load = load_oracle(oracle_path(o.oracle_path), o.input_size);
    for (const auto& w : load.warnings) err << "warning: " << w << '\n';
    const SearchSpace& space = load.space;

    std::optional<Combination> ok_combo, absent_combo;
    for (const auto& r : load.dataset.rows)
        if (!ok_combo && r.status == Status::ok) ok_combo = space.find(r.labels);
    {
        std::vector<std::uint8_t> present(space.combination_count(), 0);
        for (const auto& r : load.dataset.rows) present[space.encode(*space.find(r.labels))] = 1;
        for (std::size_t i = 0; i < present.size() && !absent_combo; ++i)
            if (!present[i]) absent_combo = space.decode(i);
    }
    if (!ok_combo || !absent_combo)
        throw CliError(exit_input, "oracle needs at least one ok row and one missing combination for the canned requests");

    std::size_t passed = 0, total = 0;
    auto report = [&](bool pass, std::string_view name, const std::string& detail) {
        ++total;
        passed += pass;
        out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    };
    auto describe = [&](const Evaluation& e) {
        std::string s(to_string(e.status()));
        if (e.ok())
            s += " accuracy=" + acnf::detail::format_shortest(*e.accuracy()) +
                 " time_s=" + acnf::detail::format_shortest(*e.time_s());
        if (!e.detail().empty()) s += " (" + e.detail() + ")";
        return s;
    };

    out << "protocol-check: " << o.external_cmd << '\n';
    ExternalEvaluator child(space, o.external_cmd, o.timeout_s, o.input_size, false);
    const auto& hs = child.handshake();
    report(hs.ok, "handshake", hs.ok ? "child '" + hs.name + "' speaks protocol 1" : hs.problem);

    const Evaluation first = child.evaluate(*ok_combo);
    report(first.ok(), "ok-request", space.describe(*ok_combo) + " -> " + describe(first));

    const Evaluation second = child.evaluate(*absent_combo);
    report(second.status() == Status::incompatible, "incompatible-request",
           space.describe(*absent_combo) + " -> " + describe(second));

    const Evaluation probe = child.evaluate_within(*ok_combo, 0.0);
    report(probe.status() == Status::timeout, "timeout", "zero-deadline probe -> " + describe(probe));

    const Evaluation after = child.evaluate(*ok_combo);
    report(after.ok(), "liveness", "request after the timed-out probe -> " + describe(after));

    const auto code = child.shutdown(o.timeout_s);
    report(code == 0, "shutdown",
           code ? "child exited with code " + std::to_string(*code) : std::string("child did not exit; killed"));

    out << "verdict: " << passed << '/' << total << " checks passed\n";
    return passed == total ? exit_ok : exit_evaluator;
}

} // namespace detail

/// Entry point shared by the `acnf` binary and the tests.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Pairwise-penalising sampling search over network x framework x compression combinations", "acnf"};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with default flag values (flags win)");

    detail::Options o;
    std::string run_path, validate_path;
    std::optional<std::size_t> extend;

    CLI::App* search = app.add_subcommand("search", "Run a search");
    detail::add_search_flags(*search, o);
    detail::add_output_flags(*search, o);
    search->add_option("--stop-after", o.stop_after, "Pause after this many iterations (resume later)");

    CLI::App* resume = app.add_subcommand("resume", "Continue a saved run");
    resume->add_option("--run", run_path, "Run-state file")->required();
    resume->add_option("--extend", extend, "Add N iterations to the budget");
    resume->add_option("--oracle", o.oracle_path, "Override the oracle path");
    resume->add_option("--landscape", o.landscape_path, "Override the landscape path");
    resume->add_option("--external-cmd", o.external_cmd, "Override the external command");
    resume->add_option("--timeout-s", o.timeout_s, "Override the external timeout");
    detail::add_output_flags(*resume, o);

    CLI::App* validate = app.add_subcommand("validate", "Check an oracle CSV or space JSON file");
    validate->add_option("file", validate_path, "File to check")->required();

    CLI::App* check = app.add_subcommand("protocol-check", "Run protocol conformance checks against a child");
    check->add_option("--external-cmd", o.external_cmd, "Child command")->required();
    check->add_option("--timeout-s", o.timeout_s, "Per-request timeout")->default_val(2.0);
    check->add_option("--oracle", o.oracle_path, "Oracle used to pick the canned requests");
    check->add_option("--input-size", o.input_size, "Input size of the canned requests");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_config;
    }

    try {
        if (*search) return detail::cmd_search(o, *search, out, err);
        if (*resume) return detail::cmd_resume(run_path, extend, o, *resume, out, err);
        if (*validate) return detail::cmd_validate(validate_path, out, err);
        if (*check) return detail::cmd_protocol_check(o, out, err);
    } catch (const detail::CliError& e) {
        err << "error: " << e.what() << '\n';
        return e.code;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const LoadError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const SpaceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    } catch (const SetupError& e) {
        err << "error: " << e.what() << '\n';
        return exit_evaluator;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_input;
    }
    return exit_config;
}

} // namespace acnf::cli
