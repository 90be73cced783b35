#pragma once

#include <acnf/errors.hpp>
#include <acnf/search.hpp>
#include <acnf/synthetic.hpp>

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

namespace acnf {

using nlohmann::json;

inline constexpr int run_format_version = 1;

namespace detail {

/// Rejects objects that lack a required key or carry an unknown one.
inline void expect_keys(const json& j, std::string_view what, std::initializer_list<std::string_view> required,
                        std::initializer_list<std::string_view> optional = {}) {
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected an object");
    for (auto k : required)
        if (!j.contains(k)) throw std::invalid_argument(std::string(what) + ": missing field '" + std::string(k) + "'");
    for (const auto& [k, _] : j.items()) {
        bool known = false;
        for (auto r : required) known = known || r == k;
        for (auto o : optional) known = known || o == k;
        if (!known) throw std::invalid_argument(std::string(what) + ": unknown field '" + k + "'");
    }
}

} // namespace detail

inline json space_to_json(const SearchSpace& space) {
    json dims = json::array();
    for (const auto& d : space.dimensions()) dims.push_back({{"name", d.name}, {"values", d.values}});
    return {{"dimensions", dims}};
}

inline SearchSpace space_from_json(const json& j) {
    detail::expect_keys(j, "space", {"dimensions"});
    std::vector<Dimension> dims;
    for (const auto& d : j.at("dimensions")) {
        detail::expect_keys(d, "dimension", {"name", "values"});
        dims.push_back({d.at("name").get<std::string>(), d.at("values").get<std::vector<std::string>>()});
    }
    return SearchSpace(std::move(dims));
}

inline SearchSpace load_space(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError(path, 0, "not valid JSON");
    try {
        return space_from_json(j);
    } catch (const std::exception& e) {
        throw ParseError(path, 0, e.what());
    }
}

inline json config_to_json(const SearchConfig& c) {
    json alpha = c.alpha.kind == AlphaMode::Kind::fixed ? json{{"mode", "fixed"}, {"value", c.alpha.value}}
                                                        : json{{"mode", "median"}};
    return {{"iterations", c.iterations},
            {"alpha", alpha},
            {"update_policy", std::string(to_string(c.policy))},
            {"clamp_min", c.gamma_min},
            {"clamp_max", c.gamma_max},
            {"failure_factor", c.failure_factor},
            {"floor", c.exclusion_floor},
            {"cache", c.cache_evaluations},
            {"seed", c.seed}};
}

inline SearchConfig config_from_json(const json& j) {
    detail::expect_keys(j, "config",
                        {"iterations", "alpha", "update_policy", "clamp_min", "clamp_max", "failure_factor", "floor",
                         "cache", "seed"});
    SearchConfig c;
    c.iterations = j.at("iterations").get<std::size_t>();
    const auto& a = j.at("alpha");
    const std::string mode = a.at("mode").get<std::string>();
    if (mode == "fixed") {
        detail::expect_keys(a, "alpha", {"mode", "value"});
        c.alpha = AlphaMode::fixed(a.at("value").get<double>());
    } else if (mode == "median") {
        detail::expect_keys(a, "alpha", {"mode"});
        c.alpha = AlphaMode::running_median();
    } else {
        throw std::invalid_argument("alpha: unknown mode '" + mode + "'");
    }
    const std::string policy = j.at("update_policy").get<std::string>();
    if (policy == "once")
        c.policy = UpdatePolicy::once;
    else if (policy == "per-pair")
        c.policy = UpdatePolicy::per_pair;
    else
        throw std::invalid_argument("update_policy: unknown value '" + policy + "'");
    c.gamma_min = j.at("clamp_min").get<double>();
    c.gamma_max = j.at("clamp_max").get<double>();
    c.failure_factor = j.at("failure_factor").get<double>();
    c.exclusion_floor = j.at("floor").get<double>();
    c.cache_evaluations = j.at("cache").get<bool>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
}

inline json landscape_to_json(const LandscapeSpec& spec) {
    auto pairs = [](const std::vector<PlantedPair>& list) {
        json out = json::array();
        for (const auto& p : list)
            out.push_back({{"first", {{"dimension", p.first_dimension}, {"value", p.first_value}}},
                           {"second", {{"dimension", p.second_dimension}, {"value", p.second_value}}},
                           {"multiplier", p.multiplier},
                           {"failure_probability", p.failure_probability}});
        return out;
    };
    json j = space_to_json(spec.space);
    j["base_m"] = spec.base_m;
    j["noise"] = spec.noise;
    j["good_pairs"] = pairs(spec.good_pairs);
    j["bad_pairs"] = pairs(spec.bad_pairs);
    return j;
}

/// Landscape description: the space's `dimensions` plus optional `base_m`,
/// `noise`, `good_pairs` and `bad_pairs`.
inline LandscapeSpec landscape_from_json(const json& j) {
    detail::expect_keys(j, "landscape", {"dimensions"}, {"base_m", "noise", "good_pairs", "bad_pairs"});
    LandscapeSpec spec;
    spec.space = space_from_json(json{{"dimensions", j.at("dimensions")}});
    spec.base_m = j.value("base_m", 1.0);
    spec.noise = j.value("noise", 0.0);
    auto pairs = [](const json& list) {
        std::vector<PlantedPair> out;
        for (const auto& p : list) {
            detail::expect_keys(p, "planted pair", {"first", "second"}, {"multiplier", "failure_probability"});
            detail::expect_keys(p.at("first"), "planted pair coordinate", {"dimension", "value"});
            detail::expect_keys(p.at("second"), "planted pair coordinate", {"dimension", "value"});
            out.push_back({p.at("first").at("dimension").get<std::string>(),
                           p.at("first").at("value").get<std::string>(),
                           p.at("second").at("dimension").get<std::string>(),
                           p.at("second").at("value").get<std::string>(), p.value("multiplier", 1.0),
                           p.value("failure_probability", 0.0)});
        }
        return out;
    };
    if (j.contains("good_pairs")) spec.good_pairs = pairs(j.at("good_pairs"));
    if (j.contains("bad_pairs")) spec.bad_pairs = pairs(j.at("bad_pairs"));
    return spec;
}

inline LandscapeSpec load_landscape(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ParseError(path, 0, "not valid JSON");
    try {
        return landscape_from_json(j);
    } catch (const std::exception& e) {
        throw ParseError(path, 0, e.what());
    }
}

inline json run_to_json(const RunState& run) {
    std::ostringstream rng;
    rng << run.state.rng;
    json rows = json::array();
    for (const auto& [_, r] : run.table) {
        json row = {{"flat_index", r.flat_index},
                    {"labels", r.labels},
                    {"input_size", r.input_size},
                    {"iteration_first_seen", r.iteration_first_seen},
                    {"status", std::string(to_string(r.status))},
                    {"hit_count", r.hit_count},
                    {"detail", r.detail}};
        if (r.ok()) {
            row["accuracy"] = *r.accuracy;
            row["time_s"] = *r.time_s;
            row["m"] = *r.m;
        }
        rows.push_back(std::move(row));
    }
    std::vector<int> excluded(run.state.excluded.begin(), run.state.excluded.end());
    json j = {{"format_version", run_format_version},
              {"config", config_to_json(run.config)},
              {"space", space_to_json(run.space)},
              {"input_size", run.input_size},
              {"sampling",
               {{"u", run.state.u},
                {"excluded", excluded},
                {"alpha_history", run.state.alpha.history()},
                {"rng", rng.str()}}},
              {"results", rows},
              {"iterations_done", run.iterations_done},
              {"termination", run.termination ? json(std::string(to_string(*run.termination))) : json(nullptr)},
              {"degenerate", run.degenerate},
              {"evaluator",
               {{"kind", run.evaluator.kind},
                {"path", run.evaluator.path},
                {"command", run.evaluator.command},
                {"timeout_s", run.evaluator.timeout_s},
                {"seed", run.evaluator.seed}}}};
    return j;
}

inline RunState run_from_json(const json& j) {
    if (!j.is_object() || !j.contains("format_version") || !j["format_version"].is_number_integer())
        throw LoadError(LoadError::Kind::corrupt, "run state: missing format_version");
    if (j["format_version"].get<long long>() != run_format_version)
        throw LoadError(LoadError::Kind::version_mismatch,
                        "run state: format_version " + j["format_version"].dump() + " is not supported (expected " +
                            std::to_string(run_format_version) + ")");
    try {
        detail::expect_keys(j, "run state",
                            {"format_version", "config", "space", "input_size", "sampling", "results",
                             "iterations_done", "termination", "degenerate", "evaluator"});
        RunState run;
        run.config = config_from_json(j.at("config"));
        run.space = space_from_json(j.at("space"));
        run.input_size = j.at("input_size").get<int>();

        const auto& s = j.at("sampling");
        detail::expect_keys(s, "sampling", {"u", "excluded", "alpha_history", "rng"});
        run.state.u = s.at("u").get<std::vector<double>>();
        for (int e : s.at("excluded").get<std::vector<int>>()) run.state.excluded.push_back(e ? 1 : 0);
        run.state.alpha = AlphaEstimator(run.config.alpha, s.at("alpha_history").get<std::vector<double>>());
        std::istringstream rng(s.at("rng").get<std::string>());
        rng >> run.state.rng;
        if (!rng) throw std::invalid_argument("sampling: unreadable rng state");
        if (run.state.u.size() != run.space.combination_count() ||
            run.state.excluded.size() != run.space.combination_count())
            throw std::invalid_argument("sampling: vector length does not match the search space");
        double total = 0.0;
        for (std::size_t i = 0; i < run.state.u.size(); ++i) {
            if (!(run.state.u[i] >= 0.0)) throw std::invalid_argument("sampling: negative probability");
            if (run.state.excluded[i] && run.state.u[i] != 0.0)
                throw std::invalid_argument("sampling: excluded entry with non-zero mass");
            total += run.state.u[i];
        }
        if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("sampling: probabilities do not sum to 1");

        for (const auto& row : j.at("results")) {
            detail::expect_keys(row, "result",
                                {"flat_index", "labels", "input_size", "iteration_first_seen", "status", "hit_count",
                                 "detail"},
                                {"accuracy", "time_s", "m"});
            ResultRecord r;
            r.flat_index = row.at("flat_index").get<std::size_t>();
            r.labels = row.at("labels").get<std::vector<std::string>>();
            r.input_size = row.at("input_size").get<int>();
            r.iteration_first_seen = row.at("iteration_first_seen").get<std::size_t>();
            const auto status = parse_status(row.at("status").get<std::string>());
            if (!status) throw std::invalid_argument("result: unknown status");
            r.status = *status;
            r.hit_count = row.at("hit_count").get<std::size_t>();
            r.detail = row.at("detail").get<std::string>();
            if (r.ok()) {
                r.accuracy = row.at("accuracy").get<double>();
                r.time_s = row.at("time_s").get<double>();
                r.m = row.at("m").get<double>();
                if (std::abs(*r.m - *r.accuracy / *r.time_s) > 1e-12)
                    throw std::invalid_argument("result: m disagrees with accuracy / time_s");
            }
            if (r.flat_index >= run.space.combination_count() ||
                run.space.labels(run.space.decode(r.flat_index)) != r.labels || r.hit_count < 1)
                throw std::invalid_argument("result: row does not match the search space");
            run.table.insert(std::move(r));
        }
        run.iterations_done = j.at("iterations_done").get<std::size_t>();
        if (run.iterations_done > run.config.iterations)
            throw std::invalid_argument("iterations_done exceeds the iteration budget");
        if (run.table.total_hits() != run.iterations_done)
            throw std::invalid_argument("hit counts do not add up to iterations_done");
        if (!j.at("termination").is_null()) {
            auto t = parse_termination(j.at("termination").get<std::string>());
            if (!t) throw std::invalid_argument("unknown termination reason");
            run.termination = t;
        }
        run.degenerate = j.at("degenerate").get<bool>();

        const auto& ev = j.at("evaluator");
        detail::expect_keys(ev, "evaluator", {"kind", "path", "command", "timeout_s", "seed"});
        run.evaluator = {ev.at("kind").get<std::string>(), ev.at("path").get<std::string>(),
                         ev.at("command").get<std::string>(), ev.at("timeout_s").get<double>(),
                         ev.at("seed").get<std::uint64_t>()};
        return run;
    } catch (const LoadError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoadError(LoadError::Kind::corrupt, std::string("run state: ") + e.what());
    }
}

inline std::string serialize_run(const RunState& run) { return run_to_json(run).dump(2) + "\n"; }

inline void save_run(const std::string& path, const RunState& run) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write run state to " + path);
    out << serialize_run(run);
    if (!out) throw std::runtime_error("failed writing run state to " + path);
}

inline RunState load_run(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError(LoadError::Kind::io, "cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw LoadError(LoadError::Kind::corrupt, path + ": not a complete JSON document");
    return run_from_json(j);
}

} // namespace acnf
