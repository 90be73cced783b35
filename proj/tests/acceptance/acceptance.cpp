// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <acnf/acnf.hpp>
#include <acnf/cli.hpp>

#include "../support/reference.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace acnf;

namespace {

const std::string table1 = ACNF_DATA_DIR "/table1.csv";

struct Verdict {
    bool pass;
    std::string detail;
};

SearchSpace cube(const std::vector<std::size_t>& sizes) {
    std::vector<Dimension> dims;
    for (std::size_t d = 0; d < sizes.size(); ++d) {
        Dimension dim{"d" + std::to_string(d), {}};
        for (std::size_t v = 0; v < sizes[d]; ++v) dim.values.push_back("v" + std::to_string(v));
        dims.push_back(std::move(dim));
    }
    return SearchSpace(std::move(dims));
}

Verdict transcription() {
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream out, err;
    const int code = cli::run({"validate", table1}, out, err);
    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);
    const auto small = oracle.evaluate(*load.space.find(std::vector<std::string>{"LRASPP-MobileNetV3-Small", "Apache TVM", "none"}));
    const auto alds = oracle.evaluate(*load.space.find(std::vector<std::string>{"LRASPP-MobileNetV3-Large", "Apache TVM", "alds-45"}));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool counts = code == 0 && out.str().find("12 ok rows @513, 4 @284") != std::string::npos;
    const bool spots = small.ok() && *small.time_s() == 0.39 && *small.accuracy() == 0.61 && alds.ok() &&
                       *alds.time_s() == 0.6 && *alds.accuracy() == 0.5639;
    std::ostringstream d;
    d << "validate: \"" << detail::trim(out.str()) << "\"; spot values " << (spots ? "exact" : "MISMATCH") << "; "
      << detail::format_fixed(secs, 3) << " s";
    return {counts && spots && secs < 1.0, d.str()};
}

Verdict convergence() {
    // 4000 reference runs (seeds 1000..4999) converge 39.8% of the time; the
    // target is drawn at all in only about half of all 60-step runs. 3/20 is
    // met with probability 0.996 at that rate and ~0.001 by chance.
    constexpr int threshold = 3;
    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);
    const std::size_t target =
        load.space.encode(*load.space.find(std::vector<std::string>{"LRASPP-MobileNetV3-Small", "Apache TVM", "none"}));
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SearchConfig c;
        c.seed = seed;
        hits += run_search(load.space, oracle, c).state.argmax() == target;
    }
    return {hits >= threshold, std::to_string(hits) + "/20 runs end with argmax = (LRASPP-MobileNetV3-Small, "
                                                      "Apache TVM, none); threshold " +
                                   std::to_string(threshold) + "/20"};
}

Verdict bad_pair_exclusion() {
    const SearchSpace space({{"network", {"n0", "n1", "n2", "n3"}},
                             {"framework", {"f0", "f1", "f2"}},
                             {"compression", {"c0", "c1", "c2", "c3", "c4"}}});
    LandscapeSpec spec{space, 1.0, 1.0, {}, {}};
    spec.bad_pairs.push_back({"framework", "f1", "compression", "c3", 1.0, 1.0});
    int excluded_runs = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SyntheticLandscape land(spec, seed);
        SearchConfig c;
        c.seed = seed;
        c.iterations = 30;
        const RunState run = run_search(space, land, c);
        bool all = true;
        for (std::size_t n = 0; n < 4; ++n) all = all && run.state.excluded[space.encode(Combination{{n, 1, 3}})];
        excluded_runs += all;
    }
    return {excluded_runs >= 18, std::to_string(excluded_runs) +
                                     "/20 seeds exclude every (f1, c3) combination within 30 iterations; need 18/20"};
}

Verdict update_equivalence() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0.0;
    int mismatched_flags = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<std::size_t> sizes(2 + rng() % 2);
        for (auto& s : sizes) s = 1 + rng() % 5;
        const SearchSpace space = cube(sizes);
        SearchConfig c;
        c.policy = i % 2 ? UpdatePolicy::per_pair : UpdatePolicy::once;
        c.alpha = AlphaMode::fixed(0.05 + 2.0 * unit(rng));
        c.gamma_min = 0.05 + 0.95 * unit(rng);
        c.gamma_max = 1.0 + 9.0 * unit(rng);
        c.exclusion_floor = rng() % 3 ? 0.3 * unit(rng) : 0.0;

        SamplingState st = init_state(space, c);
        double total = 0.0;
        for (std::size_t k = 0; k < st.u.size(); ++k) {
            if (st.u.size() > 1 && rng() % 6 == 0) {
                st.u[k] = 0.0;
                st.excluded[k] = 1;
            } else {
                total += (st.u[k] = 0.01 + unit(rng));
            }
        }
        if (total == 0.0) {
            st.excluded[0] = 0;
            total = st.u[0] = 1.0;
        }
        for (auto& p : st.u) p /= total;
        std::vector<bool> excluded(st.excluded.begin(), st.excluded.end());

        const Combination sampled = space.decode(rng() % space.combination_count());
        const double m = std::exp(6.0 * unit(rng) - 3.0) * (rng() % 10 ? 1.0 : 0.0);
        const double gamma = std::clamp(m / c.alpha.value, c.gamma_min, c.gamma_max);
        const auto ref = reference::pair_update(sizes, st.u, excluded, sampled.indices, gamma,
                                                c.policy == UpdatePolicy::per_pair, c.exclusion_floor);
        pair_checker(space, st, sampled, m, c);
        for (std::size_t k = 0; k < st.u.size(); ++k) {
            worst = std::max(worst, std::abs(st.u[k] - ref.u[k]));
            mismatched_flags += static_cast<bool>(st.excluded[k]) != ref.excluded[k];
        }
    }
    std::ostringstream d;
    d << "1000 cases, both policies: max |diff| = " << worst << ", exclusion flag mismatches = " << mismatched_flags;
    return {worst <= 1e-12 && mismatched_flags == 0, d.str()};
}

Verdict invariants() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    long operations = 0;
    std::string broken;
    for (int seq = 0; seq < 10000 && broken.empty(); ++seq) {
        std::vector<std::size_t> sizes(2 + rng() % 2);
        for (auto& s : sizes) s = 1 + rng() % 4;
        const SearchSpace space = cube(sizes);
        SearchConfig c;
        c.policy = rng() % 2 ? UpdatePolicy::once : UpdatePolicy::per_pair;
        if (rng() % 2) c.alpha = AlphaMode::fixed(0.1 + unit(rng));
        c.failure_factor = 0.05 + 0.9 * unit(rng);
        c.exclusion_floor = 0.5 * unit(rng);
        c.seed = rng();
        SamplingState st = init_state(space, c);
        std::vector<std::uint8_t> seen(st.u.size(), 0);
        const int length = 1 + static_cast<int>(rng() % 30);
        for (int op = 0; op < length && broken.empty(); ++op, ++operations) {
            const Combination pick = sample(space, st);
            if (rng() % 3 == 0)
                record_failure(space, st, pick, c);
            else
                pair_checker(space, st, pick, std::exp(4.0 * unit(rng) - 2.0), c);
            double total = 0.0;
            for (std::size_t k = 0; k < st.u.size(); ++k) {
                if (st.u[k] < 0.0) broken = "negative entry";
                if (seen[k] && !st.excluded[k]) broken = "excluded entry revived";
                if (st.excluded[k] && st.u[k] != 0.0) broken = "excluded entry holds mass";
                if (!st.excluded[k]) total += st.u[k];
                seen[k] |= st.excluded[k];
            }
            if (std::abs(total - 1.0) > 1e-9) broken = "active mass sums to " + detail::format_shortest(total);
        }
    }
    return {broken.empty(), "10000 sequences, " + std::to_string(operations) + " operations" +
                                (broken.empty() ? ": no violation" : ": " + broken)};
}

Verdict pareto() {
    std::mt19937_64 rng(10);
    int wrong = 0;
    for (int t = 0; t < 500; ++t) {
        std::vector<ResultRecord> rows;
        const std::size_t n = rng() % 40;
        for (std::size_t i = 0; i < n; ++i) {
            ResultRecord r;
            r.flat_index = i;
            if (rng() % 8 == 0) {
                r.status = Status::timeout;
            } else {
                r.accuracy = static_cast<double>(rng() % 11) / 10.0;
                r.time_s = 0.1 + static_cast<double>(rng() % 8);
                r.m = *r.accuracy / *r.time_s;
            }
            rows.push_back(r);
        }
        auto expected = reference::pareto_flat_indices(rows);
        std::vector<std::size_t> got;
        for (const auto& r : pareto_front(std::span<const ResultRecord>(rows))) got.push_back(r.flat_index);
        std::sort(expected.begin(), expected.end());
        std::sort(got.begin(), got.end());
        wrong += got != expected;
    }

    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);
    ResultsTable tvm;
    const std::size_t f = *load.space.dimension(1).index_of("Apache TVM");
    for (std::size_t i = 0; i < load.space.combination_count(); ++i) {
        const Combination c = load.space.decode(i);
        if (c[1] == f) tvm.record(load.space, c, oracle.evaluate(c), 1, 513);
    }
    std::vector<std::pair<double, double>> front;
    for (const auto& r : pareto_front(tvm)) front.emplace_back(*r.time_s, *r.accuracy);
    const std::vector<std::pair<double, double>> expected = {{0.39, 0.61}, {1.02, 0.65}};
    std::ostringstream d;
    d << (500 - wrong) << "/500 random tables match brute force; TVM@513 front = {";
    for (std::size_t i = 0; i < front.size(); ++i)
        d << (i ? ", " : "") << "(" << front[i].first << " s, " << front[i].second * 100 << "%)";
    d << "}";
    return {wrong == 0 && front == expected, d.str()};
}

Verdict determinism() {
    std::mt19937_64 rng(12);
    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);
    int identical = 0;
    for (int i = 0; i < 10; ++i) {
        SearchConfig c;
        c.seed = rng();
        c.iterations = 10 + rng() % 80;
        c.policy = rng() % 2 ? UpdatePolicy::once : UpdatePolicy::per_pair;
        if (rng() % 2) c.alpha = AlphaMode::fixed(0.3 + static_cast<double>(rng() % 100) / 100.0);
        c.cache_evaluations = rng() % 4 != 0;
        c.exclusion_floor = static_cast<double>(rng() % 5) / 100.0;
        const std::size_t cut = 1 + rng() % (c.iterations - 1);

        const RunState whole = run_search(load.space, oracle, c);
        const RunState twin = run_search(load.space, oracle, c);
        RunState part = start_run(load.space, c, 513);
        advance(part, oracle, cut);
        const std::string path = "acceptance_resume_" + std::to_string(i) + ".json";
        save_run(path, part);
        RunState resumed = load_run(path);
        std::remove(path.c_str());
        advance(resumed, oracle);

        bool same = true;
        for (auto fmt : {ReportFormat::csv, ReportFormat::markdown}) {
            const std::string a = emit_report(whole.space, whole.table, whole.state, fmt);
            same = same && a == emit_report(twin.space, twin.table, twin.state, fmt) &&
                   a == emit_report(resumed.space, resumed.table, resumed.state, fmt);
        }
        same = same && serialize_run(whole) == serialize_run(resumed) && serialize_run(whole) == serialize_run(twin);
        identical += same;
    }
    return {identical == 10, std::to_string(identical) + "/10 random configs: repeat and save/load-split runs "
                                                          "byte-identical"};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"transcription fidelity", transcription},
        {"convergence on the comparison table", convergence},
        {"bad-pair exclusion", bad_pair_exclusion},
        {"update-rule oracle equivalence", update_equivalence},
        {"distribution invariants under fuzzing", invariants},
        {"pareto correctness", pareto},
        {"determinism and resume", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << " — " << v.detail
                  << std::endl;
    }
    std::cout << (criteria.size() - failed) << '/' << criteria.size() << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
