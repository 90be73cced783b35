#pragma once

#include <acnf/detail/text.hpp>
#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/sampling.hpp>
#include <acnf/space.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace acnf {

/// One row of the global results table: the combination, what it measured
/// and how often the search drew it.
struct ResultRecord {
    std::size_t flat_index = 0;
    std::vector<std::string> labels;
    int input_size = 0;
    std::size_t iteration_first_seen = 0;
    Status status = Status::ok;
    std::optional<double> accuracy;
    std::optional<double> time_s;
    std::optional<double> m;
    std::size_t hit_count = 1;
    std::string detail;

    bool ok() const noexcept { return status == Status::ok; }

    Evaluation evaluation() const {
        return ok() ? Evaluation::success(*accuracy, *time_s) : Evaluation::failure(status, detail);
    }

    friend bool operator==(const ResultRecord&, const ResultRecord&) = default;
};

/// Keyed by combination; rows are materialised the first time a combination
/// is drawn.
class ResultsTable {
public:
    using container = std::map<std::size_t, ResultRecord>;

    /// Inserts a row, or bumps hit_count if the combination is already present.
    const ResultRecord& record(const SearchSpace& space, const Combination& c, const Evaluation& e,
                               std::size_t iteration, int input_size) {
        const std::size_t flat = space.encode(c);
        if (auto it = rows_.find(flat); it != rows_.end()) {
            ++it->second.hit_count;
            return it->second;
        }
        ResultRecord r;
        r.flat_index = flat;
        r.labels = space.labels(c);
        r.input_size = input_size;
        r.iteration_first_seen = iteration;
        r.status = e.status();
        r.accuracy = e.accuracy();
        r.time_s = e.time_s();
        r.m = e.m();
        r.detail = e.detail();
        return rows_.emplace(flat, std::move(r)).first->second;
    }

    /// Restores a row verbatim (persistence).
    void insert(ResultRecord r) { rows_.insert_or_assign(r.flat_index, std::move(r)); }

    const ResultRecord* find(std::size_t flat) const {
        auto it = rows_.find(flat);
        return it == rows_.end() ? nullptr : &it->second;
    }

    std::size_t size() const noexcept { return rows_.size(); }
    bool empty() const noexcept { return rows_.empty(); }
    container::const_iterator begin() const { return rows_.begin(); }
    container::const_iterator end() const { return rows_.end(); }

    std::vector<ResultRecord> records() const {
        std::vector<ResultRecord> out;
        out.reserve(rows_.size());
        for (const auto& [_, r] : rows_) out.push_back(r);
        return out;
    }

    std::size_t total_hits() const {
        std::size_t n = 0;
        for (const auto& [_, r] : rows_) n += r.hit_count;
        return n;
    }

    friend bool operator==(const ResultsTable&, const ResultsTable&) = default;

private:
    container rows_;
};

/// Ok records not dominated in the (time, accuracy) plane: nothing else is at
/// least as fast and at least as accurate with one strict. Sorted by time,
/// then flat index; exact duplicates on both axes are all kept.
inline std::vector<ResultRecord> pareto_front(std::span<const ResultRecord> records) {
    std::vector<const ResultRecord*> ok;
    for (const auto& r : records)
        if (r.ok()) ok.push_back(&r);
    std::sort(ok.begin(), ok.end(), [](const ResultRecord* a, const ResultRecord* b) {
        if (*a->time_s != *b->time_s) return *a->time_s < *b->time_s;
        if (*a->accuracy != *b->accuracy) return *a->accuracy > *b->accuracy;
        return a->flat_index < b->flat_index;
    });
    std::vector<ResultRecord> front;
    std::optional<double> best_faster; // best accuracy among strictly faster records
    for (std::size_t i = 0; i < ok.size();) {
        std::size_t j = i;
        const double group_best = *ok[i]->accuracy;
        for (; j < ok.size() && *ok[j]->time_s == *ok[i]->time_s; ++j)
            if (*ok[j]->accuracy == group_best && (!best_faster || group_best > *best_faster)) front.push_back(*ok[j]);
        if (!best_faster || group_best > *best_faster) best_faster = group_best;
        i = j;
    }
    return front;
}

inline std::vector<ResultRecord> pareto_front(const ResultsTable& table) {
    const auto rows = table.records();
    return pareto_front(std::span<const ResultRecord>(rows));
}

/// Highest m; ties go to the lowest flat index.
inline const ResultRecord& best_by_m(const ResultsTable& table) {
    const ResultRecord* best = nullptr;
    for (const auto& [_, r] : table)
        if (r.ok() && (!best || *r.m > *best->m)) best = &r;
    if (!best) throw NoResult("results table has no ok record");
    return *best;
}

enum class ReportFormat { csv, markdown };

namespace detail {

/// Descending m; failures after, all ties by flat index.
inline std::vector<const ResultRecord*> report_order(const ResultsTable& table) {
    std::vector<const ResultRecord*> rows;
    for (const auto& [_, r] : table) rows.push_back(&r);
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRecord* a, const ResultRecord* b) {
        if (a->m.has_value() != b->m.has_value()) return a->m.has_value();
        if (a->m && *a->m != *b->m) return *a->m > *b->m;
        return false;
    });
    return rows;
}

inline std::string column_title(const std::string& name) {
    if (name == "network") return "Network (model)";
    if (name == "framework") return "Framework";
    if (name == "compression") return "Compression";
    return name;
}

inline double probability_of(const SamplingState& state, std::size_t flat) {
    return flat < state.u.size() ? state.u[flat] : 0.0;
}

} // namespace detail

/// Results report. CSV carries the oracle columns plus m, hit_count and the
/// final sampling probability; markdown mirrors the comparison-table layout
/// with one block per input size.
inline std::string emit_report(const SearchSpace& space, const ResultsTable& table, const SamplingState& state,
                               ReportFormat format) {
    std::ostringstream out;
    const auto rows = detail::report_order(table);
    if (format == ReportFormat::csv) {
        for (const auto& d : space.dimensions()) out << d.name << ',';
        out << "input_size,accuracy,time_s,status,m,hit_count,probability\n";
        for (const auto* r : rows) {
            for (const auto& l : r->labels) out << l << ',';
            out << r->input_size << ',' << (r->accuracy ? detail::format_shortest(*r->accuracy) : "") << ','
                << (r->time_s ? detail::format_shortest(*r->time_s) : "") << ',' << to_string(r->status) << ','
                << (r->m ? detail::format_shortest(*r->m) : "") << ',' << r->hit_count << ','
                << detail::format_shortest(detail::probability_of(state, r->flat_index)) << '\n';
        }
        return out.str();
    }

    out << '|';
    for (const auto& d : space.dimensions()) out << ' ' << detail::column_title(d.name) << " |";
    out << " Inference Time [sec] | mIoU | m | Hits | Probability | Status |\n|";
    for (std::size_t i = 0; i < space.dimension_count() + 6; ++i) out << "---|";
    out << '\n';

    std::vector<int> sizes;
    for (const auto* r : rows)
        if (std::find(sizes.begin(), sizes.end(), r->input_size) == sizes.end()) sizes.push_back(r->input_size);
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    for (int size : sizes) {
        out << "| **Input " << size << 'x' << size << "** |";
        for (std::size_t i = 0; i < space.dimension_count() + 5; ++i) out << " |";
        out << '\n';
        for (const auto* r : rows) {
            if (r->input_size != size) continue;
            out << '|';
            for (const auto& l : r->labels) out << ' ' << l << " |";
            out << ' ' << (r->time_s ? detail::format_shortest(*r->time_s) : "-") << " | "
                << (r->accuracy ? detail::format_trimmed(*r->accuracy * 100.0, 2, 1) + "%" : "-") << " | "
                << (r->m ? detail::format_fixed(*r->m, 4) : "-") << " | " << r->hit_count << " | "
                << detail::format_fixed(detail::probability_of(state, r->flat_index), 6) << " | "
                << to_string(r->status) << " |\n";
        }
    }
    return out.str();
}

} // namespace acnf
