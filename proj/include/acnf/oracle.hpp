#pragma once

#include <acnf/detail/text.hpp>
#include <acnf/errors.hpp>
#include <acnf/evaluation.hpp>
#include <acnf/space.hpp>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace acnf {

/// One measured (or failed) combination at a given input size.
struct OracleRow {
    std::vector<std::string> labels;
    int input_size = 0;
    Status status = Status::ok;
    std::optional<double> accuracy;
    std::optional<double> time_s;

    friend bool operator==(const OracleRow&, const OracleRow&) = default;
};

/// Pre-measured results table, one row per (combination, input size).
struct OracleDataset {
    std::vector<std::string> dimension_names;
    std::vector<OracleRow> rows;

    std::size_t count(int input_size, Status status) const {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [&](const OracleRow& r) {
            return r.input_size == input_size && r.status == status;
        }));
    }

    std::vector<int> input_sizes() const {
        std::set<int> s;
        for (const auto& r : rows) s.insert(r.input_size);
        return {s.begin(), s.end()};
    }

    OracleDataset filtered(int input_size) const {
        OracleDataset out{dimension_names, {}};
        for (const auto& r : rows)
            if (r.input_size == input_size) out.rows.push_back(r);
        return out;
    }

    /// Space over the union of labels, each dimension in first-appearance order.
    SearchSpace infer_space() const {
        std::vector<Dimension> dims;
        for (const auto& n : dimension_names) dims.push_back({n, {}});
        for (const auto& r : rows)
            for (std::size_t d = 0; d < dims.size(); ++d)
                if (!dims[d].index_of(r.labels[d])) dims[d].values.push_back(r.labels[d]);
        return SearchSpace(std::move(dims));
    }

    friend bool operator==(const OracleDataset&, const OracleDataset&) = default;
};

namespace detail {

inline constexpr const char* oracle_tail_columns[] = {"input_size", "accuracy", "time_s", "status"};

} // namespace detail

/// Parses the oracle CSV. Header columns are the dimension names followed by
/// `input_size,accuracy,time_s,status`. Accuracy may be a fraction, a
/// percentage with a `%` suffix, or a bare number above 1 (read as a
/// percentage, with a warning).
inline OracleDataset parse_oracle(std::istream& in, const std::string& source,
                                  std::vector<std::string>* warnings = nullptr) {
    std::string line;
    std::size_t lineno = 0;
    OracleDataset ds;
    std::size_t columns = 0;
    bool have_header = false;
    std::map<std::pair<std::vector<std::string>, int>, std::size_t> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        auto fields = detail::split(line, ',');
        if (!have_header) {
            if (fields.size() < 6) throw ParseError(source, lineno, "header needs >= 2 dimension columns plus "
                                                                    "input_size,accuracy,time_s,status");
            const std::size_t dims = fields.size() - 4;
            for (std::size_t i = 0; i < 4; ++i)
                if (fields[dims + i] != detail::oracle_tail_columns[i])
                    throw ParseError(source, lineno, "expected header column '" +
                                                         std::string(detail::oracle_tail_columns[i]) + "', got '" +
                                                         fields[dims + i] + "'");
            ds.dimension_names.assign(fields.begin(), fields.begin() + static_cast<std::ptrdiff_t>(dims));
            for (const auto& n : ds.dimension_names)
                if (n.empty()) throw ParseError(source, lineno, "empty dimension column name");
            columns = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() != columns)
            throw ParseError(source, lineno, "expected " + std::to_string(columns) + " fields, got " +
                                                 std::to_string(fields.size()));
        const std::size_t dims = columns - 4;
        OracleRow row;
        row.labels.assign(fields.begin(), fields.begin() + static_cast<std::ptrdiff_t>(dims));
        for (std::size_t d = 0; d < dims; ++d)
            if (row.labels[d].empty())
                throw ParseError(source, lineno, "empty label for '" + ds.dimension_names[d] + "'");

        const auto size = detail::parse_int(fields[dims]);
        if (!size || *size <= 0 || *size > 1'000'000)
            throw ParseError(source, lineno, "input_size must be a positive integer, got '" + fields[dims] + "'");
        row.input_size = static_cast<int>(*size);

        const auto status = parse_status(fields[dims + 3]);
        if (!status) throw ParseError(source, lineno, "unknown status '" + fields[dims + 3] + "'");
        row.status = *status;

        const std::string& acc_text = fields[dims + 1];
        const std::string& time_text = fields[dims + 2];
        if (row.status == Status::ok || !acc_text.empty() || !time_text.empty()) {
            std::optional<double> acc;
            if (!acc_text.empty() && acc_text.back() == '%') {
                acc = detail::parse_percent(acc_text);
            } else if (auto v = detail::parse_double(acc_text)) {
                acc = *v;
                if (*v > 1.0 && *v <= 100.0) {
                    acc = detail::parse_percent(acc_text);
                    if (warnings)
                        warnings->push_back(source + ":" + std::to_string(lineno) + ": accuracy " + acc_text +
                                            " > 1 read as a percentage (" + detail::format_shortest(*acc) + ")");
                }
            }
            if (!acc || !(*acc >= 0.0 && *acc <= 1.0))
                throw ParseError(source, lineno, "accuracy out of range: '" + acc_text + "'");
            const auto t = detail::parse_double(time_text);
            if (!t || !(*t > 0.0)) throw ParseError(source, lineno, "time_s must be > 0, got '" + time_text + "'");
            if (row.status == Status::ok) {
                row.accuracy = acc;
                row.time_s = t;
            }
        }

        auto key = std::make_pair(row.labels, row.input_size);
        if (auto it = seen.find(key); it != seen.end()) {
            std::string combo;
            for (const auto& l : row.labels) combo += (combo.empty() ? "" : ", ") + l;
            throw ParseError(source, lineno, "duplicate combination (" + combo + ") @" +
                                                 std::to_string(row.input_size) + ", first seen on line " +
                                                 std::to_string(it->second));
        }
        seen.emplace(std::move(key), lineno);
        ds.rows.push_back(std::move(row));
    }
    if (!have_header) throw ParseError(source, 0, "no rows");
    if (ds.rows.empty()) throw ParseError(source, 0, "no rows");
    return ds;
}

inline OracleDataset read_oracle(const std::string& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return parse_oracle(in, path, warnings);
}

inline void write_oracle(std::ostream& out, const OracleDataset& ds) {
    for (const auto& n : ds.dimension_names) out << n << ',';
    out << "input_size,accuracy,time_s,status\n";
    for (const auto& r : ds.rows) {
        for (const auto& l : r.labels) out << l << ',';
        out << r.input_size << ',' << (r.accuracy ? detail::format_shortest(*r.accuracy) : "") << ','
            << (r.time_s ? detail::format_shortest(*r.time_s) : "") << ',' << to_string(r.status) << '\n';
    }
}

struct OracleLoad {
    OracleDataset dataset; ///< rows at the requested input size only
    SearchSpace space;
    std::vector<std::string> warnings;
};

/// Reads the oracle, keeps the rows measured at `input_size` and infers the
/// search space from their labels.
inline OracleLoad load_oracle(const std::string& path, int input_size) {
    OracleLoad out;
    OracleDataset all = read_oracle(path, &out.warnings);
    out.dataset = all.filtered(input_size);
    if (out.dataset.rows.empty())
        throw ParseError(path, 0, "no rows for input_size " + std::to_string(input_size));
    out.space = out.dataset.infer_space();
    return out;
}

/// Answers from a results table. Combinations without a row are incompatible.
class TableOracle final : public Evaluator {
public:
    TableOracle(const SearchSpace& space, const OracleDataset& dataset, int input_size) : space_(space) {
        if (dataset.dimension_names.size() != space.dimension_count())
            throw SpaceError("oracle has " + std::to_string(dataset.dimension_names.size()) +
                             " dimensions, search space has " + std::to_string(space.dimension_count()));
        for (std::size_t d = 0; d < space.dimension_count(); ++d)
            if (dataset.dimension_names[d] != space.dimension(d).name)
                throw SpaceError("oracle column '" + dataset.dimension_names[d] + "' does not match dimension '" +
                                 space.dimension(d).name + "'");
        for (const auto& r : dataset.rows) {
            if (r.input_size != input_size) continue;
            auto c = space.find(r.labels);
            if (!c) {
                std::string combo;
                for (const auto& l : r.labels) combo += (combo.empty() ? "" : ", ") + l;
                throw SpaceError("oracle row (" + combo + ") has a label outside the search space");
            }
            table_.emplace(space.encode(*c), r.status == Status::ok
                                                 ? Evaluation::success(*r.accuracy, *r.time_s)
                                                 : Evaluation::failure(r.status, "recorded failure"));
        }
    }

    Evaluation evaluate(const Combination& c) override {
        auto it = table_.find(space_.encode(c));
        if (it == table_.end()) return Evaluation::failure(Status::incompatible, "no measurement for combination");
        return it->second;
    }

private:
    SearchSpace space_;
    std::unordered_map<std::size_t, Evaluation> table_;
};

} // namespace acnf
