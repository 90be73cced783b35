#pragma once

#include <acnf/space.hpp>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace acnf {

enum class Status { ok, incompatible, resource_exhausted, timeout, protocol_error };

inline std::string_view to_string(Status s) {
    switch (s) {
    case Status::ok: return "ok";
    case Status::incompatible: return "incompatible";
    case Status::resource_exhausted: return "resource_exhausted";
    case Status::timeout: return "timeout";
    case Status::protocol_error: return "protocol_error";
    }
    return "?";
}

inline std::optional<Status> parse_status(std::string_view s) {
    for (Status v : {Status::ok, Status::incompatible, Status::resource_exhausted, Status::timeout,
                     Status::protocol_error})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

/// Outcome of evaluating one combination. Accuracy (a fraction) and time
/// (seconds per frame) are present iff status is ok.
class Evaluation {
public:
    static Evaluation success(double accuracy, double time_s) {
        if (!(accuracy >= 0.0 && accuracy <= 1.0))
            throw std::domain_error("evaluation accuracy must lie in [0, 1]");
        if (!(time_s > 0.0) || !std::isfinite(time_s)) throw std::domain_error("evaluation time must be > 0");
        Evaluation e;
        e.accuracy_ = accuracy;
        e.time_s_ = time_s;
        return e;
    }

    static Evaluation failure(Status status, std::string detail = {}) {
        if (status == Status::ok) throw std::invalid_argument("failure() needs a non-ok status");
        Evaluation e;
        e.status_ = status;
        e.detail_ = std::move(detail);
        return e;
    }

    Status status() const noexcept { return status_; }
    bool ok() const noexcept { return status_ == Status::ok; }
    std::optional<double> accuracy() const noexcept { return accuracy_; }
    std::optional<double> time_s() const noexcept { return time_s_; }
    const std::string& detail() const noexcept { return detail_; }

    std::optional<double> m() const {
        if (!ok()) return std::nullopt;
        return *accuracy_ / *time_s_;
    }

    friend bool operator==(const Evaluation&, const Evaluation&) = default;

private:
    Evaluation() = default;

    Status status_ = Status::ok;
    std::optional<double> accuracy_;
    std::optional<double> time_s_;
    std::string detail_;
};

/// Produces an Evaluation for combinations of the space it was built for.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    virtual Evaluation evaluate(const Combination& c) = 0;
};

} // namespace acnf
