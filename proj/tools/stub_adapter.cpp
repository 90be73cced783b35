// Minimal evaluator child for the JSON-lines protocol. Replays an oracle CSV
// and can misbehave on purpose so the parent's error paths can be exercised.

#include <acnf/oracle.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <iostream>
#include <map>
#include <string>
#include <thread>

using nlohmann::json;

namespace {

struct Options {
    std::string mode = "replay";
    std::string dataset;
    int protocol = 1;
    double delay_s = 0.0;
    bool inject_timeout = false;
    bool inject_malformed = false;
    bool wrong_id = false;
    int die_after = -1;
};

void send(const json& j) { std::cout << j.dump() << '\n' << std::flush; }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"acnf protocol stub adapter", "acnf_stub_adapter"};
    Options o;
    app.add_option("--mode", o.mode, "replay | echo | silent")->check(CLI::IsMember({"replay", "echo", "silent"}));
    app.add_option("--dataset", o.dataset, "Oracle CSV for replay mode");
    app.add_option("--protocol", o.protocol, "Protocol version announced in hello");
    app.add_option("--delay-s", o.delay_s, "Sleep before every eval reply");
    app.add_flag("--inject-timeout", o.inject_timeout, "Never answer the first eval request");
    app.add_flag("--inject-malformed", o.inject_malformed, "Answer the first eval request with garbage");
    app.add_flag("--wrong-id", o.wrong_id, "Echo a wrong id on every eval reply");
    app.add_option("--die-after", o.die_after, "Exit(3) on receiving eval request number N+1");
    CLI11_PARSE(app, argc, argv);

    acnf::OracleDataset ds;
    if (o.mode == "replay") {
        if (o.dataset.empty()) {
            std::cerr << "--dataset is required in replay mode\n";
            return 2;
        }
        try {
            ds = acnf::read_oracle(o.dataset);
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return 2;
        }
    }

    int evals = 0;
    std::string line;
    while (std::getline(std::cin, line)) {
        if (o.mode == "silent") continue;
        const json msg = json::parse(line, nullptr, false);
        if (msg.is_discarded() || !msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
            send({{"type", "result"}, {"id", 0}, {"status", "error"}, {"detail", "malformed request"}});
            continue;
        }
        const std::string type = msg["type"];
        if (type == "hello") {
            send({{"type", "hello"}, {"protocol", o.protocol}, {"name", "acnf-stub-" + o.mode}});
            continue;
        }
        if (type == "shutdown") return 0;
        if (type != "eval") {
            send({{"type", "result"}, {"id", msg.value("id", 0)}, {"status", "error"}, {"detail", "unknown type"}});
            continue;
        }

        ++evals;
        if (o.die_after >= 0 && evals > o.die_after) return 3;
        if (o.inject_timeout && evals == 1) continue;
        if (o.inject_malformed && evals == 1) {
            std::cout << "{not json\n" << std::flush;
            continue;
        }
        if (o.delay_s > 0) std::this_thread::sleep_for(std::chrono::duration<double>(o.delay_s));

        const std::uint64_t id = msg.value("id", std::uint64_t{0}) + (o.wrong_id ? 1000 : 0);
        json reply = {{"type", "result"}, {"id", id}};
        if (o.mode == "echo") {
            reply["status"] = "ok";
            reply["accuracy"] = 0.5;
            reply["time_s"] = 1.0;
            send(reply);
            continue;
        }
        const json& combo = msg.contains("combination") ? msg["combination"] : json::object();
        const int size = msg.value("input_size", 0);
        const acnf::OracleRow* hit = nullptr;
        for (const auto& row : ds.rows) {
            if (row.input_size != size) continue;
            bool match = combo.is_object();
            for (std::size_t d = 0; match && d < ds.dimension_names.size(); ++d) {
                auto it = combo.find(ds.dimension_names[d]);
                match = it != combo.end() && it->is_string() && it->get<std::string>() == row.labels[d];
            }
            if (match) {
                hit = &row;
                break;
            }
        }
        if (!hit) {
            reply["status"] = "incompatible";
            reply["detail"] = "no measurement for combination";
        } else if (hit->status == acnf::Status::ok) {
            reply["status"] = "ok";
            reply["accuracy"] = *hit->accuracy;
            reply["time_s"] = *hit->time_s;
        } else {
            reply["status"] = hit->status == acnf::Status::protocol_error ? std::string("error")
                                                                          : std::string(acnf::to_string(hit->status));
            reply["detail"] = "recorded failure";
        }
        send(reply);
    }
    return 0;
}
