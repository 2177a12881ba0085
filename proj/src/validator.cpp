#include "floors/validator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "floors/errors.hpp"
#include "floors/stats.hpp"

namespace floors {

std::optional<TukeyFences> tukey_fences(std::vector<double> values, double k) {
    if (values.size() < 4) return std::nullopt;
    std::sort(values.begin(), values.end());
    const double q1 = quantile_sorted(values, 0.25);
    const double q3 = quantile_sorted(values, 0.75);
    const double iqr = q3 - q1;
    return TukeyFences{q1 - k * iqr, q3 + k * iqr};
}

ValidationReport validate_model(const FloorModel& new_model,
                                const std::vector<FloorModel>& history,
                                const ValidatorConfig& cfg) {
    ValidationReport report;

    // Trailing window, newest last.
    size_t take = std::min<size_t>(history.size(), static_cast<size_t>(std::max(cfg.history_window, 0)));
    std::vector<const FloorModel*> window;
    for (size_t i = history.size() - take; i < history.size(); ++i) window.push_back(&history[i]);
    report.history_models = static_cast<int>(window.size());

    using Key = std::tuple<std::string, std::string, std::string>;
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> past;
    for (const FloorModel* m : window) {
        for (const auto& r : m->rows) {
            auto& [reg, reb] = past[{r.publisher_id, r.site_id, r.placement_id}];
            reg.push_back(r.regular);
            reb.push_back(r.rebroadcaster);
        }
    }

    auto check = [&](const FloorModelRow& row, const char* field, double value,
                     const std::vector<double>* series) {
        if (!series) {
            report.warnings.push_back("no history for " + row.publisher_id + "/" + row.site_id +
                                      "/" + row.placement_id + ": auto-pass");
            return;
        }
        auto fences = tukey_fences(*series, cfg.tukey_k);
        if (!fences) {
            report.warnings.push_back("only " + std::to_string(series->size()) +
                                      " historical values for " + row.publisher_id + "/" +
                                      row.site_id + "/" + row.placement_id + " " + field +
                                      ": auto-pass");
            return;
        }
        if (value < fences->low || value > fences->high) {
            report.outliers.push_back(
                {row.publisher_id, row.site_id, row.placement_id, field, value, *fences});
        }
    };

    for (const auto& row : new_model.rows) {
        auto it = past.find({row.publisher_id, row.site_id, row.placement_id});
        if (it == past.end()) {
            check(row, "Regular", row.regular, nullptr);
            continue;
        }
        check(row, "Regular", row.regular, &it->second.first);
        check(row, "Rebroadcaster", row.rebroadcaster, &it->second.second);
    }

    report.status = report.outliers.empty() ? ValidationStatus::Pass : ValidationStatus::Fail;
    return report;
}

const char* to_string(DeployAction a) {
    switch (a) {
        case DeployAction::Deploy: return "deploy";
        case DeployAction::Rollback: return "rollback";
        case DeployAction::Reject: return "reject";
    }
    return "?";
}

std::optional<DeployAction> parse_deploy_action(std::string_view s) {
    if (s == "deploy") return DeployAction::Deploy;
    if (s == "rollback") return DeployAction::Rollback;
    if (s == "reject") return DeployAction::Reject;
    return std::nullopt;
}

DeploymentJournal::DeploymentJournal(std::string path) : path_(std::move(path)) {}

void DeploymentJournal::record(const DeploymentEvent& event) {
    std::string existing;
    {
        std::ifstream in(path_, std::ios::binary);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            existing = ss.str();
        }
    }

    nlohmann::json j{{"ts", event.ts},
                     {"action", to_string(event.action)},
                     {"model_version", event.model_version},
                     {"reason", event.reason}};
    existing += j.dump();
    existing += '\n';

    const std::string tmp = path_ + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write journal temp file: " + tmp);
        out.write(existing.data(), static_cast<std::streamsize>(existing.size()));
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path_.c_str()) != 0) {
        throw std::runtime_error("cannot rename " + tmp + " to " + path_);
    }
}

std::vector<DeploymentEvent> DeploymentJournal::read_all() const {
    std::vector<DeploymentEvent> events;
    std::ifstream in(path_, std::ios::binary);
    if (!in) return events;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            throw std::runtime_error("corrupt journal line " + std::to_string(lineno) + " in " + path_);
        }
        DeploymentEvent e;
        e.ts = j.value("ts", "");
        auto action = parse_deploy_action(j.value("action", ""));
        if (!action) {
            throw std::runtime_error("unknown journal action at line " + std::to_string(lineno));
        }
        e.action = *action;
        e.model_version = j.value("model_version", "");
        e.reason = j.value("reason", "");
        events.push_back(std::move(e));
    }
    return events;
}

std::optional<std::string> DeploymentJournal::current_deployed_version() const {
    auto events = read_all();
    for (auto it = events.rbegin(); it != events.rend(); ++it) {
        if (it->action == DeployAction::Deploy || it->action == DeployAction::Rollback) {
            return it->model_version;
        }
    }
    return std::nullopt;
}

}  // namespace floors
