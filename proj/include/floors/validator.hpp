#pragma once

#include <optional>
#include <string>
#include <vector>

#include "floors/model_csv.hpp"

namespace floors {

struct TukeyFences {
    double low = 0.0;
    double high = 0.0;
};

// Q1 - k*IQR, Q3 + k*IQR with linear-interpolation quartiles. Null when
// fewer than four values are available.
std::optional<TukeyFences> tukey_fences(std::vector<double> values, double k = 1.5);

enum class ValidationStatus { Pass, Fail };

struct OutlierFinding {
    std::string publisher_id;
    std::string site_id;
    std::string placement_id;
    std::string field;  // model CSV column name
    double value = 0.0;
    TukeyFences fences;
};

struct ValidationReport {
    ValidationStatus status = ValidationStatus::Pass;
    std::vector<OutlierFinding> outliers;
    std::vector<std::string> warnings;
    int history_models = 0;
};

struct ValidatorConfig {
    int history_window = 14;  // models considered, newest last
    double tukey_k = 1.5;
};

// Checks each new floor against fences built from that placement's values
// across the trailing history models. Placements without enough history
// pass with a warning.
ValidationReport validate_model(const FloorModel& new_model,
                                const std::vector<FloorModel>& history,
                                const ValidatorConfig& cfg = {});

enum class DeployAction { Deploy, Rollback, Reject };

const char* to_string(DeployAction a);
std::optional<DeployAction> parse_deploy_action(std::string_view s);

struct DeploymentEvent {
    std::string ts;
    DeployAction action = DeployAction::Deploy;
    std::string model_version;
    std::string reason;
};

// Append-only newline-delimited journal. Appends rewrite to a temp file and
// rename so a crash never leaves a torn journal.
class DeploymentJournal {
public:
    explicit DeploymentJournal(std::string path);

    void record(const DeploymentEvent& event);
    std::vector<DeploymentEvent> read_all() const;

    // Version from the latest Deploy or Rollback entry; Rejects don't serve.
    std::optional<std::string> current_deployed_version() const;

private:
    std::string path_;
};

}  // namespace floors
