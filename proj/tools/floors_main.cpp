// floors: simulate a first-price marketplace, train floor models from its
// logs, validate them against history, and serve them over HTTP.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "floors/config.hpp"
#include "floors/errors.hpp"
#include "floors/floor_index.hpp"
#include "floors/model_csv.hpp"
#include "floors/pipeline.hpp"
#include "floors/service.hpp"
#include "floors/sim.hpp"
#include "floors/validator.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidationFail = 3;

long env_long(const char* name, long fallback) {
    if (const char* v = std::getenv(name)) {
        try {
            return std::stol(v);
        } catch (...) {
            throw floors::ConfigError(std::string(name) + " must be an integer, got " + v);
        }
    }
    return fallback;
}

double env_double(const char* name, double fallback) {
    if (const char* v = std::getenv(name)) {
        try {
            return std::stod(v);
        } catch (...) {
            throw floors::ConfigError(std::string(name) + " must be a number, got " + v);
        }
    }
    return fallback;
}

// flag > environment > config file > built-in default
template <typename T, typename EnvFn, typename CfgFn>
T resolve(const std::optional<T>& flag, const char* env_name, EnvFn env_get, CfgFn cfg_get,
          T fallback) {
    if (flag) return *flag;
    if (std::getenv(env_name)) return env_get(env_name, fallback);
    return cfg_get(fallback);
}

int cmd_simulate(const std::string& config_path, const std::string& out_path,
                 std::optional<long> seed_flag, const std::string& model_path) {
    floors::Config kv = floors::Config::load(config_path);
    floors::SimConfig cfg = floors::load_sim_config(kv);
    cfg.seed = static_cast<std::uint64_t>(resolve<long>(
        seed_flag, "FLOORS_SEED", env_long,
        [&](long fb) { return kv.get_long("seed", fb); }, static_cast<long>(cfg.seed)));

    floors::FloorPolicy policy;
    std::string policy_name;
    if (!model_path.empty()) {
        floors::FloorModel model = floors::load_model_file(model_path);
        auto idx = std::make_shared<const floors::FloorIndex>(
            floors::FloorIndex::from_model(model, 0.0));
        policy = floors::index_policy(idx);
        policy_name = "model:" + model.version;
    } else {
        policy = floors::adx_static_policy(cfg);
        policy_name = "adx-static";
    }

    long records = 0;
    {
        floors::LogWriter writer(out_path);
        floors::simulate_period(cfg, policy, [&](const floors::AuctionLogRecord& r) {
            writer.write(r);
            ++records;
        });
    }
    json out{{"log", out_path},
             {"records", records},
             {"days", cfg.days},
             {"requestsPerDay", cfg.requests_per_day},
             {"dynamicPolicy", policy_name},
             {"seed", cfg.seed}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

int cmd_train(const std::vector<std::string>& log_paths, const std::string& run_date_str,
              const std::string& out_path, const std::string& config_path,
              std::optional<long> seed_flag, std::optional<long> parallelism_flag,
              std::optional<long> window_flag, std::optional<double> budget_flag,
              const std::string& previous_path) {
    floors::Config kv = config_path.empty() ? floors::Config{} : floors::Config::load(config_path);

    auto run_date = floors::parse_date(run_date_str);
    if (!run_date) {
        std::cerr << "run date must be YYYY-MM-DD, got " << run_date_str << "\n";
        return kExitUsage;
    }

    floors::IngestConfig ingest;
    ingest.window_days = static_cast<int>(resolve<long>(
        window_flag, "FLOORS_WINDOW_DAYS", env_long,
        [&](long fb) { return kv.get_long("windowDays", fb); }, 7));

    floors::TrainConfig train;
    train.seed = static_cast<std::uint64_t>(resolve<long>(
        seed_flag, "FLOORS_SEED", env_long, [&](long fb) { return kv.get_long("seed", fb); }, 1));
    train.parallelism = static_cast<int>(resolve<long>(
        parallelism_flag, "FLOORS_PARALLELISM", env_long,
        [&](long fb) { return kv.get_long("parallelism", fb); }, 1));
    train.placement_budget_seconds = resolve<double>(
        budget_flag, "FLOORS_PLACEMENT_BUDGET_SECONDS", env_double,
        [&](double fb) { return kv.get_double("placementBudgetSeconds", fb); }, 30.0);
    train.min_observations = kv.get_long("minObservations", train.min_observations);
    train.grid_size = static_cast<int>(kv.get_long("gridSize", train.grid_size));
    train.mc_draws = kv.get_long("mcDraws", train.mc_draws);
    train.quadrature_nodes = static_cast<int>(kv.get_long("quadratureNodes", train.quadrature_nodes));
    if (!previous_path.empty()) train.previous_model = floors::load_model_file(previous_path);

    floors::TrainingSet set = floors::ingest_logs(log_paths, *run_date, ingest);
    floors::TrainResult result = floors::train_all(set, train);

    std::string csv = floors::emit_model_csv(result.model.rows);
    floors::write_model_file(out_path, csv);

    json placements = json::array();
    for (const auto& p : result.report.placements) {
        placements.push_back({{"publisherId", p.key.publisher_id},
                              {"siteId", p.key.site_id},
                              {"placementId", p.key.placement_id},
                              {"status", floors::to_string(p.status)},
                              {"detail", p.detail},
                              {"seconds", p.seconds},
                              {"evaluations", p.evaluations}});
    }
    json out{{"model", out_path},
             {"modelVersion", result.model.version},
             {"recordsUsed", set.records_used},
             {"recordsRejected", set.records_rejected},
             {"trained", result.report.trained},
             {"fallbackTimeout", result.report.fallback_timeout},
             {"fallbackInsufficientData", result.report.fallback_insufficient},
             {"fallbackError", result.report.fallback_error},
             {"placements", placements}};
    std::cout << out.dump(2) << "\n";

    if (result.report.all_fallback()) {
        std::cerr << "every placement fell back; refusing to publish a trained model\n";
        return kExitError;
    }
    return kExitOk;
}

int cmd_validate(const std::string& model_path, const std::vector<std::string>& history_paths,
                 std::optional<long> window_flag, double tukey_k, const std::string& journal_path) {
    floors::FloorModel model = floors::load_model_file(model_path);
    std::vector<floors::FloorModel> history;
    history.reserve(history_paths.size());
    for (const auto& p : history_paths) history.push_back(floors::load_model_file(p));

    floors::ValidatorConfig cfg;
    cfg.history_window = static_cast<int>(resolve<long>(
        window_flag, "FLOORS_HISTORY_WINDOW", env_long, [](long fb) { return fb; }, 14));
    cfg.tukey_k = tukey_k;

    floors::ValidationReport report = floors::validate_model(model, history, cfg);

    json outliers = json::array();
    for (const auto& o : report.outliers) {
        outliers.push_back({{"publisherId", o.publisher_id},
                            {"siteId", o.site_id},
                            {"placementId", o.placement_id},
                            {"field", o.field},
                            {"value", o.value},
                            {"fenceLow", o.fences.low},
                            {"fenceHigh", o.fences.high}});
    }
    const bool pass = report.status == floors::ValidationStatus::Pass;
    json out{{"status", pass ? "pass" : "fail"},
             {"modelVersion", model.version},
             {"historyModels", report.history_models},
             {"outliers", outliers},
             {"warnings", report.warnings}};
    std::cout << out.dump(2) << "\n";
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

    if (!journal_path.empty()) {
        floors::DeploymentJournal journal(journal_path);
        floors::DeploymentEvent event;
        event.ts = floors::now_timestamp();
        event.model_version = model.version;
        event.action = pass ? floors::DeployAction::Deploy : floors::DeployAction::Reject;
        event.reason = pass ? "validation passed"
                            : "tukey fences flagged " + std::to_string(report.outliers.size()) +
                                  " floor(s)";
        journal.record(event);
    }
    return pass ? kExitOk : kExitValidationFail;
}

int cmd_serve(const std::string& model_path, const std::string& listen, int port,
              double global_default, int cache_max_age) {
    floors::FloorModel model = floors::load_model_file(model_path);

    floors::ServiceConfig cfg;
    cfg.listen_address = listen;
    cfg.port = port;
    cfg.global_default_floor = global_default;
    cfg.cache_max_age_seconds = cache_max_age;

    floors::FloorService service(cfg);
    service.load(model);
    int bound = service.bind();
    if (bound <= 0) {
        std::cerr << "cannot bind " << listen << ":" << port << "\n";
        return kExitError;
    }
    json out{{"listening", listen + ":" + std::to_string(bound)},
             {"modelVersion", model.version},
             {"rows", model.rows.size()}};
    std::cout << out.dump(2) << "\n" << std::flush;
    service.run();
    return kExitOk;
}

json lift_line_json(const floors::LiftLine& l) {
    return {{"revenue", l.revenue},         {"revenueSe", l.revenue_se},
            {"impressions", l.impressions}, {"impressionsSe", l.impressions_se},
            {"ecpm", l.ecpm},               {"ecpmSe", l.ecpm_se}};
}

json bucket_json(const floors::BucketMetrics& b) {
    return {{"requests", b.requests},
            {"yahooxImpressions", b.yahoox_impressions},
            {"adxImpressions", b.adx_impressions},
            {"yahooxRevenue", b.yahoox_revenue},
            {"adxRevenue", b.adx_revenue},
            {"adxImpressionShare", b.adx_impression_share()},
            {"ecpmTotal", b.ecpm(b.total_revenue())},
            {"rescaleFactor", b.rescale_factor}};
}

int cmd_report(const std::vector<std::string>& log_paths, int bootstrap, long seed) {
    floors::LiftReport rep =
        floors::compute_lift(log_paths, bootstrap, static_cast<std::uint64_t>(seed));

    json out{{"buckets", {{"dynamic", bucket_json(rep.dynamic)}, {"disabled", bucket_json(rep.disabled)}}},
             {"lifts",
              {{"total", lift_line_json(rep.total)},
               {"yahoox", lift_line_json(rep.yahoox)},
               {"adx", lift_line_json(rep.adx)}}},
             {"rescaleTargetShare", rep.rescale_target_share}};
    std::cout << out.dump(2) << "\n";

    auto pct = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%+.2f%%", v * 100.0);
        return std::string(buf);
    };
    std::cerr << "lift (dynamic vs disabled, per-request rates)\n";
    std::cerr << "  origin   revenue      impressions  eCPM\n";
    std::cerr << "  total    " << pct(rep.total.revenue) << "      " << pct(rep.total.impressions)
              << "      " << pct(rep.total.ecpm) << "\n";
    std::cerr << "  yahoox   " << pct(rep.yahoox.revenue) << "      "
              << pct(rep.yahoox.impressions) << "      " << pct(rep.yahoox.ecpm) << "\n";
    std::cerr << "  adx      " << pct(rep.adx.revenue) << "      " << pct(rep.adx.impressions)
              << "      " << pct(rep.adx.ecpm) << "\n";
    return kExitOk;
}

int cmd_plot_data(const std::vector<std::string>& log_paths,
                  const std::vector<std::string>& dated_models, double bin_width,
                  const std::string& out_path) {
    std::string csv;
    if (!log_paths.empty() && dated_models.empty()) {
        csv = floors::bid_histogram_csv(log_paths, bin_width);
    } else if (log_paths.empty() && !dated_models.empty()) {
        std::vector<std::pair<std::string, std::string>> pairs;
        for (const auto& dm : dated_models) {
            auto eq = dm.find('=');
            if (eq == std::string::npos) {
                std::cerr << "--models entries must be DATE=PATH, got " << dm << "\n";
                return kExitUsage;
            }
            pairs.emplace_back(dm.substr(0, eq), dm.substr(eq + 1));
        }
        csv = floors::floor_series_csv(pairs);
    } else {
        std::cerr << "pass exactly one of --logs (bid histograms) or --models (floor series)\n";
        return kExitUsage;
    }

    FILE* f = std::fopen(out_path.c_str(), "wb");
    if (!f) {
        std::cerr << "cannot write " << out_path << "\n";
        return kExitError;
    }
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
    json out{{"out", out_path}, {"bytes", csv.size()}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic floor optimization toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the synthetic marketplace and write logs");
    std::string sim_config, sim_out, sim_model;
    std::optional<long> sim_seed;
    sim->add_option("--config", sim_config, "sim config file (key=value)")->required();
    sim->add_option("--out", sim_out, "output log path")->required();
    sim->add_option("--seed", sim_seed, "seed override");
    sim->add_option("--model", sim_model, "floor model CSV for the dynamic bucket (default: passback-value floors)");

    // train
    auto* train = app.add_subcommand("train", "fit bid models and optimize floors from logs");
    std::vector<std::string> train_logs;
    std::string train_run_date, train_out, train_config, train_previous;
    std::optional<long> train_seed, train_par, train_window;
    std::optional<double> train_budget;
    train->add_option("--logs", train_logs, "auction log files")->required()->expected(-1);
    train->add_option("--run-date", train_run_date, "training run date (YYYY-MM-DD); data before this date only")->required();
    train->add_option("--out", train_out, "output model CSV path")->required();
    train->add_option("--config", train_config, "pipeline config file");
    train->add_option("--seed", train_seed, "seed override");
    train->add_option("--parallelism", train_par, "worker threads");
    train->add_option("--window-days", train_window, "trailing window length");
    train->add_option("--budget-seconds", train_budget, "per-placement wall-clock budget");
    train->add_option("--previous", train_previous, "previously published model CSV (fallback source)");

    // validate
    auto* val = app.add_subcommand("validate", "gate a new model with Tukey fences over history");
    std::string val_model, val_journal;
    std::vector<std::string> val_history;
    std::optional<long> val_window;
    double val_k = 1.5;
    val->add_option("--model", val_model, "candidate model CSV")->required();
    val->add_option("--history", val_history, "prior model CSVs, oldest first")->expected(-1);
    val->add_option("--window", val_window, "history models considered");
    val->add_option("--tukey-k", val_k, "fence multiplier");
    val->add_option("--journal", val_journal, "deployment journal to append to");

    // serve
    auto* serve = app.add_subcommand("serve", "serve floor lookups over HTTP");
    std::string serve_model, serve_listen = "127.0.0.1";
    int serve_port = 8400, serve_cache = 60;
    double serve_default = 0.10;
    serve->add_option("--model", serve_model, "model CSV to load")->required();
    serve->add_option("--listen", serve_listen, "listen address");
    serve->add_option("--port", serve_port, "listen port (0 picks a free one)");
    serve->add_option("--global-default", serve_default, "floor for fully unknown ids");
    serve->add_option("--cache-max-age", serve_cache, "Cache-Control max-age seconds");

    // report
    auto* rep = app.add_subcommand("report", "A/B lift tables from auction logs");
    std::vector<std::string> rep_logs;
    int rep_bootstrap = 200;
    long rep_seed = 7;
    rep->add_option("--logs", rep_logs, "auction log files")->required()->expected(-1);
    rep->add_option("--bootstrap", rep_bootstrap, "bootstrap replicates for standard errors");
    rep->add_option("--seed", rep_seed, "bootstrap seed");

    // plot-data
    auto* plot = app.add_subcommand("plot-data", "CSV series for external plotting");
    std::vector<std::string> plot_logs, plot_models;
    double plot_bin = 0.1;
    std::string plot_out;
    plot->add_option("--logs", plot_logs, "log files (bid histograms per floor level)")->expected(-1);
    plot->add_option("--models", plot_models, "DATE=PATH model series (floor trajectories)")->expected(-1);
    plot->add_option("--bin-width", plot_bin, "histogram bin width, dollars");
    plot->add_option("--out", plot_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_config, sim_out, sim_seed, sim_model);
        if (train->parsed()) {
            return cmd_train(train_logs, train_run_date, train_out, train_config, train_seed,
                             train_par, train_window, train_budget, train_previous);
        }
        if (val->parsed()) return cmd_validate(val_model, val_history, val_window, val_k, val_journal);
        if (serve->parsed()) {
            return cmd_serve(serve_model, serve_listen, serve_port, serve_default, serve_cache);
        }
        if (rep->parsed()) return cmd_report(rep_logs, rep_bootstrap, rep_seed);
        if (plot->parsed()) return cmd_plot_data(plot_logs, plot_models, plot_bin, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitUsage;
}
