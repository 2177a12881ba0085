#pragma once

#include <memory>
#include <string>

#include "floors/floor_index.hpp"

namespace floors {

struct ServiceConfig {
    std::string listen_address = "127.0.0.1";
    int port = 8400;
    double global_default_floor = 0.10;
    int cache_max_age_seconds = 60;
};

// HTTP front for the floor index: GET /floor for lookups, POST /model for
// validate-then-swap, GET /healthz for liveness. Lookups are read-only and
// never block on a model swap.
class FloorService {
public:
    explicit FloorService(ServiceConfig cfg);
    ~FloorService();
    FloorService(const FloorService&) = delete;
    FloorService& operator=(const FloorService&) = delete;

    // Replaces the served index (initial load uses the same path).
    void load(const FloorModel& model);

    std::shared_ptr<const FloorIndex> index() const;

    // Blocks serving until stop(). False if the listen socket fails.
    bool run();
    void stop();

    // Binds the listen socket without serving; returns the bound port.
    // Lets tests start run() on a thread without a startup race.
    int bind();

    const ServiceConfig& config() const { return cfg_; }

private:
    struct Impl;
    ServiceConfig cfg_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace floors
