#include "floors/service.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "floors/errors.hpp"
#include "floors/logfmt.hpp"

namespace floors {

struct FloorService::Impl {
    httplib::Server server;
    IndexHolder holder;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
};

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& j) {
    res.status = status;
    res.set_content(j.dump(), "application/json");
}

}  // namespace

FloorService::FloorService(ServiceConfig cfg) : cfg_(std::move(cfg)), impl_(new Impl) {
    // Start from an empty index so every lookup has an answer even before
    // the first model arrives.
    impl_->holder.swap(std::make_shared<const FloorIndex>(
        FloorIndex::from_model(FloorModel{}, cfg_.global_default_floor)));

    const std::string cache_header = "max-age=" + std::to_string(cfg_.cache_max_age_seconds);

    impl_->server.Get("/floor", [this, cache_header](const httplib::Request& req,
                                                     httplib::Response& res) {
        for (const char* p : {"publisherId", "siteId", "placementId", "bidderType"}) {
            if (!req.has_param(p)) {
                reply_json(res, 400, {{"error", std::string("missing parameter: ") + p}});
                return;
            }
        }
        auto type = parse_bidder_type(req.get_param_value("bidderType"));
        if (!type) {
            reply_json(res, 400, {{"error", "bidderType must be regular or rebroadcaster"}});
            return;
        }
        FloorQuery q;
        q.publisher_id = req.get_param_value("publisherId");
        q.site_id = req.get_param_value("siteId");
        q.placement_id = req.get_param_value("placementId");
        q.bidder_type = *type;

        auto idx = impl_->holder.get();
        FloorAnswer ans = idx->lookup(q);
        res.set_header("Cache-Control", cache_header);
        reply_json(res, 200,
                   {{"floor", ans.floor},
                    {"matchLevel", to_string(ans.match_level)},
                    {"modelVersion", ans.model_version}});
    });

    impl_->server.Post("/model", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            FloorModel model = parse_model_csv(req.body);
            load(model);
            reply_json(res, 200, {{"modelVersion", model.version}, {"rows", model.rows.size()}});
        } catch (const ModelFormatError& e) {
            reply_json(res, 422, {{"error", e.what()}});
        }
    });

    impl_->server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
        auto idx = impl_->holder.get();
        double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                      impl_->started)
                            .count();
        reply_json(res, 200,
                   {{"modelVersion", idx->version()},
                    {"rows", idx->row_count()},
                    {"uptimeSeconds", uptime}});
    });
}

FloorService::~FloorService() { stop(); }

void FloorService::load(const FloorModel& model) {
    impl_->holder.swap(std::make_shared<const FloorIndex>(
        FloorIndex::from_model(model, cfg_.global_default_floor)));
}

std::shared_ptr<const FloorIndex> FloorService::index() const { return impl_->holder.get(); }

bool FloorService::run() { return impl_->server.listen_after_bind(); }

void FloorService::stop() { impl_->server.stop(); }

int FloorService::bind() {
    if (cfg_.port == 0) {
        int p = impl_->server.bind_to_any_port(cfg_.listen_address);
        if (p > 0) cfg_.port = p;
        return p;
    }
    if (!impl_->server.bind_to_port(cfg_.listen_address, cfg_.port)) return -1;
    return cfg_.port;
}

}  // namespace floors
