#include "floors/revenue.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "floors/nelder_mead.hpp"
#include "floors/quadrature.hpp"
#include "floors/rng.hpp"
#include "floors/stats.hpp"

namespace floors {

namespace {

void check_context(const PlacementContext& ctx) {
    if (ctx.bidders.empty()) throw std::invalid_argument("PlacementContext: at least one bidder required");
    if (ctx.bidders.size() > 32) throw std::invalid_argument("PlacementContext: at most 32 bidders supported");
    if (!std::isfinite(ctx.adx_rev) || ctx.adx_rev < 0.0)
        throw std::invalid_argument("PlacementContext: adx_rev must be finite and non-negative");
}

}  // namespace

RevenueEvaluator::RevenueEvaluator(const PlacementContext& ctx, int mc_draws, std::uint64_t seed, EvalOptions opt)
    : ctx_(&ctx), tail_quantile_(opt.tail_quantile) {
    check_context(ctx);
    if (mc_draws < 1) throw std::invalid_argument("RevenueEvaluator: mc_draws must be >= 1");
    if (!(opt.tail_quantile > 0.0) || !(opt.tail_quantile < 1.0))
        throw std::invalid_argument("RevenueEvaluator: tail_quantile must be in (0,1)");

    const GaussLegendre rule(opt.quadrature_nodes);
    gl_nodes_ = rule.nodes();
    gl_weights_ = rule.weights();

    // One participation mask per Monte Carlo draw, fixed at construction and
    // shared across every floor evaluation (common random numbers).
    auto eng = make_engine(derive_seed(seed, "participation"));
    participation_draws_.resize(static_cast<std::size_t>(mc_draws));
    for (auto& mask : participation_draws_) {
        std::uint32_t m = 0;
        for (std::size_t j = 0; j < ctx.bidders.size(); ++j) {
            const double u = uniform01(eng);
            if (u < ctx.bidders[j].model.participation.rate) m |= (1u << j);
        }
        mask = m;
    }
}

std::vector<double> RevenueEvaluator::floors_by_type(const FloorVector& floors) const {
    std::vector<double> per_bidder(ctx_->bidders.size());
    for (std::size_t i = 0; i < ctx_->bidders.size(); ++i) per_bidder[i] = floors.for_type(ctx_->bidders[i].type);
    return per_bidder;
}

double RevenueEvaluator::expected_bidder_revenue(std::size_t bidder, const std::vector<double>& floors_per_bidder,
                                                 std::uint32_t participant_mask) const {
    const auto& bidders = ctx_->bidders;
    if (bidder >= bidders.size()) throw std::invalid_argument("expected_bidder_revenue: bidder index out of range");
    if ((participant_mask & (1u << bidder)) == 0)
        throw std::invalid_argument("expected_bidder_revenue: bidder not in participant set");

    const double rho_i = floors_per_bidder[bidder];
    const WeibullParams own = link_params(rho_i, bidders[bidder].model.link);
    const double b_max = weibull_quantile(tail_quantile_, own);
    if (rho_i >= b_max) return 0.0;

    // Competitor latent parameters at their own floors, fixed over the grid.
    std::vector<WeibullParams> comp;
    std::vector<std::size_t> comp_idx;
    for (std::size_t j = 0; j < bidders.size(); ++j) {
        if (j == bidder || (participant_mask & (1u << j)) == 0) continue;
        comp.push_back(link_params(floors_per_bidder[j], bidders[j].model.link));
        comp_idx.push_back(j);
    }

    const double mid = 0.5 * (rho_i + b_max);
    const double half = 0.5 * (b_max - rho_i);
    double acc = 0.0;
    for (std::size_t n = 0; n < gl_nodes_.size(); ++n) {
        const double b = mid + half * gl_nodes_[n];
        double win_prob = 1.0;
        for (const auto& c : comp) win_prob *= weibull_cdf(b, c);
        acc += gl_weights_[n] * b * win_prob * weibull_pdf(b, own);
    }
    return acc * half;
}

double RevenueEvaluator::prob_all_below(const std::vector<double>& floors_per_bidder,
                                        std::uint32_t participant_mask) const {
    double p = 1.0;
    for (std::size_t i = 0; i < ctx_->bidders.size(); ++i) {
        if ((participant_mask & (1u << i)) == 0) continue;
        const double rho = floors_per_bidder[i];
        p *= weibull_cdf(rho, link_params(rho, ctx_->bidders[i].model.link));
    }
    return p;
}

RevenueEstimate RevenueEvaluator::expected_revenue_per_bidder(const std::vector<double>& floors_per_bidder) const {
    if (floors_per_bidder.size() != ctx_->bidders.size())
        throw std::invalid_argument("expected_revenue: floor vector size mismatch");
    for (double f : floors_per_bidder)
        if (!std::isfinite(f) || f < 0.0) throw std::invalid_argument("expected_revenue: floors must be >= 0");

    // Distinct participation masks share one evaluation.
    std::unordered_map<std::uint32_t, std::pair<double, double>> memo;  // mask -> (yahoox, all_below)
    double yahoox_sum = 0.0, adx_sum = 0.0, sq_sum = 0.0;
    const double n = static_cast<double>(participation_draws_.size());
    for (const std::uint32_t mask : participation_draws_) {
        auto it = memo.find(mask);
        if (it == memo.end()) {
            double yahoox = 0.0;
            for (std::size_t i = 0; i < ctx_->bidders.size(); ++i)
                if (mask & (1u << i)) yahoox += expected_bidder_revenue(i, floors_per_bidder, mask);
            it = memo.emplace(mask, std::make_pair(yahoox, prob_all_below(floors_per_bidder, mask))).first;
        }
        const double draw_value = it->second.first + ctx_->adx_rev * it->second.second;
        yahoox_sum += it->second.first;
        adx_sum += ctx_->adx_rev * it->second.second;
        sq_sum += draw_value * draw_value;
    }

    RevenueEstimate est;
    est.yahoox_component = yahoox_sum / n;
    est.adx_component = adx_sum / n;
    est.value = est.yahoox_component + est.adx_component;
    if (participation_draws_.size() > 1) {
        const double mean_v = est.value;
        const double var = std::max(0.0, (sq_sum - n * mean_v * mean_v) / (n - 1.0));
        est.mc_std_error = std::sqrt(var / n);
    }
    return est;
}

RevenueEstimate RevenueEvaluator::expected_revenue(const FloorVector& floors) const {
    return expected_revenue_per_bidder(floors_by_type(floors));
}

double expected_bidder_revenue(std::size_t bidder, const FloorVector& floors,
                               const std::vector<std::size_t>& participants, const PlacementContext& ctx,
                               EvalOptions opt) {
    const RevenueEvaluator eval(ctx, 1, 0, opt);
    std::uint32_t mask = 0;
    for (std::size_t j : participants) mask |= (1u << j);
    return eval.expected_bidder_revenue(bidder, eval.floors_by_type(floors), mask);
}

double prob_all_below(const FloorVector& floors, const std::vector<std::size_t>& participants,
                      const PlacementContext& ctx) {
    const RevenueEvaluator eval(ctx, 1, 0);
    std::uint32_t mask = 0;
    for (std::size_t j : participants) mask |= (1u << j);
    return eval.prob_all_below(eval.floors_by_type(floors), mask);
}

RevenueEstimate expected_revenue(const FloorVector& floors, const PlacementContext& ctx, int mc_draws,
                                 std::uint64_t seed, EvalOptions opt) {
    return RevenueEvaluator(ctx, mc_draws, seed, opt).expected_revenue(floors);
}

OptimizeResult optimize_floors(const PlacementContext& ctx, const OptimizerConfig& cfg) {
    if (!(cfg.floor_cap > 0.0) || !std::isfinite(cfg.floor_cap))
        throw std::invalid_argument("optimize_floors: floor_cap must be positive and finite");
    if (cfg.grid_size < 2) throw std::invalid_argument("optimize_floors: grid_size must be >= 2");

    const RevenueEvaluator eval(ctx, cfg.mc_draws, cfg.seed, cfg.eval);
    const auto expired = [&] {
        return cfg.deadline && std::chrono::steady_clock::now() >= *cfg.deadline;
    };

    OptimizeResult res;
    res.floors = FloorVector{0.0, 0.0};
    bool have_best = false;
    double best_value = 0.0;

    const auto consider = [&](const FloorVector& f) {
        const RevenueEstimate est = eval.expected_revenue(f);
        ++res.evaluations;
        if (!have_best || est.value > best_value) {
            have_best = true;
            best_value = est.value;
            res.floors = f;
            res.revenue = est;
        }
    };

    const int n = cfg.grid_size;
    for (int i = 0; i < n && !res.timed_out; ++i) {
        for (int j = 0; j < n; ++j) {
            if (expired()) {
                res.timed_out = true;
                break;
            }
            consider(FloorVector{cfg.floor_cap * i / (n - 1), cfg.floor_cap * j / (n - 1)});
        }
    }
    if (res.timed_out) return res;

    NelderMeadOptions opt;
    opt.max_iterations = cfg.nm_max_iterations;
    opt.f_tolerance = cfg.nm_f_tolerance;
    opt.initial_step = cfg.floor_cap / (n - 1);
    opt.lower = {0.0, 0.0};
    opt.upper = {cfg.floor_cap, cfg.floor_cap};
    opt.should_stop = expired;

    const FloorVector grid_best = res.floors;
    const auto objective = [&](const std::vector<double>& x) {
        ++res.evaluations;
        return -eval.expected_revenue(FloorVector{x[0], x[1]}).value;
    };
    const NelderMeadResult nm = nelder_mead(objective, {grid_best.regular, grid_best.rebroadcaster}, opt);
    if (nm.aborted) res.timed_out = true;
    if (-nm.fx > best_value) {
        res.floors = FloorVector{nm.x[0], nm.x[1]};
        res.revenue = eval.expected_revenue(res.floors);
    }
    return res;
}

}  // namespace floors
