#include "floors/bid_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "floors/errors.hpp"
#include "floors/nelder_mead.hpp"
#include "floors/stats.hpp"

namespace floors {

namespace {

constexpr double kPenalty = 1e30;
constexpr double kMinParam = 1e-6;
constexpr double kMaxParam = 1e6;

// z^k computed safely for z >= 0; caps the exponent so inf never cancels inf.
double pow_guarded(double z, double k) {
    if (z <= 0.0) return 0.0;
    const double e = k * std::log(z);
    if (e > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(e);
}

double nll_impl(double a0, double a1, double b0, double b1, std::span<const BidObservation> data, long* bid_count) {
    double nll = 0.0;
    long n = 0;
    for (const auto& obs : data) {
        if (!obs.bid) continue;
        ++n;
        const double b = *obs.bid;
        const double rho = obs.floor_sent;
        if (!(b > 0.0)) throw std::invalid_argument("truncated_neg_log_likelihood: bids must be > 0");
        if (b < rho) throw std::invalid_argument("truncated_neg_log_likelihood: bid below its floor");
        const double shape = std::exp(a0 + a1 * rho);
        const double scale = std::exp(b0 + b1 * rho);
        if (!(shape > kMinParam) || !(shape < kMaxParam) || !(scale > kMinParam) || !(scale < kMaxParam))
            return kPenalty;
        const double log_z = std::log(b) - std::log(scale);
        const double zk = pow_guarded(b / scale, shape);
        const double wk = pow_guarded(rho / scale, shape);
        const double term = -std::log(shape) + std::log(scale) - (shape - 1.0) * log_z + zk - wk;
        if (!std::isfinite(term)) return kPenalty;
        nll += term;
    }
    if (bid_count) *bid_count = n;
    return nll;
}

// Weibull coefficient of variation is strictly decreasing in the shape;
// invert it by bisection.
double shape_from_cv(double cv) {
    const double target = std::log1p(cv * cv);
    const auto g = [](double k) { return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k); };
    double lo = 0.08, hi = 80.0;
    if (g(lo) < target) return lo;
    if (g(hi) > target) return hi;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

WeibullParams moment_params(const std::vector<double>& sample) {
    const double m = mean(sample);
    const double s = sample_stddev(sample);
    if (!(m > 0.0) || !(s > 0.0) || !std::isfinite(s)) return WeibullParams{2.0, std::max(m, 1e-3)};
    const double k = shape_from_cv(s / m);
    const double lambda = m / std::exp(std::lgamma(1.0 + 1.0 / k));
    return WeibullParams{k, lambda};
}

// Method-of-moments start on the observations whose floors sit closest to
// zero (the least truncated decile).
WeibullParams moment_start(std::vector<BidObservation> bids) {
    std::stable_sort(bids.begin(), bids.end(),
                     [](const BidObservation& a, const BidObservation& b) { return a.floor_sent < b.floor_sent; });
    const std::size_t take = std::max<std::size_t>(std::min<std::size_t>(bids.size(), 30), bids.size() / 10);
    std::vector<double> sample;
    sample.reserve(take);
    for (std::size_t i = 0; i < take; ++i) sample.push_back(*bids[i].bid);
    return moment_params(sample);
}

// Moment-matched start for the four link coefficients: method-of-moments fits
// on the lowest- and highest-floor deciles give point estimates at two floor
// levels, and the slopes come from the log change between them. Starting the
// slopes at the data's own trend keeps the local search in the basin where
// the scale tracks the observed bid level per floor; a flat slope start can
// descend into a degenerate mode that explains high-floor bids with a
// collapsing scale instead.
std::array<double, 4> link_start(std::vector<BidObservation> bids) {
    std::stable_sort(bids.begin(), bids.end(),
                     [](const BidObservation& a, const BidObservation& b) { return a.floor_sent < b.floor_sent; });
    const std::size_t take =
        std::max<std::size_t>(std::min<std::size_t>(bids.size(), 30), bids.size() / 10);

    std::vector<double> lo_sample, hi_sample;
    lo_sample.reserve(take);
    hi_sample.reserve(take);
    double lo_floor = 0.0, hi_floor = 0.0;
    for (std::size_t i = 0; i < take; ++i) {
        lo_sample.push_back(*bids[i].bid);
        lo_floor += bids[i].floor_sent;
        const auto& h = bids[bids.size() - 1 - i];
        hi_sample.push_back(*h.bid);
        hi_floor += h.floor_sent;
    }
    lo_floor /= static_cast<double>(take);
    hi_floor /= static_cast<double>(take);

    const WeibullParams lo = moment_params(lo_sample);
    const double spread = hi_floor - lo_floor;
    if (!(spread > 1e-9)) {
        return {std::log(lo.shape), 0.0, std::log(lo.scale), 0.0};
    }
    const WeibullParams hi = moment_params(hi_sample);
    const double a1 = (std::log(hi.shape) - std::log(lo.shape)) / spread;
    const double b1 = (std::log(hi.scale) - std::log(lo.scale)) / spread;
    return {std::log(lo.shape) - a1 * lo_floor, a1, std::log(lo.scale) - b1 * lo_floor, b1};
}

}  // namespace

double truncated_neg_log_likelihood(const FloorLinkModel& coeffs, std::span<const BidObservation> data) {
    long n = 0;
    const double nll = nll_impl(coeffs.shape_a0, coeffs.shape_a1, coeffs.scale_b0, coeffs.scale_b1, data, &n);
    if (n == 0) throw InsufficientDataError("truncated_neg_log_likelihood: no bid observations");
    return nll;
}

FloorLinkModel fit_bid_model(std::span<const BidObservation> data, const FitConfig& cfg) {
    std::vector<BidObservation> bids;
    bids.reserve(data.size());
    for (const auto& obs : data)
        if (obs.bid) bids.push_back(obs);

    if (static_cast<long>(bids.size()) < cfg.min_observations)
        throw InsufficientDataError("fit_bid_model: " + std::to_string(bids.size()) + " bid observations, need " +
                                    std::to_string(cfg.min_observations));

    std::set<double> floors;
    for (const auto& obs : bids) floors.insert(obs.floor_sent);
    const bool floor_dependent = floors.size() >= 2;

    NelderMeadOptions opt;
    opt.max_iterations = cfg.max_iterations;
    opt.f_tolerance = cfg.nll_tolerance;

    NelderMeadResult best;
    if (floor_dependent) {
        const std::array<double, 4> start = link_start(bids);
        const auto objective = [&](const std::vector<double>& x) {
            return nll_impl(x[0], x[1], x[2], x[3], bids, nullptr);
        };
        best = nelder_mead(objective, {start[0], start[1], start[2], start[3]}, opt);
    } else {
        const WeibullParams start = moment_start(bids);
        const auto objective = [&](const std::vector<double>& x) {
            return nll_impl(x[0], 0.0, x[1], 0.0, bids, nullptr);
        };
        best = nelder_mead(objective, {std::log(start.shape), std::log(start.scale)}, opt);
    }

    FloorLinkModel model;
    if (floor_dependent) {
        model.shape_a0 = best.x[0];
        model.shape_a1 = best.x[1];
        model.scale_b0 = best.x[2];
        model.scale_b1 = best.x[3];
    } else {
        model.shape_a0 = best.x[0];
        model.scale_b0 = best.x[1];
    }
    model.diagnostics.sample_count = static_cast<long>(bids.size());
    model.diagnostics.converged = best.converged;
    model.diagnostics.final_nll = best.fx;
    model.diagnostics.floor_dependent = floor_dependent;
    return model;
}

ParticipationModel estimate_participation(std::span<const BidObservation> records) {
    if (records.empty()) throw InsufficientDataError("estimate_participation: no records");
    long responses = 0;
    for (const auto& r : records)
        if (r.bid) ++responses;
    return ParticipationModel{static_cast<double>(responses) / static_cast<double>(records.size()),
                              static_cast<long>(records.size())};
}

}  // namespace floors
