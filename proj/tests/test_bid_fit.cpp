#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "floors/bid_fit.hpp"
#include "floors/errors.hpp"
#include "floors/rng.hpp"
#include "support/synthetic.hpp"

using namespace floors;

namespace {

FloorLinkModel flat_link(double shape, double scale) {
    FloorLinkModel m;
    m.shape_a0 = std::log(shape);
    m.scale_b0 = std::log(scale);
    return m;
}

// Synthetic bidder: latent Weibull at fixed parameters, observed only when
// the latent bid clears the floor.
std::vector<BidObservation> draw_observations(double shape, double scale, double floor_cap,
                                              long n, std::uint64_t seed) {
    auto eng = make_engine(seed);
    std::vector<BidObservation> out;
    out.reserve(static_cast<std::size_t>(n));
    WeibullParams p{shape, scale};
    for (long i = 0; i < n; ++i) {
        const double floor = uniform_in(eng, 0.0, floor_cap);
        const double u = std::min(uniform01(eng), 1.0 - 1e-16);
        const double latent = weibull_quantile(u, p);
        if (latent >= floor) {
            out.push_back({floor, latent});
        } else {
            out.push_back({floor, std::nullopt});
        }
    }
    return out;
}

}  // namespace

TEST_CASE("nll: matches a direct truncated-density computation") {
    const double shape = 1.5, scale = 2.0;
    std::vector<BidObservation> data{{0.5, 1.2}, {0.0, 0.7}, {1.0, 3.4}, {0.25, 0.9}};

    double want = 0.0;
    for (const auto& o : data) {
        const double b = *o.bid;
        const double pdf = (shape / scale) * std::pow(b / scale, shape - 1.0) *
                           std::exp(-std::pow(b / scale, shape));
        const double survival = std::exp(-std::pow(o.floor_sent / scale, shape));
        want += -std::log(pdf / survival);
    }
    CHECK(truncated_neg_log_likelihood(flat_link(shape, scale), data) ==
          doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("nll: no-bid rows do not contribute") {
    std::vector<BidObservation> with{{0.5, 1.2}, {0.3, std::nullopt}, {0.0, 0.7}};
    std::vector<BidObservation> without{{0.5, 1.2}, {0.0, 0.7}};
    auto m = flat_link(1.5, 2.0);
    CHECK(truncated_neg_log_likelihood(m, with) ==
          doctest::Approx(truncated_neg_log_likelihood(m, without)));
}

TEST_CASE("nll: truncation accounting raises the likelihood of floored data") {
    // Conditioning on b >= floor concentrates mass, so the truncated density
    // is larger than the untruncated one at the same observation.
    std::vector<BidObservation> floored{{1.0, 1.4}};
    std::vector<BidObservation> unfloored{{0.0, 1.4}};
    auto m = flat_link(1.5, 2.0);
    CHECK(truncated_neg_log_likelihood(m, floored) <
          truncated_neg_log_likelihood(m, unfloored));
}

TEST_CASE("nll: malformed observations are rejected") {
    auto m = flat_link(1.5, 2.0);
    std::vector<BidObservation> below_floor{{1.0, 0.5}};
    CHECK_THROWS_AS(truncated_neg_log_likelihood(m, below_floor), std::invalid_argument);
    std::vector<BidObservation> zero_bid{{0.0, 0.0}};
    CHECK_THROWS_AS(truncated_neg_log_likelihood(m, zero_bid), std::invalid_argument);
}

TEST_CASE("nll: the generating parameters beat perturbed ones on big samples") {
    auto data = draw_observations(1.5, 2.0, 1.0, 8000, 31);
    const double at_truth = truncated_neg_log_likelihood(flat_link(1.5, 2.0), data);
    CHECK(at_truth < truncated_neg_log_likelihood(flat_link(1.9, 2.0), data));
    CHECK(at_truth < truncated_neg_log_likelihood(flat_link(1.5, 2.6), data));
    CHECK(at_truth < truncated_neg_log_likelihood(flat_link(1.1, 1.6), data));
}

TEST_CASE("fit: recovers constant weibull parameters from truncated draws") {
    auto data = draw_observations(1.5, 2.0, 1.0, 6000, 7);
    FloorLinkModel m = fit_bid_model(data);
    auto p_mid = link_params(0.5, m);
    CHECK(p_mid.shape == doctest::Approx(1.5).epsilon(0.08));
    CHECK(p_mid.scale == doctest::Approx(2.0).epsilon(0.08));
    CHECK(m.diagnostics.converged);
    CHECK(m.diagnostics.sample_count > 4000);
}

TEST_CASE("fit: floor-dependent scale is picked up by the link") {
    // Latent scale grows with the floor: scale(rho) = 1.5 * e^{0.4 rho}.
    auto eng = make_engine(99);
    std::vector<BidObservation> data;
    for (long i = 0; i < 12000; ++i) {
        const double floor = uniform_in(eng, 0.0, 1.5);
        WeibullParams p{1.8, 1.5 * std::exp(0.4 * floor)};
        const double u = std::min(uniform01(eng), 1.0 - 1e-16);
        const double latent = weibull_quantile(u, p);
        data.push_back({floor, latent >= floor ? std::optional<double>(latent) : std::nullopt});
    }
    FloorLinkModel m = fit_bid_model(data);
    CHECK(m.diagnostics.floor_dependent);
    CHECK(m.scale_b1 == doctest::Approx(0.4).epsilon(0.35));
    CHECK(link_params(0.0, m).scale == doctest::Approx(1.5).epsilon(0.15));
}

TEST_CASE("fit: single floor level falls back to a flat link") {
    auto eng = make_engine(4);
    std::vector<BidObservation> data;
    WeibullParams p{1.5, 2.0};
    for (long i = 0; i < 3000; ++i) {
        const double latent = weibull_quantile(std::min(uniform01(eng), 1.0 - 1e-16), p);
        if (latent >= 0.5) data.push_back({0.5, latent});
    }
    FloorLinkModel m = fit_bid_model(data);
    CHECK(!m.diagnostics.floor_dependent);
    CHECK(m.shape_a1 == 0.0);
    CHECK(m.scale_b1 == 0.0);
    CHECK(link_params(0.5, m).shape == doctest::Approx(1.5).epsilon(0.12));
}

TEST_CASE("fit: refuses thin samples") {
    auto data = draw_observations(1.5, 2.0, 1.0, 150, 3);
    CHECK_THROWS_AS(fit_bid_model(data), InsufficientDataError);

    FitConfig cfg;
    cfg.min_observations = 50;
    CHECK_NOTHROW(fit_bid_model(data, cfg));
}

TEST_CASE("participation: share of answered solicitations") {
    std::vector<BidObservation> data{{0.1, 1.0}, {0.2, std::nullopt}, {0.0, 2.0},
                                     {0.4, std::nullopt}, {0.3, 1.5}};
    auto part = estimate_participation(data);
    CHECK(part.rate == doctest::Approx(0.6));
    CHECK(part.support_count == 5);

    const std::vector<BidObservation> empty;
    CHECK_THROWS_AS(estimate_participation(empty), InsufficientDataError);
}
