#pragma once

// Shared generators and oracles for the test suites. Oracles here are
// independent of the library code under test: direct formulas or brute
// force only.

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "floors/rng.hpp"
#include "floors/weibull.hpp"

namespace testsupport {

// Inverse-CDF draw of a Weibull conditioned on the value being >= floor.
inline double truncated_weibull_sample(std::mt19937_64& eng, double shape, double scale,
                                       double floor) {
    const double f0 = 1.0 - std::exp(-std::pow(floor / scale, shape));
    const double u = f0 + (1.0 - f0) * floors::uniform01(eng);
    const double clipped = std::min(u, 1.0 - 1e-16);
    return scale * std::pow(-std::log1p(-clipped), 1.0 / shape);
}

// Mean of a Weibull: scale * Gamma(1 + 1/shape).
inline double weibull_mean(double shape, double scale) {
    return scale * std::exp(std::lgamma(1.0 + 1.0 / shape));
}

// Monte Carlo oracle for the per-bidder revenue term
//   E[ b_i * prod_{j != i} F_j(b_j <= b_i) * 1(b_i >= floor_i) ]
// with every bidder drawing from its own full latent distribution.
struct OracleBidder {
    double shape = 1.0;
    double scale = 1.0;
    double floor = 0.0;
};

inline double mc_bidder_revenue(const std::vector<OracleBidder>& bidders, std::size_t i,
                                long draws, std::uint64_t seed, double* std_error = nullptr) {
    auto eng = floors::make_engine(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    std::vector<double> b(bidders.size());
    for (long d = 0; d < draws; ++d) {
        for (std::size_t j = 0; j < bidders.size(); ++j) {
            const double u = std::min(floors::uniform01(eng), 1.0 - 1e-16);
            b[j] = bidders[j].scale * std::pow(-std::log1p(-u), 1.0 / bidders[j].shape);
        }
        double value = 0.0;
        if (b[i] >= bidders[i].floor) {
            bool wins = true;
            for (std::size_t j = 0; j < bidders.size(); ++j) {
                if (j != i && b[j] > b[i]) {
                    wins = false;
                    break;
                }
            }
            if (wins) value = b[i];
        }
        sum += value;
        sum_sq += value * value;
    }
    const double n = static_cast<double>(draws);
    const double mean = sum / n;
    if (std_error) {
        const double var = (sum_sq / n - mean * mean) / (n - 1.0);
        *std_error = std::sqrt(std::max(var, 0.0));
    }
    return mean;
}

// Scratch directory unique to this process, removed by the OS tmp cleaner.
inline std::string scratch_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("floors_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace testsupport
