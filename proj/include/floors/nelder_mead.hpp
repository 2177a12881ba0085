#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace floors {

struct NelderMeadOptions {
    int max_iterations = 500;
    double f_tolerance = 1e-8;  // stop when best-to-worst spread falls below this
    double initial_step = 0.25;
    // Optional per-dimension bounds; candidate points are clamped before evaluation.
    std::vector<double> lower;
    std::vector<double> upper;
    // Checked once per iteration; returning true aborts with best-so-far.
    std::function<bool()> should_stop;
};

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
    bool aborted = false;
};

// Downhill simplex (Nelder-Mead) with standard coefficients
// (reflect 1, expand 2, contract 0.5, shrink 0.5).
template <typename F>
NelderMeadResult nelder_mead(F&& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    const std::size_t dim = x0.size();
    const auto clamp = [&](std::vector<double>& x) {
        if (!opt.lower.empty())
            for (std::size_t i = 0; i < dim; ++i) x[i] = std::max(x[i], opt.lower[i]);
        if (!opt.upper.empty())
            for (std::size_t i = 0; i < dim; ++i) x[i] = std::min(x[i], opt.upper[i]);
    };

    std::vector<std::vector<double>> pts(dim + 1, x0);
    for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += opt.initial_step;
    for (auto& p : pts) clamp(p);

    std::vector<double> fv(dim + 1);
    for (std::size_t i = 0; i <= dim; ++i) fv[i] = f(pts[i]);

    std::vector<std::size_t> order(dim + 1);
    NelderMeadResult res;
    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[dim], second_worst = order[dim - 1];

        if (std::abs(fv[worst] - fv[best]) <= opt.f_tolerance) {
            res.converged = true;
            break;
        }
        if (opt.should_stop && opt.should_stop()) {
            res.aborted = true;
            break;
        }

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double t) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d) x[d] = centroid[d] + t * (centroid[d] - pts[worst][d]);
            clamp(x);
            return x;
        };

        auto reflected = blend(1.0);
        const double fr = f(reflected);
        if (fr < fv[order[0]]) {
            auto expanded = blend(2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            pts[worst] = std::move(reflected);
            fv[worst] = fr;
        } else {
            const bool outside = fr < fv[worst];
            auto contracted = blend(outside ? 0.5 : -0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fv[worst])) {
                pts[worst] = std::move(contracted);
                fv[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < dim; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
                    clamp(pts[i]);
                    fv[i] = f(pts[i]);
                }
            }
        }
    }

    const std::size_t arg = static_cast<std::size_t>(
        std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = pts[arg];
    res.fx = fv[arg];
    return res;
}

}  // namespace floors
