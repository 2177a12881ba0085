#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace floors {

// Gauss-Legendre rule on [-1, 1]; nodes found by Newton iteration on the
// Legendre polynomial (symmetric pairs computed once).
class GaussLegendre {
public:
    explicit GaussLegendre(int n) : nodes_(static_cast<std::size_t>(n)), weights_(static_cast<std::size_t>(n)) {
        if (n < 2) throw std::invalid_argument("GaussLegendre: need at least 2 nodes");
        const double eps = 1e-15;
        const int m = (n + 1) / 2;
        for (int i = 0; i < m; ++i) {
            double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double z1 = z;
                z = z1 - p1 / pp;
                if (std::abs(z - z1) <= eps) break;
            }
            nodes_[i] = -z;
            nodes_[n - 1 - i] = z;
            weights_[i] = 2.0 / ((1.0 - z * z) * pp * pp);
            weights_[n - 1 - i] = weights_[i];
        }
    }

    // Integrates f over [a, b].
    template <typename F>
    double integrate(double a, double b, F&& f) const {
        if (!(b > a)) return 0.0;
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        double acc = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) acc += weights_[i] * f(mid + half * nodes_[i]);
        return acc * half;
    }

    int size() const { return static_cast<int>(nodes_.size()); }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace floors
