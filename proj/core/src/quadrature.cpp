#include "collage/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace collage {

GaussRule gauss_nodes(int points) {
    if (points < 1 || points > 16)
        throw std::invalid_argument("gauss_nodes: points must be in [1,16], got " + std::to_string(points));

    GaussRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const int n = points;
    // Roots are symmetric; Newton on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::fabs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root for the weight.
        {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

QuadratureRule::QuadratureRule(int points, std::vector<double> breakpoints, int refinement)
    : points_(points), refinement_(refinement), breakpoints_(std::move(breakpoints)),
      gauss_(gauss_nodes(points)) {
    if (refinement_ < 0 || refinement_ > 20)
        throw std::invalid_argument("QuadratureRule: refinement out of range");
    if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw std::invalid_argument("QuadratureRule: breakpoints must start at 0 and end at 1");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw std::invalid_argument("QuadratureRule: breakpoints must be strictly increasing");
    }
}

double QuadratureRule::integrate(const ScalarFn& w) const { return integrate(w, 0.0, 1.0); }

double QuadratureRule::integrate(const ScalarFn& w, double lo, double hi,
                                 std::span<const double> extra_breaks) const {
    if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
        throw std::invalid_argument("QuadratureRule::integrate: bad interval");
    if (lo == hi) return 0.0;

    std::vector<double> cuts;
    cuts.reserve(breakpoints_.size() + extra_breaks.size() + 2);
    cuts.push_back(lo);
    for (double b : breakpoints_)
        if (b > lo && b < hi) cuts.push_back(b);
    for (double b : extra_breaks)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    const int parts = 1 << refinement_;
    double total = 0.0;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double step = (cuts[c + 1] - cuts[c]) / parts;
        for (int s = 0; s < parts; ++s) {
            const double a = cuts[c] + s * step;
            const double half = 0.5 * step;
            const double mid = a + half;
            double cell = 0.0;
            for (std::size_t q = 0; q < gauss_.nodes.size(); ++q)
                cell += gauss_.weights[q] * w(mid + half * gauss_.nodes[q]);
            total += half * cell;
        }
    }
    return total;
}

std::vector<double> dyadic_breakpoints(int level) {
    const int cells = 1 << level;
    std::vector<double> b(cells + 1);
    for (int i = 0; i <= cells; ++i) b[i] = std::ldexp(static_cast<double>(i), -level);
    return b;
}

QuadratureRule default_rule(int m) {
    if (m < 1) throw std::invalid_argument("default_rule: m must be positive");
    int level = 0;
    while ((1 << level) < m + 2) ++level;
    return QuadratureRule(8, dyadic_breakpoints(level + 1), 2);
}

}  // namespace collage
