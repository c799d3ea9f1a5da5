#pragma once

#include <functional>
#include <span>
#include <vector>

namespace collage {

using ScalarFn = std::function<double(double)>;

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

/// Gauss-Legendre nodes and weights for 1 <= points <= 16.
GaussRule gauss_nodes(int points);

/// Composite Gauss-Legendre rule on [0,1]. Every cell between consecutive
/// breakpoints is split into 2^refinement equal parts and integrated with
/// `points` nodes.
class QuadratureRule {
public:
    QuadratureRule(int points, std::vector<double> breakpoints, int refinement = 0);

    int points() const noexcept { return points_; }
    int refinement() const noexcept { return refinement_; }
    std::span<const double> breakpoints() const noexcept { return breakpoints_; }

    /// Integral over [0,1].
    double integrate(const ScalarFn& w) const;

    /// Integral over [lo,hi] ⊆ [0,1]. Cells are clipped to [lo,hi] and
    /// additionally split at every value in `extra_breaks` that falls inside.
    double integrate(const ScalarFn& w, double lo, double hi,
                     std::span<const double> extra_breaks = {}) const;

private:
    int points_;
    int refinement_;
    std::vector<double> breakpoints_;
    GaussRule gauss_;
};

/// Uniform dyadic breakpoints {0, 2^-level, ..., 1}.
std::vector<double> dyadic_breakpoints(int level);

/// Rule used throughout for a Galerkin space of dimension m: 8 points per
/// cell on the dyadic grid of level ceil(log2(m+2))+1, refined twice.
QuadratureRule default_rule(int m);

}  // namespace collage
