#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collage/forward.hpp"
#include "collage/linalg.hpp"

namespace collage {

/// Collage residual of a target (u_m, v_m) tested against g_3, ..., g_{n+2}:
///
///   r_k(l1, l2) = int u_m' g_{k+2}' + int v_m' g_{k+2}' - int f g_{k+2} - int g g_{k+2}
///               + l1 int u_m g_{k+2} + l2 int v_m g_{k+2}
///
/// which is affine in (l1, l2). Also carries the H1 Gram matrix of the test
/// functions for the dual-norm objective.
class ResidualModel {
public:
    ResidualModel(std::vector<AffineRow> rows, SymMatrix gram);

    std::size_t size() const noexcept { return rows_.size(); }
    std::span<const AffineRow> rows() const noexcept { return rows_; }
    const SymMatrix& gram() const noexcept { return gram_; }

    std::vector<double> residual(double l1, double l2) const;

    /// Rows of L^{-1} r where G = L L^T, so |L^{-1} r|_2^2 = r^T G^{-1} r.
    std::vector<AffineRow> whitened_rows() const;

private:
    std::vector<AffineRow> rows_;
    SymMatrix gram_;
    Cholesky gram_factor_;
};

enum class ObjectiveMode { paper_abs_sum, l1, l2, dual_norm };

std::string_view to_string(ObjectiveMode mode);
/// Accepts "paper-abs-sum", "l1", "l2", "dual-norm".
std::optional<ObjectiveMode> parse_objective_mode(std::string_view name);

struct BoxConstraint {
    double lambda1_min = 0.5;
    double lambda1_max = 3.0;
    double lambda2_min = 0.5;
    double lambda2_max = 3.0;

    void validate() const;
    bool contains(double l1, double l2) const noexcept {
        return l1 >= lambda1_min && l1 <= lambda1_max && l2 >= lambda2_min && l2 <= lambda2_max;
    }
};

ResidualModel build_residual(const GalerkinSolution& target, int n, const Expression& f,
                             const Expression& g);

double objective(const ResidualModel& model, LambdaPair lambda, ObjectiveMode mode);

struct MinimizeSettings {
    int grid = 251;                 // points per axis, endpoints included
    double simplex_edge = 0.02;
    double simplex_tolerance = 1e-6;
    int max_iterations = 500;
    unsigned threads = 1;           // grid scan workers
};

struct MinimizeDiagnostics {
    LambdaPair grid_best;
    double grid_value = 0.0;
    LambdaPair refined_best;
    double refined_value = 0.0;
    int iterations = 0;
    std::optional<LambdaPair> closed_form;
    double closed_form_value = 0.0;
    bool identifiable = true;
};

struct MinimizeResult {
    LambdaPair lambda;
    double value = 0.0;
    MinimizeDiagnostics diagnostics;
};

/// Grid scan, then Nelder-Mead with projection onto the box, then (for l2 and
/// dual-norm) the exact box-constrained least-squares minimiser, or (for
/// paper-abs-sum) the nearest in-box point on the zero line. Returns the best.
MinimizeResult minimize(const ResidualModel& model, const BoxConstraint& box, ObjectiveMode mode,
                        const MinimizeSettings& settings = {});

struct CollageBound {
    double distance = 0.0;        // |y - x_bar| in the product H1 norm
    double residual = 0.0;        // dual norm of a(y, .) - x* over the discrete test space
    double rho_sum = 0.0;         // min(1, lambda1) + min(1, lambda2)
    double rho_min = 0.0;         // min(min(1, lambda1), min(1, lambda2))
    double bound_sum = 0.0;       // residual / rho_sum
    double bound_min = 0.0;       // residual / rho_min
    bool holds_sum = false;
    bool holds = false;           // distance <= bound_min + 1e-9
};

/// y must share spec's boundary values and have dimension m.
CollageBound collage_bound_check(const ProblemSpec& spec, const GalerkinSolution& y, int m);

}  // namespace collage
