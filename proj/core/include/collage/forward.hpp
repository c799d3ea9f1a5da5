#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "collage/expr.hpp"
#include "collage/linalg.hpp"
#include "collage/quadrature.hpp"

namespace collage {

/// Data of the coupled Dirichlet problem
///   -u'' + lambda1 u = f,  u(0) = alpha1, u(1) = beta1
///   -v'' + lambda2 v = g,  v(0) = alpha2, v(1) = beta2
struct ProblemSpec {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    Expression f = parse("0");
    Expression g = parse("0");
    std::optional<Expression> exact_u;
    std::optional<Expression> exact_v;

    /// Throws std::invalid_argument unless both lambdas are positive.
    void validate() const;
};

/// The two-equation problem with (lambda1, lambda2) = (e, pi/2), the sources
/// below and exact solutions u = exp(x^2/10), v = sin((x+1)^2).
ProblemSpec reference_problem();

enum class Equation { first, second };

/// One component of a Galerkin solution: affine lift through the boundary
/// values plus sum_k coeffs[k-1] g_{k+2}.
struct GalerkinComponent {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> coeffs;

    double value(double x) const;
    double slope(double x) const;
};

struct GalerkinSolution {
    int m = 0;
    GalerkinComponent u;
    GalerkinComponent v;

    const GalerkinComponent& component(Equation eq) const { return eq == Equation::first ? u : v; }
};

struct SolutionSample {
    double u;
    double v;
    double du;
    double dv;
};

struct LinearSystem {
    SymMatrix matrix;
    std::vector<double> rhs;
};

/// Mass matrix M_kl = integral g_{k+2} g_{l+2}, k,l = 1..m.
SymMatrix mass_matrix(int m);

/// Gram matrix of {g_3, ..., g_{m+2}} in the H1 inner product (I + M).
SymMatrix h1_gram(int m);

/// Galerkin system (I + lambda M) c = b for one equation. lambda = 0 is
/// accepted here; solve_forward() enforces positivity.
LinearSystem assemble(const ProblemSpec& spec, int m, Equation eq);
LinearSystem assemble(const ProblemSpec& spec, int m, Equation eq, const QuadratureRule& rule);

GalerkinSolution solve_forward(const ProblemSpec& spec, int m);

SolutionSample evaluate(const GalerkinSolution& sol, double x);

struct ErrorTriple {
    double l2 = 0.0;
    double slope_l2 = 0.0;
    double h1 = 0.0;
};

struct ErrorReport {
    int m = 0;
    ErrorTriple u;
    ErrorTriple v;
};

/// Reference function given as value and derivative at a point.
using ReferenceFn = std::function<std::pair<double, double>(double)>;

ReferenceFn reference_from(const Expression& expr);
ReferenceFn reference_from(const GalerkinComponent& comp);

ErrorReport error_report(const GalerkinSolution& sol, const ReferenceFn& exact_u,
                         const ReferenceFn& exact_v);
ErrorReport error_report(const GalerkinSolution& sol, const Expression& exact_u,
                         const Expression& exact_v);
/// Uses spec.exact_u / spec.exact_v; throws std::invalid_argument if absent.
ErrorReport error_report(const GalerkinSolution& sol, const ProblemSpec& spec);

}  // namespace collage
