#include "collage/forward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "collage/basis.hpp"

namespace collage {

void ProblemSpec::validate() const {
    if (!(lambda1 > 0.0) || !(lambda2 > 0.0))
        throw std::invalid_argument("ProblemSpec: lambda1 and lambda2 must be positive");
}

ProblemSpec reference_problem() {
    ProblemSpec spec;
    spec.lambda1 = std::exp(1.0);
    spec.lambda2 = std::acos(-1.0) / 2.0;
    spec.alpha1 = 1.0;
    spec.alpha2 = std::sin(1.0);
    spec.beta1 = std::exp(0.1);
    spec.beta2 = std::sin(4.0);
    spec.f = parse("(e - 1/5)*exp(x^2/10) - (x^2/25)*exp(x^2/10)");
    spec.g = parse("-2*cos((x+1)^2) + (pi/2)*sin((x+1)^2) + 4*(1+x)^2*sin((x+1)^2)");
    spec.exact_u = parse("exp(x^2/10)");
    spec.exact_v = parse("sin((x+1)^2)");
    return spec;
}

double GalerkinComponent::value(double x) const {
    double s = alpha + (beta - alpha) * x;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] != 0.0) s += coeffs[k] * schauder_eval(static_cast<int>(k) + 3, x);
    }
    return s;
}

double GalerkinComponent::slope(double x) const {
    double s = beta - alpha;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        if (coeffs[k] != 0.0) s += coeffs[k] * schauder_deriv(static_cast<int>(k) + 3, x);
    }
    return s;
}

SymMatrix mass_matrix(int m) {
    SymMatrix a(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        for (int l = 0; l <= k; ++l) a(k, l) = mass_entry(k + 3, l + 3);
    return a;
}

SymMatrix h1_gram(int m) {
    SymMatrix a = mass_matrix(m);
    for (int k = 0; k < m; ++k)
        for (int l = 0; l <= k; ++l) a(k, l) += stiffness_entry(k + 3, l + 3);
    return a;
}

LinearSystem assemble(const ProblemSpec& spec, int m, Equation eq) {
    return assemble(spec, m, eq, default_rule(m));
}

LinearSystem assemble(const ProblemSpec& spec, int m, Equation eq, const QuadratureRule& rule) {
    if (m < 1) throw std::invalid_argument("assemble: m must be >= 1");
    const bool first = eq == Equation::first;
    const double lambda = first ? spec.lambda1 : spec.lambda2;
    const double a = first ? spec.alpha1 : spec.alpha2;
    const double b = first ? spec.beta1 : spec.beta2;
    const Expression& source = first ? spec.f : spec.g;

    LinearSystem sys{SymMatrix(static_cast<std::size_t>(m)), std::vector<double>(m, 0.0)};
    for (int k = 0; k < m; ++k) {
        for (int l = 0; l <= k; ++l)
            sys.matrix(k, l) = stiffness_entry(k + 3, l + 3) + lambda * mass_entry(k + 3, l + 3);
        // The lift's derivative is constant and every g_{k+2}' integrates to zero.
        sys.rhs[k] = load_entry(source, k + 3, rule) - lambda * affine_moment(k + 3, a, b - a);
    }
    return sys;
}

GalerkinSolution solve_forward(const ProblemSpec& spec, int m) {
    spec.validate();
    if (m < 1 || m > 256) throw std::invalid_argument("solve_forward: m must be in [1,256], got " + std::to_string(m));
    const QuadratureRule rule = default_rule(m);

    GalerkinSolution sol;
    sol.m = m;
    sol.u.alpha = spec.alpha1;
    sol.u.beta = spec.beta1;
    sol.v.alpha = spec.alpha2;
    sol.v.beta = spec.beta2;

    const LinearSystem su = assemble(spec, m, Equation::first, rule);
    const LinearSystem sv = assemble(spec, m, Equation::second, rule);
    sol.u.coeffs = cholesky_solve(su.matrix, su.rhs);
    sol.v.coeffs = cholesky_solve(sv.matrix, sv.rhs);
    for (double c : sol.u.coeffs)
        if (!std::isfinite(c)) throw NumericalError("solve_forward: non-finite coefficient");
    for (double c : sol.v.coeffs)
        if (!std::isfinite(c)) throw NumericalError("solve_forward: non-finite coefficient");
    return sol;
}

SolutionSample evaluate(const GalerkinSolution& sol, double x) {
    return {sol.u.value(x), sol.v.value(x), sol.u.slope(x), sol.v.slope(x)};
}

ReferenceFn reference_from(const Expression& expr) {
    return [expr](double x) {
        const ValueAndSlope r = expr.evaluate_with_slope(x);
        return std::pair{r.value, r.slope};
    };
}

ReferenceFn reference_from(const GalerkinComponent& comp) {
    return [comp](double x) { return std::pair{comp.value(x), comp.slope(x)}; };
}

namespace {

ErrorTriple component_error(const GalerkinComponent& approx, const ReferenceFn& exact,
                            const QuadratureRule& rule) {
    const double l2sq = rule.integrate([&](double x) {
        const double d = exact(x).first - approx.value(x);
        return d * d;
    });
    const double slopesq = rule.integrate([&](double x) {
        const double d = exact(x).second - approx.slope(x);
        return d * d;
    });
    return {std::sqrt(l2sq), std::sqrt(slopesq), std::sqrt(l2sq + slopesq)};
}

}  // namespace

ErrorReport error_report(const GalerkinSolution& sol, const ReferenceFn& exact_u,
                         const ReferenceFn& exact_v) {
    const QuadratureRule rule = default_rule(sol.m);
    return {sol.m, component_error(sol.u, exact_u, rule), component_error(sol.v, exact_v, rule)};
}

ErrorReport error_report(const GalerkinSolution& sol, const Expression& exact_u,
                         const Expression& exact_v) {
    return error_report(sol, reference_from(exact_u), reference_from(exact_v));
}

ErrorReport error_report(const GalerkinSolution& sol, const ProblemSpec& spec) {
    if (!spec.exact_u || !spec.exact_v)
        throw std::invalid_argument("error_report: exact solutions are required");
    return error_report(sol, *spec.exact_u, *spec.exact_v);
}

}  // namespace collage
