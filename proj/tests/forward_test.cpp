#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "collage/basis.hpp"
#include "collage/forward.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

constexpr double kE = 2.718281828459045;

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

// Table of forward errors for the reference problem (m, then u/v pairs for
// L2, derivative L2 and H1).
struct ReferenceRow {
    int m;
    std::array<double, 6> values;  // u_L2, v_L2, du_L2, dv_L2, u_H1, v_H1
};

constexpr std::array<ReferenceRow, 5> kReferenceErrors{{
    {3, {0.00109781, 0.0304768, 0.0160122, 0.421311, 0.0160498, 0.422412}},
    {7, {0.000272967, 0.00794639, 0.00800607, 0.218486, 0.00801072, 0.21863}},
    {15, {0.0000681497, 0.00200574, 0.004003, 0.110178, 0.00400359, 0.110196}},
    {31, {0.0000170317, 0.000502611, 0.0020015, 0.0552043, 0.00200157, 0.0552065}},
    {63, {0.00000425756, 0.000125726, 0.00100075, 0.0276165, 0.00100076, 0.0276168}},
}};

}  // namespace

TEST(Assemble, ZeroLambdaGivesIdentity) {
    ProblemSpec spec = reference_problem();
    spec.lambda1 = 0.0;
    const LinearSystem sys = assemble(spec, 15, Equation::first);
    for (int i = 0; i < 15; ++i)
        for (int j = 0; j < 15; ++j) EXPECT_EQ(sys.matrix(i, j), i == j ? 1.0 : 0.0);
}

TEST(Assemble, SingleUnknownClosedForm) {
    const ProblemSpec spec = reference_problem();
    const LinearSystem sys = assemble(spec, 1, Equation::first);
    EXPECT_NEAR(sys.matrix(0, 0), 1.0 + kE / 12.0, 1e-15);

    // b_1 = int f g_3 - e * int (1 + (e^0.1 - 1) x) g_3 with the load from a trapezoid oracle.
    const double load = collage::testing::trapezoid(
        [&](double x) { return spec.f(x) * collage::testing::tent(3, x); }, 1000000);
    const double lift = 0.25 * (1.0 + 0.5 * (std::exp(0.1) - 1.0));
    const double b1 = load - kE * lift;
    EXPECT_NEAR(sys.rhs[0], b1, 1e-10);
    // mpmath: b_1 = -0.0700083529527830862, c_1 = b_1 / (1 + e/12) = -0.0570786892943571738.
    EXPECT_NEAR(sys.rhs[0], -0.0700083529527830862, 1e-14);
    const GalerkinSolution sol = solve_forward(spec, 1);
    EXPECT_NEAR(sol.u.coeffs[0], -0.0570786892943571738, 1e-14);
    EXPECT_NEAR(sol.u.coeffs[0], b1 / (1.0 + kE / 12.0), 1e-10);
}

TEST(Assemble, SpdForPositiveLambda) {
    ProblemSpec spec = reference_problem();
    for (double lambda : {1e-6, 0.5, 1.0, kE, 100.0}) {
        spec.lambda1 = lambda;
        for (int m : {1, 2, 5, 16, 33, 63}) EXPECT_NO_THROW(Cholesky{assemble(spec, m, Equation::first).matrix});
    }
}

TEST(SolveForward, ZeroData) {
    ProblemSpec spec;
    spec.lambda1 = 2.0;
    spec.lambda2 = 3.0;
    const GalerkinSolution sol = solve_forward(spec, 31);
    for (double c : sol.u.coeffs) EXPECT_EQ(c, 0.0);
    for (double c : sol.v.coeffs) EXPECT_EQ(c, 0.0);
}

TEST(SolveForward, AffineExactSolutionNeedsNoCorrection) {
    // u = 2 + 3x solves -u'' + 1.7 u = 1.7 (2 + 3x); the lift is already exact,
    // so b_k = int f g - 1.7 int (2 + 3x) g = 0 up to roundoff.
    ProblemSpec spec;
    spec.lambda1 = 1.7;
    spec.lambda2 = 1.0;
    spec.alpha1 = 2.0;
    spec.beta1 = 5.0;
    spec.f = parse("1.7*(2 + 3*x)");
    const LinearSystem sys = assemble(spec, 31, Equation::first);
    for (double b : sys.rhs) EXPECT_NEAR(b, 0.0, 1e-14);
    const GalerkinSolution sol = solve_forward(spec, 31);
    for (double c : sol.u.coeffs) EXPECT_NEAR(c, 0.0, 1e-14);
}

TEST(SolveForward, RejectsBadInput) {
    ProblemSpec spec = reference_problem();
    EXPECT_THROW(solve_forward(spec, 0), std::invalid_argument);
    EXPECT_THROW(solve_forward(spec, 257), std::invalid_argument);
    spec.lambda2 = 0.0;
    EXPECT_THROW(solve_forward(spec, 3), std::invalid_argument);
    spec.lambda2 = -1.0;
    EXPECT_THROW(solve_forward(spec, 3), std::invalid_argument);
}

TEST(SolveForward, GalerkinOrthogonality) {
    const ProblemSpec spec = reference_problem();
    for (int m : {3, 7, 15, 31, 63, 256}) {
        const GalerkinSolution sol = solve_forward(spec, m);
        for (Equation eq : {Equation::first, Equation::second}) {
            const LinearSystem sys = assemble(spec, m, eq);
            auto r = sys.matrix.multiply(sol.component(eq).coeffs);
            double rmax = 0.0, bmax = 0.0;
            for (int k = 0; k < m; ++k) {
                rmax = std::max(rmax, std::fabs(r[k] - sys.rhs[k]));
                bmax = std::max(bmax, std::fabs(sys.rhs[k]));
            }
            EXPECT_LE(rmax, 1e-10 * (1.0 + bmax)) << "m=" << m;
        }
    }
}

TEST(SolveForward, EquationsDecouple) {
    const ProblemSpec spec = reference_problem();
    ProblemSpec other = spec;
    other.g = parse("x^3 - 4");
    other.lambda2 = 0.9;
    other.alpha2 = 7.0;
    const GalerkinSolution a = solve_forward(spec, 31);
    const GalerkinSolution b = solve_forward(other, 31);
    EXPECT_EQ(a.u.coeffs, b.u.coeffs);
    const LinearSystem alone = assemble(spec, 31, Equation::first);
    EXPECT_EQ(cholesky_solve(alone.matrix, alone.rhs), a.u.coeffs);
}

TEST(Evaluate, BoundaryInterpolation) {
    const ProblemSpec spec = reference_problem();
    for (int m : {1, 3, 15, 63}) {
        const GalerkinSolution sol = solve_forward(spec, m);
        const SolutionSample at0 = evaluate(sol, 0.0);
        const SolutionSample at1 = evaluate(sol, 1.0);
        EXPECT_EQ(at0.u, spec.alpha1);
        EXPECT_EQ(at0.v, spec.alpha2);
        EXPECT_NEAR(at1.u, spec.beta1, 1e-15);
        EXPECT_NEAR(at1.v, spec.beta2, 1e-15);
    }
    GalerkinSolution zero;
    zero.m = 3;
    zero.u = {1.0, 3.0, {0.0, 0.0, 0.0}};
    zero.v = {-2.0, 4.0, {0.0, 0.0, 0.0}};
    const SolutionSample mid = evaluate(zero, 0.5);
    EXPECT_EQ(mid.u, 2.0);
    EXPECT_EQ(mid.v, 1.0);
    EXPECT_EQ(mid.du, 2.0);
    EXPECT_EQ(mid.dv, 6.0);
}

TEST(ErrorReport, ReferenceTableWithinOnePercent) {
    const ProblemSpec spec = reference_problem();
    for (const ReferenceRow& row : kReferenceErrors) {
        const ErrorReport r = error_report(solve_forward(spec, row.m), spec);
        const std::array<double, 6> got{r.u.l2, r.v.l2, r.u.slope_l2, r.v.slope_l2, r.u.h1, r.v.h1};
        for (int c = 0; c < 6; ++c) EXPECT_LE(rel(got[c], row.values[c]), 0.01) << "m=" << row.m << " col=" << c;
    }
}

TEST(ErrorReport, H1IsPythagorean) {
    const ProblemSpec spec = reference_problem();
    for (int m : {3, 15, 63}) {
        const ErrorReport r = error_report(solve_forward(spec, m), spec);
        for (const ErrorTriple& t : {r.u, r.v})
            EXPECT_LE(rel(t.h1 * t.h1, t.l2 * t.l2 + t.slope_l2 * t.slope_l2), 1e-12);
    }
}

TEST(ErrorReport, SelfComparisonVanishes) {
    const ProblemSpec spec = reference_problem();
    const GalerkinSolution sol = solve_forward(spec, 15);
    const ErrorReport r = error_report(sol, reference_from(sol.u), reference_from(sol.v));
    for (double e : {r.u.l2, r.u.slope_l2, r.u.h1, r.v.l2, r.v.slope_l2, r.v.h1}) EXPECT_LT(e, 1e-12);
}

TEST(ErrorReport, RequiresExactSolutions) {
    ProblemSpec spec = reference_problem();
    spec.exact_v.reset();
    const GalerkinSolution sol = solve_forward(spec, 3);
    EXPECT_THROW(error_report(sol, spec), std::invalid_argument);
}

TEST(ErrorReport, ConvergenceOrders) {
    const ProblemSpec spec = reference_problem();
    ErrorReport prev = error_report(solve_forward(spec, 3), spec);
    for (int m : {7, 15, 31, 63}) {
        const ErrorReport cur = error_report(solve_forward(spec, m), spec);
        for (auto [a, b] : {std::pair{prev.u, cur.u}, {prev.v, cur.v}}) {
            const double l2_order = std::log2(a.l2 / b.l2);
            const double d_order = std::log2(a.slope_l2 / b.slope_l2);
            EXPECT_GE(l2_order, 1.8);
            EXPECT_LE(l2_order, 2.2);
            EXPECT_GE(d_order, 0.9);
            EXPECT_LE(d_order, 1.1);
        }
        prev = cur;
    }
}

TEST(ReferenceProblem, ExactSolutionsSatisfyTheirEquations) {
    const ProblemSpec spec = reference_problem();
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    using namespace collage::testing;
    for (int i = 0; i < 100; ++i) {
        const double x = u01(rng);
        EXPECT_NEAR(-u_exact_dd(x) + spec.lambda1 * u_exact(x), spec.f(x), 1e-12) << x;
        EXPECT_NEAR(-v_exact_dd(x) + spec.lambda2 * v_exact(x), spec.g(x), 1e-12) << x;
        EXPECT_NEAR(spec.exact_u->evaluate(x), u_exact(x), 1e-15);
        EXPECT_NEAR(spec.exact_v->evaluate(x), v_exact(x), 1e-15);
    }
    EXPECT_EQ(spec.exact_u->evaluate(0.0), spec.alpha1);
    EXPECT_NEAR(spec.exact_u->evaluate(1.0), spec.beta1, 1e-15);
    EXPECT_NEAR(spec.exact_v->evaluate(0.0), spec.alpha2, 1e-15);
    EXPECT_NEAR(spec.exact_v->evaluate(1.0), spec.beta2, 1e-15);
}
