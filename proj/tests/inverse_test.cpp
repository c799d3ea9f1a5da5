#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "collage/basis.hpp"
#include "collage/inverse.hpp"
#include "oracles.hpp"

using namespace collage;

namespace {

const double kE = std::numbers::e;
const double kHalfPi = std::numbers::pi / 2.0;

ProblemSpec with_lambdas(double l1, double l2) {
    ProblemSpec spec = reference_problem();
    spec.lambda1 = l1;
    spec.lambda2 = l2;
    return spec;
}

ResidualModel reference_model(int m, int n = 7) {
    const ProblemSpec spec = reference_problem();
    return build_residual(solve_forward(spec, m), n, spec.f, spec.g);
}

constexpr ObjectiveMode kModes[] = {ObjectiveMode::paper_abs_sum, ObjectiveMode::l1, ObjectiveMode::l2,
                                    ObjectiveMode::dual_norm};

}  // namespace

TEST(ObjectiveMode, Names) {
    for (ObjectiveMode m : kModes) EXPECT_EQ(parse_objective_mode(to_string(m)), m);
    EXPECT_FALSE(parse_objective_mode("L2").has_value());
    EXPECT_FALSE(parse_objective_mode("").has_value());
}

TEST(BuildResidual, VanishesAtTrueLambdaForConsistentTarget) {
    for (int m : {7, 15, 31, 63}) {
        const ResidualModel model = reference_model(m);
        for (ObjectiveMode mode : kModes)
            EXPECT_LE(objective(model, {kE, kHalfPi}, mode), 1e-9) << "m=" << m << " " << to_string(mode);
    }
}

TEST(BuildResidual, ZeroProblemGivesZeroRows) {
    ProblemSpec spec;
    spec.lambda1 = 1.0;
    spec.lambda2 = 2.0;
    const ResidualModel model = build_residual(solve_forward(spec, 15), 7, spec.f, spec.g);
    for (const AffineRow& r : model.rows()) {
        EXPECT_EQ(r.constant, 0.0);
        EXPECT_EQ(r.d_lambda1, 0.0);
        EXPECT_EQ(r.d_lambda2, 0.0);
    }
}

TEST(BuildResidual, MassTermsMatchTrapezoidOracle) {
    const ProblemSpec spec = reference_problem();
    const GalerkinSolution target = solve_forward(spec, 15);
    const ResidualModel model = build_residual(target, 7, spec.f, spec.g);
    for (int k = 1; k <= 7; ++k) {
        auto weight = [k](double x) { return collage::testing::tent(k + 2, x); };
        const double pk = collage::testing::trapezoid([&](double x) { return target.u.value(x) * weight(x); }, 1LL << 20);
        const double qk = collage::testing::trapezoid([&](double x) { return target.v.value(x) * weight(x); }, 1LL << 20);
        EXPECT_NEAR(model.rows()[k - 1].d_lambda1, pk, 1e-10) << k;
        EXPECT_NEAR(model.rows()[k - 1].d_lambda2, qk, 1e-10) << k;
    }
}

TEST(BuildResidual, MoreTestFunctionsThanUnknowns) {
    // n > m: rows beyond m have no stiffness contribution but are still well defined.
    const ResidualModel model = reference_model(3, 7);
    EXPECT_EQ(model.size(), 7u);
    EXPECT_GT(objective(model, {kE, kHalfPi}, ObjectiveMode::l2), 1e-6);
}

TEST(BuildResidual, AffineInLambda) {
    const ResidualModel model = reference_model(15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> box(0.5, 3.0), t01(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a1 = box(rng), a2 = box(rng), b1 = box(rng), b2 = box(rng), t = t01(rng);
        const auto ra = model.residual(a1, a2);
        const auto rb = model.residual(b1, b2);
        const auto rt = model.residual(t * a1 + (1 - t) * b1, t * a2 + (1 - t) * b2);
        for (std::size_t k = 0; k < rt.size(); ++k) EXPECT_NEAR(rt[k], t * ra[k] + (1 - t) * rb[k], 1e-14);
    }
    EXPECT_NO_THROW(Cholesky{model.gram()});
}

TEST(Objective, Examples) {
    const ResidualModel zero(std::vector<AffineRow>(4), h1_gram(4));
    for (ObjectiveMode mode : kModes) EXPECT_EQ(objective(zero, {1.3, 2.1}, mode), 0.0);

    const ResidualModel single({{-1.0, 1.0, 0.0}}, h1_gram(1));
    for (ObjectiveMode mode : kModes)
        for (double l2 : {0.5, 1.0, 2.7}) EXPECT_EQ(objective(single, {1.0, l2}, mode), 0.0);

    const std::vector<AffineRow> rows{{0.3, -1.0, 0.2}, {1.1, 0.4, -0.7}, {-0.2, 0.05, 0.6}};
    const ResidualModel plain(rows, SymMatrix::identity(3));
    for (LambdaPair l : {LambdaPair{0.5, 0.5}, {1.7, 2.2}, {3.0, 0.9}})
        EXPECT_EQ(objective(plain, l, ObjectiveMode::dual_norm), objective(plain, l, ObjectiveMode::l2));
}

TEST(Objective, ModeConsistency) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0), box(0.5, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<AffineRow> rows(6);
        for (AffineRow& r : rows) r = {u(rng), u(rng), u(rng)};
        const ResidualModel model(rows, h1_gram(6));
        const LambdaPair l{box(rng), box(rng)};
        const double abs_sum = objective(model, l, ObjectiveMode::paper_abs_sum);
        const double l1 = objective(model, l, ObjectiveMode::l1);
        const double l2 = objective(model, l, ObjectiveMode::l2);
        EXPECT_LE(abs_sum, l1 + 1e-15);
        EXPECT_LE(l2, l1 + 1e-15);
        EXPECT_GE(objective(model, l, ObjectiveMode::dual_norm), 0.0);
    }
}

TEST(Minimize, RecoversReferenceLambdaFromConvergedTargets) {
    for (int m : {15, 31}) {
        const MinimizeResult res = minimize(reference_model(m), BoxConstraint{}, ObjectiveMode::l2);
        EXPECT_NEAR(res.lambda.lambda1, 2.71828, 1e-3) << m;
        EXPECT_NEAR(res.lambda.lambda2, 1.5708, 1e-3) << m;
        EXPECT_TRUE(res.diagnostics.identifiable);
        ASSERT_TRUE(res.diagnostics.closed_form.has_value());
    }
}

TEST(Minimize, SyntheticGenerateAndRecover) {
    const ProblemSpec spec = with_lambdas(1.3, 2.4);
    const ResidualModel model = build_residual(solve_forward(spec, 63), 7, spec.f, spec.g);
    for (ObjectiveMode mode : {ObjectiveMode::l2, ObjectiveMode::dual_norm, ObjectiveMode::l1}) {
        const MinimizeResult res = minimize(model, BoxConstraint{}, mode);
        EXPECT_NEAR(res.lambda.lambda1, 1.3, 1e-3) << to_string(mode);
        EXPECT_NEAR(res.lambda.lambda2, 2.4, 1e-3) << to_string(mode);
    }
}

TEST(Minimize, GridAndRefinedAgreeToGridResolution) {
    const ResidualModel model = reference_model(31);
    const BoxConstraint box;
    for (ObjectiveMode mode : {ObjectiveMode::l1, ObjectiveMode::l2, ObjectiveMode::dual_norm}) {
        const MinimizeResult res = minimize(model, box, mode);
        const auto& d = res.diagnostics;
        const double step = (box.lambda1_max - box.lambda1_min) / 250.0;
        EXPECT_LE(std::fabs(d.grid_best.lambda1 - d.refined_best.lambda1), step) << to_string(mode);
        EXPECT_LE(std::fabs(d.grid_best.lambda2 - d.refined_best.lambda2), step) << to_string(mode);
        EXPECT_LE(d.refined_value, d.grid_value);
        EXPECT_LE(d.iterations, 500);
    }
}

TEST(Minimize, BoxExcludingTheTruth) {
    // True (e, pi/2) outside [0.5,1]^2: the constrained optimum sits on the boundary.
    const ResidualModel model = reference_model(31);
    const BoxConstraint box{0.5, 1.0, 0.5, 1.0};
    for (ObjectiveMode mode : {ObjectiveMode::l2, ObjectiveMode::dual_norm}) {
        const MinimizeResult res = minimize(model, box, mode);
        EXPECT_TRUE(box.contains(res.lambda.lambda1, res.lambda.lambda2));
        EXPECT_LE(res.value, res.diagnostics.refined_value + 1e-12);
        const bool on_edge = res.lambda.lambda1 == 1.0 || res.lambda.lambda2 == 1.0 ||
                             res.lambda.lambda1 == 0.5 || res.lambda.lambda2 == 0.5;
        EXPECT_TRUE(on_edge);
        // Brute-force check on a fine grid that nothing in the box does better.
        double best = INFINITY;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; j <= 400; ++j)
                best = std::min(best, objective(model, {0.5 + i / 800.0, 0.5 + j / 800.0}, mode));
        EXPECT_LE(res.value, best + 1e-12);
    }
}

TEST(Minimize, SyntheticInsideSmallBox) {
    const ProblemSpec spec = with_lambdas(0.8, 0.9);
    const ResidualModel model = build_residual(solve_forward(spec, 31), 7, spec.f, spec.g);
    const MinimizeResult res = minimize(model, {0.5, 1.0, 0.5, 1.0}, ObjectiveMode::l2);
    EXPECT_NEAR(res.lambda.lambda1, 0.8, 1e-3);
    EXPECT_NEAR(res.lambda.lambda2, 0.9, 1e-3);
}

TEST(Minimize, AbsSumReachesItsZeroLine) {
    for (int m : {3, 7, 15, 31}) {
        const MinimizeResult res = minimize(reference_model(m), BoxConstraint{}, ObjectiveMode::paper_abs_sum);
        EXPECT_LE(res.value, 1e-6) << m;
        EXPECT_TRUE(BoxConstraint{}.contains(res.lambda.lambda1, res.lambda.lambda2));
    }
}

TEST(Minimize, NonIdentifiableStillReturnsGridResult) {
    ProblemSpec spec;
    spec.lambda1 = 1.0;
    spec.lambda2 = 1.0;
    const ResidualModel model = build_residual(solve_forward(spec, 7), 7, spec.f, spec.g);
    const MinimizeResult res = minimize(model, BoxConstraint{}, ObjectiveMode::l2);
    EXPECT_FALSE(res.diagnostics.identifiable);
    // Every grid point ties at zero; the lowest (lambda1, lambda2) wins.
    EXPECT_EQ(res.diagnostics.grid_best.lambda1, 0.5);
    EXPECT_EQ(res.diagnostics.grid_best.lambda2, 0.5);
    EXPECT_EQ(res.value, 0.0);
}

TEST(Minimize, ThreadedGridMatchesSerial) {
    const ResidualModel model = reference_model(7);
    MinimizeSettings serial;
    MinimizeSettings threaded;
    threaded.threads = 4;
    for (ObjectiveMode mode : kModes) {
        const MinimizeResult a = minimize(model, BoxConstraint{}, mode, serial);
        const MinimizeResult b = minimize(model, BoxConstraint{}, mode, threaded);
        EXPECT_EQ(a.diagnostics.grid_best.lambda1, b.diagnostics.grid_best.lambda1);
        EXPECT_EQ(a.diagnostics.grid_best.lambda2, b.diagnostics.grid_best.lambda2);
        EXPECT_EQ(a.lambda.lambda1, b.lambda.lambda1);
        EXPECT_EQ(a.lambda.lambda2, b.lambda.lambda2);
    }
}

TEST(Minimize, RejectsBadBox) {
    const ResidualModel model = reference_model(7);
    EXPECT_THROW(minimize(model, {1.0, 1.0, 0.5, 3.0}, ObjectiveMode::l2), std::invalid_argument);
    MinimizeSettings s;
    s.grid = 1;
    EXPECT_THROW(minimize(model, BoxConstraint{}, ObjectiveMode::l2, s), std::invalid_argument);
}

TEST(Minimize, MonotoneIdentification) {
    double prev = INFINITY;
    for (int m : {3, 7, 15, 31}) {
        const MinimizeResult res = minimize(reference_model(m), BoxConstraint{}, ObjectiveMode::l2);
        const double dist = std::hypot(res.lambda.lambda1 - kE, res.lambda.lambda2 - kHalfPi);
        EXPECT_LE(dist, prev + 1e-9) << m;
        prev = dist;
    }
}

TEST(CollageBound, ExactSolutionHasZeroDistance) {
    const ProblemSpec spec = reference_problem();
    const GalerkinSolution xbar = solve_forward(spec, 15);
    const CollageBound b = collage_bound_check(spec, xbar, 15);
    EXPECT_EQ(b.distance, 0.0);
    EXPECT_LE(b.residual, 1e-12);
    EXPECT_TRUE(b.holds);
    EXPECT_DOUBLE_EQ(b.rho_sum, 2.0);
    EXPECT_DOUBLE_EQ(b.rho_min, 1.0);
}

TEST(CollageBound, SinglePerturbation) {
    const ProblemSpec spec = reference_problem();
    GalerkinSolution y = solve_forward(spec, 15);
    y.u.coeffs[4] += 0.1;
    const CollageBound b = collage_bound_check(spec, y, 15);
    EXPECT_GT(b.distance, 0.0);
    EXPECT_TRUE(b.holds);
}

TEST(CollageBound, RandomDiscreteTargets) {
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(-0.5, 0.5), lam(0.3, 3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const ProblemSpec spec = with_lambdas(lam(rng), lam(rng));
        GalerkinSolution y = solve_forward(spec, 15);
        for (double& c : y.u.coeffs) c += u(rng);
        for (double& c : y.v.coeffs) c += u(rng);
        const CollageBound b = collage_bound_check(spec, y, 15);
        EXPECT_TRUE(b.holds) << "trial " << trial << ": " << b.distance << " > " << b.bound_min;
    }
}

TEST(CollageBound, SumConstantIsNotGuaranteedForProductNorm) {
    // With lambda = (1, 1) the forms equal the H1 inner product, so the
    // min-constant bound is attained and the sum constant undershoots by 2.
    const ProblemSpec spec = with_lambdas(1.0, 1.0);
    GalerkinSolution y = solve_forward(spec, 7);
    y.v.coeffs[2] -= 0.3;
    const CollageBound b = collage_bound_check(spec, y, 7);
    EXPECT_NEAR(b.distance, b.bound_min, 1e-12);
    EXPECT_TRUE(b.holds);
    EXPECT_FALSE(b.holds_sum);
}

TEST(CollageBound, RejectsMismatchedTargets) {
    const ProblemSpec spec = reference_problem();
    const GalerkinSolution y = solve_forward(spec, 7);
    EXPECT_THROW(collage_bound_check(spec, y, 15), std::invalid_argument);
    GalerkinSolution moved = y;
    moved.u.alpha += 1.0;
    EXPECT_THROW(collage_bound_check(spec, moved, 7), std::invalid_argument);
}
