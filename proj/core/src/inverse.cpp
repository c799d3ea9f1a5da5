#include "collage/inverse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "collage/basis.hpp"

namespace collage {

ResidualModel::ResidualModel(std::vector<AffineRow> rows, SymMatrix gram)
    : rows_(std::move(rows)), gram_(std::move(gram)), gram_factor_(gram_) {
    if (rows_.size() != gram_.size()) throw std::invalid_argument("ResidualModel: gram size mismatch");
}

std::vector<double> ResidualModel::residual(double l1, double l2) const {
    std::vector<double> r(rows_.size());
    for (std::size_t k = 0; k < rows_.size(); ++k) r[k] = rows_[k].at(l1, l2);
    return r;
}

std::vector<AffineRow> ResidualModel::whitened_rows() const {
    const std::size_t n = rows_.size();
    std::vector<double> c(n), p(n), q(n);
    for (std::size_t k = 0; k < n; ++k) {
        c[k] = rows_[k].constant;
        p[k] = rows_[k].d_lambda1;
        q[k] = rows_[k].d_lambda2;
    }
    c = gram_factor_.solve_lower(c);
    p = gram_factor_.solve_lower(p);
    q = gram_factor_.solve_lower(q);
    std::vector<AffineRow> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = {c[k], p[k], q[k]};
    return out;
}

std::string_view to_string(ObjectiveMode mode) {
    switch (mode) {
        case ObjectiveMode::paper_abs_sum: return "paper-abs-sum";
        case ObjectiveMode::l1: return "l1";
        case ObjectiveMode::l2: return "l2";
        case ObjectiveMode::dual_norm: return "dual-norm";
    }
    return "?";
}

std::optional<ObjectiveMode> parse_objective_mode(std::string_view name) {
    for (ObjectiveMode m : {ObjectiveMode::paper_abs_sum, ObjectiveMode::l1, ObjectiveMode::l2,
                            ObjectiveMode::dual_norm}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

void BoxConstraint::validate() const {
    if (!(lambda1_min < lambda1_max) || !(lambda2_min < lambda2_max))
        throw std::invalid_argument("BoxConstraint: min must be below max on each axis");
}

ResidualModel build_residual(const GalerkinSolution& target, int n, const Expression& f,
                             const Expression& g) {
    if (n < 1) throw std::invalid_argument("build_residual: n must be >= 1");
    const int m = target.m;
    if (target.u.coeffs.size() != static_cast<std::size_t>(m) ||
        target.v.coeffs.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("build_residual: target coefficient count differs from m");

    const QuadratureRule rule = default_rule(std::max(m, n));
    std::vector<AffineRow> rows(n);
    for (int k = 1; k <= n; ++k) {
        const int idx = k + 2;
        // Stiffness is the identity, so int u_m' g_{k+2}' picks out one coefficient;
        // the lift contributes nothing.
        double stiff = 0.0;
        if (k <= m) stiff = target.u.coeffs[k - 1] + target.v.coeffs[k - 1];

        double pk = affine_moment(idx, target.u.alpha, target.u.beta - target.u.alpha);
        double qk = affine_moment(idx, target.v.alpha, target.v.beta - target.v.alpha);
        for (int l = 1; l <= m; ++l) {
            const double mass = mass_entry(l + 2, idx);
            if (mass == 0.0) continue;
            pk += target.u.coeffs[l - 1] * mass;
            qk += target.v.coeffs[l - 1] * mass;
        }
        const double load = load_entry(f, idx, rule) + load_entry(g, idx, rule);
        rows[k - 1] = {stiff - load, pk, qk};
    }
    return ResidualModel(std::move(rows), h1_gram(n));
}

namespace {

double sum_of_squares(std::span<const AffineRow> rows, double l1, double l2) {
    double s = 0.0;
    for (const AffineRow& r : rows) {
        const double v = r.at(l1, l2);
        s += v * v;
    }
    return s;
}

// Evaluates one mode; dual-norm goes through the pre-whitened rows.
class Objective {
public:
    Objective(const ResidualModel& model, ObjectiveMode mode) : model_(model), mode_(mode) {
        if (mode_ == ObjectiveMode::dual_norm) whitened_ = model.whitened_rows();
    }

    double operator()(double l1, double l2) const {
        switch (mode_) {
            case ObjectiveMode::paper_abs_sum: {
                double s = 0.0;
                for (const AffineRow& r : model_.rows()) s += r.at(l1, l2);
                return std::fabs(s);
            }
            case ObjectiveMode::l1: {
                double s = 0.0;
                for (const AffineRow& r : model_.rows()) s += std::fabs(r.at(l1, l2));
                return s;
            }
            case ObjectiveMode::l2: return std::sqrt(sum_of_squares(model_.rows(), l1, l2));
            case ObjectiveMode::dual_norm: return std::sqrt(sum_of_squares(whitened_, l1, l2));
        }
        return 0.0;
    }

    std::span<const AffineRow> least_squares_rows() const {
        return mode_ == ObjectiveMode::dual_norm ? std::span<const AffineRow>(whitened_) : model_.rows();
    }

private:
    const ResidualModel& model_;
    ObjectiveMode mode_;
    std::vector<AffineRow> whitened_;
};

struct Point {
    double l1;
    double l2;
};

Point project(Point p, const BoxConstraint& box) {
    return {std::clamp(p.l1, box.lambda1_min, box.lambda1_max),
            std::clamp(p.l2, box.lambda2_min, box.lambda2_max)};
}

struct GridBest {
    Point at{0.0, 0.0};
    double value = std::numeric_limits<double>::infinity();
};

GridBest scan_rows(const Objective& obj, const BoxConstraint& box, int grid, int row_begin, int row_end) {
    GridBest best;
    const double h1 = (box.lambda1_max - box.lambda1_min) / (grid - 1);
    const double h2 = (box.lambda2_max - box.lambda2_min) / (grid - 1);
    for (int i = row_begin; i < row_end; ++i) {
        const double l1 = (i == grid - 1) ? box.lambda1_max : box.lambda1_min + i * h1;
        for (int j = 0; j < grid; ++j) {
            const double l2 = (j == grid - 1) ? box.lambda2_max : box.lambda2_min + j * h2;
            const double v = obj(l1, l2);
            if (v < best.value) best = {{l1, l2}, v};
        }
    }
    return best;
}

GridBest grid_scan(const Objective& obj, const BoxConstraint& box, int grid, unsigned threads) {
    threads = std::clamp(threads, 1u, static_cast<unsigned>(grid));
    std::vector<GridBest> partial(threads);
    {
        std::vector<std::jthread> workers;
        const int chunk = (grid + static_cast<int>(threads) - 1) / static_cast<int>(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const int begin = static_cast<int>(t) * chunk;
            const int end = std::min(grid, begin + chunk);
            if (begin >= end) continue;
            workers.emplace_back(
                [&, t, begin, end] { partial[t] = scan_rows(obj, box, grid, begin, end); });
        }
    }
    // Chunks are ordered by lambda1, so a strict comparison keeps the lowest (l1, l2) on ties.
    GridBest best;
    for (const GridBest& p : partial)
        if (p.value < best.value) best = p;
    return best;
}

struct Refined {
    Point at;
    double value;
    int iterations;
};

Refined nelder_mead(const Objective& obj, const BoxConstraint& box, Point start, const MinimizeSettings& s) {
    auto f = [&](Point p) { return obj(p.l1, p.l2); };
    auto offset = [&](Point p, double d1, double d2) {
        Point q{p.l1 + d1, p.l2 + d2};
        if (q.l1 > box.lambda1_max) q.l1 = p.l1 - d1;
        if (q.l2 > box.lambda2_max) q.l2 = p.l2 - d2;
        return project(q, box);
    };

    std::array<Point, 3> x{start, offset(start, s.simplex_edge, 0.0), offset(start, 0.0, s.simplex_edge)};
    std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};

    auto diameter = [&] {
        double d = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                d = std::max(d, std::hypot(x[i].l1 - x[j].l1, x[i].l2 - x[j].l2));
        return d;
    };

    int iter = 0;
    for (; iter < s.max_iterations; ++iter) {
        std::array<int, 3> order{0, 1, 2};
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::array<Point, 3> xs{x[order[0]], x[order[1]], x[order[2]]};
        std::array<double, 3> fs{fx[order[0]], fx[order[1]], fx[order[2]]};
        x = xs;
        fx = fs;
        if (diameter() < s.simplex_tolerance) break;

        const Point c{0.5 * (x[0].l1 + x[1].l1), 0.5 * (x[0].l2 + x[1].l2)};
        auto along = [&](double t) {
            return project({c.l1 + t * (x[2].l1 - c.l1), c.l2 + t * (x[2].l2 - c.l2)}, box);
        };

        const Point xr = along(-1.0);
        const double fr = f(xr);
        if (fr < fx[0]) {
            const Point xe = along(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                x[2] = xe;
                fx[2] = fe;
            } else {
                x[2] = xr;
                fx[2] = fr;
            }
            continue;
        }
        if (fr < fx[1]) {
            x[2] = xr;
            fx[2] = fr;
            continue;
        }
        const bool outside = fr < fx[2];
        const Point xc = outside ? along(-0.5) : along(0.5);
        const double fc = f(xc);
        if (fc < (outside ? fr : fx[2])) {
            x[2] = xc;
            fx[2] = fc;
            continue;
        }
        for (int i = 1; i < 3; ++i) {
            x[i] = {x[0].l1 + 0.5 * (x[i].l1 - x[0].l1), x[0].l2 + 0.5 * (x[i].l2 - x[0].l2)};
            fx[i] = f(x[i]);
        }
    }
    int best = 0;
    for (int i = 1; i < 3; ++i)
        if (fx[i] < fx[best]) best = i;
    return {x[best], fx[best], iter};
}

// Exact minimiser of a convex quadratic sum of squares over the box: the
// unconstrained point if feasible, otherwise the best 1-D minimiser along an edge.
Point box_least_squares(std::span<const AffineRow> rows, const BoxConstraint& box,
                        const std::optional<LambdaPair>& free) {
    if (free && box.contains(free->lambda1, free->lambda2)) return {free->lambda1, free->lambda2};

    std::vector<Point> candidates;
    for (double l1 : {box.lambda1_min, box.lambda1_max}) {
        double num = 0.0, den = 0.0;
        for (const AffineRow& r : rows) {
            num += r.d_lambda2 * (r.constant + r.d_lambda1 * l1);
            den += r.d_lambda2 * r.d_lambda2;
        }
        const double l2 = den > 0.0 ? -num / den : box.lambda2_min;
        candidates.push_back(project({l1, l2}, box));
    }
    for (double l2 : {box.lambda2_min, box.lambda2_max}) {
        double num = 0.0, den = 0.0;
        for (const AffineRow& r : rows) {
            num += r.d_lambda1 * (r.constant + r.d_lambda2 * l2);
            den += r.d_lambda1 * r.d_lambda1;
        }
        const double l1 = den > 0.0 ? -num / den : box.lambda1_min;
        candidates.push_back(project({l1, l2}, box));
    }
    Point best = candidates.front();
    double best_v = sum_of_squares(rows, best.l1, best.l2);
    for (const Point& p : candidates) {
        const double v = sum_of_squares(rows, p.l1, p.l2);
        if (v < best_v) {
            best = p;
            best_v = v;
        }
    }
    return best;
}

// Nearest point to `from` on {c + a l1 + b l2 = 0} within the box, if the line meets it.
std::optional<Point> nearest_on_zero_line(const AffineRow& line, const BoxConstraint& box, Point from) {
    const double a = line.d_lambda1;
    const double b = line.d_lambda2;
    const double nn = a * a + b * b;
    if (!(nn > 0.0)) return std::nullopt;
    const double t0 = line.at(from.l1, from.l2) / nn;
    const Point foot{from.l1 - t0 * a, from.l2 - t0 * b};
    const Point dir{-b, a};

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    auto clip = [&](double p, double d, double pmin, double pmax) {
        if (d == 0.0) return p >= pmin && p <= pmax;
        double s0 = (pmin - p) / d;
        double s1 = (pmax - p) / d;
        if (s0 > s1) std::swap(s0, s1);
        lo = std::max(lo, s0);
        hi = std::min(hi, s1);
        return lo <= hi;
    };
    if (!clip(foot.l1, dir.l1, box.lambda1_min, box.lambda1_max)) return std::nullopt;
    if (!clip(foot.l2, dir.l2, box.lambda2_min, box.lambda2_max)) return std::nullopt;
    const double s = std::clamp(0.0, lo, hi);
    return project({foot.l1 + s * dir.l1, foot.l2 + s * dir.l2}, box);
}

}  // namespace

double objective(const ResidualModel& model, LambdaPair lambda, ObjectiveMode mode) {
    return Objective(model, mode)(lambda.lambda1, lambda.lambda2);
}

MinimizeResult minimize(const ResidualModel& model, const BoxConstraint& box, ObjectiveMode mode,
                        const MinimizeSettings& settings) {
    box.validate();
    if (settings.grid < 2) throw std::invalid_argument("minimize: grid must have at least 2 points per axis");
    const Objective obj(model, mode);

    MinimizeResult result;
    MinimizeDiagnostics& diag = result.diagnostics;

    const GridBest coarse = grid_scan(obj, box, settings.grid, settings.threads);
    diag.grid_best = {coarse.at.l1, coarse.at.l2};
    diag.grid_value = coarse.value;

    const Refined fine = nelder_mead(obj, box, coarse.at, settings);
    diag.refined_best = {fine.at.l1, fine.at.l2};
    diag.refined_value = fine.value;
    diag.iterations = fine.iterations;

    Point best = fine.at;
    double best_value = fine.value;
    if (coarse.value < best_value) {
        best = coarse.at;
        best_value = coarse.value;
    }

    std::optional<LambdaPair> free;
    if (model.size() >= 2) {
        try {
            free = lsq_affine_2(obj.least_squares_rows());
        } catch (const NotIdentifiableError&) {
            diag.identifiable = false;
        }
    } else {
        diag.identifiable = false;
    }

    std::optional<Point> exact;
    if (mode == ObjectiveMode::l2 || mode == ObjectiveMode::dual_norm) {
        exact = box_least_squares(obj.least_squares_rows(), box, free);
    } else if (mode == ObjectiveMode::paper_abs_sum) {
        AffineRow total;
        for (const AffineRow& r : model.rows()) {
            total.constant += r.constant;
            total.d_lambda1 += r.d_lambda1;
            total.d_lambda2 += r.d_lambda2;
        }
        exact = nearest_on_zero_line(total, box, best);
    }
    if (exact) {
        diag.closed_form = LambdaPair{exact->l1, exact->l2};
        diag.closed_form_value = obj(exact->l1, exact->l2);
        if (diag.closed_form_value <= best_value) {
            best = *exact;
            best_value = diag.closed_form_value;
        }
    }

    result.lambda = {best.l1, best.l2};
    result.value = best_value;
    return result;
}

CollageBound collage_bound_check(const ProblemSpec& spec, const GalerkinSolution& y, int m) {
    if (y.m != m || y.u.coeffs.size() != static_cast<std::size_t>(m) ||
        y.v.coeffs.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("collage_bound_check: y does not match the test space dimension");
    if (y.u.alpha != spec.alpha1 || y.u.beta != spec.beta1 || y.v.alpha != spec.alpha2 ||
        y.v.beta != spec.beta2)
        throw std::invalid_argument("collage_bound_check: y does not satisfy the boundary conditions");

    const GalerkinSolution xbar = solve_forward(spec, m);
    const QuadratureRule rule = default_rule(m);
    const SymMatrix g = h1_gram(m);
    const Cholesky gram(g);

    double dist_sq = 0.0;
    double res_sq = 0.0;
    for (Equation eq : {Equation::first, Equation::second}) {
        const LinearSystem sys = assemble(spec, m, eq, rule);
        const std::vector<double>& cy = y.component(eq).coeffs;
        const std::vector<double>& cx = xbar.component(eq).coeffs;

        std::vector<double> r = sys.matrix.multiply(cy);
        for (int k = 0; k < m; ++k) r[k] -= sys.rhs[k];
        for (double w : gram.solve_lower(r)) res_sq += w * w;

        std::vector<double> d(m);
        for (int k = 0; k < m; ++k) d[k] = cy[k] - cx[k];
        const std::vector<double> gd = g.multiply(d);
        for (int k = 0; k < m; ++k) dist_sq += d[k] * gd[k];
    }

    CollageBound out;
    out.distance = std::sqrt(std::max(dist_sq, 0.0));
    out.residual = std::sqrt(res_sq);
    const double rho1 = std::min(1.0, spec.lambda1);
    const double rho2 = std::min(1.0, spec.lambda2);
    out.rho_sum = rho1 + rho2;
    out.rho_min = std::min(rho1, rho2);
    out.bound_sum = out.residual / out.rho_sum;
    out.bound_min = out.residual / out.rho_min;
    out.holds_sum = out.distance <= out.bound_sum + 1e-9;
    out.holds = out.distance <= out.bound_min + 1e-9;
    return out;
}

}  // namespace collage
