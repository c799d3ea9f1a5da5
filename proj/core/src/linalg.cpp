#include "collage/linalg.hpp"

#include <cmath>

namespace collage {

SymMatrix SymMatrix::identity(std::size_t n) {
    SymMatrix a(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
}

std::vector<double> SymMatrix::multiply(std::span<const double> x) const {
    if (x.size() != n_) throw std::invalid_argument("SymMatrix::multiply: size mismatch");
    std::vector<double> y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Cholesky::Cholesky(const SymMatrix& a) : n_(a.size()), l_(n_ * (n_ + 1) / 2, 0.0) {
    auto at = [](std::size_t r, std::size_t c) { return r * (r + 1) / 2 + c; };
    for (std::size_t j = 0; j < n_; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l_[at(j, k)] * l_[at(j, k)];
        if (!(d > 0.0)) throw NotSpdError(j);
        const double ljj = std::sqrt(d);
        l_[at(j, j)] = ljj;
        for (std::size_t i = j + 1; i < n_; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l_[at(i, k)] * l_[at(j, k)];
            l_[at(i, j)] = s / ljj;
        }
    }
}

std::vector<double> Cholesky::solve_lower(std::span<const double> b) const {
    if (b.size() != n_) throw std::invalid_argument("Cholesky: rhs size mismatch");
    std::vector<double> y(b.begin(), b.end());
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t row = i * (i + 1) / 2;
        for (std::size_t k = 0; k < i; ++k) y[i] -= l_[row + k] * y[k];
        y[i] /= l_[row + i];
    }
    return y;
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
    std::vector<double> x = solve_lower(b);
    for (std::size_t ii = n_; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n_; ++k) x[ii] -= l_[k * (k + 1) / 2 + ii] * x[k];
        x[ii] /= l_[ii * (ii + 1) / 2 + ii];
    }
    return x;
}

std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> b) {
    return Cholesky(a).solve(b);
}

LambdaPair lsq_affine_2(std::span<const AffineRow> rows) {
    if (rows.size() < 2) throw std::invalid_argument("lsq_affine_2: need at least two rows");
    double spp = 0.0, spq = 0.0, sqq = 0.0, sp0 = 0.0, sq0 = 0.0;
    for (const AffineRow& r : rows) {
        spp += r.d_lambda1 * r.d_lambda1;
        spq += r.d_lambda1 * r.d_lambda2;
        sqq += r.d_lambda2 * r.d_lambda2;
        sp0 += r.d_lambda1 * r.constant;
        sq0 += r.d_lambda2 * r.constant;
    }
    const double det = spp * sqq - spq * spq;
    const double scale = spp * sqq;
    // Relative test: det is a difference of two products of the same magnitude.
    if (!(scale > 0.0) || !(det > 1e-12 * scale)) throw NotIdentifiableError();
    return {(-sp0 * sqq + sq0 * spq) / det, (-sq0 * spp + sp0 * spq) / det};
}

}  // namespace collage
