#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collage {

/// Raised when a numerical step cannot proceed (non-SPD matrix, singular
/// normal equations, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotSpdError : public NumericalError {
public:
    explicit NotSpdError(std::size_t pivot)
        : NumericalError("matrix not SPD: non-positive pivot at index " + std::to_string(pivot)),
          pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

class NotIdentifiableError : public NumericalError {
public:
    NotIdentifiableError() : NumericalError("lambda not identifiable: singular normal matrix") {}
};

/// Dense symmetric matrix storing the lower triangle only, so (i,j) and
/// (j,i) always alias the same entry.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), data_(n * (n + 1) / 2, 0.0) {}

    static SymMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[index(i, j)]; }

    std::vector<double> multiply(std::span<const double> x) const;

private:
    static std::size_t packed(std::size_t r, std::size_t c) noexcept { return r * (r + 1) / 2 + c; }
    static std::size_t index(std::size_t i, std::size_t j) noexcept {
        return i >= j ? packed(i, j) : packed(j, i);
    }

    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Cholesky factor A = L L^T of an SPD matrix, no pivoting.
class Cholesky {
public:
    explicit Cholesky(const SymMatrix& a);

    std::size_t size() const noexcept { return n_; }

    /// Solves A x = b.
    std::vector<double> solve(std::span<const double> b) const;
    /// Solves L y = b.
    std::vector<double> solve_lower(std::span<const double> b) const;

private:
    std::size_t n_;
    std::vector<double> l_;  // row-major lower triangle, packed like SymMatrix
};

std::vector<double> cholesky_solve(const SymMatrix& a, std::span<const double> b);

/// One residual row r(l1, l2) = constant + l1 * d_lambda1 + l2 * d_lambda2.
struct AffineRow {
    double constant = 0.0;
    double d_lambda1 = 0.0;
    double d_lambda2 = 0.0;

    double at(double l1, double l2) const noexcept { return constant + l1 * d_lambda1 + l2 * d_lambda2; }
};

struct LambdaPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

/// Unconstrained minimiser of sum_k r_k(l1,l2)^2 via the 2x2 normal equations.
/// Throws NotIdentifiableError when the normal matrix is singular.
LambdaPair lsq_affine_2(std::span<const AffineRow> rows);

}  // namespace collage
