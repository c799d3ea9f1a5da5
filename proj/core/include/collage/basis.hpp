#pragma once

#include <vector>

#include "collage/quadrature.hpp"

namespace collage {

/// Index k >= 1 of the Haar system. For k >= 2 it decomposes uniquely as
/// k = 2^level + shift with shift in {1, ..., 2^level}.
class HaarIndex {
public:
    explicit HaarIndex(int k);

    int k() const noexcept { return k_; }
    int level() const noexcept { return level_; }
    int shift() const noexcept { return shift_; }

    /// 2^(level/2); 1 for k = 1.
    double amplitude() const noexcept { return amplitude_; }

private:
    int k_;
    int level_ = 0;
    int shift_ = 0;
    double amplitude_ = 1.0;
};

/// L2-normalised Haar function h_k on [0,1]. Jumps take the right limit,
/// except at x = 1 where the left limit is returned.
double haar_eval(const HaarIndex& k, double x);
double haar_eval(int k, double x);

/// Faber-Schauder function g_1 = 1, g_k(x) = integral_0^x h_{k-1} for k >= 2.
/// For k >= 3 this is a tent on [(i-1)/2^j, i/2^j] (k-1 = 2^j + i) with peak
/// 2^(-j/2-1) at the midpoint.
struct SchauderFn {
    explicit SchauderFn(int k);

    int k;
    double support_lo;
    double peak_at;
    double support_hi;
    double peak;

    double value(double x) const;
    double slope(double x) const;

    /// Points where g_k is not smooth, endpoints of [0,1] included.
    std::vector<double> breakpoints() const;
};

double schauder_eval(int k, double x);
double schauder_deriv(int k, double x);

/// Exact integral_0^1 g_p' g_q' for p, q >= 2 (Kronecker delta).
double stiffness_entry(int p, int q);

/// Exact integral_0^1 g_p g_q for p, q >= 3.
double mass_entry(int p, int q);

/// Exact integral_0^1 (c0 + c1 x) g_k(x) dx.
double affine_moment(int k, double c0, double c1);

/// integral_0^1 w g_k with the rule's cells clipped to the support of g_k
/// and split at its kink.
double load_entry(const ScalarFn& w, int k, const QuadratureRule& rule);

}  // namespace collage
