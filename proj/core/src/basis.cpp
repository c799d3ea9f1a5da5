#include "collage/basis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace collage {

HaarIndex::HaarIndex(int k) : k_(k) {
    if (k < 1) throw std::invalid_argument("HaarIndex: k must be >= 1, got " + std::to_string(k));
    if (k == 1) return;
    const auto km1 = static_cast<unsigned>(k - 1);
    level_ = std::bit_width(km1) - 1;  // floor(log2(k-1))
    shift_ = k - (1 << level_);
    amplitude_ = std::ldexp(1.0, level_ / 2) * ((level_ % 2) ? std::sqrt(2.0) : 1.0);
}

namespace {

void check_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::out_of_range("basis: x = " + std::to_string(x) + " outside [0,1]");
}

}  // namespace

double haar_eval(const HaarIndex& h, double x) {
    check_unit(x);
    if (h.k() == 1) return 1.0;
    const int j = h.level();
    const int i = h.shift();
    if (x == 1.0) return (i == (1 << j)) ? -h.amplitude() : 0.0;
    const double t = std::ldexp(x, j);
    const double cell = std::floor(t);
    if (cell != static_cast<double>(i - 1)) return 0.0;
    return (t - cell < 0.5) ? h.amplitude() : -h.amplitude();
}

double haar_eval(int k, double x) { return haar_eval(HaarIndex(k), x); }

SchauderFn::SchauderFn(int index) : k(index) {
    if (index < 1) throw std::invalid_argument("SchauderFn: k must be >= 1, got " + std::to_string(index));
    if (index <= 2) {
        support_lo = 0.0;
        support_hi = 1.0;
        peak_at = 1.0;
        peak = 1.0;
        return;
    }
    const HaarIndex h(index - 1);
    const int j = h.level();
    support_lo = std::ldexp(static_cast<double>(h.shift() - 1), -j);
    support_hi = std::ldexp(static_cast<double>(h.shift()), -j);
    peak_at = 0.5 * (support_lo + support_hi);
    peak = h.amplitude() * std::ldexp(1.0, -j - 1);
}

double SchauderFn::value(double x) const {
    check_unit(x);
    if (k == 1) return 1.0;
    if (k == 2) return x;
    if (x <= support_lo || x >= support_hi) return 0.0;
    const double slope_mag = peak / (peak_at - support_lo);
    return (x <= peak_at) ? slope_mag * (x - support_lo) : slope_mag * (support_hi - x);
}

double SchauderFn::slope(double x) const {
    if (k == 1) {
        check_unit(x);
        return 0.0;
    }
    return haar_eval(k - 1, x);
}

std::vector<double> SchauderFn::breakpoints() const {
    if (k <= 2) return {0.0, 1.0};
    std::vector<double> b{0.0, support_lo, peak_at, support_hi, 1.0};
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
}

double schauder_eval(int k, double x) { return SchauderFn(k).value(x); }

double schauder_deriv(int k, double x) { return SchauderFn(k).slope(x); }

double stiffness_entry(int p, int q) {
    if (p < 2 || q < 2) throw std::invalid_argument("stiffness_entry: indices must be >= 2");
    // g_p' = h_{p-1}; the Haar system is orthonormal in L2.
    return p == q ? 1.0 : 0.0;
}

double mass_entry(int p, int q) {
    if (p < 3 || q < 3) throw std::invalid_argument("mass_entry: indices must be >= 3");
    const SchauderFn a(p);
    const SchauderFn b(q);
    const double lo = std::max(a.support_lo, b.support_lo);
    const double hi = std::min(a.support_hi, b.support_hi);
    if (!(hi > lo)) return 0.0;

    std::vector<double> cuts{lo, hi};
    for (double c : {a.peak_at, b.peak_at})
        if (c > lo && c < hi) cuts.push_back(c);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // Both factors are linear on each piece, so Simpson's rule is exact.
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double x0 = cuts[i];
        const double x1 = cuts[i + 1];
        const double xm = 0.5 * (x0 + x1);
        total += (x1 - x0) / 6.0 *
                 (a.value(x0) * b.value(x0) + 4.0 * a.value(xm) * b.value(xm) + a.value(x1) * b.value(x1));
    }
    return total;
}

double affine_moment(int k, double c0, double c1) {
    if (k == 1) return c0 + 0.5 * c1;
    if (k == 2) return 0.5 * c0 + c1 / 3.0;
    const SchauderFn g(k);
    const double area = 0.5 * g.peak * (g.support_hi - g.support_lo);
    return area * (c0 + c1 * g.peak_at);
}

double load_entry(const ScalarFn& w, int k, const QuadratureRule& rule) {
    const SchauderFn g(k);
    const double kink[] = {g.peak_at};
    return rule.integrate([&](double x) { return w(x) * g.value(x); }, g.support_lo, g.support_hi, kink);
}

}  // namespace collage
