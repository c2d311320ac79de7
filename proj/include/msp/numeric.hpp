#ifndef MSP_NUMERIC_HPP
#define MSP_NUMERIC_HPP

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "msp/errors.hpp"

namespace msp::numeric {

/// Trapezoid rule on an arbitrary (sorted) abscissa.
inline double trapezoid(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw InvalidArgument("trapezoid: abscissa and ordinate sizes differ");
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
        sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
    return sum;
}

inline std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> out(n);
    if (n == 1) {
        out[0] = a;
        return out;
    }
    for (std::size_t i = 0; i < n; ++i)
        out[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    out.back() = b;
    return out;
}

/// Geometric grid from a to b (both > 0), endpoints exact.
inline std::vector<double> logspace(double a, double b, std::size_t n)
{
    std::vector<double> out = linspace(std::log(a), std::log(b), n);
    for (auto& v : out)
        v = std::exp(v);
    if (n > 1) {
        out.front() = a;
        out.back() = b;
    }
    return out;
}

/// Bisection for a sign change of f on [lo, hi]. Stops when the bracket is
/// narrower than xtol or after max_iter halvings.
template <typename F>
double bisect(F&& f, double lo, double hi, double xtol, int max_iter = 400)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw InvalidArgument("bisect: root not bracketed");
    for (int it = 0; it < max_iter && (hi - lo) > xtol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// Returns (argmax, max).
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double xtol)
{
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while ((b - a) > xtol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        if (c >= d)
            break;
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

/// Locate the maximum of f sampled on grid, then polish it with a
/// golden-section search on the neighbouring cells.
template <typename F>
std::pair<double, double> refined_max(F&& f, std::span<const double> grid, double xtol)
{
    std::size_t best = 0;
    double best_val = -INFINITY;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v > best_val) {
            best_val = v;
            best = i;
        }
    }
    const double lo = grid[best == 0 ? 0 : best - 1];
    const double hi = grid[best + 1 == grid.size() ? best : best + 1];
    if (hi <= lo)
        return {grid[best], best_val};
    auto polished = golden_max(f, lo, hi, xtol);
    if (polished.second < best_val)
        return {grid[best], best_val};
    return polished;
}

} // namespace msp::numeric

#endif
