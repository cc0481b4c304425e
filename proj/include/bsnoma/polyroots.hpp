/*
 * Copyright 2026 The bsnoma Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * \file bsnoma/polyroots.hpp
 *
 * \brief Real roots of low-degree polynomials.
 *
 * Quadratics use the cancellation-free formula. Higher degrees (up to four)
 * are handled by isolating real roots between consecutive critical points,
 * which are themselves the real roots of the derivative, and refining every
 * sign change by bisection down to adjacent doubles. Critical points where
 * the polynomial vanishes to rounding accuracy are reported as (even)
 * multiple roots.
 */

#ifndef BSNOMA_POLYROOTS_HPP
#define BSNOMA_POLYROOTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

namespace bsnoma {

/// Real polynomial with coefficients in ascending degree order.
struct Polynomial
{
    std::vector<double> coeffs;

    Polynomial() = default;
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}
    Polynomial(std::initializer_list<double> c) : coeffs(c) {}

    /// Degree after dropping exactly-zero leading coefficients; -1 for the zero polynomial.
    int degree() const
    {
        for (std::size_t i = coeffs.size(); i-- > 0;)
            if (coeffs[i] != 0.0)
                return static_cast<int>(i);
        return -1;
    }

    bool is_zero() const { return degree() < 0; }

    double operator()(double x) const
    {
        double acc = 0.0;
        for (std::size_t i = coeffs.size(); i-- > 0;)
            acc = acc * x + coeffs[i];
        return acc;
    }

    /// Running error bound of Horner evaluation at \p x.
    double evaluation_error(double x) const
    {
        double acc = 0.0;
        const double ax = std::abs(x);
        for (std::size_t i = coeffs.size(); i-- > 0;)
            acc = acc * ax + std::abs(coeffs[i]);
        return 8.0 * std::numeric_limits<double>::epsilon() * acc;
    }

    double max_abs_coeff() const
    {
        double m = 0.0;
        for (double c : coeffs)
            m = std::max(m, std::abs(c));
        return m;
    }

    Polynomial derivative() const
    {
        if (coeffs.size() <= 1)
            return Polynomial{0.0};
        std::vector<double> d(coeffs.size() - 1);
        for (std::size_t i = 1; i < coeffs.size(); ++i)
            d[i - 1] = coeffs[i] * static_cast<double>(i);
        return Polynomial(std::move(d));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b)
    {
        if (a.coeffs.empty() || b.coeffs.empty())
            return Polynomial{0.0};
        std::vector<double> out(a.coeffs.size() + b.coeffs.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs.size(); ++j)
                out[i + j] += a.coeffs[i] * b.coeffs[j];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b)
    {
        std::vector<double> out(std::max(a.coeffs.size(), b.coeffs.size()), 0.0);
        for (std::size_t i = 0; i < a.coeffs.size(); ++i)
            out[i] += a.coeffs[i];
        for (std::size_t i = 0; i < b.coeffs.size(); ++i)
            out[i] += b.coeffs[i];
        return Polynomial(std::move(out));
    }

    friend Polynomial operator*(double s, const Polynomial& p)
    {
        Polynomial out = p;
        for (double& c : out.coeffs)
            c *= s;
        return out;
    }
};

/// Expands prod (x - r) for the given roots.
inline Polynomial from_roots(const std::vector<double>& roots)
{
    Polynomial p{1.0};
    for (double r : roots)
        p = p * Polynomial{-r, 1.0};
    return p;
}

namespace detail {

/// Sorts and collapses roots closer than 1e-7 relative to their magnitude (at least 1).
inline std::vector<double> merge_close_roots(std::vector<double> roots)
{
    std::sort(roots.begin(), roots.end());
    std::vector<double> out;
    for (double r : roots)
    {
        if (!out.empty() && std::abs(r - out.back()) <= 1e-7 * std::max({1.0, std::abs(r), std::abs(out.back())}))
            continue;
        out.push_back(r);
    }
    return out;
}

/// Bisection on [lo, hi] where p(lo) and p(hi) have strictly opposite signs.
inline double bisect_root(const Polynomial& p, double lo, double hi)
{
    double flo = p(lo);
    for (int it = 0; it < 2200; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double fm = p(mid);
        if (fm == 0.0)
            return mid;
        if ((fm < 0.0) == (flo < 0.0))
        {
            lo = mid;
            flo = fm;
        }
        else
        {
            hi = mid;
        }
    }
    return std::abs(p(lo)) <= std::abs(p(hi)) ? lo : hi;
}

inline std::vector<double> real_roots_linear(double c0, double c1) { return {-c0 / c1}; }

} // namespace detail

/**
 * Real roots of a*x^2 + b*x + c in ascending order (0 to 2 entries).
 * A vanishing \p a degrades to the linear case; a=b=0 with c != 0 has no
 * roots; the identically zero polynomial throws std::invalid_argument.
 */
inline std::vector<double> real_roots_quadratic(double a, double b, double c)
{
    if (a == 0.0)
    {
        if (b == 0.0)
        {
            if (c == 0.0)
                throw std::invalid_argument("identically zero polynomial has no isolated roots");
            return {};
        }
        return detail::real_roots_linear(c, b);
    }
    if (b == 0.0)
    {
        const double t = -c / a;
        if (t < 0.0)
            return {};
        const double s = std::sqrt(t);
        return detail::merge_close_roots({-s, s});
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0)
        return {};
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> roots{q / a};
    if (q != 0.0)
        roots.push_back(c / q);
    return detail::merge_close_roots(std::move(roots));
}

namespace detail {

inline std::vector<double> real_roots_any(const Polynomial& p)
{
    const int deg = p.degree();
    if (deg < 0)
        throw std::invalid_argument("identically zero polynomial has no isolated roots");
    if (deg == 0)
        return {};
    const auto& c = p.coeffs;
    if (deg == 1)
        return real_roots_linear(c[0], c[1]);
    if (deg == 2)
        return real_roots_quadratic(c[2], c[1], c[0]);

    Polynomial trimmed(std::vector<double>(c.begin(), c.begin() + deg + 1));
    const double lead = trimmed.coeffs.back();
    double bound = 0.0;
    for (int i = 0; i < deg; ++i)
        bound = std::max(bound, std::abs(trimmed.coeffs[static_cast<std::size_t>(i)] / lead));
    bound = 1.0 + bound;

    std::vector<double> breaks{-bound};
    for (double x : real_roots_any(trimmed.derivative()))
        if (x > -bound && x < bound)
            breaks.push_back(x);
    breaks.push_back(bound);

    std::vector<double> roots;
    for (std::size_t i = 0; i < breaks.size(); ++i)
    {
        const double x = breaks[i];
        const double fx = trimmed(x);
        if (i > 0 && i + 1 < breaks.size() && std::abs(fx) <= trimmed.evaluation_error(x))
            roots.push_back(x);
        if (i + 1 < breaks.size())
        {
            const double y = breaks[i + 1];
            const double fy = trimmed(y);
            if (fx == 0.0)
                roots.push_back(x);
            else if (fy != 0.0 && (fx < 0.0) != (fy < 0.0))
                roots.push_back(bisect_root(trimmed, x, y));
        }
    }
    return merge_close_roots(std::move(roots));
}

} // namespace detail

/**
 * All real roots, ascending, of a polynomial of degree at most four given in
 * ascending coefficient order (trailing exact zeros reduce the degree).
 *
 * Every returned root satisfies |p(r)| <= 1e-8 * max(1, max|coeff|).
 */
inline std::vector<double> real_roots_quartic(const Polynomial& p)
{
    for (double c : p.coeffs)
        if (!std::isfinite(c))
            throw std::invalid_argument("polynomial coefficients must be finite");
    if (p.degree() > 4)
        throw std::invalid_argument("real_roots_quartic supports degree <= 4");
    return detail::real_roots_any(p);
}

} // namespace bsnoma

#endif // BSNOMA_POLYROOTS_HPP
