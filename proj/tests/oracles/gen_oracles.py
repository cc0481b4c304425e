#!/usr/bin/env python3
# Copyright 2026 The bsnoma Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Generates oracle_values.hpp: reference values for the per-cell solver.

For three seeded parameter points this script evaluates, in exact rational
arithmetic,
  * the closed-form PAC quadratic coefficients (a, b, c) and power quartic
    coefficients (tau, chi, psi, Gamma, omega), transcribed independently of
    the C++ code;
  * the stationary points of the per-cell Lagrangian in the near PAC u (on
    (0, 1)) and in the source power P (on (0, 10)), obtained by symbolic
    differentiation and numerical root isolation.

Run:  python3 gen_oracles.py > oracle_values.hpp
"""
import random

import sympy as sp

u, P = sp.symbols("u P", real=True)


def closed_form_quadratic(Ai, Bi, Ci, Aj, Bj, Cj, li, lj, p):
    a = p**2 * (-Ai * Aj * Bj * (1 + li) * (Ci + Bi * p) + Ai * Bj**2 * (1 + li) * (Ci + Bi * p)
                + Ai * Aj * Bi * (1 + lj) * (Cj + Bj * p) - Aj * Bi**2 * (1 + lj) * (Cj + Bj * p))
    # Coefficient b contains the undefined symbol L_{i,k}; it is read as lambda_{i,k}.
    b = p * (Ci + Bi * p) * (-Ai * Cj * (-2 * Bj * (1 + li) + Aj * (2 + li + lj))
                             + Ai * Aj * Bj * (li - lj) * p + 2 * Aj * Bi * (1 + lj) * (Cj + Bj * p))
    c = (Ci + Bi * p) * (Ai * Cj**2 * (1 + li)
                         + Aj * (-Ci * (1 + lj) * (Cj + Bj * p)
                                 + p * (Ai * Cj * (1 + li) - Bi * (1 + li) * (Cj + Bj * p))))
    return [c, b, a]


def closed_form_quartic(Ai, Bi, Ci, Aj, Bj, Cj, li, lj, mu, pi, L):
    m = mu + pi
    tau = Ci * Cj * (-Aj * Ci * (-1 + L)) * (1 + lj) + Cj * (Ai * L * (1 + li) - Ci * m)
    chi = Ci * Cj * (2 * (Bi * Cj * (-1 + L) - Bj * Ci * L) * m
                     + Aj * (-1 + L) * (2 * Bi * (-1 + L) * (1 + lj) - Ai * L * (2 + li + lj) + Ci * m)
                     + Ai * L * (2 * Bj * L * (1 + li) - Cj * m))
    psi = (-(Bi**2 * Cj**2 * (-1 + L)**2 - 4 * Bi * Bj * Ci * Cj * (-1 + L) * L + Bj**2 * Ci**2 * L**2) * m
           + Ai * L * (Bj**2 * Ci * L**2 * (1 + li) + Bi * Cj**2 * (-1 + L) * m - 2 * Bj * Ci * Cj * L * m)
           - Aj * (-1 + L) * (Bi**2 * Cj * (-1 + L)**2 * (1 + lj)
                              - Bi * Cj * (-1 + L) * (Ai * L * (1 + lj) - 2 * Ci * m)
                              - Ci * L * (Bj * Ci * m + Ai * (-Bj * L * (1 + li) + Cj * m))))
    gamma = (Bj * L * (-2 * Bi**2 * Cj * (-1 + L)**2 + 2 * Bi * (Bj * Ci + Ai * Cj) * (-1 + L) * L
                       - Ai * Bj * Ci * L**2)
             + Aj * (-1 + L) * (Bi**2 * Cj * (-1 + L)**2 - Bi * (2 * Bj * Ci + Ai * Cj) * (-1 + L) * L
                                + Ai * Bj * Ci * L**2)) * m
    omega = -Bi * Bj * (-1 + L) * L * (Bi * (-1 + L) - Ai * L) * (Aj - Aj * L + Bj * L) * m
    return [tau, chi, psi, gamma, omega]


def lagrangian(Ai, Bi, Ci, Aj, Bj, Cj, t, li, lj, mu, pi, pmax, p, x):
    sn = p * x * Ai / (p * (1 - x) * Bi + Ci)
    sf = p * (1 - x) * Aj / (p * x * Bj + Cj)
    c1 = p * x * Ai - t * (p * (1 - x) * Bi + Ci)
    c2 = p * (1 - x) * Aj - t * (p * x * Bj + Cj)
    return (sp.log(1 + sn, 2) + sp.log(1 + sf, 2) - pi * p + li * c1 + lj * c2 + mu * (pmax - p))


def stationary_points(expr, var, lo, hi):
    num, _ = sp.fraction(sp.together(sp.diff(expr, var)))
    poly = sp.Poly(sp.expand(num), var)
    roots = [complex(r) for r in poly.nroots(n=30, maxsteps=200)]
    return sorted(r.real for r in roots if abs(r.imag) < 1e-20 and lo < r.real < hi)


def rat(x):
    return sp.Rational(repr(x))


def fmt(v):
    return repr(float(v))


def main():
    rng = random.Random(4242)
    print("// Generated by gen_oracles.py; do not edit by hand.")
    print("#pragma once\n\n#include <vector>\n\nnamespace bsnoma_oracle {\n")
    print("struct Point\n{\n    double a_near, b_near, c_near, a_far, b_far, c_far, threshold, p_max;")
    print("    double lambda_near, lambda_far, mu, pi;\n    double power; ///< fixed power for the PAC solve")
    print("    double pac_near; ///< fixed split for the power solve")
    print("    double quad[3];\n    double quartic[5];")
    print("    std::vector<double> pac_stationary;   ///< on (0, 1)")
    print("    std::vector<double> power_stationary; ///< on (0, 10)\n};\n")
    print("inline const std::vector<Point> points{")
    for _ in range(3):
        g_n = round(rng.uniform(0.05, 0.2), 4)
        g_f = round(rng.uniform(0.005, 0.03), 4)
        Ai = rat(g_n + round(rng.uniform(0.0, 0.3), 4) * 0.01)
        Bi = rat(round(0.1 * g_n, 6))
        Ci = rat(round(rng.uniform(1e-4, 5e-4), 6))
        Aj = rat(g_f + round(rng.uniform(0.0, 0.3), 4) * 0.002)
        Bj = Aj
        Cj = rat(round(rng.uniform(1e-4, 5e-4), 6))
        t = rat(round(rng.uniform(0.0, 1.0), 3))
        li = rat(round(rng.uniform(0.0, 2.0), 3))
        lj = rat(round(rng.uniform(0.0, 2.0), 3))
        mu = rat(round(rng.uniform(0.0, 1.0), 3))
        pi = rat(round(rng.uniform(1.0, 50.0), 2))
        pmax = rat(1.5849)
        p = rat(round(rng.uniform(0.05, 1.5), 3))
        L = rat(round(rng.uniform(0.05, 0.5), 3))
        quad = closed_form_quadratic(Ai, Bi, Ci, Aj, Bj, Cj, li, lj, p)
        quart = closed_form_quartic(Ai, Bi, Ci, Aj, Bj, Cj, li, lj, mu, pi, L)
        pac_st = stationary_points(lagrangian(Ai, Bi, Ci, Aj, Bj, Cj, t, li, lj, mu, pi, pmax, p, u), u, 0, 1)
        pow_st = stationary_points(lagrangian(Ai, Bi, Ci, Aj, Bj, Cj, t, li, lj, mu, pi, pmax, P, L), P, 0, 10)
        fields = [Ai, Bi, Ci, Aj, Bj, Cj, t, pmax, li, lj, mu, pi, p, L]
        print("    {" + ", ".join(fmt(f) for f in fields) + ",")
        print("     {" + ", ".join(fmt(c) for c in quad) + "},")
        print("     {" + ", ".join(fmt(c) for c in quart) + "},")
        print("     {" + ", ".join(fmt(r) for r in pac_st) + "},")
        print("     {" + ", ".join(fmt(r) for r in pow_st) + "}},")
    print("};\n\n} // namespace bsnoma_oracle")


if __name__ == "__main__":
    main()
