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
 * \file bsnoma/solver.hpp
 *
 * \brief Energy-efficiency maximization by Dinkelbach iterations around a
 *  reflection-coefficient step and a Lagrangian-dual power/PAC step.
 *
 * Outer loop (Dinkelbach): with the current efficiency estimate Pi fixed,
 * improve sum_k R_k - Pi * (sum_k P_k + p_c), then update Pi to the ratio
 * achieved by the new allocation. Each outer iteration
 *  1. picks every tag's reflection coefficient in closed form (skipped for
 *     the no-backscatter baseline, where it stays zero);
 *  2. runs the dual loop: Jacobi sweeps in which every cell maximizes its
 *     own Lagrangian, first over the PAC split and then over the source
 *     power, with the co-channel interference frozen during a sweep; the
 *     multipliers of the rate floors, the PAC budget and the power budget
 *     then take one projected subgradient step.
 *
 * Stationary points of the per-cell Lagrangian are polynomial roots. Each
 * per-cell solve collects the roots of the closed-form coefficient formulas
 * together with the roots of an exact re-derivation, the box endpoints,
 * the rate-floor boundary points and the current iterate, and keeps the
 * best candidate, preferring candidates that meet the rate floors.
 */

#ifndef BSNOMA_SOLVER_HPP
#define BSNOMA_SOLVER_HPP

#include "bsnoma/model.hpp"
#include "bsnoma/polyroots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsnoma {

/// WBS: tags reflect (Phi optimized). NBS: pure NOMA baseline with Phi = 0.
enum class Mode
{
    wbs,
    nbs
};

inline const char* to_string(Mode m) { return m == Mode::wbs ? "WBS" : "NBS"; }

inline Mode mode_from_string(const std::string& s)
{
    if (s == "WBS" || s == "wbs")
        return Mode::wbs;
    if (s == "NBS" || s == "nbs")
        return Mode::nbs;
    throw std::invalid_argument("unknown mode '" + s + "' (expected WBS or NBS)");
}

/// Smallest near-device PAC considered; the near rate vanishes at zero.
inline constexpr double pac_floor = 1e-4;
/// Largest near-device PAC: C3 with pac_far = 1 - pac_near.
inline constexpr double pac_ceiling = 0.5;
/// Relative rate-floor shortfall tolerated when ranking candidates.
inline constexpr double candidate_feasibility_tol = 1e-9;

struct CellDuals
{
    double lambda_near = 0.0; ///< C1
    double lambda_far = 0.0;  ///< C2
    double mu = 0.0;          ///< C4
    double epsilon = 0.0;     ///< C5
};

struct DualState
{
    std::vector<CellDuals> cells;
    std::size_t step_index = 0; ///< t, number of updates applied so far
    double step_size = 0.0;     ///< delta(t) of the last update

    static DualState zeros(std::size_t num_cells)
    {
        DualState d;
        d.cells.resize(num_cells);
        return d;
    }
};

/**
 * One Dinkelbach parameter per cell: the objective is a sum of per-cell
 * ratios R_k / (P_k(pac sum) + p_c), which separates across cells once the
 * interference is frozen.
 */
struct DinkelbachState
{
    std::vector<double> cell_pi; ///< Pi_k per cell; empty means all zero
    double pi = 0.0;             ///< EE estimate, the sum of cell_pi
    double f_value = 0.0;        ///< sum of F_k(Pi_k) at the newest allocation with the previous Pi_k
    std::size_t iteration = 0;
    bool converged = false;

    double cell(std::size_t k) const { return cell_pi.empty() ? 0.0 : cell_pi.at(k); }
};

struct SolveConfig
{
    double tol_dinkelbach = 1e-6;
    double tol_dual = 1e-5;
    std::size_t max_outer = 50;
    std::size_t max_dual_iters = 500;
    double step0 = 0.1;
    std::size_t interference_rounds = 5;

    void validate() const
    {
        if (!(tol_dinkelbach > 0.0) || !(tol_dual > 0.0))
            throw std::invalid_argument("solver tolerances must be positive");
        if (max_outer < 1 || max_dual_iters < 1 || interference_rounds < 1)
            throw std::invalid_argument("solver iteration limits must be positive");
        if (!(step0 >= 0.0))
            throw std::invalid_argument("step0 must be nonnegative");
    }
};

/// Work counters. Each Jacobi round runs a fixed number of block paths per cell,
/// so the PAC and power solve counts grow linearly in the number of cells.
struct SolveCounters
{
    std::size_t outer_iterations = 0;
    std::size_t dual_iterations = 0;
    std::size_t jacobi_rounds = 0;
    std::size_t pac_solves = 0;
    std::size_t power_solves = 0;
    std::size_t reflection_solves = 0;
    std::size_t stalled_pac = 0;
    std::size_t stalled_power = 0;
    std::size_t rejected_steps = 0;
};

struct SolveReport
{
    Mode mode = Mode::wbs;
    AllocationState allocation;
    Metrics metrics;
    FeasibilityReport feasibility;
    /// EE estimate before the first outer iteration (zero) followed by the estimate after each outer iteration.
    std::vector<double> trajectory;
    DinkelbachState dinkelbach;
    DualState duals;
    SolveCounters counters;
    bool converged = false;

    std::size_t outer_iterations() const { return counters.outer_iterations; }
};

// ---------------------------------------------------------------------------
// Per-cell subproblem
// ---------------------------------------------------------------------------

/**
 * One cell with its reflection coefficient and co-channel interference
 * frozen. With u = pac_near and 1 - u = pac_far,
 *
 *   SINR_near = P u A_n / (P (1-u) B_n + C_n),
 *   SINR_far  = P (1-u) A_f / (P u B_f + C_f),
 *
 * where A_n = g_n + Phi G_n, B_n = beta g_n, C_n = Delta_n + sigma^2,
 * A_f = B_f = g_f + Phi G_f and C_f = Delta_f + sigma^2.
 */
struct CellProblem
{
    double a_near = 0.0;
    double b_near = 0.0;
    double c_near = 0.0;
    double a_far = 0.0;
    double b_far = 0.0;
    double c_far = 0.0;
    double threshold = 0.0; ///< 2^{R_min} - 1
    double p_max = 0.0;

    static CellProblem from(const AllocationState& alloc, const ChannelRealization& chan, const SystemParams& params,
                            std::size_t cell)
    {
        detail::check_cell(cell, chan.num_cells());
        const auto& g = chan.cells[cell];
        const double phi = alloc.cells[cell].reflection;
        CellProblem cp;
        cp.a_near = g.near + phi * g.cascade_near();
        cp.b_near = g.near * params.sic_error;
        cp.c_near = intercell_interference(alloc, chan, cell, Role::near) + params.noise_variance;
        cp.a_far = g.far + phi * g.cascade_far();
        cp.b_far = cp.a_far;
        cp.c_far = intercell_interference(alloc, chan, cell, Role::far) + params.noise_variance;
        cp.threshold = params.sinr_threshold();
        cp.p_max = params.p_max;
        return cp;
    }

    double sinr_near(double p, double u) const { return p * u * a_near / (p * (1.0 - u) * b_near + c_near); }
    double sinr_far(double p, double u) const { return p * (1.0 - u) * a_far / (p * u * b_far + c_far); }

    double rate(double p, double u) const
    {
        return std::log2(1.0 + sinr_near(p, u)) + std::log2(1.0 + sinr_far(p, u));
    }

    double c1_slack(double p, double u) const { return p * u * a_near - threshold * (p * (1.0 - u) * b_near + c_near); }
    double c2_slack(double p, double u) const { return p * (1.0 - u) * a_far - threshold * (p * u * b_far + c_far); }

    /// Largest relative shortfall of the two rate floors.
    double violation(double p, double u) const
    {
        return std::max(relative_shortfall(p * u * a_near, threshold * (p * (1.0 - u) * b_near + c_near)),
                        relative_shortfall(p * (1.0 - u) * a_far, threshold * (p * u * b_far + c_far)));
    }

    /// Per-cell Lagrangian (constants independent of P and u dropped).
    double lagrangian(double p, double u, const CellDuals& d, double pi) const
    {
        return rate(p, u) - pi * p + d.lambda_near * c1_slack(p, u) + d.lambda_far * c2_slack(p, u) +
               d.mu * (p_max - p);
    }
};

/// sign * ln(slope * x + offset)
struct LogTerm
{
    double sign;
    double slope;
    double offset;
};

/**
 * Numerator of d/dx [ sum_m sign_m log2(slope_m x + offset_m) + linear * x ]
 * after clearing all denominators:
 *   sum_m sign_m slope_m prod_{n != m}(slope_n x + offset_n)
 *     + linear ln2 prod_n (slope_n x + offset_n).
 */
inline Polynomial stationarity_polynomial(const std::array<LogTerm, 4>& terms, double linear)
{
    Polynomial total{0.0};
    for (std::size_t m = 0; m < terms.size(); ++m)
    {
        Polynomial prod{terms[m].sign * terms[m].slope};
        for (std::size_t n = 0; n < terms.size(); ++n)
            if (n != m)
                prod = prod * Polynomial{terms[n].offset, terms[n].slope};
        total = total + prod;
    }
    Polynomial all{linear * std::numbers::ln2};
    for (const auto& t : terms)
        all = all * Polynomial{t.offset, t.slope};
    return total + all;
}

/// Exact stationarity condition of the per-cell Lagrangian in u = pac_near at fixed power.
inline Polynomial pac_stationarity_polynomial(const CellProblem& cp, double p, const CellDuals& d)
{
    const std::array<LogTerm, 4> terms{{
        {1.0, p * (cp.a_near - cp.b_near), p * cp.b_near + cp.c_near},
        {-1.0, -p * cp.b_near, p * cp.b_near + cp.c_near},
        {1.0, p * (cp.b_far - cp.a_far), p * cp.a_far + cp.c_far},
        {-1.0, p * cp.b_far, cp.c_far},
    }};
    const double linear = d.lambda_near * p * (cp.a_near + cp.threshold * cp.b_near) -
                          d.lambda_far * p * (cp.a_far + cp.threshold * cp.b_far);
    return stationarity_polynomial(terms, linear);
}

/// Exact stationarity condition of the per-cell Lagrangian in P at fixed PAC split.
inline Polynomial power_stationarity_polynomial(const CellProblem& cp, double u, const CellDuals& d, double pi)
{
    const double v = 1.0 - u;
    const std::array<LogTerm, 4> terms{{
        {1.0, u * cp.a_near + v * cp.b_near, cp.c_near},
        {-1.0, v * cp.b_near, cp.c_near},
        {1.0, v * cp.a_far + u * cp.b_far, cp.c_far},
        {-1.0, u * cp.b_far, cp.c_far},
    }};
    const double linear = -pi - d.mu + d.lambda_near * (u * cp.a_near - cp.threshold * v * cp.b_near) +
                          d.lambda_far * (v * cp.a_far - cp.threshold * u * cp.b_far);
    return stationarity_polynomial(terms, linear);
}

/**
 * Quadratic a u^2 + b u + c for the near PAC in closed form (ascending
 * order). The undefined symbol L_{i,k} inside b is read as lambda_{i,k}.
 */
inline Polynomial closed_form_pac_quadratic(const CellProblem& cp, double p, const CellDuals& d)
{
    const double ai = cp.a_near, bi = cp.b_near, ci = cp.c_near;
    const double aj = cp.a_far, bj = cp.b_far, cj = cp.c_far;
    const double li = d.lambda_near, lj = d.lambda_far;
    const double a = p * p *
                     (-ai * aj * bj * (1 + li) * (ci + bi * p) + ai * bj * bj * (1 + li) * (ci + bi * p) +
                      ai * aj * bi * (1 + lj) * (cj + bj * p) - aj * bi * bi * (1 + lj) * (cj + bj * p));
    const double b = p * (ci + bi * p) *
                     (-ai * cj * (-2 * bj * (1 + li) + aj * (2 + li + lj)) + ai * aj * bj * (li - lj) * p +
                      2 * aj * bi * (1 + lj) * (cj + bj * p));
    const double c = (ci + bi * p) * (ai * cj * cj * (1 + li) +
                                      aj * (-ci * (1 + lj) * (cj + bj * p) +
                                            p * (ai * cj * (1 + li) - bi * (1 + li) * (cj + bj * p))));
    return Polynomial{c, b, a};
}

/// Quartic tau + chi P + psi P^2 + Gamma P^3 + omega P^4 in the source power in closed form.
inline Polynomial closed_form_power_quartic(const CellProblem& cp, double u, const CellDuals& d, double pi)
{
    const double ai = cp.a_near, bi = cp.b_near, ci = cp.c_near;
    const double aj = cp.a_far, bj = cp.b_far, cj = cp.c_far;
    const double li = d.lambda_near, lj = d.lambda_far;
    const double m = d.mu + pi;
    const double L = u;
    const double tau = ci * cj * (-aj * ci * (-1 + L)) * (1 + lj) + cj * (ai * L * (1 + li) - ci * m);
    const double chi =
        ci * cj *
        (2 * (bi * cj * (-1 + L) - bj * ci * L) * m +
         aj * (-1 + L) * (2 * bi * (-1 + L) * (1 + lj) - ai * L * (2 + li + lj) + ci * m) +
         ai * L * (2 * bj * L * (1 + li) - cj * m));
    const double psi =
        -(bi * bi * cj * cj * (-1 + L) * (-1 + L) - 4 * bi * bj * ci * cj * (-1 + L) * L + bj * bj * ci * ci * L * L) * m +
        ai * L * (bj * bj * ci * L * L * (1 + li) + bi * cj * cj * (-1 + L) * m - 2 * bj * ci * cj * L * m) -
        aj * (-1 + L) *
            (bi * bi * cj * (-1 + L) * (-1 + L) * (1 + lj) - bi * cj * (-1 + L) * (ai * L * (1 + lj) - 2 * ci * m) -
             ci * L * (bj * ci * m + ai * (-bj * L * (1 + li) + cj * m)));
    const double gamma =
        (bj * L * (-2 * bi * bi * cj * (-1 + L) * (-1 + L) + 2 * bi * (bj * ci + ai * cj) * (-1 + L) * L -
                   ai * bj * ci * L * L) +
         aj * (-1 + L) *
             (bi * bi * cj * (-1 + L) * (-1 + L) - bi * (2 * bj * ci + ai * cj) * (-1 + L) * L + ai * bj * ci * L * L)) *
        m;
    const double omega = -bi * bj * (-1 + L) * L * (bi * (-1 + L) - ai * L) * (aj - aj * L + bj * L) * m;
    return Polynomial{tau, chi, psi, gamma, omega};
}

namespace detail {

inline void add_roots_in(std::vector<double>& out, const Polynomial& p, double lo, double hi)
{
    bool finite = true;
    for (double c : p.coeffs)
        finite = finite && std::isfinite(c);
    if (!finite || p.is_zero())
        return;
    for (double r : real_roots_quartic(p))
        if (r >= lo && r <= hi)
            out.push_back(r);
}

struct Choice
{
    double value = 0.0;
    double objective = 0.0;
    double violation = 0.0;
};

/// Feasible candidates first, then the largest objective; with \p prefer_larger ties go to larger values.
template <class Eval>
Choice pick_best(const std::vector<double>& candidates, Eval&& eval, bool prefer_larger)
{
    std::optional<Choice> best;
    for (double x : candidates)
    {
        auto [obj, viol] = eval(x);
        if (!std::isfinite(obj))
            continue;
        const Choice c{x, obj, viol};
        if (!best)
        {
            best = c;
            continue;
        }
        const bool c_ok = viol <= candidate_feasibility_tol;
        const bool b_ok = best->violation <= candidate_feasibility_tol;
        if (c_ok != b_ok)
        {
            if (c_ok)
                best = c;
            continue;
        }
        if (!c_ok && viol != best->violation)
        {
            if (viol < best->violation)
                best = c;
            continue;
        }
        const double tol = 1e-14 * std::max(1.0, std::abs(best->objective));
        if (obj > best->objective + tol || (prefer_larger && std::abs(obj - best->objective) <= tol && x > best->value))
            best = c;
    }
    if (!best)
        throw std::runtime_error("no finite candidate in per-cell solve");
    return *best;
}

} // namespace detail

/// Roots of \p quartic inside [0, p_max], plus the endpoint p_max, ascending.
inline std::vector<double> power_candidates(const Polynomial& quartic, double p_max)
{
    std::vector<double> out;
    detail::add_roots_in(out, quartic, 0.0, p_max);
    out.push_back(p_max);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct PacSolution
{
    double pac_near = 0.0;
    double pac_far = 0.0;
    double lagrangian = 0.0;
    bool stalled = false; ///< no candidate improved on the previous split
};

struct PowerSolution
{
    double power = 0.0;
    double lagrangian = 0.0;
    bool stalled = false;
};

/**
 * Best PAC split of one cell at fixed power, reflection coefficient and
 * interference. Candidates: roots of the closed-form quadratic and of the
 * exact stationarity polynomial inside [pac_floor, 0.5], both interval
 * endpoints, the rate-floor boundary points and \p current_pac_near.
 */
inline PacSolution solve_pac(const CellProblem& cp, double power, const CellDuals& d, double pi,
                             double current_pac_near)
{
    std::vector<double> cand{pac_floor, pac_ceiling};
    detail::add_roots_in(cand, closed_form_pac_quadratic(cp, power, d), pac_floor, pac_ceiling);
    detail::add_roots_in(cand, pac_stationarity_polynomial(cp, power, d), pac_floor, pac_ceiling);
    if (power > 0.0 && cp.threshold > 0.0)
    {
        const double lo = cp.threshold * (power * cp.b_near + cp.c_near) / (power * (cp.a_near + cp.threshold * cp.b_near));
        const double hi = (power * cp.a_far - cp.threshold * cp.c_far) / (power * (cp.a_far + cp.threshold * cp.b_far));
        for (double x : {lo, hi})
            if (std::isfinite(x))
                cand.push_back(std::clamp(x, pac_floor, pac_ceiling));
    }
    const double current = std::clamp(current_pac_near, pac_floor, pac_ceiling);
    const std::size_t n_fresh = cand.size();
    cand.push_back(current);

    auto eval = [&](double u) { return std::pair{cp.lagrangian(power, u, d, pi), cp.violation(power, u)}; };
    const auto best = detail::pick_best(cand, eval, false);
    PacSolution out;
    out.pac_near = best.value;
    out.pac_far = 1.0 - best.value;
    out.lagrangian = best.objective;
    out.stalled = n_fresh == 2 && best.value == current;
    return out;
}

/**
 * Best source power of one cell at a fixed PAC split. Candidates: roots of
 * the closed-form quartic and of the exact stationarity polynomial inside
 * [0, P_max], both endpoints, the smallest power meeting both rate floors
 * and \p current_power. Ties resolve to the larger power.
 */
inline PowerSolution solve_power(const CellProblem& cp, double pac_near, const CellDuals& d, double pi,
                                 double current_power)
{
    std::vector<double> cand = power_candidates(closed_form_power_quartic(cp, pac_near, d, pi), cp.p_max);
    detail::add_roots_in(cand, power_stationarity_polynomial(cp, pac_near, d, pi), 0.0, cp.p_max);
    cand.push_back(0.0);
    if (cp.threshold > 0.0)
    {
        const double u = pac_near, v = 1.0 - pac_near;
        const double k1 = u * cp.a_near - cp.threshold * v * cp.b_near;
        const double k2 = v * cp.a_far - cp.threshold * u * cp.b_far;
        if (k1 > 0.0 && k2 > 0.0)
        {
            const double lb = std::max(cp.threshold * cp.c_near / k1, cp.threshold * cp.c_far / k2);
            if (lb <= cp.p_max)
                cand.push_back(lb);
        }
    }
    const double current = std::clamp(current_power, 0.0, cp.p_max);
    cand.push_back(current);

    auto eval = [&](double p) { return std::pair{cp.lagrangian(p, pac_near, d, pi), cp.violation(p, pac_near)}; };
    const auto best = detail::pick_best(cand, eval, true);
    PowerSolution out;
    out.power = best.value;
    out.lagrangian = best.objective;
    out.stalled = best.value == current && best.objective <= cp.lagrangian(current, pac_near, d, pi);
    return out;
}

/**
 * Near PAC at which the smallest power meeting both rate floors is lowest:
 * the floor of the near device needs P >= t C_n / k_n(u) with k_n increasing
 * in u, the far device P >= t C_f / k_f(u) with k_f decreasing, so the
 * maximum of the two is minimal where they coincide.
 */
inline double min_power_split(const CellProblem& cp)
{
    const double t = cp.threshold;
    const double num = cp.c_near * cp.a_far + cp.c_far * t * cp.b_near;
    const double den = cp.c_near * (cp.a_far + t * cp.b_far) + cp.c_far * (cp.a_near + t * cp.b_near);
    if (!(den > 0.0))
        return pac_ceiling;
    return std::clamp(num / den, pac_floor, pac_ceiling);
}

struct CellBlockSolution
{
    double power = 0.0;
    double pac_near = 0.0;
    double lagrangian = 0.0;
    std::size_t pac_solves = 0;
    std::size_t power_solves = 0;
    bool stalled_pac = false;
    bool stalled_power = false;
};

/**
 * Joint PAC/power update of one cell. The primary path solves the PAC at
 * the current power and then the power at that split. Because the cell
 * Lagrangian is not jointly concave in (P, u), further paths start from
 * the extreme splits pac_floor and pac_ceiling and, under a positive rate
 * floor, from min_power_split (power, then PAC, then power again). The best
 * pair wins, feasible pairs first; ties keep the primary path.
 */
inline CellBlockSolution solve_cell_block(const CellProblem& cp, const CellDuals& d, double pi, double current_power,
                                          double current_pac_near)
{
    CellBlockSolution best;
    const auto pac = solve_pac(cp, current_power, d, pi, current_pac_near);
    const auto pw = solve_power(cp, pac.pac_near, d, pi, current_power);
    best.power = pw.power;
    best.pac_near = pac.pac_near;
    best.lagrangian = cp.lagrangian(pw.power, pac.pac_near, d, pi);
    best.stalled_pac = pac.stalled;
    best.stalled_power = pw.stalled;
    best.pac_solves = 1;
    best.power_solves = 1;
    double best_violation = cp.violation(best.power, best.pac_near);

    std::size_t pac_solves = 1, power_solves = 1;
    std::vector<double> starts{pac_floor, pac_ceiling};
    if (cp.threshold > 0.0)
        starts.push_back(min_power_split(cp));
    for (double u0 : starts)
    {
        const double p1 = solve_power(cp, u0, d, pi, current_power).power;
        const double u1 = solve_pac(cp, p1, d, pi, u0).pac_near;
        const double p2 = solve_power(cp, u1, d, pi, p1).power;
        pac_solves += 1;
        power_solves += 2;
        const double obj = cp.lagrangian(p2, u1, d, pi);
        const double viol = cp.violation(p2, u1);
        if (!std::isfinite(obj))
            continue;
        const bool c_ok = viol <= candidate_feasibility_tol;
        const bool b_ok = best_violation <= candidate_feasibility_tol;
        const double tol = 1e-12 * std::max(1.0, std::abs(best.lagrangian));
        const bool better = c_ok != b_ok ? c_ok : (!c_ok ? viol < best_violation : obj > best.lagrangian + tol);
        if (better)
        {
            best.power = p2;
            best.pac_near = u1;
            best.lagrangian = obj;
            best.stalled_pac = false;
            best.stalled_power = false;
            best_violation = viol;
        }
    }
    best.pac_solves = pac_solves;
    best.power_solves = power_solves;
    return best;
}

/// Allocation-level wrapper of solve_pac for one cell.
inline PacSolution solve_pac_closed_form(const AllocationState& alloc, const ChannelRealization& chan,
                                         const SystemParams& params, const DualState& duals, double pi,
                                         std::size_t cell)
{
    const auto cp = CellProblem::from(alloc, chan, params, cell);
    return solve_pac(cp, alloc.cells[cell].power, duals.cells.at(cell), pi, alloc.cells[cell].pac_near);
}

/// Allocation-level wrapper of solve_power for one cell.
inline PowerSolution solve_source_power(const AllocationState& alloc, const ChannelRealization& chan,
                                        const SystemParams& params, const DualState& duals, double pi,
                                        std::size_t cell)
{
    const auto cp = CellProblem::from(alloc, chan, params, cell);
    return solve_power(cp, alloc.cells[cell].pac_near, duals.cells.at(cell), pi, alloc.cells[cell].power);
}

// ---------------------------------------------------------------------------
// Reflection coefficients
// ---------------------------------------------------------------------------

/**
 * Terms of the reflection subproblem of one cell at fixed power and PACs:
 * near SINR (X_n + Phi Y_n) / Z_n, far SINR (X_f + Phi Y_f) / (Z_f + Phi W_f).
 */
struct ReflectionTerms
{
    double x_near, y_near, z_near;
    double x_far, y_far, z_far, w_far;
    double threshold;

    static ReflectionTerms from(const AllocationState& alloc, const ChannelRealization& chan,
                                const SystemParams& params, std::size_t cell)
    {
        const auto& a = alloc.cells[cell];
        const auto& g = chan.cells[cell];
        const double pn = a.power * a.pac_near;
        const double pf = a.power * a.pac_far;
        ReflectionTerms t;
        t.x_near = pn * g.near;
        t.y_near = pn * g.cascade_near();
        t.z_near = pf * g.near * params.sic_error + intercell_interference(alloc, chan, cell, Role::near) +
                   params.noise_variance;
        t.x_far = pf * g.far;
        t.y_far = pf * g.cascade_far();
        t.z_far = pn * g.far + intercell_interference(alloc, chan, cell, Role::far) + params.noise_variance;
        t.w_far = pn * g.cascade_far();
        t.threshold = params.sinr_threshold();
        return t;
    }

    double rate(double phi) const
    {
        return std::log2(1.0 + (x_near + phi * y_near) / z_near) +
               std::log2(1.0 + (x_far + phi * y_far) / (z_far + phi * w_far));
    }

    double violation(double phi) const
    {
        return std::max(relative_shortfall(x_near + phi * y_near, threshold * z_near),
                        relative_shortfall(x_far + phi * y_far, threshold * (z_far + phi * w_far)));
    }

    /// {0, 1, C1-active root, C2-active root}, the latter two only when they lie in [0,1].
    std::vector<double> candidates() const
    {
        std::vector<double> c{0.0, 1.0};
        if (y_near > 0.0)
        {
            const double phi = (threshold * z_near - x_near) / y_near;
            if (phi >= 0.0 && phi <= 1.0)
                c.push_back(phi);
            const double den = y_far - threshold * w_far;
            if (den != 0.0)
            {
                const double phi2 = (threshold * z_far - x_far) / den;
                if (phi2 >= 0.0 && phi2 <= 1.0)
                    c.push_back(phi2);
            }
        }
        return c;
    }
};

/**
 * Reflection coefficient of every cell at fixed powers and PACs: the
 * feasible candidate with the largest cell rate; ties keep the smaller
 * coefficient. \p pi does not influence the choice since Phi consumes no
 * power; it is accepted to mirror the other per-block solvers.
 */
inline std::vector<double> solve_reflection(const AllocationState& alloc, const ChannelRealization& chan,
                                            const SystemParams& params, double pi = 0.0)
{
    (void)pi;
    std::vector<double> out(chan.num_cells(), 0.0);
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        const auto t = ReflectionTerms::from(alloc, chan, params, k);
        if (t.y_near == 0.0 && t.y_far == 0.0 && t.w_far == 0.0)
        {
            out[k] = 0.0;
            continue;
        }
        auto eval = [&](double phi) { return std::pair{t.rate(phi), t.violation(phi)}; };
        out[k] = detail::pick_best(t.candidates(), eval, false).value;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dual and Dinkelbach updates
// ---------------------------------------------------------------------------

/**
 * One projected subgradient step on every multiplier, with step
 * delta(t) = step0 / sqrt(t). Each multiplier moves against its constraint
 * slack (lhs - rhs >= 0 when satisfied), so satisfied constraints never
 * raise a multiplier and violated ones do.
 */
inline DualState update_duals(const DualState& duals, const AllocationState& alloc, const ChannelRealization& chan,
                              const SystemParams& params, double step0)
{
    DualState out = duals;
    out.step_index = duals.step_index + 1;
    out.step_size = step0 / std::sqrt(static_cast<double>(out.step_index));
    const double delta = out.step_size;
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        const auto cp = CellProblem::from(alloc, chan, params, k);
        const auto& a = alloc.cells[k];
        auto& d = out.cells.at(k);
        d.lambda_near = std::max(0.0, d.lambda_near - delta * cp.c1_slack(a.power, a.pac_near));
        d.lambda_far = std::max(0.0, d.lambda_far - delta * cp.c2_slack(a.power, a.pac_near));
        d.epsilon = std::max(0.0, d.epsilon - delta * (1.0 - (a.pac_near + a.pac_far)));
        d.mu = std::max(0.0, d.mu - delta * (params.p_max - a.power));
    }
    return out;
}

inline double max_multiplier_change(const DualState& a, const DualState& b)
{
    double m = 0.0;
    for (std::size_t k = 0; k < a.cells.size(); ++k)
    {
        m = std::max(m, std::abs(a.cells[k].lambda_near - b.cells[k].lambda_near));
        m = std::max(m, std::abs(a.cells[k].lambda_far - b.cells[k].lambda_far));
        m = std::max(m, std::abs(a.cells[k].mu - b.cells[k].mu));
        m = std::max(m, std::abs(a.cells[k].epsilon - b.cells[k].epsilon));
    }
    return m;
}

/// Per-cell parametric residual F_k(Pi_k) = R_k - Pi_k (P_k(pac sum) + p_c).
inline double dinkelbach_residual(const CellRates& r, const SystemParams& params, double pi_k)
{
    return r.sum - pi_k * (r.power + params.circuit_power);
}

/// Parametric objective sum_k F_k(Pi_k).
inline double dinkelbach_objective(const Metrics& m, const SystemParams& params, const DinkelbachState& state)
{
    double f = 0.0;
    for (std::size_t k = 0; k < m.cells.size(); ++k)
        f += dinkelbach_residual(m.cells[k], params, state.cell(k));
    return f;
}

/**
 * Evaluates every F_k at the previous estimates and moves each Pi_k to the
 * achieved cell ratio. Converged when sum_k |F_k| and every change of Pi_k
 * are within \p tol.
 */
inline DinkelbachState dinkelbach_update(const DinkelbachState& prev, const Metrics& m, const SystemParams& params,
                                         double tol)
{
    DinkelbachState s;
    s.iteration = prev.iteration + 1;
    s.cell_pi.resize(m.cells.size());
    double abs_f = 0.0;
    double max_step = 0.0;
    for (std::size_t k = 0; k < m.cells.size(); ++k)
    {
        const double f = dinkelbach_residual(m.cells[k], params, prev.cell(k));
        s.f_value += f;
        abs_f += std::abs(f);
        s.cell_pi[k] = m.cells[k].ee;
        s.pi += s.cell_pi[k];
        max_step = std::max(max_step, std::abs(s.cell_pi[k] - prev.cell(k)));
    }
    s.converged = abs_f <= tol && max_step <= tol;
    return s;
}

// ---------------------------------------------------------------------------
// Full algorithm
// ---------------------------------------------------------------------------

/// Interior starting point: P = P_max/2, PACs 0.3/0.7, Phi = 0.5 (0 for NBS).
inline AllocationState initial_allocation(std::size_t num_cells, const SystemParams& params, Mode mode)
{
    AllocationState a;
    a.cells.assign(num_cells, CellAllocation{params.p_max / 2.0, 0.3, 0.7, mode == Mode::wbs ? 0.5 : 0.0});
    return a;
}

namespace detail {

/// Clamps onto C3-C6 with pac_far = 1 - pac_near.
inline void project_structural(AllocationState& a, const SystemParams& params, Mode mode)
{
    for (auto& c : a.cells)
    {
        c.power = std::clamp(c.power, 0.0, params.p_max);
        c.pac_near = std::clamp(c.pac_near, 0.0, pac_ceiling);
        c.pac_far = 1.0 - c.pac_near;
        c.reflection = mode == Mode::wbs ? std::clamp(c.reflection, 0.0, 1.0) : 0.0;
    }
}

inline double total_violation(const AllocationState& a, const ChannelRealization& chan, const SystemParams& params)
{
    if (params.sinr_threshold() == 0.0)
        return 0.0;
    return check_feasibility(a, chan, params).worst_rate_violation();
}

inline AllocationState blend(const AllocationState& from, const AllocationState& to, double t)
{
    AllocationState out = from;
    for (std::size_t k = 0; k < out.cells.size(); ++k)
    {
        auto& o = out.cells[k];
        const auto& b = to.cells[k];
        o.power += t * (b.power - o.power);
        o.pac_near += t * (b.pac_near - o.pac_near);
        o.pac_far = 1.0 - o.pac_near;
        o.reflection += t * (b.reflection - o.reflection);
    }
    return out;
}

} // namespace detail

/**
 * Runs the complete optimization for one channel realization.
 *
 * Each outer iteration's proposal is accepted only if it does not lower the
 * EE (or strictly reduces the rate-floor violation); otherwise it is halved
 * towards the current allocation up to ten times and dropped if still not
 * acceptable. This keeps the Pi trajectory nondecreasing, except for steps
 * that restore feasibility, even though the per-cell solves ignore the
 * interference they cause to other cells.
 */
inline SolveReport optimize(const ChannelRealization& chan, const SystemParams& params, const SolveConfig& config,
                            Mode mode, std::optional<AllocationState> start = std::nullopt)
{
    params.validate();
    config.validate();
    const std::size_t k_cells = chan.num_cells();
    if (k_cells != params.num_cells)
        throw std::invalid_argument("channel realization and parameters disagree on the number of cells");

    SolveReport rep;
    rep.mode = mode;
    AllocationState alloc = start ? *start : initial_allocation(k_cells, params, mode);
    if (alloc.num_cells() != k_cells)
        throw std::invalid_argument("starting allocation has the wrong number of cells");
    detail::project_structural(alloc, params, mode);
    DualState duals = DualState::zeros(k_cells);
    DinkelbachState dk;
    rep.trajectory.push_back(dk.pi);
    auto& ctr = rep.counters;

    Metrics current_metrics = metrics(alloc, chan, params);
    double current_violation = detail::total_violation(alloc, chan, params);

    for (std::size_t outer = 1; outer <= config.max_outer; ++outer)
    {
        ++ctr.outer_iterations;
        AllocationState cand = alloc;

        if (mode == Mode::wbs)
        {
            const auto phi = solve_reflection(cand, chan, params);
            for (std::size_t k = 0; k < k_cells; ++k)
                cand.cells[k].reflection = phi[k];
            ++ctr.reflection_solves;
        }

        for (std::size_t t = 0; t < config.max_dual_iters; ++t)
        {
            ++ctr.dual_iterations;
            for (std::size_t round = 0; round < config.interference_rounds; ++round)
            {
                ++ctr.jacobi_rounds;
                AllocationState next = cand;
                double change = 0.0;
                for (std::size_t k = 0; k < k_cells; ++k)
                {
                    const auto cp = CellProblem::from(cand, chan, params, k);
                    const auto& cur = cand.cells[k];
                    const auto& d = duals.cells[k];
                    const auto blk = solve_cell_block(cp, d, dk.cell(k), cur.power, cur.pac_near);
                    ctr.pac_solves += blk.pac_solves;
                    ctr.power_solves += blk.power_solves;
                    ctr.stalled_pac += blk.stalled_pac ? 1 : 0;
                    ctr.stalled_power += blk.stalled_power ? 1 : 0;
                    auto& nx = next.cells[k];
                    nx.pac_near = blk.pac_near;
                    nx.pac_far = 1.0 - blk.pac_near;
                    nx.power = blk.power;
                    change = std::max({change, std::abs(nx.power - cur.power) / params.p_max,
                                       std::abs(nx.pac_near - cur.pac_near)});
                }
                cand = std::move(next);
                if (change <= 1e-12)
                    break;
            }
            const DualState updated = update_duals(duals, cand, chan, params, config.step0);
            const double moved = max_multiplier_change(updated, duals);
            duals = updated;
            if (moved <= config.tol_dual)
                break;
        }
        detail::project_structural(cand, params, mode);

        // Safeguard: accept only proposals that reduce the rate-floor
        // violation or, at no larger violation, do not lower the EE.
        const double ee_tol = 1e-12 * std::max(1.0, current_metrics.ee_total);
        auto acceptable = [&](const Metrics& m, double viol) {
            if (viol < current_violation - 1e-9)
                return true;
            return viol <= current_violation + 1e-12 && m.ee_total >= current_metrics.ee_total - ee_tol;
        };
        Metrics cand_metrics = metrics(cand, chan, params);
        double cand_violation = detail::total_violation(cand, chan, params);
        if (!acceptable(cand_metrics, cand_violation))
        {
            ++ctr.rejected_steps;
            bool found = false;
            double t = 0.5;
            for (int halving = 0; halving < 10; ++halving, t *= 0.5)
            {
                AllocationState mix = detail::blend(alloc, cand, t);
                const Metrics mm = metrics(mix, chan, params);
                const double mv = detail::total_violation(mix, chan, params);
                if (acceptable(mm, mv))
                {
                    cand = std::move(mix);
                    cand_metrics = mm;
                    cand_violation = mv;
                    found = true;
                    break;
                }
            }
            if (!found)
            {
                cand = alloc;
                cand_metrics = current_metrics;
                cand_violation = current_violation;
            }
        }
        alloc = std::move(cand);
        current_metrics = cand_metrics;
        current_violation = cand_violation;

        dk = dinkelbach_update(dk, current_metrics, params, config.tol_dinkelbach);
        rep.trajectory.push_back(dk.pi);
        if (dk.converged)
            break;
    }

    rep.allocation = alloc;
    rep.metrics = current_metrics;
    rep.feasibility = check_feasibility(alloc, chan, params);
    rep.dinkelbach = dk;
    rep.duals = duals;
    rep.converged = dk.converged;
    return rep;
}

} // namespace bsnoma

#endif // BSNOMA_SOLVER_HPP
