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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "bsnoma/bsnoma.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

using namespace bsnoma;

namespace {

int failures = 0;
std::size_t monotonicity_violations = 0;
std::size_t monotonicity_checked = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("[%s] criterion %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok)
        ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c, d);
    return buf;
}

void track(const SweepResult& r)
{
    for (const auto& p : r.points)
    {
        monotonicity_violations += p.monotonicity_violations;
        monotonicity_checked += p.trials;
    }
}

ExperimentConfig base_config()
{
    ExperimentConfig c;
    c.trials = 100;
    c.seed = RngSeed{20211};
    c.workers = std::max(1u, std::thread::hardware_concurrency());
    return c;
}

const std::vector<double> pmax_axis{0, 4, 8, 12, 16, 20, 24, 28, 32};

// 1. Solver vs exhaustive grid on single-cell instances.
void oracle_equivalence()
{
    SystemParams p;
    p.num_cells = 1;
    p.r_min = 0.0;
    const auto topo = build_topology(p, LayoutConfig{});
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 1e300;
    bool ok = true;
    for (std::uint64_t s = 0; s < 10; ++s)
    {
        const auto chan = sample_channels(topo, p, RngSeed{900 + s});
        const auto rep = optimize(chan, p, SolveConfig{}, Mode::wbs);
        const auto orc = grid_search(chan, p, GridSpec{200, 200, 100}, Mode::wbs);
        ++monotonicity_checked;
        monotonicity_violations += trajectory_monotone(rep.trajectory) ? 0 : 1;
        const double ratio = rep.metrics.ee_total / orc.ee;
        worst = std::min(worst, ratio);
        ok = ok && orc.feasible && ratio >= 0.98;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, "oracle equivalence", ok && secs <= 60.0,
           fmt("min EE/oracle = %.5f (>= 0.98), runtime %.2f s (<= 60 s)", worst, secs));
}

// 2 and 4 share the default P_max sweep.
void pmax_sweep_checks(const SweepResult& r)
{
    std::size_t violations = 0;
    double min_gap = 1e300;
    for (double v : pmax_axis)
    {
        const double gap = r.at(v, Mode::wbs).mean_ee - r.at(v, Mode::nbs).mean_ee;
        min_gap = std::min(min_gap, gap);
        violations += gap >= 0.0 ? 0 : 1;
    }
    report(2, "mode dominance", violations == 0,
           fmt("%.0f of 9 points with mean EE(WBS) < mean EE(NBS); min gap %.4g", double(violations), min_gap));

    bool ok = true;
    double worst_p = 0, worst_e = 0;
    for (Mode m : {Mode::wbs, Mode::nbs})
    {
        const auto& a = r.at(28, m);
        const auto& b = r.at(32, m);
        const double dp = std::abs(b.mean_total_power - a.mean_total_power) / a.mean_total_power;
        const double de = std::abs(b.mean_ee - a.mean_ee) / a.mean_ee;
        worst_p = std::max(worst_p, dp);
        worst_e = std::max(worst_e, de);
        ok = ok && dp < 0.01 && de < 0.01;
    }
    report(4, "saturation", ok,
           fmt("28->32 dBm: power change %.3g%%, EE change %.3g%% (both < 1%%)", 100 * worst_p, 100 * worst_e));
}

// 3. SIC-error ordering and widening backscatter gain.
void beta_checks()
{
    const std::vector<double> betas{0.05, 0.1, 0.2};
    std::vector<SweepResult> runs;
    for (double beta : betas)
    {
        auto c = base_config();
        c.base.sic_error = beta;
        c.sweep_values = {5, 32};
        runs.push_back(run_sweep(c));
        track(runs.back());
    }
    bool ordered = true;
    bool widening = true;
    std::string detail;
    for (Mode m : {Mode::wbs, Mode::nbs})
        for (std::size_t i = 1; i < betas.size(); ++i)
            ordered = ordered && runs[i].at(32, m).mean_ee < runs[i - 1].at(32, m).mean_ee;
    for (std::size_t i = 0; i < betas.size(); ++i)
    {
        const double g5 = runs[i].at(5, Mode::wbs).mean_ee - runs[i].at(5, Mode::nbs).mean_ee;
        const double g32 = runs[i].at(32, Mode::wbs).mean_ee - runs[i].at(32, Mode::nbs).mean_ee;
        widening = widening && g32 > g5;
        detail += fmt("beta=%.2f EE@32=%.5g gap5=%.3g gap32=%.3g; ", betas[i], runs[i].at(32, Mode::wbs).mean_ee, g5, g32);
    }
    report(3, "beta ordering", ordered && widening,
           std::string(ordered ? "EE strictly decreasing in beta" : "EE NOT strictly decreasing in beta") +
               (widening ? ", gap widens: " : ", gap does NOT widen: ") + detail);
}

/// Smallest P_max whose mean EE is within 1% of the value at the last point.
double saturation_point(const SweepResult& r, Mode m)
{
    const double last = r.at(pmax_axis.back(), m).mean_ee;
    for (double v : pmax_axis)
        if (std::abs(r.at(v, m).mean_ee - last) <= 0.01 * std::abs(last))
            return v;
    return pmax_axis.back();
}

// 5. Circuit-power ordering and saturation shift.
void circuit_power_checks(const SweepResult& pc01)
{
    std::vector<SweepResult> runs{pc01};
    for (double pc : {0.3, 0.5})
    {
        auto c = base_config();
        c.base.circuit_power = pc;
        c.sweep_values = pmax_axis;
        runs.push_back(run_sweep(c));
        track(runs.back());
    }
    bool ordered = true;
    bool shift = true;
    std::string detail;
    for (Mode m : {Mode::wbs, Mode::nbs})
    {
        for (double v : pmax_axis)
            ordered = ordered && runs[0].at(v, m).mean_ee > runs[1].at(v, m).mean_ee &&
                      runs[1].at(v, m).mean_ee > runs[2].at(v, m).mean_ee;
        const double s1 = saturation_point(runs[0], m);
        const double s3 = saturation_point(runs[1], m);
        const double s5 = saturation_point(runs[2], m);
        shift = shift && s1 <= s3 && s3 <= s5;
        detail += to_string(m) + fmt(" saturation at %.0f/%.0f/%.0f dBm; ", s1, s3, s5);
    }
    report(5, "pc ordering + shift", ordered && shift,
           std::string(ordered ? "pointwise ordered" : "NOT pointwise ordered") + ", pc 0.1/0.3/0.5 " + detail);
}

// 6. Rate-floor degradation.
void rmin_checks()
{
    auto c = base_config();
    c.sweep_param = SweepParam::r_min;
    c.sweep_values = {0, 0.5, 1.0, 1.5};
    const auto r = run_sweep(c);
    track(r);
    bool nonincreasing = true;
    for (Mode m : {Mode::wbs, Mode::nbs})
        for (std::size_t i = 1; i < c.sweep_values.size(); ++i)
            nonincreasing = nonincreasing && r.at(c.sweep_values[i], m).mean_ee <= r.at(c.sweep_values[i - 1], m).mean_ee;
    auto drop = [&](Mode m) { return 1.0 - r.at(1.5, m).mean_ee / r.at(0.0, m).mean_ee; };
    const double dw = drop(Mode::wbs), dn = drop(Mode::nbs);
    report(6, "rmin degradation", nonincreasing && dn > dw,
           fmt("nonincreasing=%.0f, relative drop 0->1.5: WBS %.4f%%, NBS %.4f%% (feasible WBS %.2f)",
               nonincreasing ? 1.0 : 0.0, 100 * dw, 100 * dn, r.at(1.5, Mode::wbs).feasibility_rate));
}

// 7. Convergence within the outer-iteration budget.
void convergence_checks()
{
    auto c = base_config();
    c.sweep_param = SweepParam::num_cells;
    c.sweep_values = {1, 5, 10};
    c.modes = {Mode::wbs};
    const auto r = run_sweep(c);
    track(r);
    bool ok = true;
    std::string detail;
    for (double k : c.sweep_values)
    {
        const auto& p = r.at(k, Mode::wbs);
        std::size_t good = 0;
        for (const auto& o : p.outcomes)
            good += (o.converged && o.outer_iterations <= 50) ? 1 : 0;
        const double frac = double(good) / double(p.trials);
        ok = ok && frac >= 0.95;
        detail += fmt("K=%.0f converged %.0f%% median %.1f it; ", k, 100 * frac, p.median_outer_iterations);
    }
    ok = ok && r.at(1, Mode::wbs).median_outer_iterations <= r.at(10, Mode::wbs).median_outer_iterations;
    report(7, "convergence", ok, detail);
}

// 8. Concavity in Phi, Hessian signs in the PACs, monotone Dinkelbach trajectories.
void numerical_checks()
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    SystemParams p;
    p.num_cells = 1;
    const auto topo = build_topology(p, LayoutConfig{});

    double worst_d2 = -1e300;
    for (int inst = 0; inst < 100; ++inst)
    {
        const auto chan = sample_channels(topo, p, RngSeed{5000 + std::uint64_t(inst)});
        AllocationState a = initial_allocation(1, p, Mode::wbs);
        a.cells[0].power = p.p_max * (0.05 + 0.95 * unif(rng));
        a.cells[0].pac_near = 0.5 * (0.01 + 0.98 * unif(rng));
        a.cells[0].pac_far = 1.0 - a.cells[0].pac_near;
        auto rate = [&](double phi) {
            AllocationState b = a;
            b.cells[0].reflection = phi;
            return metrics(b, chan, p).cells[0].sum;
        };
        const double h = 1.0 / 99.0;
        for (int i = 1; i < 99; ++i)
        {
            const double x = i * h;
            worst_d2 = std::max(worst_d2, (rate(x + h) - 2 * rate(x) + rate(x - h)) / (h * h));
        }
    }
    const bool concave = worst_d2 <= 1e-6;

    std::size_t hessian_bad = 0;
    double worst_minor = -1e300, worst_det = 1e300;
    for (int inst = 0; inst < 100; ++inst)
    {
        const auto chan = sample_channels(topo, p, RngSeed{7000 + std::uint64_t(inst)});
        AllocationState a = initial_allocation(1, p, Mode::wbs);
        a.cells[0].power = p.p_max * (0.05 + 0.95 * unif(rng));
        a.cells[0].reflection = unif(rng);
        const double total = 0.1 + 0.85 * unif(rng);
        const double share = 0.05 + 0.4 * unif(rng);
        const double li = total * share, lj = total * (1.0 - share);
        auto rate = [&](double x, double y) {
            AllocationState b = a;
            b.cells[0].pac_near = x;
            b.cells[0].pac_far = y;
            return metrics(b, chan, p).cells[0].sum;
        };
        const double e = 1e-5;
        const double f = rate(li, lj);
        const double hxx = (rate(li + e, lj) - 2 * f + rate(li - e, lj)) / (e * e);
        const double hyy = (rate(li, lj + e) - 2 * f + rate(li, lj - e)) / (e * e);
        const double hxy =
            (rate(li + e, lj + e) - rate(li + e, lj - e) - rate(li - e, lj + e) + rate(li - e, lj - e)) / (4 * e * e);
        const double det = hxx * hyy - hxy * hxy;
        worst_minor = std::max(worst_minor, hxx);
        worst_det = std::min(worst_det, det);
        hessian_bad += (hxx < 0.0 && det > 0.0) ? 0 : 1;
    }
    const bool monotone = monotonicity_violations == 0;
    report(8, "numerical analysis", concave && hessian_bad == 0 && monotone,
           fmt("max d2R/dPhi2 = %.3g (<= 1e-6); Hessian sign failures %.0f/100 (max H11 %.3g, min det %.3g)",
               worst_d2, double(hessian_bad), worst_minor, worst_det) +
               fmt("; Dinkelbach drops %.0f of %.0f solves", double(monotonicity_violations),
                   double(monotonicity_checked)));
}

// 9. Quartic round trip and residual bound.
void polynomial_checks()
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> root(-1e3, 1e3);
    double worst_err = 0.0, worst_res = 0.0;
    bool ok = true;
    for (int c = 0; c < 1000; ++c)
    {
        std::vector<double> planted{root(rng), root(rng), root(rng), root(rng)};
        const auto poly = from_roots(planted);
        const auto got = real_roots_quartic(poly);
        const double bound = 1e-8 * std::max(1.0, poly.max_abs_coeff());
        for (double r : got)
        {
            const double res = std::abs(poly(r)) / bound;
            worst_res = std::max(worst_res, res);
            ok = ok && res <= 1.0;
        }
        for (double r : planted)
        {
            double best = 1e300;
            for (double g : got)
                best = std::min(best, std::abs(g - r));
            worst_err = std::max(worst_err, best);
        }
    }
    ok = ok && worst_err <= 1e-6;
    report(9, "polynomial layer", ok,
           fmt("max root error %.3g (<= 1e-6), max residual / bound %.3g (<= 1)", worst_err, worst_res));
}

// 10. Byte-identical CSV on repeated runs.
void determinism_checks()
{
    auto c = base_config();
    c.trials = 8;
    c.sweep_values = {8, 20, 32};
    c.workers = 3;
    const auto a = sweep_csv(c, run_sweep(c));
    const auto b = sweep_csv(c, run_sweep(c));
    report(10, "determinism", a == b && !a.empty(), fmt("two runs, %.0f bytes each, identical", double(a.size())));
}

} // namespace

int main()
{
    const auto t0 = std::chrono::steady_clock::now();
    oracle_equivalence();

    auto c = base_config();
    c.sweep_values = pmax_axis;
    const auto pmax = run_sweep(c);
    track(pmax);
    pmax_sweep_checks(pmax);
    beta_checks();
    circuit_power_checks(pmax);
    rmin_checks();
    convergence_checks();
    numerical_checks();
    polynomial_checks();
    determinism_checks();

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("acceptance: %d failing criteria, %.1f s\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
