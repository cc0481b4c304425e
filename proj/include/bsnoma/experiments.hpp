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
 * \file bsnoma/experiments.hpp
 *
 * \brief Monte Carlo sweeps, convergence traces and their CSV records.
 *
 * Every trial index maps to one channel draw (seed derived from the base
 * seed and the index) that is shared by all modes and, unless the swept
 * parameter changes the network size, by all sweep values. Trials may run
 * on several worker threads; results are reduced in trial order, so the
 * output does not depend on scheduling.
 *
 * Output files start with a block of "# key=value" lines recording every
 * parameter and modelling assumption, followed by a CSV table.
 */

#ifndef BSNOMA_EXPERIMENTS_HPP
#define BSNOMA_EXPERIMENTS_HPP

#include "bsnoma/channel.hpp"
#include "bsnoma/model.hpp"
#include "bsnoma/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

namespace bsnoma {

/// Shortest round-trip decimal representation; identical on every run.
inline std::string format_double(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc())
        throw std::runtime_error("failed to format number");
    return std::string(buf, res.ptr);
}

/// Parameters that can be swept. Power budgets are given in dBm.
enum class SweepParam
{
    none,
    p_max_dbm,
    sic_error,
    num_cells,
    circuit_power,
    r_min,
};

inline const char* to_string(SweepParam p)
{
    switch (p)
    {
    case SweepParam::none: return "none";
    case SweepParam::p_max_dbm: return "pmax_dbm";
    case SweepParam::sic_error: return "beta";
    case SweepParam::num_cells: return "num_cells";
    case SweepParam::circuit_power: return "pc";
    case SweepParam::r_min: return "rmin";
    }
    return "?";
}

inline SweepParam sweep_param_from_string(const std::string& s)
{
    for (auto p : {SweepParam::none, SweepParam::p_max_dbm, SweepParam::sic_error, SweepParam::num_cells,
                   SweepParam::circuit_power, SweepParam::r_min})
        if (s == to_string(p))
            return p;
    throw std::invalid_argument("unknown sweep parameter '" + s + "' (expected none, pmax_dbm, beta, num_cells, pc, rmin)");
}

inline SystemParams apply_sweep(SystemParams base, SweepParam p, double value)
{
    switch (p)
    {
    case SweepParam::none: break;
    case SweepParam::p_max_dbm: base.p_max = dbm_to_watt(value); break;
    case SweepParam::sic_error: base.sic_error = value; break;
    case SweepParam::num_cells:
        if (value < 1.0 || value != std::floor(value))
            throw std::invalid_argument("num_cells sweep values must be positive integers");
        base.num_cells = static_cast<std::size_t>(value);
        break;
    case SweepParam::circuit_power: base.circuit_power = value; break;
    case SweepParam::r_min: base.r_min = value; break;
    }
    base.validate();
    return base;
}

struct ExperimentConfig
{
    SystemParams base;
    LayoutConfig layout;
    SolveConfig solve;
    SweepParam sweep_param = SweepParam::p_max_dbm;
    std::vector<double> sweep_values{0, 4, 8, 12, 16, 20, 24, 28, 32};
    std::size_t trials = 100;
    RngSeed seed{1};
    std::vector<Mode> modes{Mode::wbs, Mode::nbs};
    std::string output_path;
    std::size_t workers = 1;

    void validate() const
    {
        if (trials < 1)
            throw std::invalid_argument("trials must be at least 1");
        if (modes.empty())
            throw std::invalid_argument("at least one mode is required");
        if (sweep_values.empty())
            throw std::invalid_argument("at least one sweep value is required");
        base.validate();
        layout.validate();
        solve.validate();
        for (double v : sweep_values)
            (void)apply_sweep(base, sweep_param, v);
    }
};

/// Outcome of one solve inside a sweep.
struct TrialOutcome
{
    double ee = 0.0;             ///< achieved EE; zero when a rate floor is missed
    double ee_unconstrained = 0.0; ///< achieved EE regardless of the rate floors
    double total_power = 0.0;
    std::size_t outer_iterations = 0;
    bool feasible = false;
    bool converged = false;
    bool monotone = true; ///< Pi trajectory never dropped by more than 1e-9
};

struct SweepPoint
{
    double value = 0.0;
    Mode mode = Mode::wbs;
    std::size_t trials = 0;
    double mean_ee = 0.0;
    double std_ee = 0.0; ///< sample standard deviation (0 for a single trial)
    double mean_ee_unconstrained = 0.0;
    double mean_total_power = 0.0;
    double mean_outer_iterations = 0.0;
    double median_outer_iterations = 0.0;
    double feasibility_rate = 0.0;
    double converged_rate = 0.0;
    std::size_t monotonicity_violations = 0;
    std::vector<TrialOutcome> outcomes;
};

struct SweepResult
{
    SweepParam param = SweepParam::none;
    std::vector<SweepPoint> points; ///< ordered by sweep value, then by mode as configured

    const SweepPoint& at(double value, Mode mode) const
    {
        for (const auto& p : points)
            if (p.value == value && p.mode == mode)
                return p;
        throw std::out_of_range("no sweep point for value " + format_double(value));
    }
};

inline bool trajectory_monotone(const std::vector<double>& traj, double tol = 1e-9)
{
    for (std::size_t i = 1; i < traj.size(); ++i)
        if (traj[i] < traj[i - 1] - tol)
            return false;
    return true;
}

inline TrialOutcome summarize(const SolveReport& rep)
{
    TrialOutcome o;
    o.feasible = rep.feasibility.all();
    o.ee_unconstrained = rep.metrics.ee_total;
    o.ee = o.feasible ? rep.metrics.ee_total : 0.0;
    o.total_power = rep.metrics.total_power;
    o.outer_iterations = rep.outer_iterations();
    o.converged = rep.converged;
    o.monotone = trajectory_monotone(rep.trajectory);
    return o;
}

namespace detail {

/// Runs job(i) for i in [0, n) on up to \p workers threads.
inline void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& job)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n && !failed; i = next++)
            {
                try
                {
                    job(i);
                }
                catch (...)
                {
                    if (!failed.exchange(true))
                        failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline SweepPoint aggregate(double value, Mode mode, std::vector<TrialOutcome> outcomes)
{
    SweepPoint p;
    p.value = value;
    p.mode = mode;
    p.trials = outcomes.size();
    const double n = static_cast<double>(p.trials);
    std::vector<double> iters;
    for (const auto& o : outcomes)
    {
        p.mean_ee += o.ee;
        p.mean_ee_unconstrained += o.ee_unconstrained;
        p.mean_total_power += o.total_power;
        p.mean_outer_iterations += static_cast<double>(o.outer_iterations);
        p.feasibility_rate += o.feasible ? 1.0 : 0.0;
        p.converged_rate += o.converged ? 1.0 : 0.0;
        p.monotonicity_violations += o.monotone ? 0 : 1;
        iters.push_back(static_cast<double>(o.outer_iterations));
    }
    p.mean_ee /= n;
    p.mean_ee_unconstrained /= n;
    p.mean_total_power /= n;
    p.mean_outer_iterations /= n;
    p.feasibility_rate /= n;
    p.converged_rate /= n;
    p.median_outer_iterations = median(iters);
    if (p.trials > 1)
    {
        double ss = 0.0;
        for (const auto& o : outcomes)
            ss += (o.ee - p.mean_ee) * (o.ee - p.mean_ee);
        p.std_ee = std::sqrt(ss / (n - 1.0));
    }
    p.outcomes = std::move(outcomes);
    return p;
}

} // namespace detail

/// Runs every (sweep value, mode) combination over config.trials channel draws.
inline SweepResult run_sweep(const ExperimentConfig& config)
{
    config.validate();
    SweepResult result;
    result.param = config.sweep_param;
    for (double value : config.sweep_values)
    {
        const SystemParams params = apply_sweep(config.base, config.sweep_param, value);
        const Topology topo = build_topology(params, config.layout);
        const std::size_t n_modes = config.modes.size();
        std::vector<TrialOutcome> outcomes(config.trials * n_modes);
        detail::parallel_for(config.trials, config.workers, [&](std::size_t trial) {
            const auto chan = sample_channels(topo, params, config.seed.derive(trial));
            for (std::size_t m = 0; m < n_modes; ++m)
                outcomes[trial * n_modes + m] = summarize(optimize(chan, params, config.solve, config.modes[m]));
        });
        for (std::size_t m = 0; m < n_modes; ++m)
        {
            std::vector<TrialOutcome> per_mode;
            per_mode.reserve(config.trials);
            for (std::size_t t = 0; t < config.trials; ++t)
                per_mode.push_back(outcomes[t * n_modes + m]);
            result.points.push_back(detail::aggregate(value, config.modes[m], std::move(per_mode)));
        }
    }
    return result;
}

/// "# key=value" lines describing the configuration and the declared assumptions.
inline void write_header(std::ostream& os, const ExperimentConfig& c)
{
    auto kv = [&](const char* k, const std::string& v) { os << "# " << k << '=' << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
    kv("generator", "bsnoma");
    num("noise_variance", c.base.noise_variance);
    num("beta", c.base.sic_error);
    num("pc", c.base.circuit_power);
    num("pmax_dbm", watt_to_dbm(c.base.p_max));
    num("rmin", c.base.r_min);
    num("path_loss_exp", c.base.path_loss_exp);
    num("num_cells", static_cast<double>(c.base.num_cells));
    num("inter_site_spacing", c.layout.inter_site_spacing);
    num("d_near", c.layout.d_near);
    num("d_far", c.layout.d_far);
    num("d_src_tag", c.layout.d_src_tag);
    num("d_tag_near", c.layout.d_tag_near);
    num("d_tag_far", c.layout.d_tag_far);
    num("tol_dinkelbach", c.solve.tol_dinkelbach);
    num("tol_dual", c.solve.tol_dual);
    num("max_outer", static_cast<double>(c.solve.max_outer));
    num("max_dual_iters", static_cast<double>(c.solve.max_dual_iters));
    num("step0", c.solve.step0);
    num("interference_rounds", static_cast<double>(c.solve.interference_rounds));
    kv("sweep_param", to_string(c.sweep_param));
    std::string values;
    for (std::size_t i = 0; i < c.sweep_values.size(); ++i)
        values += (i ? ";" : "") + format_double(c.sweep_values[i]);
    kv("sweep_values", values);
    num("trials", static_cast<double>(c.trials));
    kv("seed", std::to_string(c.seed.value));
    kv("trial_seed", "seed xor trial_index");
    kv("rng", rng_algorithm_name);
    std::string modes;
    for (std::size_t i = 0; i < c.modes.size(); ++i)
        modes += std::string(i ? ";" : "") + to_string(c.modes[i]);
    kv("modes", modes);
    kv("assumption.geometry", "square grid of sources; near device on SW diagonal, far device on NE diagonal");
    kv("assumption.fading", "Rayleigh, squared gain Exp(1)*d^-path_loss_exp; near label = larger direct gain");
    kv("assumption.interference", "per-interferer sum of P_k' * cross gain");
    kv("assumption.init", "P=Pmax/2 pac=0.3/0.7 phi=0.5 duals=0 pi=0");
    kv("assumption.step_schedule", "delta(t)=step0/sqrt(t)");
    kv("assumption.dual_update", "projected subgradient step against constraint slack");
    kv("assumption.pac_quadratic", "symbol L_{i,k} read as lambda_{i,k}");
    kv("assumption.pac_far", "pac_far = 1 - pac_near");
    kv("assumption.infeasible_trial_ee", "0 (rate floor missed)");
    kv("assumption.noise", "sigma=0.01 read as standard deviation; noise_variance=sigma^2");
    kv("assumption.dinkelbach", "one parameter per cell, Pi_k=R_k/(P_k*(pac sum)+pc); EE=sum_k Pi_k");
    kv("assumption.cell_block", "PAC/power alternation from current, extreme and minimum-power splits");
    kv("assumption.far_reflection_term", "far-device intra-cell term without beta, as in the far SINR");
    kv("assumption.selection", "feasible candidates first, then largest Lagrangian");
}

/// Long-format table: one row per (sweep value, mode, statistic).
inline void write_csv(std::ostream& os, const ExperimentConfig& config, const SweepResult& result)
{
    write_header(os, config);
    os << "sweep_param,sweep_value,mode,statistic,value\n";
    for (const auto& p : result.points)
    {
        auto row = [&](const char* stat, double v) {
            os << to_string(result.param) << ',' << format_double(p.value) << ',' << to_string(p.mode) << ',' << stat
               << ',' << format_double(v) << '\n';
        };
        row("mean_ee", p.mean_ee);
        row("std_ee", p.std_ee);
        row("trials", static_cast<double>(p.trials));
        row("mean_outer_iterations", p.mean_outer_iterations);
        row("median_outer_iterations", p.median_outer_iterations);
        row("feasibility_rate", p.feasibility_rate);
        row("converged_rate", p.converged_rate);
        row("mean_total_power", p.mean_total_power);
        row("mean_ee_unconstrained", p.mean_ee_unconstrained);
        row("monotonicity_violations", static_cast<double>(p.monotonicity_violations));
    }
}

inline std::string sweep_csv(const ExperimentConfig& config, const SweepResult& result)
{
    std::ostringstream os;
    write_csv(os, config, result);
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot open output file '" + path + "'");
    f << content;
    f.flush();
    if (!f)
        throw std::runtime_error("failed writing output file '" + path + "'");
}

/// Runs the sweep and writes its CSV to config.output_path.
inline SweepResult run_sweep_to_file(const ExperimentConfig& config)
{
    auto result = run_sweep(config);
    write_text_file(config.output_path, sweep_csv(config, result));
    return result;
}

/**
 * Structured-text record of one solve: "key=value" lines for the scalar
 * results followed by a per-cell table and the EE trajectory.
 */
inline void write_report(std::ostream& os, const SolveReport& rep)
{
    auto kv = [&](const char* k, const std::string& v) { os << k << '=' << v << '\n'; };
    auto num = [&](const char* k, double v) { kv(k, format_double(v)); };
    kv("mode", to_string(rep.mode));
    num("num_cells", static_cast<double>(rep.allocation.cells.size()));
    kv("converged", rep.converged ? "true" : "false");
    kv("feasible", rep.feasibility.all() ? "true" : "false");
    num("worst_rate_violation", rep.feasibility.worst_rate_violation());
    num("ee_total", rep.metrics.ee_total);
    num("sum_rate", rep.metrics.sum_rate);
    num("total_power", rep.metrics.total_power);
    num("dinkelbach_residual", rep.dinkelbach.f_value);
    num("outer_iterations", static_cast<double>(rep.counters.outer_iterations));
    num("dual_iterations", static_cast<double>(rep.counters.dual_iterations));
    num("jacobi_rounds", static_cast<double>(rep.counters.jacobi_rounds));
    num("pac_solves", static_cast<double>(rep.counters.pac_solves));
    num("power_solves", static_cast<double>(rep.counters.power_solves));
    num("reflection_solves", static_cast<double>(rep.counters.reflection_solves));
    num("rejected_steps", static_cast<double>(rep.counters.rejected_steps));
    os << "cell,power_w,power_dbm,pac_near,pac_far,reflection,rate_near,rate_far,ee,feasible\n";
    for (std::size_t k = 0; k < rep.allocation.cells.size(); ++k)
    {
        const auto& a = rep.allocation.cells[k];
        const auto& r = rep.metrics.cells[k];
        os << k << ',' << format_double(a.power) << ','
           << (a.power > 0.0 ? format_double(watt_to_dbm(a.power)) : std::string("-inf")) << ','
           << format_double(a.pac_near) << ',' << format_double(a.pac_far) << ',' << format_double(a.reflection)
           << ',' << format_double(r.near) << ',' << format_double(r.far) << ',' << format_double(r.ee) << ','
           << (rep.feasibility.cells[k].all() ? 1 : 0) << '\n';
    }
    os << "iteration,pi\n";
    for (std::size_t i = 0; i < rep.trajectory.size(); ++i)
        os << i << ',' << format_double(rep.trajectory[i]) << '\n';
}

struct ConvergenceTrace
{
    std::size_t num_cells = 0;
    Mode mode = Mode::wbs;
    bool converged = false;
    std::size_t outer_iterations = 0;
    std::vector<double> pi; ///< index 0 is the initial estimate
};

/**
 * Solves one instance per network size in \p cell_counts (channel drawn
 * from \p instance seed) and records the Pi trajectory of each.
 */
inline std::vector<ConvergenceTrace> convergence_traces(const ExperimentConfig& config,
                                                        const std::vector<std::size_t>& cell_counts, RngSeed instance,
                                                        Mode mode = Mode::wbs)
{
    config.validate();
    std::vector<ConvergenceTrace> out;
    for (std::size_t k : cell_counts)
    {
        SystemParams params = config.base;
        params.num_cells = k;
        params.validate();
        const auto topo = build_topology(params, config.layout);
        const auto chan = sample_channels(topo, params, instance);
        const auto rep = optimize(chan, params, config.solve, mode);
        out.push_back({k, mode, rep.converged, rep.outer_iterations(), rep.trajectory});
    }
    return out;
}

inline void write_convergence_csv(std::ostream& os, const ExperimentConfig& config, RngSeed instance,
                                  const std::vector<ConvergenceTrace>& traces)
{
    write_header(os, config);
    os << "# instance_seed=" << instance.value << '\n';
    os << "num_cells,mode,iteration,pi\n";
    for (const auto& t : traces)
        for (std::size_t i = 0; i < t.pi.size(); ++i)
            os << t.num_cells << ',' << to_string(t.mode) << ',' << i << ',' << format_double(t.pi[i]) << '\n';
}

/// Writes the convergence traces for \p cell_counts to config.output_path.
inline std::vector<ConvergenceTrace> emit_convergence(const ExperimentConfig& config,
                                                      const std::vector<std::size_t>& cell_counts, RngSeed instance,
                                                      Mode mode = Mode::wbs)
{
    auto traces = convergence_traces(config, cell_counts, instance, mode);
    std::ostringstream os;
    write_convergence_csv(os, config, instance, traces);
    write_text_file(config.output_path, os.str());
    return traces;
}

} // namespace bsnoma

#endif // BSNOMA_EXPERIMENTS_HPP
