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

// Command-line front end: single solves, Monte Carlo sweeps, convergence
// traces and brute-force spot checks. Power budgets are entered in dBm.

#include <bsnoma/bsnoma.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace bsnoma;

struct Options
{
    ExperimentConfig exp;
    double p_max_dbm = 32.0;
    std::string sweep_param = "pmax_dbm";
    std::vector<std::string> modes{"WBS", "NBS"};
    std::string mode = "WBS";
    std::uint64_t seed = 1;
    std::uint64_t instance = 0;
    std::vector<std::size_t> cell_counts{1, 5, 10};
    GridSpec grid;
};

void add_model_flags(CLI::App& app, Options& o)
{
    auto& b = o.exp.base;
    app.add_option("--noise-variance", b.noise_variance, "receiver noise variance [W]")->capture_default_str();
    app.add_option("--beta", b.sic_error, "residual SIC error in [0,1]")->capture_default_str();
    app.add_option("--pc", b.circuit_power, "circuit power [W]")->capture_default_str();
    app.add_option("--pmax-dbm", o.p_max_dbm, "per-source power budget [dBm]")->capture_default_str();
    app.add_option("--rmin", b.r_min, "per-device rate floor [bits/s/Hz]")->capture_default_str();
    app.add_option("--path-loss-exp", b.path_loss_exp, "path-loss exponent")->capture_default_str();
    app.add_option("--cells", b.num_cells, "number of cells")->capture_default_str();

    auto& l = o.exp.layout;
    app.add_option("--spacing", l.inter_site_spacing, "inter-site spacing [m]")->capture_default_str();
    app.add_option("--d-near", l.d_near, "source to near device [m]")->capture_default_str();
    app.add_option("--d-far", l.d_far, "source to far device [m]")->capture_default_str();
    app.add_option("--d-src-tag", l.d_src_tag, "source to tag [m]")->capture_default_str();
    app.add_option("--d-tag-near", l.d_tag_near, "tag to near device [m]")->capture_default_str();
    app.add_option("--d-tag-far", l.d_tag_far, "tag to far device [m]")->capture_default_str();

    auto& s = o.exp.solve;
    app.add_option("--tol-dinkelbach", s.tol_dinkelbach, "Dinkelbach stopping tolerance")->capture_default_str();
    app.add_option("--tol-dual", s.tol_dual, "dual stopping tolerance")->capture_default_str();
    app.add_option("--max-outer", s.max_outer, "maximum outer iterations")->capture_default_str();
    app.add_option("--max-dual-iters", s.max_dual_iters, "maximum dual iterations")->capture_default_str();
    app.add_option("--step0", s.step0, "initial subgradient step")->capture_default_str();
    app.add_option("--interference-rounds", s.interference_rounds, "Jacobi interference refreshes per dual iteration")
        ->capture_default_str();
}

void finalize(Options& o)
{
    o.exp.base.p_max = dbm_to_watt(o.p_max_dbm);
    o.exp.seed = RngSeed{o.seed};
    o.exp.sweep_param = sweep_param_from_string(o.sweep_param);
    o.exp.modes.clear();
    for (const auto& m : o.modes)
        o.exp.modes.push_back(mode_from_string(m));
    o.exp.base.validate();
    o.exp.layout.validate();
    o.exp.solve.validate();
}

ChannelRealization draw(const Options& o)
{
    const auto topo = build_topology(o.exp.base, o.exp.layout);
    return sample_channels(topo, o.exp.base, RngSeed{o.seed}.derive(o.instance));
}

void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-")
        std::cout << text;
    else
        write_text_file(path, text);
}

int run_solve(Options& o)
{
    finalize(o);
    const auto rep = optimize(draw(o), o.exp.base, o.exp.solve, mode_from_string(o.mode));
    std::ostringstream os;
    write_report(os, rep);
    emit(o.exp.output_path, os.str());
    return 0;
}

int run_sweep_cmd(Options& o)
{
    finalize(o);
    const auto result = run_sweep(o.exp);
    emit(o.exp.output_path, sweep_csv(o.exp, result));
    return 0;
}

int run_converge(Options& o)
{
    finalize(o);
    const RngSeed instance = RngSeed{o.seed}.derive(o.instance);
    const auto traces = convergence_traces(o.exp, o.cell_counts, instance, mode_from_string(o.mode));
    std::ostringstream os;
    write_convergence_csv(os, o.exp, instance, traces);
    emit(o.exp.output_path, os.str());
    return 0;
}

int run_oracle(Options& o)
{
    finalize(o);
    const auto chan = draw(o);
    const Mode mode = mode_from_string(o.mode);
    const auto res = grid_search(chan, o.exp.base, o.grid, mode);
    const auto rep = optimize(chan, o.exp.base, o.exp.solve, mode);
    std::ostringstream os;
    os << "oracle_feasible=" << (res.feasible ? "true" : "false") << '\n';
    os << "oracle_ee=" << format_double(res.ee) << '\n';
    os << "oracle_evaluated=" << res.evaluated << '\n';
    os << "solver_ee=" << format_double(rep.metrics.ee_total) << '\n';
    os << "solver_feasible=" << (rep.feasibility.all() ? "true" : "false") << '\n';
    if (res.feasible && res.ee > 0.0)
        os << "ratio=" << format_double(rep.metrics.ee_total / res.ee) << '\n';
    os << "cell,oracle_power_w,oracle_pac_near,oracle_reflection,solver_power_w,solver_pac_near,solver_reflection\n";
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        const auto& a = rep.allocation.cells[k];
        const auto b = res.feasible ? res.best.cells[k] : CellAllocation{};
        os << k << ',' << format_double(b.power) << ',' << format_double(b.pac_near) << ','
           << format_double(b.reflection) << ',' << format_double(a.power) << ',' << format_double(a.pac_near) << ','
           << format_double(a.reflection) << '\n';
    }
    emit(o.exp.output_path, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Energy-efficiency optimizer for multi-cell NOMA networks with backscatter tags"};
    app.set_config("--config", "", "read options from an INI/TOML key=value file; flags override");
    app.require_subcommand(1);
    Options o;

    auto* solve = app.add_subcommand("solve", "solve one channel draw and print the report");
    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sweep written as long-format CSV");
    auto* conv = app.add_subcommand("converge", "Dinkelbach trajectories for several network sizes");
    auto* orc = app.add_subcommand("oracle", "compare the solver against an exhaustive grid search");

    for (auto* sub : {solve, sweep, conv, orc})
    {
        add_model_flags(*sub, o);
        sub->add_option("--seed", o.seed, "base RNG seed")->capture_default_str();
        sub->add_option("-o,--output", o.exp.output_path, "output file (default: stdout)");
    }
    for (auto* sub : {solve, conv, orc})
    {
        sub->add_option("--mode", o.mode, "WBS (with tags) or NBS (no tags)")->capture_default_str();
        sub->add_option("--instance", o.instance, "trial index of the channel draw")->capture_default_str();
    }

    sweep->add_option("--param", o.sweep_param, "swept parameter: none, pmax_dbm, beta, num_cells, pc, rmin")
        ->capture_default_str();
    sweep->add_option("--values", o.exp.sweep_values, "sweep values (dBm for pmax_dbm)")->capture_default_str();
    sweep->add_option("--trials", o.exp.trials, "channel draws per sweep value")->capture_default_str();
    sweep->add_option("--modes", o.modes, "modes to run")->capture_default_str();
    sweep->add_option("--workers", o.exp.workers, "concurrent trials")->capture_default_str();

    conv->add_option("--cell-counts", o.cell_counts, "network sizes to trace")->capture_default_str();

    orc->add_option("--n-power", o.grid.n_power, "grid points over [0, P_max]")->capture_default_str();
    orc->add_option("--n-pac", o.grid.n_pac, "grid points over the near-device PAC")->capture_default_str();
    orc->add_option("--n-phi", o.grid.n_phi, "grid points over the reflection coefficient")->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try
    {
        if (solve->parsed())
            return run_solve(o);
        if (sweep->parsed())
            return run_sweep_cmd(o);
        if (conv->parsed())
            return run_converge(o);
        return run_oracle(o);
    }
    catch (const std::exception& e)
    {
        std::fprintf(stderr, "bsnoma: %s\n", e.what());
        return 2;
    }
}
