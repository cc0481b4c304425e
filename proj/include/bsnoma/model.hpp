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
 * \file bsnoma/model.hpp
 *
 * \brief Domain types and forward evaluation of SINRs, rates, energy
 *  efficiency and constraint feasibility for a multi-cell NOMA network in
 *  which every cell hosts one backscatter sensor tag.
 *
 * Each cell k has a source transmitting a superposition of two signals with
 * total power P_k, split by the power allocation coefficients (PACs) of the
 * near (SIC-capable) device and the far device. The tag reflects a fraction
 * Phi_k of the incident source signal towards both devices. All powers are
 * linear watts; rates are in bits/s/Hz.
 */

#ifndef BSNOMA_MODEL_HPP
#define BSNOMA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsnoma {

/// Converts a power level in dBm into watts.
inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

/// Global scalar parameters of the network.
struct SystemParams
{
    double noise_variance = 1e-4;     ///< sigma^2 [W]
    double sic_error = 0.1;           ///< residual SIC error beta, in [0,1]
    double circuit_power = 0.1;       ///< p_c [W]
    double p_max = dbm_to_watt(32.0); ///< per-source power budget [W]
    double r_min = 0.0;               ///< per-device rate floor [bits/s/Hz]
    double path_loss_exp = 3.0;       ///< path-loss exponent
    std::size_t num_cells = 10;

    /// SINR threshold 2^{r_min} - 1 implied by the rate floor.
    double sinr_threshold() const { return std::exp2(r_min) - 1.0; }

    void validate() const
    {
        if (!(noise_variance > 0.0))
            throw std::invalid_argument("noise_variance must be positive");
        if (!(circuit_power > 0.0))
            throw std::invalid_argument("circuit_power must be positive");
        if (!(p_max > 0.0))
            throw std::invalid_argument("p_max must be positive");
        if (!(sic_error >= 0.0 && sic_error <= 1.0))
            throw std::invalid_argument("sic_error must lie in [0,1]");
        if (!(r_min >= 0.0))
            throw std::invalid_argument("r_min must be nonnegative");
        if (num_cells < 1)
            throw std::invalid_argument("num_cells must be at least 1");
    }
};

enum class Role
{
    near,
    far
};

/// Squared channel gains of one cell.
struct CellGains
{
    double near = 0.0;     ///< source -> near device
    double far = 0.0;      ///< source -> far device
    double src_tag = 0.0;  ///< source -> tag
    double tag_near = 0.0; ///< tag -> near device
    double tag_far = 0.0;  ///< tag -> far device

    double cascade_near() const { return src_tag * tag_near; }
    double cascade_far() const { return src_tag * tag_far; }
};

/**
 * All squared channel gains of one network draw.
 *
 * Cross gains are stored row-major by victim cell: entry
 * [victim * K + interferer] is the gain from the source of \c interferer to
 * the device of \c victim. Diagonal entries are unused and kept at zero.
 */
struct ChannelRealization
{
    std::vector<CellGains> cells;
    std::vector<double> cross_near;
    std::vector<double> cross_far;

    ChannelRealization() = default;

    explicit ChannelRealization(std::size_t num_cells)
        : cells(num_cells), cross_near(num_cells * num_cells, 0.0), cross_far(num_cells * num_cells, 0.0)
    {
    }

    std::size_t num_cells() const { return cells.size(); }

    double& cross(Role role, std::size_t interferer, std::size_t victim)
    {
        auto& m = role == Role::near ? cross_near : cross_far;
        return m.at(victim * num_cells() + interferer);
    }

    double cross(Role role, std::size_t interferer, std::size_t victim) const
    {
        const auto& m = role == Role::near ? cross_near : cross_far;
        return m.at(victim * num_cells() + interferer);
    }

    /// Zeroes every tag gain; the resulting network is pure NOMA.
    ChannelRealization without_tags() const
    {
        ChannelRealization out = *this;
        for (auto& c : out.cells)
        {
            c.src_tag = 0.0;
            c.tag_near = 0.0;
            c.tag_far = 0.0;
        }
        return out;
    }
};

/// Decision variables of one cell.
struct CellAllocation
{
    double power = 0.0;
    double pac_near = 0.0;
    double pac_far = 0.0;
    double reflection = 0.0;
};

struct AllocationState
{
    std::vector<CellAllocation> cells;

    std::size_t num_cells() const { return cells.size(); }
};

struct CellSinrs
{
    double near_self = 0.0;
    double far = 0.0;
    double near_decodes_far = 0.0;
    double interference_near = 0.0;
    double interference_far = 0.0;
};

struct Sinrs
{
    std::vector<CellSinrs> cells;
};

struct CellRates
{
    double near = 0.0;
    double far = 0.0;
    double sum = 0.0;
    double power = 0.0; ///< transmitted power P_k(pac sum)
    double ee = 0.0;    ///< R_k / (P_k(pac sum) + p_c)
};

struct Metrics
{
    std::vector<CellRates> cells;
    double ee_total = 0.0;    ///< sum over cells of R_k / (P_k(pac sum) + p_c)
    double sum_rate = 0.0;    ///< sum over cells of R_k
    double total_power = 0.0; ///< sum over cells of P_k(pac sum)
};

namespace detail {

inline void check_cell(std::size_t cell, std::size_t num_cells)
{
    if (cell >= num_cells)
        throw std::out_of_range("cell index " + std::to_string(cell) + " out of range (" + std::to_string(num_cells) +
                                " cells)");
}

} // namespace detail

/// Received co-channel power at the \p role device of \p cell from every other source.
inline double intercell_interference(const AllocationState& alloc, const ChannelRealization& chan, std::size_t cell,
                                     Role role)
{
    const std::size_t k_cells = chan.num_cells();
    detail::check_cell(cell, k_cells);
    if (alloc.num_cells() != k_cells)
        throw std::invalid_argument("allocation and channel disagree on the number of cells");
    double sum = 0.0;
    for (std::size_t other = 0; other < k_cells; ++other)
    {
        if (other != cell)
            sum += alloc.cells[other].power * chan.cross(role, other, cell);
    }
    return sum;
}

/// SINR of the near device decoding its own signal after imperfect SIC.
inline double sinr_near_self(const AllocationState& alloc, const ChannelRealization& chan, const SystemParams& params,
                             std::size_t cell)
{
    const double delta = intercell_interference(alloc, chan, cell, Role::near);
    const auto& a = alloc.cells[cell];
    const auto& g = chan.cells[cell];
    const double signal = a.power * a.pac_near * (g.near + a.reflection * g.cascade_near());
    const double residual = a.power * a.pac_far * g.near * params.sic_error;
    return signal / (residual + delta + params.noise_variance);
}

/// SINR of the far device, which treats the near device's signal as noise.
inline double sinr_far(const AllocationState& alloc, const ChannelRealization& chan, const SystemParams& params,
                       std::size_t cell)
{
    const double delta = intercell_interference(alloc, chan, cell, Role::far);
    const auto& a = alloc.cells[cell];
    const auto& g = chan.cells[cell];
    const double effective = g.far + a.reflection * g.cascade_far();
    return a.power * a.pac_far * effective / (a.power * a.pac_near * effective + delta + params.noise_variance);
}

/**
 * SINR at the near device while it decodes (and then cancels) the far
 * device's signal. Diagnostic only; the optimizer never uses it.
 *
 * The expression is kept literally as it is usually stated: the reflected
 * term in the numerator carries no power factor and the interference is the
 * one seen by the far device.
 */
inline double sinr_near_decodes_far(const AllocationState& alloc, const ChannelRealization& chan,
                                    const SystemParams& params, std::size_t cell)
{
    const double delta = intercell_interference(alloc, chan, cell, Role::far);
    const auto& a = alloc.cells[cell];
    const auto& g = chan.cells[cell];
    const double reflected = a.reflection * g.cascade_near();
    const double num = a.power * a.pac_far * g.near + reflected;
    if (num == 0.0)
        return 0.0;
    return num / (a.power * a.pac_near * (g.near + reflected) + delta + params.noise_variance);
}

inline Sinrs sinrs(const AllocationState& alloc, const ChannelRealization& chan, const SystemParams& params)
{
    Sinrs out;
    out.cells.resize(chan.num_cells());
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        auto& s = out.cells[k];
        s.near_self = sinr_near_self(alloc, chan, params, k);
        s.far = sinr_far(alloc, chan, params, k);
        s.near_decodes_far = sinr_near_decodes_far(alloc, chan, params, k);
        s.interference_near = intercell_interference(alloc, chan, k, Role::near);
        s.interference_far = intercell_interference(alloc, chan, k, Role::far);
    }
    return out;
}

/// Power drawn by one cell: transmitted power plus circuit power.
inline double cell_consumed_power(const CellAllocation& a, const SystemParams& params)
{
    return a.power * (a.pac_near + a.pac_far) + params.circuit_power;
}

inline Metrics metrics(const AllocationState& alloc, const ChannelRealization& chan, const SystemParams& params)
{
    Metrics m;
    m.cells.resize(chan.num_cells());
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        auto& r = m.cells[k];
        r.near = std::log2(1.0 + sinr_near_self(alloc, chan, params, k));
        r.far = std::log2(1.0 + sinr_far(alloc, chan, params, k));
        r.sum = r.near + r.far;
        const auto& a = alloc.cells[k];
        r.power = a.power * (a.pac_near + a.pac_far);
        r.ee = r.sum / cell_consumed_power(a, params);
        m.ee_total += r.ee;
        m.sum_rate += r.sum;
        m.total_power += r.power;
    }
    return m;
}

/// Per-cell outcome of the six constraints of the EE problem.
struct CellFeasibility
{
    bool c1 = true; ///< near-device rate floor
    bool c2 = true; ///< far-device rate floor
    bool c3 = true; ///< SIC ordering P*pac_near <= P*pac_far
    bool c4 = true; ///< 0 <= P <= P_max
    bool c5 = true; ///< PACs nonnegative, summing to at most one
    bool c6 = true; ///< 0 <= Phi <= 1
    /// Rate-floor shortfall normalized by the required interference-plus-noise term (0 when met).
    double c1_violation = 0.0;
    double c2_violation = 0.0;

    bool all() const { return c1 && c2 && c3 && c4 && c5 && c6; }
    bool structural() const { return c3 && c4 && c5 && c6; }
};

struct FeasibilityReport
{
    std::vector<CellFeasibility> cells;

    bool all() const
    {
        for (const auto& c : cells)
            if (!c.all())
                return false;
        return true;
    }

    bool structural() const
    {
        for (const auto& c : cells)
            if (!c.structural())
                return false;
        return true;
    }

    double worst_rate_violation() const
    {
        double w = 0.0;
        for (const auto& c : cells)
            w = std::max({w, c.c1_violation, c.c2_violation});
        return w;
    }
};

/// Relative shortfall of lhs >= rhs, i.e. max(0, rhs - lhs) / rhs.
inline double relative_shortfall(double lhs, double rhs)
{
    if (lhs >= rhs || rhs <= 0.0)
        return 0.0;
    return (rhs - lhs) / rhs;
}

/**
 * Evaluates every constraint literally. C1/C2 are accepted when their
 * relative shortfall is at most \p rate_tolerance; C3-C6 are exact.
 */
inline FeasibilityReport check_feasibility(const AllocationState& alloc, const ChannelRealization& chan,
                                           const SystemParams& params, double rate_tolerance = 1e-6)
{
    FeasibilityReport rep;
    rep.cells.resize(chan.num_cells());
    const double threshold = params.sinr_threshold();
    for (std::size_t k = 0; k < chan.num_cells(); ++k)
    {
        const auto& a = alloc.cells[k];
        const auto& g = chan.cells[k];
        auto& f = rep.cells[k];
        const double delta_near = intercell_interference(alloc, chan, k, Role::near);
        const double delta_far = intercell_interference(alloc, chan, k, Role::far);
        const double eff_near = g.near + a.reflection * g.cascade_near();
        const double eff_far = g.far + a.reflection * g.cascade_far();

        const double c1_lhs = a.power * a.pac_near * eff_near;
        const double c1_rhs =
            threshold * (g.near * a.power * a.pac_far * params.sic_error + delta_near + params.noise_variance);
        const double c2_lhs = a.power * a.pac_far * eff_far;
        const double c2_rhs = threshold * (a.power * a.pac_near * eff_far + delta_far + params.noise_variance);
        f.c1_violation = relative_shortfall(c1_lhs, c1_rhs);
        f.c2_violation = relative_shortfall(c2_lhs, c2_rhs);
        f.c1 = f.c1_violation <= rate_tolerance;
        f.c2 = f.c2_violation <= rate_tolerance;
        f.c3 = a.power * a.pac_near <= a.power * a.pac_far;
        f.c4 = a.power >= 0.0 && a.power <= params.p_max;
        f.c5 = a.pac_near >= 0.0 && a.pac_far >= 0.0 && a.pac_near + a.pac_far <= 1.0;
        f.c6 = a.reflection >= 0.0 && a.reflection <= 1.0;
    }
    return rep;
}

} // namespace bsnoma

#endif // BSNOMA_MODEL_HPP
