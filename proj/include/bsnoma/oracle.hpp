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
 * \file bsnoma/oracle.hpp
 *
 * \brief Exhaustive grid search over (P, pac_near, Phi) used as ground truth
 *  for the closed-form solvers on small networks.
 */

#ifndef BSNOMA_ORACLE_HPP
#define BSNOMA_ORACLE_HPP

#include "bsnoma/model.hpp"
#include "bsnoma/solver.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bsnoma {

struct GridSpec
{
    std::size_t n_power = 200;
    std::size_t n_pac = 200;
    std::size_t n_phi = 100;

    void validate() const
    {
        if (n_power < 2 || n_pac < 2 || n_phi < 2)
            throw std::invalid_argument("every grid resolution must be at least 2");
    }
};

struct OracleResult
{
    bool feasible = false;
    AllocationState best;
    double ee = 0.0;
    std::size_t evaluated = 0;
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

} // namespace detail

/**
 * Maximizes the total EE over the Cartesian grid P in [0, P_max],
 * pac_near in [pac_floor, 0.5] (pac_far = 1 - pac_near) and Phi in [0, 1]
 * (Phi = 0 only, for NBS), keeping only points that meet both rate floors
 * in every cell. Networks with more than one cell are enumerated jointly,
 * which is only practical for K = 2 with coarse grids.
 */
inline OracleResult grid_search(const ChannelRealization& chan, const SystemParams& params, const GridSpec& grid,
                                Mode mode)
{
    params.validate();
    grid.validate();
    const std::size_t k_cells = chan.num_cells();
    if (k_cells != params.num_cells)
        throw std::invalid_argument("channel realization and parameters disagree on the number of cells");

    const auto powers = detail::linspace(0.0, params.p_max, grid.n_power);
    const auto pacs = detail::linspace(pac_floor, pac_ceiling, grid.n_pac);
    const auto phis = mode == Mode::wbs ? detail::linspace(0.0, 1.0, grid.n_phi) : std::vector<double>{0.0};
    const std::size_t per_cell = powers.size() * pacs.size() * phis.size();
    double total = 1.0;
    for (std::size_t k = 0; k < k_cells; ++k)
        total *= static_cast<double>(per_cell);
    if (total > 2e9)
        throw std::invalid_argument("grid too large for exhaustive search; use coarser grids or fewer cells");

    OracleResult res;
    AllocationState alloc;
    alloc.cells.resize(k_cells);
    std::vector<std::size_t> idx(k_cells, 0);
    const double threshold = params.sinr_threshold();

    for (;;)
    {
        for (std::size_t k = 0; k < k_cells; ++k)
        {
            const std::size_t i = idx[k];
            auto& c = alloc.cells[k];
            c.power = powers[i / (pacs.size() * phis.size())];
            c.pac_near = pacs[(i / phis.size()) % pacs.size()];
            c.pac_far = 1.0 - c.pac_near;
            c.reflection = phis[i % phis.size()];
        }
        ++res.evaluated;

        double ee = 0.0;
        bool ok = true;
        for (std::size_t k = 0; k < k_cells && ok; ++k)
        {
            const double g_near = sinr_near_self(alloc, chan, params, k);
            const double g_far = sinr_far(alloc, chan, params, k);
            if (threshold > 0.0 && (g_near < threshold || g_far < threshold))
                ok = false;
            ee += (std::log2(1.0 + g_near) + std::log2(1.0 + g_far)) / cell_consumed_power(alloc.cells[k], params);
        }
        if (ok && (!res.feasible || ee > res.ee))
        {
            res.feasible = true;
            res.ee = ee;
            res.best = alloc;
        }

        std::size_t k = 0;
        while (k < k_cells && ++idx[k] == per_cell)
            idx[k++] = 0;
        if (k == k_cells)
            break;
    }
    return res;
}

} // namespace bsnoma

#endif // BSNOMA_ORACLE_HPP
