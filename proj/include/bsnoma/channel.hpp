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
 * \file bsnoma/channel.hpp
 *
 * \brief Network geometry and seeded Rayleigh-fading channel draws.
 *
 * Sources sit on a square grid. Inside each cell the near device lies at
 * distance d_near from its source along the south-west diagonal and the far
 * device at d_far along the north-east diagonal; the tag-to-device distances
 * are taken from the layout directly. Squared gains are |CN(0,1)|^2 d^-rho,
 * i.e. unit-mean exponential fading times distance path loss.
 *
 * Random numbers come from std::mt19937_64 (whose output sequence is fixed
 * by the standard) and exponential variates are produced by inverting the
 * CDF on 53-bit uniforms, so a seed reproduces the same realization on any
 * conforming toolchain.
 */

#ifndef BSNOMA_CHANNEL_HPP
#define BSNOMA_CHANNEL_HPP

#include "bsnoma/model.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bsnoma {

inline constexpr const char* rng_algorithm_name = "mt19937_64+inverse-cdf-exponential";

struct RngSeed
{
    std::uint64_t value = 0;

    /// Seed of the \p index-th independent trial derived from this one.
    RngSeed derive(std::uint64_t index) const { return RngSeed{value ^ index}; }
};

struct LayoutConfig
{
    double inter_site_spacing = 20.0; ///< [m]
    double d_near = 2.0;              ///< source -> near device [m]
    double d_far = 4.0;               ///< source -> far device [m]
    double d_src_tag = 2.0;           ///< source -> tag [m]
    double d_tag_near = 2.0;          ///< tag -> near device [m]
    double d_tag_far = 4.0;           ///< tag -> far device [m]

    void validate() const
    {
        for (double d : {inter_site_spacing, d_near, d_far, d_src_tag, d_tag_near, d_tag_far})
            if (!(d > 0.0))
                throw std::invalid_argument("layout distances and spacing must be positive");
        if (!(d_near < d_far))
            throw std::invalid_argument("near device must be closer to its source than the far device");
    }
};

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct CellGeometry
{
    Point source;
    Point near_device;
    Point far_device;
    double d_near = 0.0;
    double d_far = 0.0;
    double d_src_tag = 0.0;
    double d_tag_near = 0.0;
    double d_tag_far = 0.0;
};

struct Topology
{
    std::vector<CellGeometry> cells;
    /// [victim * K + interferer] distance from a foreign source to the victim's device.
    std::vector<double> cross_near;
    std::vector<double> cross_far;

    std::size_t num_cells() const { return cells.size(); }

    /// Number of populated ordered (interferer, victim) pairs for one device role.
    std::size_t num_cross_pairs() const
    {
        std::size_t n = 0;
        for (std::size_t i = 0; i < cross_near.size(); ++i)
            n += cross_near[i] > 0.0 ? 1 : 0;
        return n;
    }
};

inline Topology build_topology(const SystemParams& params, const LayoutConfig& layout)
{
    params.validate();
    layout.validate();
    const std::size_t k_cells = params.num_cells;
    const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(k_cells))));
    const double diag = std::sqrt(0.5);

    Topology topo;
    topo.cells.resize(k_cells);
    for (std::size_t k = 0; k < k_cells; ++k)
    {
        auto& c = topo.cells[k];
        c.source = {static_cast<double>(k % cols) * layout.inter_site_spacing,
                    static_cast<double>(k / cols) * layout.inter_site_spacing};
        c.near_device = {c.source.x - diag * layout.d_near, c.source.y - diag * layout.d_near};
        c.far_device = {c.source.x + diag * layout.d_far, c.source.y + diag * layout.d_far};
        c.d_near = layout.d_near;
        c.d_far = layout.d_far;
        c.d_src_tag = layout.d_src_tag;
        c.d_tag_near = layout.d_tag_near;
        c.d_tag_far = layout.d_tag_far;
    }
    topo.cross_near.assign(k_cells * k_cells, 0.0);
    topo.cross_far.assign(k_cells * k_cells, 0.0);
    for (std::size_t victim = 0; victim < k_cells; ++victim)
        for (std::size_t src = 0; src < k_cells; ++src)
        {
            if (src == victim)
                continue;
            topo.cross_near[victim * k_cells + src] = distance(topo.cells[src].source, topo.cells[victim].near_device);
            topo.cross_far[victim * k_cells + src] = distance(topo.cells[src].source, topo.cells[victim].far_device);
        }
    return topo;
}

/// Unit-mean exponential variate, equal in law to |CN(0,1)|^2.
template <class Engine>
double unit_exponential(Engine& eng)
{
    const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
    return -std::log1p(-u);
}

/**
 * Draws one channel realization. Within each cell the device with the
 * larger direct gain is labelled "near" afterwards, so SIC ordering holds by
 * construction; all gains of a swapped cell move with their device.
 */
inline ChannelRealization sample_channels(const Topology& topo, const SystemParams& params, RngSeed seed)
{
    const std::size_t k_cells = topo.num_cells();
    const double rho = params.path_loss_exp;
    std::mt19937_64 eng(seed.value);
    auto gain = [&](double d) { return unit_exponential(eng) * std::pow(d, -rho); };

    ChannelRealization chan(k_cells);
    for (std::size_t k = 0; k < k_cells; ++k)
    {
        const auto& geo = topo.cells[k];
        auto& g = chan.cells[k];
        g.near = gain(geo.d_near);
        g.far = gain(geo.d_far);
        g.src_tag = gain(geo.d_src_tag);
        g.tag_near = gain(geo.d_tag_near);
        g.tag_far = gain(geo.d_tag_far);
    }
    for (std::size_t victim = 0; victim < k_cells; ++victim)
        for (std::size_t src = 0; src < k_cells; ++src)
            if (src != victim)
                chan.cross(Role::near, src, victim) = gain(topo.cross_near[victim * k_cells + src]);
    for (std::size_t victim = 0; victim < k_cells; ++victim)
        for (std::size_t src = 0; src < k_cells; ++src)
            if (src != victim)
                chan.cross(Role::far, src, victim) = gain(topo.cross_far[victim * k_cells + src]);

    for (std::size_t k = 0; k < k_cells; ++k)
    {
        auto& g = chan.cells[k];
        if (g.far <= g.near)
            continue;
        std::swap(g.near, g.far);
        std::swap(g.tag_near, g.tag_far);
        for (std::size_t src = 0; src < k_cells; ++src)
            std::swap(chan.cross(Role::near, src, k), chan.cross(Role::far, src, k));
    }
    return chan;
}

} // namespace bsnoma

#endif // BSNOMA_CHANNEL_HPP
