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

#include "test_util.hpp"

#include <bsnoma/oracle.hpp>

#include <gtest/gtest.h>

using namespace bsnoma;
using bsnoma::testing::default_draw;

namespace {

SystemParams single(double r_min = 0.0)
{
    SystemParams p;
    p.num_cells = 1;
    p.r_min = r_min;
    return p;
}

} // namespace

TEST(GridSearch, UnreachableRateFloorIsInfeasible)
{
    const auto p = single(50.0);
    const auto res = grid_search(default_draw(p, 1), p, GridSpec{10, 10, 5}, Mode::wbs);
    EXPECT_FALSE(res.feasible);
    EXPECT_EQ(res.ee, 0.0);
    EXPECT_EQ(res.evaluated, 10u * 10u * 5u);
}

TEST(GridSearch, NoTagModeFixesReflectionAtZero)
{
    const auto p = single();
    const auto res = grid_search(default_draw(p, 2), p, GridSpec{12, 9, 7}, Mode::nbs);
    ASSERT_TRUE(res.feasible);
    EXPECT_EQ(res.evaluated, 12u * 9u);
    EXPECT_EQ(res.best.cells[0].reflection, 0.0);
}

TEST(GridSearch, NestedRefinementNeverWorse)
{
    // A grid with 2n-1 points contains every point of the n-point grid.
    const auto p = single(0.5);
    for (std::uint64_t seed : {3u, 4u, 5u})
    {
        const auto chan = default_draw(p, seed);
        const auto coarse = grid_search(chan, p, GridSpec{11, 11, 6}, Mode::wbs);
        const auto fine = grid_search(chan, p, GridSpec{21, 21, 11}, Mode::wbs);
        ASSERT_TRUE(coarse.feasible);
        EXPECT_GE(fine.ee, coarse.ee);
    }
}

TEST(GridSearch, BestPointIsFeasibleAndScoredByModel)
{
    const auto p = single(1.0);
    const auto chan = default_draw(p, 6);
    const auto res = grid_search(chan, p, GridSpec{30, 30, 10}, Mode::wbs);
    ASSERT_TRUE(res.feasible);
    EXPECT_TRUE(check_feasibility(res.best, chan, p, 1e-12).all());
    const auto m = metrics(res.best, chan, p);
    EXPECT_NEAR(m.ee_total, res.ee, 1e-12 * res.ee);
    EXPECT_DOUBLE_EQ(res.best.cells[0].pac_near + res.best.cells[0].pac_far, 1.0);
}

TEST(GridSearch, TwoCellJointEnumeration)
{
    SystemParams p;
    p.num_cells = 2;
    const auto res = grid_search(default_draw(p, 7), p, GridSpec{5, 4, 3}, Mode::wbs);
    EXPECT_EQ(res.evaluated, 60u * 60u);
    ASSERT_TRUE(res.feasible);
    EXPECT_EQ(res.best.cells.size(), 2u);
}

TEST(GridSearch, RejectsDegenerateAndOversizedGrids)
{
    const auto p = single();
    const auto chan = default_draw(p, 1);
    EXPECT_THROW(grid_search(chan, p, GridSpec{1, 10, 10}, Mode::wbs), std::invalid_argument);
    EXPECT_THROW(grid_search(chan, p, GridSpec{10, 10, 1}, Mode::wbs), std::invalid_argument);
    SystemParams p3;
    p3.num_cells = 3;
    EXPECT_THROW(grid_search(default_draw(p3, 1), p3, GridSpec{200, 200, 100}, Mode::wbs), std::invalid_argument);
    EXPECT_THROW(grid_search(chan, p3, GridSpec{}, Mode::wbs), std::invalid_argument);
}
