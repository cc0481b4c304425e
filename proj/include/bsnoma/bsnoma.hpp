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

#ifndef BSNOMA_BSNOMA_HPP
#define BSNOMA_BSNOMA_HPP

#include "bsnoma/model.hpp"
#include "bsnoma/channel.hpp"
#include "bsnoma/polyroots.hpp"
#include "bsnoma/solver.hpp"
#include "bsnoma/oracle.hpp"
#include "bsnoma/experiments.hpp"

#endif // BSNOMA_BSNOMA_HPP
