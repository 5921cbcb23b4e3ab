// SPDX-License-Identifier: Apache-2.0
//
// trihybrid: simulation library for tri-hybrid MIMO transmit architectures
// Copyright (C) 2026 The trihybrid authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "core.hpp"
#include "dma.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "linalg.hpp"
#include "optimizers.hpp"
#include "parasitic.hpp"
#include "pass.hpp"
#include "pixel_fas.hpp"
#include "polarization.hpp"
#include "ref_metric.hpp"
#include "sim_stack.hpp"
#include "special_functions.hpp"
#include "wire.hpp"

#include <string_view>

namespace trihybrid
{

inline constexpr std::string_view version = "1.0.0";

} // namespace trihybrid
