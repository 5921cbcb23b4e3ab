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

#include <stdexcept>
#include <string>
#include <string_view>

namespace trihybrid
{

/// Failure categories raised by the model and optimizer layers.
enum class Errc
{
    invalid_argument,
    invalid_geometry,
    dimension_mismatch,
    non_finite,
    singular_configuration,
    passivity_violation,
    opaque_atom,
    non_transmissive_stack,
    singular_harmonic,
    convergence,
    rank_deficient,
    search_space_too_large,
    infeasible,
    undefined_baseline,
    linearity_violation,
    specification,
    parse,
    internal
};

inline std::string_view errc_name(Errc c)
{
    switch (c)
    {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_geometry: return "invalid-geometry";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::non_finite: return "non-finite";
    case Errc::singular_configuration: return "singular-configuration";
    case Errc::passivity_violation: return "passivity-violation";
    case Errc::opaque_atom: return "opaque-atom";
    case Errc::non_transmissive_stack: return "non-transmissive-stack";
    case Errc::singular_harmonic: return "singular-harmonic";
    case Errc::convergence: return "convergence";
    case Errc::rank_deficient: return "rank-deficient";
    case Errc::search_space_too_large: return "search-space-too-large";
    case Errc::infeasible: return "infeasible";
    case Errc::undefined_baseline: return "undefined-baseline";
    case Errc::linearity_violation: return "linearity-violation";
    case Errc::specification: return "specification";
    case Errc::parse: return "parse";
    case Errc::internal: return "internal";
    }
    return "unknown";
}

/// Exception carrying an error category and the module that raised it.
class Error : public std::runtime_error
{
public:
    Error(Errc code, std::string_view module, const std::string &what)
        : std::runtime_error(std::string(module) + ": " + what + " [" + std::string(errc_name(code)) + "]"),
          code_(code), module_(module)
    {
    }

    Errc code() const noexcept { return code_; }
    const std::string &module() const noexcept { return module_; }

private:
    Errc code_;
    std::string module_;
};

namespace detail
{
[[noreturn]] inline void fail(Errc code, std::string_view module, const std::string &what)
{
    throw Error(code, module, what);
}

inline void require(bool cond, Errc code, std::string_view module, const std::string &what)
{
    if (!cond)
        fail(code, module, what);
}
} // namespace detail

} // namespace trihybrid
