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

#include "errors.hpp"

#include <cmath>
#include <complex>

namespace trihybrid::special
{

inline double j0(double x) { return std::cyl_bessel_j(0.0, x); }

inline double y0(double x)
{
    if (!(x > 0.0))
        detail::fail(Errc::invalid_argument, "wire", "Y0 needs a positive argument");
    return std::cyl_neumann(0.0, x);
}

/// Beyond this argument I0 K0 switches to its asymptotic series.
inline constexpr double i0k0_switch = 30.0;

/// I0(x) K0(x) for x > 0. Large arguments use
/// 1/(2x) (1 + 1/(8x^2) + 27/(128x^4) + 1125/(1024x^6) + 385875/(32768x^8)),
/// which avoids the overflow of I0 and underflow of K0.
inline double i0k0(double x)
{
    if (!(x > 0.0))
        detail::fail(Errc::invalid_argument, "wire", "I0 K0 needs a positive argument");
    if (x < i0k0_switch)
        return std::cyl_bessel_i(0.0, x) * std::cyl_bessel_k(0.0, x);
    const double u = 1.0 / (x * x);
    return 0.5 / x * (1.0 + u * (1.0 / 8.0 + u * (27.0 / 128.0 + u * (1125.0 / 1024.0 + u * 385875.0 / 32768.0))));
}

/// J0(x) H0^(2)(x) = J0 (J0 - j Y0) for real x > 0.
inline std::complex<double> j0h02(double x)
{
    const double j = j0(x);
    return {j * j, -j * y0(x)};
}

} // namespace trihybrid::special
