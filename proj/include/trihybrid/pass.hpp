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

namespace trihybrid::pass
{

/// Pinching antennas on P waveguides. Guide p carries pinches at
/// positions[p] with coupling coefficients deltas[p].
struct WaveguideLayout
{
    std::vector<std::vector<double>> positions;
    std::vector<std::vector<double>> deltas;
    double beta_g = 0.0;

    std::size_t num_guides() const { return positions.size(); }

    void validate() const
    {
        detail::require(!positions.empty() && positions.size() == deltas.size(), Errc::invalid_geometry, "pass",
                        "need positions and deltas for every waveguide");
        for (std::size_t p = 0; p < positions.size(); ++p)
        {
            detail::require(!positions[p].empty() && positions[p].size() == deltas[p].size(), Errc::invalid_geometry,
                            "pass", "guide " + std::to_string(p) + " needs one delta per pinch");
            for (std::size_t m = 1; m < positions[p].size(); ++m)
                detail::require(positions[p][m] > positions[p][m - 1], Errc::invalid_geometry, "pass",
                                "pinch positions must increase along each guide");
        }
    }
};

inline void check_deltas(const std::vector<double> &deltas)
{
    for (double d : deltas)
        if (!(d > 0.0 && d < 1.0))
            detail::fail(Errc::invalid_argument, "pass", "coupling coefficient " + std::to_string(d) + " outside (0, 1)");
}

/// alpha_m = delta_m prod_{i<m} sqrt(1 - delta_i^2).
inline std::vector<double> amplitudes(const std::vector<double> &deltas)
{
    check_deltas(deltas);
    std::vector<double> a;
    a.reserve(deltas.size());
    double carried = 1.0;
    for (double d : deltas)
    {
        a.push_back(d * carried);
        carried *= std::sqrt(1.0 - d * d);
    }
    return a;
}

/// [f_p]_m = alpha_m e^{-j beta_g x_{p,m}}.
inline CVec pinch_weights(const WaveguideLayout &layout, std::size_t p)
{
    layout.validate();
    detail::require(p < layout.num_guides(), Errc::invalid_argument, "pass", "guide index out of range");
    const auto a = amplitudes(layout.deltas[p]);
    CVec f(Eigen::Index(a.size()));
    for (std::size_t m = 0; m < a.size(); ++m)
        f(Eigen::Index(m)) = a[m] * std::polar(1.0, -layout.beta_g * layout.positions[p][m]);
    return f;
}

/// Block-diagonal F_ra with one column per guide.
inline CMat pass_precoder(const WaveguideLayout &layout)
{
    std::vector<CVec> cols;
    for (std::size_t p = 0; p < layout.num_guides(); ++p)
        cols.push_back(pinch_weights(layout, p));
    return blkdiag_columns(cols);
}

/// eta_p = 1 - prod(1 - delta_m^2), the fraction of guide power radiated.
inline double guide_efficiency(const std::vector<double> &deltas)
{
    check_deltas(deltas);
    double remain = 1.0;
    for (double d : deltas)
        remain *= 1.0 - d * d;
    return 1.0 - remain;
}

/// Tr(F^H diag(eta_p) F); independent of the pinch positions.
inline double radiated_power(const WaveguideLayout &layout, const CMat &F_ana, const CMat &F_dig)
{
    layout.validate();
    require_product(F_ana, F_dig, "pass", "F_ana * F_dig");
    const CMat F = F_ana * F_dig;
    if (F.rows() != Eigen::Index(layout.num_guides()))
        detail::fail(Errc::dimension_mismatch, "pass", "hybrid precoder needs one row per waveguide");
    RVec eta(F.rows());
    for (Eigen::Index p = 0; p < eta.size(); ++p)
        eta(p) = guide_efficiency(layout.deltas[std::size_t(p)]);
    return (F.adjoint() * eta.cast<cd>().asDiagonal() * F).trace().real();
}

/// True when M pinches can each radiate amplitude alpha.
inline bool equal_power_feasible(std::size_t M, double alpha)
{
    return M >= 1 && alpha > 0.0 && alpha < 1.0 && double(M - 1) * alpha * alpha < 1.0 &&
           double(M) * alpha * alpha <= 1.0 + 1e-12;
}

/// delta_m = alpha / sqrt(1 - (m-1) alpha^2): every pinch radiates alpha. The
/// last coefficient is clamped below 1 when M alpha^2 reaches 1.
inline std::vector<double> equal_power_deltas(std::size_t M, double alpha)
{
    if (!equal_power_feasible(M, alpha))
        detail::fail(Errc::infeasible, "pass", "equal-power amplitude " + std::to_string(alpha) +
                                                   " is infeasible for " + std::to_string(M) + " pinches");
    std::vector<double> d;
    for (std::size_t m = 0; m < M; ++m)
        d.push_back(std::min(alpha / std::sqrt(1.0 - double(m) * alpha * alpha), 1.0 - 1e-12));
    return d;
}

/// PASS front end: H_eff,k = H_k F_ra with H_k over all pinches, guide-major.
class FrontEndModel
{
public:
    using config_type = WaveguideLayout;

    explicit FrontEndModel(ChannelTensor H) : H_(std::move(H)) { H_.validate("pass"); }

    std::size_t num_subcarriers() const { return H_.size(); }
    CMat propagation_channel(std::size_t k) const { return H_[k]; }

    bool is_feasible(const config_type &c) const
    {
        try
        {
            c.validate();
            Eigen::Index n = 0;
            for (const auto &d : c.deltas)
            {
                check_deltas(d);
                n += Eigen::Index(d.size());
            }
            return n == H_[0].cols();
        }
        catch (const Error &)
        {
            return false;
        }
    }

    CMat ra_precoder(const config_type &c, std::size_t) const { return pass_precoder(c); }
    CMat effective_channel(const config_type &c, std::size_t k) const
    {
        const CMat F = pass_precoder(c);
        require_product(H_[k], F, "pass", "H * F_ra");
        return H_[k] * F;
    }

    double radiated_power(const config_type &c, std::size_t, const CMat &F_ana, const CMat &F_dig) const
    {
        return pass::radiated_power(c, F_ana, F_dig);
    }

private:
    ChannelTensor H_;
};

} // namespace trihybrid::pass
