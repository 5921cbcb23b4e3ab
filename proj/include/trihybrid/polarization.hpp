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

namespace trihybrid::polarization
{

/// Polarization angle theta, phase offset psi, reconfiguration efficiency gamma.
struct PolarizationState
{
    double theta = 0.0;
    double psi = 0.0;
    double gamma = 1.0;
};

inline void check_state(const PolarizationState &s)
{
    if (!(s.gamma >= 0.0 && s.gamma <= 1.0))
        detail::fail(Errc::invalid_argument, "polarization", "gamma outside [0, 1]");
    if (!std::isfinite(s.theta) || !std::isfinite(s.psi))
        detail::fail(Errc::non_finite, "polarization", "angles must be finite");
}

/// p = sqrt(gamma) [cos theta, sin theta e^{j psi}]^T.
inline CVec polarization_vector(const PolarizationState &s)
{
    check_state(s);
    CVec p(2);
    const double a = std::sqrt(s.gamma);
    p(0) = a * std::cos(s.theta);
    p(1) = a * std::sin(s.theta) * std::polar(1.0, s.psi);
    return p;
}

/// 2N x N block-diagonal precoder of per-antenna polarization vectors.
inline CMat build_precoder(const std::vector<PolarizationState> &states)
{
    std::vector<CVec> cols;
    for (const auto &s : states)
        cols.push_back(polarization_vector(s));
    return blkdiag_columns(cols);
}

/// W_ra^H H_up F_ra.
inline CMat effective_channel(const CMat &H_up, const CMat &W_ra, const CMat &F_ra)
{
    if (H_up.rows() % 2 || H_up.cols() % 2)
        detail::fail(Errc::dimension_mismatch, "polarization", "unpolarized channel must have 2x2 blocks");
    if (W_ra.rows() != H_up.rows() || F_ra.rows() != H_up.cols())
        detail::fail(Errc::dimension_mismatch, "polarization",
                     "W_ra " + dims(W_ra) + ", H_up " + dims(H_up) + ", F_ra " + dims(F_ra) + " do not chain");
    return W_ra.adjoint() * H_up * F_ra;
}

enum class PowerMode
{
    per_antenna,
    uniform
};

/// Tr(F^H Gamma F) with Gamma = diag(gamma_n); uniform mode uses states[0].gamma.
inline double radiated_power(const std::vector<PolarizationState> &states, const CMat &F_ana, const CMat &F_dig,
                             PowerMode mode = PowerMode::per_antenna)
{
    require_product(F_ana, F_dig, "polarization", "F_ana * F_dig");
    detail::require(!states.empty(), Errc::invalid_argument, "polarization", "no states");
    for (const auto &s : states)
        check_state(s);
    const CMat F = F_ana * F_dig;
    if (mode == PowerMode::uniform)
        return states[0].gamma * frob2(F);
    if (F.rows() != Eigen::Index(states.size()))
        detail::fail(Errc::dimension_mismatch, "polarization", "hybrid precoder needs one row per antenna");
    RVec g(F.rows());
    for (Eigen::Index n = 0; n < g.size(); ++n)
        g(n) = states[std::size_t(n)].gamma;
    return (F.adjoint() * g.cast<cd>().asDiagonal() * F).trace().real();
}

/// Best transmit state of a polarization grid search. theta spans [0, pi)
/// since theta + pi only flips the sign of p.
struct GridResult
{
    PolarizationState tx;
    double value = 0.0;
    std::size_t theta_index = 0, psi_index = 0;
};

inline double grid_theta(std::size_t i, std::size_t res) { return pi * double(i) / double(res); }
inline double grid_psi(std::size_t i, std::size_t res) { return 2.0 * pi * double(i) / double(res); }

/// Search over transmit states for a 2x2 block and fixed receive vector;
/// first maximum in (theta, psi) scan order wins.
inline GridResult grid_search(const CMat &H_block, const CVec &p_rx, double gamma = 1.0, std::size_t res = 32)
{
    detail::require(H_block.rows() == 2 && H_block.cols() == 2 && p_rx.size() == 2, Errc::dimension_mismatch,
                    "polarization", "grid search works on a 2x2 block");
    detail::require(res >= 1, Errc::invalid_argument, "polarization", "grid resolution must be >= 1");
    GridResult best;
    best.value = -1.0;
    for (std::size_t i = 0; i < res; ++i)
        for (std::size_t j = 0; j < res; ++j)
        {
            PolarizationState s{grid_theta(i, res), grid_psi(j, res), gamma};
            const double v = std::abs(p_rx.dot(H_block * polarization_vector(s)));
            if (v > best.value)
                best = {s, v, i, j};
        }
    return best;
}

/// Polarization front end on an unpolarized channel with a fixed receive
/// combiner. The configuration is one transmit state per antenna.
class FrontEndModel
{
public:
    using config_type = std::vector<PolarizationState>;

    FrontEndModel(ChannelTensor H_up, CMat W_ra, PowerMode mode = PowerMode::per_antenna)
        : H_(std::move(H_up)), W_(std::move(W_ra)), mode_(mode)
    {
        H_.validate("polarization");
        detail::require(H_[0].rows() == W_.rows(), Errc::dimension_mismatch, "polarization",
                        "combiner rows differ from channel rows");
    }

    std::size_t num_subcarriers() const { return H_.size(); }
    std::size_t num_tx() const { return std::size_t(H_[0].cols() / 2); }
    CMat propagation_channel(std::size_t k) const { return W_.adjoint() * H_[k]; }

    bool is_feasible(const config_type &c) const
    {
        if (c.size() != num_tx())
            return false;
        for (const auto &s : c)
            if (!(s.gamma >= 0.0 && s.gamma <= 1.0) || !std::isfinite(s.theta) || !std::isfinite(s.psi))
                return false;
        return true;
    }

    CMat ra_precoder(const config_type &c, std::size_t) const { return build_precoder(c); }
    CMat effective_channel(const config_type &c, std::size_t k) const
    {
        return polarization::effective_channel(H_[k], W_, build_precoder(c));
    }

    double radiated_power(const config_type &c, std::size_t, const CMat &F_ana, const CMat &F_dig) const
    {
        return polarization::radiated_power(c, F_ana, F_dig, mode_);
    }

private:
    ChannelTensor H_;
    CMat W_;
    PowerMode mode_;
};

} // namespace trihybrid::polarization
