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

namespace trihybrid::sim
{

/// Per-atom transmission and reflection of one metasurface layer.
struct MetaLayer
{
    std::vector<cd> T;
    std::vector<cd> R;

    std::size_t size() const { return T.size(); }

    /// Lossless reflectionless layer, T_n = e^{j theta_n}.
    static MetaLayer ideal(const std::vector<double> &theta)
    {
        MetaLayer l;
        for (double t : theta)
        {
            l.T.push_back(std::polar(1.0, t));
            l.R.emplace_back(0.0, 0.0);
        }
        return l;
    }
};

/// Layer T-parameters, per atom [[T - R^2/T, R/T], [-R/T, 1/T]], arranged as
/// four diagonal N_m x N_m blocks.
inline CMat layer_tparam(const MetaLayer &layer)
{
    const auto n = Eigen::Index(layer.size());
    detail::require(layer.R.size() == layer.T.size(), Errc::dimension_mismatch, "sim",
                    "transmission and reflection lists differ in length");
    CMat G = CMat::Zero(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const cd T = layer.T[std::size_t(i)], R = layer.R[std::size_t(i)];
        if (T == cd(0.0, 0.0))
            detail::fail(Errc::opaque_atom, "sim", "atom " + std::to_string(i) + " has zero transmission");
        G(i, i) = T - R * R / T;
        G(i, n + i) = R / T;
        G(n + i, i) = -R / T;
        G(n + i, n + i) = 1.0 / T;
    }
    return G;
}

/// Interlayer T-parameters of a reflectionless reciprocal medium whose
/// forward field transfer is W: blkdiag(W^T, W^{-1}).
inline CMat interlayer_tparam(const CMat &W)
{
    detail::require(W.rows() == W.cols(), Errc::dimension_mismatch, "sim", "interlayer transfer must be square");
    return blkdiag(W.transpose(), checked_inverse(W, "sim", Errc::non_transmissive_stack));
}

/// Square grid of atoms per layer, layers stacked along z.
struct SimGeometry
{
    std::size_t atoms_per_side = 2;
    double atom_spacing = 0.5;  // meters
    double layer_spacing = 1.0; // meters
    double wavelength = 1.0;    // meters
    double atom_area = -1.0;    // m^2; negative means atom_spacing^2

    std::size_t num_atoms() const { return atoms_per_side * atoms_per_side; }
    double area() const { return atom_area > 0.0 ? atom_area : atom_spacing * atom_spacing; }

    std::array<double, 2> atom_xy(std::size_t n) const
    {
        return {double(n % atoms_per_side) * atom_spacing, double(n / atoms_per_side) * atom_spacing};
    }
};

/// Rayleigh-Sommerfeld transfer between parallel layers,
/// W = (A cos chi / d)(1/(2 pi d) - j/lambda) e^{j 2 pi d / lambda}.
inline CMat rs_kernel(const SimGeometry &g)
{
    detail::require(g.layer_spacing > 0.0, Errc::invalid_geometry, "sim", "layer spacing must be > 0");
    detail::require(g.wavelength > 0.0 && g.atom_spacing > 0.0, Errc::invalid_geometry, "sim",
                    "wavelength and atom spacing must be > 0");
    const auto n = Eigen::Index(g.num_atoms());
    CMat W(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            const auto a = g.atom_xy(std::size_t(i)), b = g.atom_xy(std::size_t(j));
            const double dx = a[0] - b[0], dy = a[1] - b[1];
            const double d = std::sqrt(dx * dx + dy * dy + g.layer_spacing * g.layer_spacing);
            const double cos_chi = g.layer_spacing / d;
            W(i, j) = (g.area() * cos_chi / d) * cd(1.0 / (2.0 * pi * d), -1.0 / g.wavelength) *
                      std::polar(1.0, 2.0 * pi * d / g.wavelength);
        }
    return W;
}

enum class PropagationMode
{
    ideal,
    rs
};

/// Interlayer T-parameters: ideal mode embeds the supplied unitary W, rs
/// mode embeds the Rayleigh-Sommerfeld kernel of the geometry.
inline CMat rs_propagation(const SimGeometry &g, PropagationMode mode, const CMat &W_ideal = CMat())
{
    detail::require(g.layer_spacing > 0.0, Errc::invalid_geometry, "sim", "layer spacing must be > 0");
    if (mode == PropagationMode::ideal)
    {
        const CMat W = W_ideal.size() ? W_ideal : CMat::Identity(Eigen::Index(g.num_atoms()), Eigen::Index(g.num_atoms()));
        return interlayer_tparam(W);
    }
    return interlayer_tparam(rs_kernel(g));
}

/// Layers, interlayer T-parameters (one fewer than layers) and feed channel.
struct SimStack
{
    std::vector<MetaLayer> layers;
    std::vector<CMat> P;
    CMat H_IT; // N_m x M
};

/// T_I = G1 P1 G2 ... P_{L-1} G_L and Psi = (T_I,22)^{-1}.
inline CMat cascade(const SimStack &s)
{
    detail::require(!s.layers.empty(), Errc::invalid_argument, "sim", "stack needs at least one layer");
    detail::require(s.P.size() + 1 == s.layers.size(), Errc::dimension_mismatch, "sim",
                    "need exactly one interlayer matrix between consecutive layers");
    const auto n = Eigen::Index(s.layers[0].size());
    CMat T = layer_tparam(s.layers[0]);
    for (std::size_t l = 1; l < s.layers.size(); ++l)
    {
        if (Eigen::Index(s.layers[l].size()) != n || s.P[l - 1].rows() != 2 * n || s.P[l - 1].cols() != 2 * n)
            detail::fail(Errc::dimension_mismatch, "sim", "layer " + std::to_string(l) + " does not match atom count");
        T = T * s.P[l - 1] * layer_tparam(s.layers[l]);
    }
    return checked_inverse(T.bottomRightCorner(n, n), "sim", Errc::non_transmissive_stack);
}

/// H_RI,k Psi H_IT.
inline CMat effective_channel(const CMat &H_RI, const CMat &Psi, const CMat &H_IT)
{
    require_product(H_RI, Psi, "sim", "H_RI * Psi");
    require_product(Psi, H_IT, "sim", "Psi * H_IT");
    return H_RI * Psi * H_IT;
}

/// ||Psi H_IT F_ana F_dig||_F^2.
inline double radiated_power(const CMat &Psi, const CMat &H_IT, const CMat &F_ana, const CMat &F_dig)
{
    require_product(Psi, H_IT, "sim", "Psi * H_IT");
    require_product(H_IT, F_ana, "sim", "H_IT * F_ana");
    require_product(F_ana, F_dig, "sim", "F_ana * F_dig");
    return frob2(Psi * H_IT * F_ana * F_dig);
}

/// Phase configuration of an ideal stack: theta[l][n].
struct SimConfig
{
    std::vector<std::vector<double>> theta;
};

/// SIM front end. The configuration holds phases only, so one Psi serves
/// every subcarrier.
class FrontEndModel
{
public:
    using config_type = SimConfig;

    FrontEndModel(ChannelTensor H_RI, CMat H_IT, CMat interlayer_P)
        : H_RI_(std::move(H_RI)), H_IT_(std::move(H_IT)), P_(std::move(interlayer_P))
    {
        H_RI_.validate("sim");
        detail::require(H_RI_[0].cols() == H_IT_.rows(), Errc::dimension_mismatch, "sim",
                        "H_RI columns differ from H_IT rows");
        detail::require(P_.rows() == 2 * H_IT_.rows() && P_.cols() == P_.rows(), Errc::dimension_mismatch, "sim",
                        "interlayer matrix size differs from 2 N_m");
    }

    std::size_t num_subcarriers() const { return H_RI_.size(); }
    std::size_t num_atoms() const { return std::size_t(H_IT_.rows()); }
    const CMat &feed_channel() const { return H_IT_; }
    CMat propagation_channel(std::size_t k) const { return H_RI_[k]; }

    SimStack stack(const config_type &c) const
    {
        SimStack s;
        for (const auto &th : c.theta)
            s.layers.push_back(MetaLayer::ideal(th));
        s.P.assign(c.theta.empty() ? 0 : c.theta.size() - 1, P_);
        s.H_IT = H_IT_;
        return s;
    }

    /// Psi; identity when the stack has no layers.
    CMat psi(const config_type &c) const
    {
        if (c.theta.empty())
            return CMat::Identity(H_IT_.rows(), H_IT_.rows());
        return cascade(stack(c));
    }

    bool is_feasible(const config_type &c) const
    {
        for (const auto &th : c.theta)
        {
            if (th.size() != num_atoms())
                return false;
            for (double t : th)
                if (!(t >= 0.0 && t < 2.0 * pi))
                    return false;
        }
        return true;
    }

    CMat ra_precoder(const config_type &c, std::size_t) const { return psi(c); }
    CMat effective_channel(const config_type &c, std::size_t k) const
    {
        return sim::effective_channel(H_RI_[k], psi(c), H_IT_);
    }

    double radiated_power(const config_type &c, std::size_t, const CMat &F_ana, const CMat &F_dig) const
    {
        return sim::radiated_power(psi(c), H_IT_, F_ana, F_dig);
    }

private:
    ChannelTensor H_RI_;
    CMat H_IT_;
    CMat P_;
};

} // namespace trihybrid::sim
