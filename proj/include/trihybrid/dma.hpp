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

namespace trihybrid::dma
{

/// Waveguide-fed slot array. Every waveguide carries n_sub elements at the
/// same x positions; waveguides sit waveguide_spacing apart along y.
struct DmaGeometry
{
    std::size_t n_sub = 1;
    std::size_t n_ps = 1;
    std::size_t n_rf = 1;
    std::vector<double> x; // element positions along one waveguide, meters
    double beta_g = 0.0;   // rad/m
    double nu = 1.0;       // coupling strength in (0, 1]
    double wavelength = 1.0;
    double waveguide_spacing = 0.5;

    std::size_t num_guides() const { return n_ps * n_rf; }
    std::size_t num_elements() const { return n_sub * num_guides(); }

    void validate() const
    {
        const std::string_view m = "dma";
        detail::require(n_sub >= 1 && n_ps >= 1 && n_rf >= 1, Errc::invalid_geometry, m, "element counts must be >= 1");
        detail::require(x.size() == n_sub, Errc::invalid_geometry, m, "need one x position per element");
        for (std::size_t i = 1; i < x.size(); ++i)
            detail::require(x[i] > x[i - 1], Errc::invalid_geometry, m, "positions must increase along the waveguide");
        detail::require(nu > 0.0 && nu <= 1.0, Errc::invalid_geometry, m, "coupling strength must lie in (0, 1]");
        detail::require(wavelength > 0.0, Errc::invalid_geometry, m, "wavelength must be positive");
    }

    /// lambda/2 spaced elements and waveguides; beta_g defaults to free space.
    static DmaGeometry uniform(std::size_t n_sub, std::size_t n_guides, double wavelength, double nu,
                               double beta_g = -1.0)
    {
        DmaGeometry g;
        g.n_sub = n_sub;
        g.n_ps = 1;
        g.n_rf = n_guides;
        g.wavelength = wavelength;
        g.nu = nu;
        g.beta_g = beta_g < 0.0 ? 2.0 * pi / wavelength : beta_g;
        g.waveguide_spacing = wavelength / 2.0;
        for (std::size_t i = 0; i < n_sub; ++i)
            g.x.push_back(double(i) * wavelength / 2.0);
        return g;
    }
};

/// Tuning phase z_m in [-pi, pi) for every element, waveguide-major.
struct DmaConfig
{
    std::vector<double> z;
};

inline void check_config(const DmaGeometry &g, const DmaConfig &c)
{
    if (c.z.size() != g.num_elements())
        detail::fail(Errc::dimension_mismatch, "dma", "config has " + std::to_string(c.z.size()) + " phases for " +
                                                          std::to_string(g.num_elements()) + " elements");
}

/// 1 + e^{jz}, exactly zero in the off state z = +-pi.
inline cd one_plus_expj(double z) { return std::abs(z) == pi ? cd(0.0) : 1.0 + std::polar(1.0, z); }

/// Per-element forward-scattering factor 1 - (nu/2)(1 + e^{jz}).
inline cd decay_factor(double nu, double z) { return 1.0 - 0.5 * nu * one_plus_expj(z); }

/// Lorentzian radiating factor -(j/2)(1 + e^{jz}).
inline cd lorentzian(double z) { return -0.5 * J * one_plus_expj(z); }

/// Element weights of every waveguide, each multiplied by the decay of the
/// elements upstream on the same waveguide.
inline CVec element_weights(const DmaGeometry &g, const DmaConfig &c)
{
    g.validate();
    check_config(g, c);
    CVec f(Eigen::Index(g.num_elements()));
    for (std::size_t p = 0; p < g.num_guides(); ++p)
    {
        cd carried = 1.0;
        for (std::size_t n = 0; n < g.n_sub; ++n)
        {
            const std::size_t m = p * g.n_sub + n;
            f(Eigen::Index(m)) = lorentzian(c.z[m]) * carried;
            carried *= decay_factor(g.nu, c.z[m]);
        }
    }
    return f;
}

/// Block-diagonal F_ra, N_T x (N_ps N_rf); column p holds waveguide p.
inline CMat dma_weights(const DmaGeometry &g, const DmaConfig &c)
{
    const CVec f = element_weights(g, c);
    std::vector<CVec> cols;
    for (std::size_t p = 0; p < g.num_guides(); ++p)
        cols.push_back(f.segment(Eigen::Index(p * g.n_sub), Eigen::Index(g.n_sub)));
    return blkdiag_columns(cols);
}

/// Waveguide phase advance q_m = e^{-j beta_g x_m} for every element.
inline CVec phase_advance_vector(const DmaGeometry &g)
{
    g.validate();
    CVec q(Eigen::Index(g.num_elements()));
    for (std::size_t p = 0; p < g.num_guides(); ++p)
        for (std::size_t n = 0; n < g.n_sub; ++n)
            q(Eigen::Index(p * g.n_sub + n)) = std::polar(1.0, -g.beta_g * g.x[n]);
    return q;
}

/// Q = 1_{N_R} q, to be applied to the channel as H_k .* Q.
inline CMat phase_advance(const DmaGeometry &g, std::size_t n_rows)
{
    const CVec q = phase_advance_vector(g);
    return CVec::Ones(Eigen::Index(n_rows)) * q.transpose();
}

/// Field left in waveguide p after its last element.
inline cd residual_transmission(const DmaGeometry &g, const DmaConfig &c, std::size_t p)
{
    g.validate();
    check_config(g, c);
    detail::require(p < g.num_guides(), Errc::invalid_argument, "dma", "waveguide index out of range");
    cd s = 1.0;
    for (std::size_t n = 0; n < g.n_sub; ++n)
        s *= decay_factor(g.nu, c.z[p * g.n_sub + n]);
    return s;
}

/// sum over waveguides of P_in (1 - |S12_p|^2), P_in = ||F_ana F_dig||_F^2.
inline double radiated_power(const DmaGeometry &g, const DmaConfig &c, const CMat &F_ana, const CMat &F_dig)
{
    require_product(F_ana, F_dig, "dma", "F_ana * F_dig");
    const double p_in = frob2(F_ana * F_dig);
    double p = 0.0;
    for (std::size_t w = 0; w < g.num_guides(); ++w)
        p += p_in * (1.0 - std::norm(residual_transmission(g, c, w)));
    if (p < -1e-12)
        detail::fail(Errc::internal, "dma", "negative radiated power " + std::to_string(p));
    return std::max(0.0, p);
}

/// Coupling strength leaving target_residual of the power at the waveguide
/// end with every element at maximum scattering, bounded below by floor.
inline double calibrate_coupling(std::size_t n_sub, double target_residual = 0.1, double floor = 0.2)
{
    detail::require(n_sub >= 1, Errc::invalid_argument, "dma", "n_sub must be >= 1");
    detail::require(target_residual > 0.0 && target_residual <= 1.0, Errc::invalid_argument, "dma",
                    "target residual must lie in (0, 1]");
    const double root = 1.0 - std::pow(target_residual, 1.0 / (2.0 * double(n_sub)));
    return std::min(1.0, std::max(floor, root));
}

/// Co-phased array factor power toward (theta, phi), theta from the array
/// normal (z), for unit input power split evenly over the waveguides. The
/// waveguide phase shifters align the per-guide sums s_p, giving
/// G = (sum_p |s_p|)^2 / N_guides.
inline double realized_gain(const DmaGeometry &g, const DmaConfig &c, double theta = 0.0, double phi = 0.0)
{
    const CVec f = element_weights(g, c);
    const CVec q = phase_advance_vector(g);
    const double k = 2.0 * pi / g.wavelength;
    const double ux = std::sin(theta) * std::cos(phi), uy = std::sin(theta) * std::sin(phi);
    double acc = 0.0;
    for (std::size_t p = 0; p < g.num_guides(); ++p)
    {
        cd s = 0.0;
        const double y = double(p) * g.waveguide_spacing;
        for (std::size_t n = 0; n < g.n_sub; ++n)
        {
            const auto m = Eigen::Index(p * g.n_sub + n);
            s += std::polar(1.0, k * (g.x[n] * ux + y * uy)) * q(m) * f(m);
        }
        acc += std::abs(s);
    }
    return acc * acc / double(g.num_guides());
}

/// DMA front end: H_eff,k = (H_k .* Q) F_ra.
class FrontEndModel
{
public:
    using config_type = DmaConfig;

    FrontEndModel(ChannelTensor H, DmaGeometry g) : H_(std::move(H)), g_(std::move(g))
    {
        H_.validate("dma");
        g_.validate();
        detail::require(H_[0].cols() == Eigen::Index(g_.num_elements()), Errc::dimension_mismatch, "dma",
                        "channel columns differ from element count");
        Q_ = phase_advance(g_, std::size_t(H_[0].rows()));
    }

    std::size_t num_subcarriers() const { return H_.size(); }
    const DmaGeometry &geometry() const { return g_; }
    CMat propagation_channel(std::size_t k) const { return H_[k].cwiseProduct(Q_); }

    bool is_feasible(const config_type &c) const
    {
        if (c.z.size() != g_.num_elements())
            return false;
        for (double z : c.z)
            if (!(z >= -pi && z < pi))
                return false;
        return true;
    }

    CMat ra_precoder(const config_type &c, std::size_t) const { return dma_weights(g_, c); }
    CMat effective_channel(const config_type &c, std::size_t k) const { return propagation_channel(k) * ra_precoder(c, k); }

    double radiated_power(const config_type &c, std::size_t, const CMat &F_ana, const CMat &F_dig) const
    {
        return dma::radiated_power(g_, c, F_ana, F_dig);
    }

private:
    ChannelTensor H_;
    DmaGeometry g_;
    CMat Q_;
};

} // namespace trihybrid::dma
