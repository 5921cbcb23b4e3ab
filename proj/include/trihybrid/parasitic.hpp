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

namespace trihybrid::parasitic
{

/// Impedance blocks of one subcarrier. Z_m couples actives into parasitics.
struct ImpedanceBlocks
{
    CMat Z_RA; // N_R x N_A
    CMat Z_RP; // N_R x N_P
    CMat Z_P;  // N_P x N_P
    CMat Z_A;  // N_A x N_A
    CMat Z_m;  // N_P x N_A

    Eigen::Index num_active() const { return Z_A.rows(); }
    Eigen::Index num_parasitic() const { return Z_P.rows(); }

    void validate() const
    {
        const auto na = Z_A.rows(), np = Z_P.rows(), nr = Z_RA.rows();
        const bool ok = Z_A.cols() == na && Z_P.cols() == np && Z_RA.cols() == na && Z_RP.rows() == nr &&
                        Z_RP.cols() == np && Z_m.rows() == np && Z_m.cols() == na;
        if (!ok)
            detail::fail(Errc::dimension_mismatch, "parasitic", "impedance blocks are not conformable");
    }
};

using ImpedanceSet = std::vector<ImpedanceBlocks>;

/// Diagonal load impedances on the parasitic ports.
struct ParasiticLoads
{
    std::vector<cd> Z_R;

    void validate() const
    {
        for (const auto &z : Z_R)
            if (!(z.real() >= 0.0) || !std::isfinite(z.imag()))
                detail::fail(Errc::invalid_argument, "parasitic", "load real parts must be >= 0 (passive)");
    }
};

/// F_ra = (Z_P + Z_R)^{-1}.
inline CMat parasitic_precoder(const CMat &Z_P, const ParasiticLoads &loads)
{
    loads.validate();
    if (Z_P.rows() != Z_P.cols() || Z_P.rows() != Eigen::Index(loads.Z_R.size()))
        detail::fail(Errc::dimension_mismatch, "parasitic", "Z_P is " + dims(Z_P) + " but " +
                                                                std::to_string(loads.Z_R.size()) + " loads given");
    CMat M = Z_P;
    for (std::size_t i = 0; i < loads.Z_R.size(); ++i)
        M(Eigen::Index(i), Eigen::Index(i)) += loads.Z_R[i];
    return checked_inverse(M, "parasitic");
}

/// H_eff = Z_RA - Z_RP F_ra Z_m.
inline CMat effective_channel(const ImpedanceBlocks &imp, const CMat &F_ra)
{
    imp.validate();
    if (F_ra.rows() != imp.num_parasitic() || F_ra.cols() != imp.num_parasitic())
        detail::fail(Errc::dimension_mismatch, "parasitic", "F_ra is " + dims(F_ra));
    if (imp.num_parasitic() == 0)
        return imp.Z_RA;
    return imp.Z_RA - imp.Z_RP * F_ra * imp.Z_m;
}

/// Effective impedance seen by the active currents once the parasitic
/// currents i_P = -F_ra Z_m i_A are substituted.
inline CMat effective_impedance(const ImpedanceBlocks &imp, const CMat &F_ra)
{
    imp.validate();
    const CMat ReA = real_part(imp.Z_A);
    if (imp.num_parasitic() == 0)
        return ReA;
    const CMat ReMt = real_part(imp.Z_m.transpose());
    const CMat ReM = real_part(imp.Z_m);
    const CMat ReP = real_part(imp.Z_P);
    const CMat FZ = F_ra * imp.Z_m;
    return ReA - ReMt * FZ - FZ.adjoint() * ReM + FZ.adjoint() * ReP * FZ;
}

/// Tr(F^H Z_eff F) with F = F_ana F_dig; raises on clearly negative power.
inline double radiated_power(const ImpedanceBlocks &imp, const CMat &F_ra, const CMat &F_ana, const CMat &F_dig)
{
    require_product(F_ana, F_dig, "parasitic", "F_ana * F_dig");
    const CMat F = F_ana * F_dig;
    if (F.rows() != imp.num_active())
        detail::fail(Errc::dimension_mismatch, "parasitic", "hybrid precoder has " + std::to_string(F.rows()) +
                                                                " rows for " + std::to_string(imp.num_active()) +
                                                                " active antennas");
    const double p = hermitian_form_trace(F, effective_impedance(imp, F_ra));
    if (p < -1e-9)
        detail::fail(Errc::passivity_violation, "parasitic", "radiated power " + std::to_string(p) + " < 0");
    return p;
}

/// Load-current weight 1/(R + jX) for each reactance; lies on a circle
/// through the origin with center 1/(2R).
inline std::vector<cd> scalar_weight_locus(double R, const std::vector<double> &reactances)
{
    detail::require(R > 0.0, Errc::invalid_argument, "parasitic", "load resistance must be > 0");
    std::vector<cd> w;
    w.reserve(reactances.size());
    for (double X : reactances)
        w.push_back(1.0 / cd(R, X));
    return w;
}

/// Split a reciprocal (N_A + N_P) array impedance, actives first, together
/// with a receive coupling matrix over all elements, into blocks.
inline ImpedanceBlocks partition(const CMat &Z_full, const CMat &Z_R_all, Eigen::Index n_active)
{
    const auto n = Z_full.rows();
    if (Z_full.cols() != n || Z_R_all.cols() != n || n_active > n || n_active < 0)
        detail::fail(Errc::dimension_mismatch, "parasitic", "cannot partition " + dims(Z_full));
    const auto np = n - n_active;
    ImpedanceBlocks b;
    b.Z_A = Z_full.topLeftCorner(n_active, n_active);
    b.Z_P = Z_full.bottomRightCorner(np, np);
    b.Z_m = Z_full.bottomLeftCorner(np, n_active);
    b.Z_RA = Z_R_all.leftCols(n_active);
    b.Z_RP = Z_R_all.rightCols(np);
    return b;
}

/// Random passive reciprocal array impedance: real part Re(G G^H), PSD, plus
/// a random symmetric reactance.
template <class Rng>
CMat synthesize_passive_impedance(Eigen::Index n, Rng &rng, double scale = 50.0)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    CMat G(n, n);
    RMat X(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            G(i, j) = cd(nd(rng), nd(rng));
            X(i, j) = nd(rng);
        }
    const RMat R = (G * G.adjoint()).real() / double(n);
    const RMat Xs = 0.5 * (X + X.transpose());
    CMat Z(n, n);
    Z.real() = scale * R;
    Z.imag() = scale * Xs;
    return Z;
}

/// Mutual impedance of isotropic point radiators with radiation resistance
/// R_r: Z_ij = R_r (sin kd + j cos kd)/(kd), self term R_r + j X_self. The
/// real part is the (PSD) radiation coupling of the array.
inline CMat isotropic_array_impedance(const ArrayDescriptor &array, double R_r = 50.0, double X_self = 0.0)
{
    detail::require(array.wavelength > 0.0, Errc::invalid_geometry, "parasitic", "wavelength must be positive");
    const auto n = Eigen::Index(array.size());
    const double k = 2.0 * pi / array.wavelength;
    CMat Z(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
        {
            if (i == j)
            {
                Z(i, j) = cd(R_r, X_self);
                continue;
            }
            const auto &a = array.positions[std::size_t(i)];
            const auto &b = array.positions[std::size_t(j)];
            const double d = std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                                       (a[2] - b[2]) * (a[2] - b[2]));
            if (!(d > 0.0))
                detail::fail(Errc::invalid_geometry, "parasitic", "coincident elements");
            const double kd = k * d;
            Z(i, j) = R_r * cd(std::sin(kd), std::cos(kd)) / kd;
        }
    return Z;
}

/// Load configuration: reactance per parasitic port at a fixed loss resistance.
struct LoadConfig
{
    std::vector<double> reactance;
};

/// Parasitic front end over a per-subcarrier impedance set.
class FrontEndModel
{
public:
    using config_type = LoadConfig;

    FrontEndModel(ImpedanceSet imp, double loss_resistance = 1.0, double x_min = -500.0, double x_max = 500.0)
        : imp_(std::move(imp)), r_loss_(loss_resistance), x_min_(x_min), x_max_(x_max)
    {
        detail::require(!imp_.empty(), Errc::invalid_argument, "parasitic", "impedance set is empty");
        detail::require(r_loss_ >= 0.0 && x_min_ <= x_max_, Errc::invalid_argument, "parasitic",
                        "invalid load feasibility interval");
        for (const auto &b : imp_)
            b.validate();
    }

    std::size_t num_subcarriers() const { return imp_.size(); }
    const ImpedanceBlocks &blocks(std::size_t k) const { return imp_.at(k); }
    double loss_resistance() const { return r_loss_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }

    ParasiticLoads loads(const config_type &cfg) const
    {
        ParasiticLoads l;
        for (double x : cfg.reactance)
            l.Z_R.emplace_back(r_loss_, x);
        return l;
    }

    bool is_feasible(const config_type &cfg) const
    {
        if (Eigen::Index(cfg.reactance.size()) != imp_[0].num_parasitic())
            return false;
        for (double x : cfg.reactance)
            if (!(x >= x_min_ && x <= x_max_))
                return false;
        return true;
    }

    CMat ra_precoder(const config_type &cfg, std::size_t k) const { return parasitic_precoder(imp_.at(k).Z_P, loads(cfg)); }

    CMat effective_channel(const config_type &cfg, std::size_t k) const
    {
        return parasitic::effective_channel(imp_.at(k), ra_precoder(cfg, k));
    }

    double radiated_power(const config_type &cfg, std::size_t k, const CMat &F_ana, const CMat &F_dig) const
    {
        return parasitic::radiated_power(imp_.at(k), ra_precoder(cfg, k), F_ana, F_dig);
    }

private:
    ImpedanceSet imp_;
    double r_loss_, x_min_, x_max_;
};

} // namespace trihybrid::parasitic
