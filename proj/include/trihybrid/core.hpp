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

#include "linalg.hpp"

#include <array>
#include <concepts>
#include <cstdint>
#include <random>
#include <variant>

namespace trihybrid
{

// ---------------------------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------------------------

struct PathParams
{
    cd complex_gain{1.0, 0.0};
    double delay = 0.0; // seconds, >= 0
    double aod_az = 0.0, aod_el = 0.0;
    double aoa_az = 0.0, aoa_el = 0.0;
};

struct MultipathParams
{
    std::vector<PathParams> paths;
    double carrier_freq = 28e9; // Hz
    double bandwidth = 100e6;   // Hz
    std::size_t num_subcarriers = 1;
    bool random_gains = false; // replace complex_gain by CN(0, 1/P) draws
};

struct ArrayDescriptor
{
    std::vector<std::array<double, 3>> positions; // meters
    double wavelength = 1.0;                       // meters

    std::size_t size() const { return positions.size(); }

    /// Uniform planar array in the y-z plane, ny columns along y and nz rows along z.
    static ArrayDescriptor upa(std::size_t ny, std::size_t nz, double spacing, double wavelength)
    {
        ArrayDescriptor a;
        a.wavelength = wavelength;
        for (std::size_t iz = 0; iz < nz; ++iz)
            for (std::size_t iy = 0; iy < ny; ++iy)
                a.positions.push_back({0.0, double(iy) * spacing, double(iz) * spacing});
        return a;
    }

    /// Uniform linear array along y.
    static ArrayDescriptor ula(std::size_t n, double spacing, double wavelength) { return upa(n, 1, spacing, wavelength); }
};

/// Per-subcarrier stack of equally sized complex matrices.
struct ChannelTensor
{
    std::vector<CMat> H;
    std::vector<double> freqs;

    std::size_t size() const { return H.size(); }
    const CMat &operator[](std::size_t k) const { return H[k]; }

    void validate(std::string_view module = "core") const
    {
        detail::require(!H.empty(), Errc::invalid_argument, module, "channel tensor is empty");
        for (const auto &Hk : H)
        {
            if (Hk.rows() != H[0].rows() || Hk.cols() != H[0].cols())
                detail::fail(Errc::dimension_mismatch, module, "subcarrier matrices differ in shape");
            require_finite(Hk, module, "channel");
        }
    }
};

/// Digital and analog precoders per subcarrier plus one antenna configuration.
template <class Config = std::monostate>
struct PrecoderSet
{
    std::vector<CMat> F_dig;
    std::vector<CMat> F_ana;
    Config antenna_config{};

    std::size_t size() const { return F_dig.size(); }

    /// Combined hybrid precoder F_ana F_dig at subcarrier k.
    CMat hybrid(std::size_t k) const { return F_ana[k] * F_dig[k]; }

    void validate(std::string_view module = "core") const
    {
        detail::require(F_dig.size() == F_ana.size() && !F_dig.empty(), Errc::dimension_mismatch, module,
                        "precoder set needs matching nonempty digital and analog sequences");
        const auto ns = F_dig[0].cols();
        for (std::size_t k = 0; k < F_dig.size(); ++k)
        {
            require_product(F_ana[k], F_dig[k], module, "F_ana * F_dig");
            detail::require(F_dig[k].cols() == ns, Errc::dimension_mismatch, module,
                            "stream count varies across subcarriers");
        }
    }
};

struct NoiseModel
{
    double variance = 1.0; // Watts

    explicit NoiseModel(double v = 1.0) : variance(v)
    {
        detail::require(v > 0.0 && std::isfinite(v), Errc::invalid_argument, "core", "noise variance must be > 0");
    }
};

/// Architecture-specific front end. The configuration type carries the
/// reconfigurable-antenna state; every map is a pure function of it.
template <class FE>
concept FrontEnd = requires(const FE &fe, const typename FE::config_type &cfg, std::size_t k, const CMat &A) {
    typename FE::config_type;
    { fe.num_subcarriers() } -> std::convertible_to<std::size_t>;
    { fe.effective_channel(cfg, k) } -> std::convertible_to<CMat>;
    { fe.radiated_power(cfg, k, A, A) } -> std::convertible_to<double>;
    { fe.is_feasible(cfg) } -> std::convertible_to<bool>;
    { fe.ra_precoder(cfg, k) } -> std::convertible_to<CMat>;
};

/// Front ends whose effective channel factors as H_k F_ra; needed by the
/// matching-based optimizer.
template <class FE>
concept SeparableFrontEnd = FrontEnd<FE> && requires(const FE &fe, std::size_t k) {
    { fe.propagation_channel(k) } -> std::convertible_to<CMat>;
};

// ---------------------------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------------------------

/// Frequency of subcarrier k on a uniform grid centered at the carrier.
inline double subcarrier_frequency(const MultipathParams &p, std::size_t k)
{
    const double K = double(p.num_subcarriers);
    return p.carrier_freq + (double(k) - K / 2.0) * p.bandwidth / K;
}

inline std::array<double, 3> direction(double az, double el)
{
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

/// Plane-wave array response; entry n is exp(-j 2 pi / lambda <p_n, u>).
inline CVec steering_vector(const ArrayDescriptor &array, double az, double el)
{
    if (!(array.wavelength > 0.0) || !std::isfinite(array.wavelength))
        detail::fail(Errc::invalid_geometry, "core", "wavelength must be positive");
    detail::require(array.size() > 0, Errc::invalid_geometry, "core", "array has no elements");
    const auto u = direction(az, el);
    const double k = 2.0 * pi / array.wavelength;
    CVec a(static_cast<Eigen::Index>(array.size()));
    for (std::size_t n = 0; n < array.size(); ++n)
    {
        const auto &p = array.positions[n];
        if (!std::isfinite(p[0]) || !std::isfinite(p[1]) || !std::isfinite(p[2]))
            detail::fail(Errc::invalid_geometry, "core", "element position is not finite");
        const double proj = p[0] * u[0] + p[1] * u[1] + p[2] * u[2];
        a(Eigen::Index(n)) = std::polar(1.0, -k * proj);
    }
    return a;
}

/// Geometric multipath channel; H_k = sum_p g_p a_rx a_tx^H exp(-j 2 pi f_k tau_p).
inline ChannelTensor generate_channel(const MultipathParams &params, const ArrayDescriptor &tx,
                                      const ArrayDescriptor &rx, std::uint64_t seed = 0)
{
    detail::require(!params.paths.empty(), Errc::invalid_argument, "core", "path list is empty");
    detail::require(params.num_subcarriers >= 1, Errc::invalid_argument, "core", "need at least one subcarrier");
    for (const auto &p : params.paths)
        detail::require(p.delay >= 0.0 && std::isfinite(p.delay), Errc::invalid_argument, "core",
                        "path delays must be finite and >= 0");

    std::vector<cd> gains;
    gains.reserve(params.paths.size());
    if (params.random_gains)
    {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / double(params.paths.size())));
        for (std::size_t i = 0; i < params.paths.size(); ++i)
        {
            const double re = nd(rng);
            const double im = nd(rng);
            gains.emplace_back(re, im);
        }
    }
    else
        for (const auto &p : params.paths)
            gains.push_back(p.complex_gain);

    std::vector<CVec> a_tx, a_rx;
    for (const auto &p : params.paths)
    {
        a_tx.push_back(steering_vector(tx, p.aod_az, p.aod_el));
        a_rx.push_back(steering_vector(rx, p.aoa_az, p.aoa_el));
    }

    ChannelTensor out;
    for (std::size_t k = 0; k < params.num_subcarriers; ++k)
    {
        const double fk = subcarrier_frequency(params, k);
        CMat Hk = CMat::Zero(Eigen::Index(rx.size()), Eigen::Index(tx.size()));
        for (std::size_t i = 0; i < params.paths.size(); ++i)
            Hk += gains[i] * std::polar(1.0, -2.0 * pi * fk * params.paths[i].delay) * a_rx[i] * a_tx[i].adjoint();
        out.H.push_back(std::move(Hk));
        out.freqs.push_back(fk);
    }
    return out;
}

/// log2 det(I + A) for Hermitian positive semidefinite A via Cholesky.
inline double log2_det_identity_plus(const CMat &A, std::string_view module = "core")
{
    require_finite(A, module, "Gram matrix");
    CMat M = hermitian_part(A);
    M.diagonal().array() += 1.0;
    Eigen::LLT<CMat> llt(M);
    if (llt.info() != Eigen::Success)
        detail::fail(Errc::non_finite, module, "I + Gram term is not positive definite");
    const CVec d = llt.matrixLLT().diagonal();
    double s = 0.0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        s += 2.0 * std::log2(d(i).real());
    return std::max(0.0, s);
}

/// Single-subcarrier rate for an effective channel and combined precoder.
inline double rate_bits(const CMat &H_eff, const CMat &F, double noise_var, std::string_view module = "core")
{
    require_product(H_eff, F, module, "H_eff * F");
    const CMat HF = H_eff * F;
    return log2_det_identity_plus((HF * HF.adjoint()) / noise_var, module);
}

/// Subcarrier-averaged mutual information in bits/s/Hz.
template <class Config>
double mutual_information(const ChannelTensor &H_eff, const PrecoderSet<Config> &pre, const NoiseModel &noise)
{
    H_eff.validate();
    pre.validate();
    if (H_eff.size() != pre.size())
        detail::fail(Errc::dimension_mismatch, "core", "channel and precoders differ in subcarrier count");
    double acc = 0.0;
    for (std::size_t k = 0; k < H_eff.size(); ++k)
        acc += rate_bits(H_eff[k], pre.hybrid(k), noise.variance);
    return acc / double(H_eff.size());
}

/// Sum over subcarriers of ||F_opt,k - F_ra,k F_ana,k F_dig,k||_F^2.
template <FrontEnd FE>
double frobenius_matching(const ChannelTensor &F_opt, const PrecoderSet<typename FE::config_type> &pre,
                          const FE &front_end)
{
    pre.validate();
    detail::require(F_opt.size() == pre.size(), Errc::dimension_mismatch, "core",
                    "optimal precoder and precoder set differ in subcarrier count");
    double acc = 0.0;
    for (std::size_t k = 0; k < pre.size(); ++k)
    {
        const CMat Fra = front_end.ra_precoder(pre.antenna_config, k);
        const CMat H = pre.hybrid(k);
        require_product(Fra, H, "core", "F_ra * F_ana F_dig");
        const CMat P = Fra * H;
        if (P.rows() != F_opt[k].rows() || P.cols() != F_opt[k].cols())
            detail::fail(Errc::dimension_mismatch, "core", "product " + dims(P) + " vs F_opt " + dims(F_opt[k]));
        acc += frob2(F_opt[k] - P);
    }
    return acc;
}

/// Sum-power constraint, inclusive at the boundary.
inline bool check_power_budget(const std::vector<double> &powers, double p_max)
{
    double s = 0.0;
    for (double p : powers)
    {
        detail::require(std::isfinite(p), Errc::non_finite, "core", "power is not finite");
        if (p < 0.0)
            detail::fail(Errc::internal, "core", "negative per-subcarrier power " + std::to_string(p));
        s += p;
    }
    // Relative slack absorbs summation-order round-off at the boundary.
    return s <= p_max + 1e-12 * std::abs(p_max);
}

} // namespace trihybrid
