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
#include "optimizers.hpp"
#include "parasitic.hpp"
#include "pass.hpp"
#include "pixel_fas.hpp"
#include "polarization.hpp"
#include "ref_metric.hpp"
#include "sim_stack.hpp"
#include "wire.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace trihybrid::exp
{

/// One evaluated sweep point and realization. Raw values are linear.
struct Record
{
    double se_bits_per_hz = 0.0;
    double p_radiated_w = 0.0;
    double p_consumed_w = 0.0;
    std::vector<std::pair<std::string, double>> extra;
};

/// SplitMix64 step; used to derive independent stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t root, std::uint64_t a, std::uint64_t b = 0)
{
    return splitmix64(splitmix64(splitmix64(root) ^ a) ^ b);
}

/// Unit-variance circularly symmetric Gaussian matrix.
inline CMat crandn(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng, double variance = 1.0)
{
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 * variance));
    CMat A(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
        {
            const double re = nd(rng);
            A(i, j) = cd(re, nd(rng));
        }
    return A;
}

/// Paths with uniform angles over the front half-space and uniform delays.
inline std::vector<PathParams> random_paths(std::size_t n, std::mt19937_64 &rng, double max_delay)
{
    std::uniform_real_distribution<double> az(-pi / 2.0, pi / 2.0), el(-pi / 6.0, pi / 6.0), del(0.0, max_delay);
    std::vector<PathParams> p(n);
    for (auto &x : p)
    {
        x.aod_az = az(rng);
        x.aod_el = el(rng);
        x.aoa_az = az(rng);
        x.aoa_el = el(rng);
        x.delay = del(rng);
    }
    return p;
}

/// Capacity of y = H x + n under Tr(Q) <= P with waterfilling over the
/// eigenchannels of H^H H.
inline double waterfilling_capacity(const CMat &H, double p_total, double noise_var)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(H.adjoint() * H, Eigen::EigenvaluesOnly);
    std::vector<double> g;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        g.push_back(std::max(0.0, es.eigenvalues()(i)));
    if (*std::max_element(g.begin(), g.end()) <= 0.0)
        return 0.0;
    const auto w = opt::waterfilling(g, p_total, noise_var);
    double c = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        c += std::log2(1.0 + w.power[i] * g[i] / noise_var);
    return c;
}

/// Capacity under Tr(F^H R F) <= P: whiten with R^{-1/2}.
inline double weighted_capacity(const CMat &H, const CMat &R, double p_total, double noise_var, std::string_view module)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(R));
    const RVec ev = es.eigenvalues();
    if (ev.minCoeff() <= 1e-12 * std::max(1.0, ev.maxCoeff()))
        detail::fail(Errc::passivity_violation, module, "power weighting matrix is not positive definite");
    const CMat Rm = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().cast<cd>().asDiagonal() *
                    es.eigenvectors().adjoint();
    return waterfilling_capacity(H * Rm, p_total, noise_var);
}

// ---------------------------------------------------------------------------------------------
// DMA: realized gain versus consumed power
// ---------------------------------------------------------------------------------------------

struct DmaParams
{
    std::size_t n_x = 8;
    std::size_t n_y = 2;
    double target_residual = 0.1;
    double nu_floor = 0.2;
    double p_tx = 1.0;
    double snr_ref = 0.01; // per unit gain, for the reported SE
    unsigned dac_bits = 8;
    opt::OptimizerBudget ga{};
    ref::PowerModel power{};
};

inline Record evaluate_dma(const DmaParams &p, std::uint64_t seed)
{
    const double nu = dma::calibrate_coupling(p.n_x, p.target_residual, p.nu_floor);
    const auto g = dma::DmaGeometry::uniform(p.n_x, p.n_y, 1.0, nu);
    auto budget = p.ga;
    budget.seed = seed;
    const auto ga = opt::genetic_dma(
        [&](const std::vector<double> &z) { return dma::realized_gain(g, dma::DmaConfig{z}); }, g.num_elements(),
        budget);
    const dma::DmaConfig cfg{ga.z};
    // Equal split of p_tx over the waveguides.
    const CMat F_ana = CMat::Identity(Eigen::Index(p.n_y), Eigen::Index(p.n_y));
    const CMat F_dig = CMat::Constant(Eigen::Index(p.n_y), 1, std::sqrt(p.p_tx / double(p.n_y)));
    Record r;
    const double gain = dma::realized_gain(g, cfg);
    r.se_bits_per_hz = std::log2(1.0 + p.p_tx * gain * p.snr_ref);
    r.p_radiated_w = dma::radiated_power(g, cfg, F_ana, F_dig);
    r.p_consumed_w = ref::power_consumption(p.power, {p.p_tx, p.n_y, p.dac_bits, p.n_x * p.n_y});
    r.extra = {{"gain", gain}, {"nu", nu}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// SIM: layers versus DAC resolution under quantized zero forcing
// ---------------------------------------------------------------------------------------------

struct SimParams
{
    std::size_t antennas = 4;
    std::size_t users = 4;
    std::size_t atoms_per_side = 4;
    std::size_t layers = 0;
    unsigned dac_bits = 1;
    double p_tx = 1.0;
    double noise_var = 0.1;
    std::string propagation = "dft"; // dft | rs
    double layer_spacing = 2.0;      // wavelengths, rs only
    double atom_spacing = 0.5;       // wavelengths, rs only
    opt::OptimizerBudget ascent{};
    ref::PowerModel power{};
};

/// Unitary DFT matrix.
inline CMat dft_matrix(Eigen::Index n)
{
    CMat W(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            W(i, j) = std::polar(1.0 / std::sqrt(double(n)), -2.0 * pi * double(i * j) / double(n));
    return W;
}

/// Optimized phases per (parameters without bits, channel seed); bits do not
/// enter the phase optimization, so every bit width shares one stack.
class SimPhaseCache
{
public:
    std::shared_ptr<const sim::SimConfig> find(const std::string &key) const
    {
        std::lock_guard<std::mutex> lock(m_);
        auto it = map_.find(key);
        return it == map_.end() ? nullptr : it->second;
    }
    void store(const std::string &key, sim::SimConfig c)
    {
        std::lock_guard<std::mutex> lock(m_);
        map_.emplace(key, std::make_shared<const sim::SimConfig>(std::move(c)));
    }

private:
    mutable std::mutex m_;
    std::map<std::string, std::shared_ptr<const sim::SimConfig>> map_;
};

/// Unquantized zero-forcing sum rate with equal user SNR:
/// K log2(1 + P / (sigma^2 tr((H H^H)^{-1}))).
inline double zf_rate(const CMat &H, double p_tx, double noise_var)
{
    const CMat G = H * H.adjoint();
    Eigen::LDLT<CMat> ldlt(G);
    if (ldlt.info() != Eigen::Success)
        return 0.0;
    const double t = ldlt.solve(CMat::Identity(G.rows(), G.cols())).trace().real();
    if (!(t > 0.0) || !std::isfinite(t))
        return 0.0;
    return double(H.rows()) * std::log2(1.0 + p_tx / (noise_var * t));
}

inline Record evaluate_sim(const SimParams &p, std::uint64_t channel_seed, SimPhaseCache *cache = nullptr)
{
    const auto nm = Eigen::Index(p.atoms_per_side * p.atoms_per_side);
    std::mt19937_64 rng(channel_seed);
    const CMat H_RI = crandn(Eigen::Index(p.users), nm, rng);
    const CMat H_IT = crandn(nm, Eigen::Index(p.antennas), rng, 1.0 / double(nm));
    CMat W;
    if (p.propagation == "dft")
        W = dft_matrix(nm);
    else if (p.propagation == "rs")
    {
        sim::SimGeometry g{p.atoms_per_side, p.atom_spacing, p.layer_spacing, 1.0};
        W = sim::rs_kernel(g);
    }
    else
        detail::fail(Errc::invalid_argument, "sim", "unknown propagation '" + p.propagation + "'");
    ChannelTensor H{{H_RI}, {0.0}};
    const sim::FrontEndModel fe(H, H_IT, sim::interlayer_tparam(W));

    sim::SimConfig cfg;
    const std::string key = std::to_string(channel_seed) + "/" + std::to_string(p.layers) + "/" +
                            std::to_string(p.atoms_per_side) + "/" + p.propagation + "/" +
                            std::to_string(p.noise_var) + "/" + std::to_string(p.p_tx);
    if (auto hit = cache ? cache->find(key) : nullptr)
        cfg = *hit;
    else
    {
        sim::SimConfig init;
        init.theta.assign(p.layers, std::vector<double>(std::size_t(nm), 0.0));
        const auto res = opt::coordinate_ascent_sim_channel(
            H_RI, W, H_IT, init, [&](const CMat &Heff) { return zf_rate(Heff, p.p_tx, p.noise_var); }, p.ascent);
        cfg = res.config;
        if (cache)
            cache->store(key, cfg);
    }
    const CMat Heff = fe.effective_channel(cfg, 0);
    const CMat F = opt::quantized_zf(Heff, p.dac_bits, p.p_tx);
    Record r;
    r.se_bits_per_hz = opt::sum_rate(Heff, F, p.noise_var);
    r.p_radiated_w = fe.radiated_power(cfg, 0, CMat::Identity(F.rows(), F.rows()), F);
    r.p_consumed_w = ref::power_consumption(p.power, {p.p_tx, p.antennas, p.dac_bits, p.layers * std::size_t(nm)});
    r.extra = {{"se_zf_unquantized", zf_rate(Heff, p.p_tx, p.noise_var)}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// Polarization: static, dual-polarized and reconfigurable transmit arrays
// ---------------------------------------------------------------------------------------------

struct PolarizationParams
{
    std::string design = "static"; // static | dual | reconfig
    double chi = 0.0;
    std::size_t n_t_side = 2; // UPA side; N_T = side^2
    std::size_t n_r_side = 2;
    std::size_t subcarriers = 8;
    std::size_t paths = 6;
    double xpd_db = 6.0;
    double snr_db = 0.0;
    double p_tx = 1.0;
    std::size_t grid_res = 8;
    std::size_t sweeps = 3;
    ref::PowerModel power{};
};

/// Unpolarized channel with 2x2 blocks per element pair, element-major
/// (index 2 n + polarization). Each path depolarizes through random
/// rotations around a cross-polar mixing matrix with ratio xpd.
inline ChannelTensor polarized_channel(const PolarizationParams &p, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const auto tx = ArrayDescriptor::upa(p.n_t_side, p.n_t_side, 0.5, 1.0);
    const auto rx = ArrayDescriptor::upa(p.n_r_side, p.n_r_side, 0.5, 1.0);
    MultipathParams mp;
    mp.num_subcarriers = p.subcarriers;
    mp.paths = random_paths(p.paths, rng, 8.0 / mp.bandwidth);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / double(p.paths)));
    const double kappa = std::sqrt(from_db(-p.xpd_db));
    auto rot = [](double a) {
        CMat R(2, 2);
        R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
        return R;
    };
    std::vector<CMat> pol;
    std::vector<cd> gain;
    for (std::size_t i = 0; i < p.paths; ++i)
    {
        CMat X(2, 2);
        X << 1.0, kappa * std::polar(1.0, ang(rng)), kappa * std::polar(1.0, ang(rng)), std::polar(1.0, ang(rng));
        X /= std::sqrt(1.0 + kappa * kappa);
        pol.push_back(rot(ang(rng)) * X * rot(ang(rng)).transpose());
        const double re = nd(rng);
        gain.emplace_back(re, nd(rng));
    }
    ChannelTensor H;
    const auto nt = Eigen::Index(tx.size()), nr = Eigen::Index(rx.size());
    for (std::size_t k = 0; k < p.subcarriers; ++k)
    {
        const double fk = subcarrier_frequency(mp, k);
        CMat Hk = CMat::Zero(2 * nr, 2 * nt);
        for (std::size_t i = 0; i < p.paths; ++i)
        {
            const CVec at = steering_vector(tx, mp.paths[i].aod_az, mp.paths[i].aod_el);
            const CVec ar = steering_vector(rx, mp.paths[i].aoa_az, mp.paths[i].aoa_el);
            const cd g = gain[i] * std::polar(1.0, -2.0 * pi * fk * mp.paths[i].delay);
            const CMat A = ar * at.adjoint();
            for (Eigen::Index r = 0; r < nr; ++r)
                for (Eigen::Index t = 0; t < nt; ++t)
                    Hk.block(2 * r, 2 * t, 2, 2) += g * A(r, t) * pol[i];
        }
        H.H.push_back(std::move(Hk));
        H.freqs.push_back(fk);
    }
    return H;
}

inline Record evaluate_polarization(const PolarizationParams &p, std::uint64_t channel_seed)
{
    const auto H = polarized_channel(p, channel_seed);
    const std::size_t nt = p.n_t_side * p.n_t_side, nr = p.n_r_side * p.n_r_side;
    // Fixed vertically polarized receive antennas.
    std::vector<polarization::PolarizationState> rx_states(nr);
    const CMat W = polarization::build_precoder(rx_states);
    const double noise = p.p_tx / from_db(p.snr_db);
    auto mean_se = [&](const std::function<CMat(std::size_t)> &heff) {
        double s = 0.0;
        for (std::size_t k = 0; k < H.size(); ++k)
            s += waterfilling_capacity(heff(k), p.p_tx, noise);
        return s / double(H.size());
    };
    const polarization::FrontEndModel fe(H, W);

    Record r;
    ref::HardwareCounts hc{p.p_tx, nt, 0, 0, ref::Variant::static_array, 0.0};
    std::vector<polarization::PolarizationState> states(nt);
    if (p.design == "static")
        r.se_bits_per_hz = mean_se([&](std::size_t k) { return fe.effective_channel(states, k); });
    else if (p.design == "dual")
    {
        hc.variant = ref::Variant::dual;
        r.se_bits_per_hz = mean_se([&](std::size_t k) { return fe.propagation_channel(k); });
    }
    else if (p.design == "reconfig")
    {
        hc.variant = ref::Variant::reconfig;
        hc.chi = p.chi;
        // Per-antenna coordinate search over the (theta, psi) grid, accepting
        // strict improvements only; starts from the static configuration.
        double best = mean_se([&](std::size_t k) { return fe.effective_channel(states, k); });
        for (std::size_t sweep = 0; sweep < p.sweeps; ++sweep)
        {
            bool moved = false;
            for (std::size_t n = 0; n < nt; ++n)
                for (std::size_t i = 0; i < p.grid_res; ++i)
                    for (std::size_t j = 0; j < p.grid_res; ++j)
                    {
                        auto trial = states;
                        trial[n].theta = polarization::grid_theta(i, p.grid_res);
                        trial[n].psi = polarization::grid_psi(j, p.grid_res);
                        const double v = mean_se([&](std::size_t k) { return fe.effective_channel(trial, k); });
                        if (v > best)
                        {
                            best = v;
                            states = trial;
                            moved = true;
                        }
                    }
            if (!moved)
                break;
        }
        r.se_bits_per_hz = best;
    }
    else
        detail::fail(Errc::invalid_argument, "polarization", "unknown design '" + p.design + "'");
    r.p_radiated_w = p.p_tx;
    r.p_consumed_w = ref::power_consumption(p.power, hc);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Parasitic: transmit power needed for a target SE versus aperture
// ---------------------------------------------------------------------------------------------

struct ParasiticParams
{
    std::size_t n_active = 4;
    std::size_t parasitic_columns = 0; // columns of n_active parasitic elements on alternating sides
    double target_se = 4.2;
    double noise_var = 1e-3;
    std::size_t n_r = 2;
    std::size_t paths = 4;
    double load_resistance = 1.0;
    std::size_t reactance_grid = 41;
    double reactance_max = 200.0;
    std::size_t sweeps = 2;
    ref::PowerModel power{};
};

/// Active ULA along z at y = 0; parasitic columns at y = +-d, +-2d, ...
inline ArrayDescriptor parasitic_array(const ParasiticParams &p)
{
    ArrayDescriptor a;
    a.wavelength = 1.0;
    const double d = 0.5;
    for (std::size_t i = 0; i < p.n_active; ++i)
        a.positions.push_back({0.0, 0.0, double(i) * d});
    for (std::size_t c = 0; c < p.parasitic_columns; ++c)
    {
        const double y = (c % 2 == 0 ? 1.0 : -1.0) * double(c / 2 + 1) * d;
        for (std::size_t i = 0; i < p.n_active; ++i)
            a.positions.push_back({0.0, y, double(i) * d});
    }
    return a;
}

inline Record evaluate_parasitic(const ParasiticParams &p, std::uint64_t channel_seed)
{
    std::mt19937_64 rng(channel_seed);
    const auto tx = parasitic_array(p);
    const auto rx = ArrayDescriptor::ula(p.n_r, 0.5, 1.0);
    MultipathParams mp;
    mp.num_subcarriers = 1;
    mp.paths = random_paths(p.paths, rng, 0.0);
    const ChannelTensor H = generate_channel(mp, tx, rx, splitmix64(channel_seed));
    const CMat Z = parasitic::isotropic_array_impedance(tx);
    const auto blocks = parasitic::partition(Z, H[0], Eigen::Index(p.n_active));
    const std::size_t np = p.parasitic_columns * p.n_active;

    std::vector<double> x(np, 0.0);
    auto se_at = [&](double power, const std::vector<double> &react) {
        if (np == 0)
            return weighted_capacity(blocks.Z_RA, real_part(blocks.Z_A), power, p.noise_var, "parasitic");
        parasitic::ParasiticLoads loads;
        for (double v : react)
            loads.Z_R.emplace_back(p.load_resistance, v);
        const CMat F = parasitic::parasitic_precoder(blocks.Z_P, loads);
        return weighted_capacity(parasitic::effective_channel(blocks, F), parasitic::effective_impedance(blocks, F),
                                 power, p.noise_var, "parasitic");
    };
    auto required_power = [&](const std::vector<double> &react) {
        double lo = 1e-12, hi = 1.0;
        while (se_at(hi, react) < p.target_se)
        {
            hi *= 10.0;
            if (hi > 1e12)
                detail::fail(Errc::infeasible, "parasitic", "target SE unreachable");
        }
        for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i)
        {
            const double mid = std::sqrt(lo * hi);
            (se_at(mid, react) >= p.target_se ? hi : lo) = mid;
        }
        return hi;
    };
    if (np > 0)
    {
        // Loads chosen to maximize SE at the power the unloaded array needs.
        const double p_ref = required_power(x);
        double best = se_at(p_ref, x);
        for (std::size_t s = 0; s < p.sweeps; ++s)
            for (std::size_t i = 0; i < np; ++i)
                for (std::size_t g = 0; g < p.reactance_grid; ++g)
                {
                    auto t = x;
                    t[i] = -p.reactance_max + 2.0 * p.reactance_max * double(g) / double(p.reactance_grid - 1);
                    const double v = se_at(p_ref, t);
                    if (v > best)
                    {
                        best = v;
                        x = t;
                    }
                }
    }
    Record r;
    r.p_radiated_w = required_power(x);
    r.se_bits_per_hz = se_at(r.p_radiated_w, x);
    r.p_consumed_w = ref::power_consumption(p.power, {r.p_radiated_w, p.n_active, 0, 0});
    r.extra = {{"aperture", double(p.parasitic_columns + 1)}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// Pixel: exhaustive state selection
// ---------------------------------------------------------------------------------------------

struct PixelParams
{
    std::size_t feeds = 2;
    std::size_t elements_per_feed = 4;
    double eta_single = 0.9;
    double eta_pair = 0.8;
    std::size_t n_r = 2;
    double p_tx = 1.0;
    double noise_var = 0.1;
    std::string dictionary_path; // optional state-file override
    ref::PowerModel power{};
};

/// Single-element states and adjacent pairs on every subpanel.
inline pixel::StateDictionary default_pixel_dictionary(const PixelParams &p)
{
    std::vector<std::vector<std::vector<int>>> pats(p.feeds);
    std::vector<std::vector<double>> eta(p.feeds);
    for (std::size_t f = 0; f < p.feeds; ++f)
    {
        for (std::size_t i = 0; i < p.elements_per_feed; ++i)
        {
            std::vector<int> v(p.elements_per_feed, 0);
            v[i] = 1;
            pats[f].push_back(v);
            eta[f].push_back(p.eta_single);
        }
        for (std::size_t i = 0; i + 1 < p.elements_per_feed; ++i)
        {
            std::vector<int> v(p.elements_per_feed, 0);
            v[i] = v[i + 1] = 1;
            pats[f].push_back(v);
            eta[f].push_back(p.eta_pair);
        }
    }
    return pixel::StateDictionary::from_binary(pats, eta);
}

inline Record evaluate_pixel(const PixelParams &p, std::uint64_t channel_seed)
{
    const auto dict =
        p.dictionary_path.empty() ? default_pixel_dictionary(p) : pixel::StateDictionary::load_file(p.dictionary_path);
    std::mt19937_64 rng(channel_seed);
    const ChannelTensor H{{crandn(Eigen::Index(p.n_r), dict.total_rows(), rng)}, {0.0}};
    const pixel::FrontEndModel fe(H, dict);
    auto weight = [&](const pixel::SelectionState &s) {
        RVec e(Eigen::Index(s.n.size()));
        for (std::size_t f = 0; f < s.n.size(); ++f)
            e(Eigen::Index(f)) = dict.eta[f][s.n[f]];
        return CMat(e.cast<cd>().asDiagonal());
    };
    auto se = [&](const pixel::SelectionState &s) {
        return weighted_capacity(fe.effective_channel(s, 0), weight(s), p.p_tx, p.noise_var, "pixel");
    };
    const auto best = opt::exhaustive_selection(dict, se);
    Record r;
    r.se_bits_per_hz = best.value;
    r.p_radiated_w = p.p_tx;
    r.p_consumed_w = ref::power_consumption(p.power, {p.p_tx, dict.num_feeds(), 0, 0});
    double joint = 1.0;
    for (std::size_t f = 0; f < dict.num_feeds(); ++f)
        joint *= double(dict.admissible[f].size());
    r.extra = {{"joint_states", joint}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// PASS: equal-power pinches placed for coherent combining at a user
// ---------------------------------------------------------------------------------------------

struct PassParams
{
    std::size_t guides = 1;
    std::size_t pinches = 4;
    double alpha = 0.45;        // equal-power amplitude
    double guide_length = 10.0; // wavelengths
    double guide_spacing = 2.0; // wavelengths
    double height = 3.0;        // wavelengths
    double neff = 1.4;          // beta_g = neff k0
    double p_tx = 1.0;
    double noise_var = 1e-6;
    std::size_t position_grid = 200;
    ref::PowerModel power{};
};

/// Feasibility diagnostic of the equal-power model; empty when feasible.
inline std::string pass_feasibility(const PassParams &p)
{
    if (!pass::equal_power_feasible(p.pinches, p.alpha))
        return "equal-power amplitude alpha = " + std::to_string(p.alpha) + " needs M alpha^2 <= 1, got " +
               std::to_string(double(p.pinches) * p.alpha * p.alpha);
    return {};
}

inline Record evaluate_pass(const PassParams &p, std::uint64_t channel_seed)
{
    if (auto msg = pass_feasibility(p); !msg.empty())
        detail::fail(Errc::infeasible, "pass", msg);
    std::mt19937_64 rng(channel_seed);
    std::uniform_real_distribution<double> ux(0.0, p.guide_length), uy(0.0, p.guide_spacing * double(p.guides));
    const double k0 = 2.0 * pi, bg = p.neff * k0;
    const std::array<double, 3> user{ux(rng), uy(rng), p.height};
    const auto deltas = pass::equal_power_deltas(p.pinches, p.alpha);

    auto path = [&](double x, double y) {
        const double dx = x - user[0], dy = y - user[1];
        const double d = std::sqrt(dx * dx + dy * dy + user[2] * user[2]);
        return std::polar(1.0 / (4.0 * pi * d), -k0 * d);
    };
    // Greedy placement: every pinch takes the grid position past its
    // predecessor that best aligns its contribution with the running sum.
    pass::WaveguideLayout layout;
    layout.beta_g = bg;
    for (std::size_t g = 0; g < p.guides; ++g)
    {
        const double y = double(g) * p.guide_spacing;
        std::vector<double> pos;
        cd acc = 0.0;
        double start = 0.0;
        const auto a = pass::amplitudes(deltas);
        for (std::size_t m = 0; m < p.pinches; ++m)
        {
            double best_x = -1.0, best_v = -1.0;
            const double span = (p.guide_length - start) / double(p.pinches - m);
            for (std::size_t i = 1; i <= p.position_grid; ++i)
            {
                const double x = start + span * double(i) / double(p.position_grid);
                const double v = std::abs(acc + a[m] * std::polar(1.0, -bg * x) * path(x, y));
                if (v > best_v)
                {
                    best_v = v;
                    best_x = x;
                }
            }
            acc += a[m] * std::polar(1.0, -bg * best_x) * path(best_x, y);
            pos.push_back(best_x);
            start = best_x;
        }
        layout.positions.push_back(pos);
        layout.deltas.push_back(deltas);
    }
    CMat Hrow(1, Eigen::Index(p.guides * p.pinches));
    for (std::size_t g = 0; g < p.guides; ++g)
        for (std::size_t m = 0; m < p.pinches; ++m)
            Hrow(0, Eigen::Index(g * p.pinches + m)) = path(layout.positions[g][m], double(g) * p.guide_spacing);
    const CMat Heff = Hrow * pass::pass_precoder(layout);
    // Maximum ratio transmission across guides.
    const CMat f = Heff.adjoint() * std::sqrt(p.p_tx) / Heff.norm();
    Record r;
    r.se_bits_per_hz = std::log2(1.0 + (Heff * f).squaredNorm() / p.noise_var);
    r.p_radiated_w = pass::radiated_power(layout, CMat::Identity(f.rows(), f.rows()), f);
    r.p_consumed_w = ref::power_consumption(p.power, {p.p_tx, p.guides, 0, 0});
    r.extra = {{"guide_efficiency", pass::guide_efficiency(deltas)}};
    return r;
}

// ---------------------------------------------------------------------------------------------
// Non-radiating wire: field map versus terminations
// ---------------------------------------------------------------------------------------------

struct WireParams
{
    wire::WireGeometry geometry{};
    std::vector<double> z_over_lambda;
    std::vector<double> r_over_lambda{0.5};
    double noise_var = 1e-6;
    double null_threshold = 0.01; // relative to the map maximum
    double load_ohm = 377.0;
    ref::PowerModel power{};
};

struct WireOutput
{
    Record record;
    std::vector<wire::FieldSample> map;
    wire::ImpedanceResult impedance;
};

inline WireOutput evaluate_wire(const WireParams &p)
{
    auto g = p.geometry;
    g.set_uniform_load(cd(p.load_ohm, 0.0));
    WireOutput out;
    out.impedance = wire::port_impedances(g, g.num_ports);
    const CMat Z = wire::toeplitz(out.impedance.z, g.num_ports);
    out.map = wire::snr_field_map(g, Z, p.z_over_lambda, p.r_over_lambda, p.noise_var);
    double se = 0.0;
    std::size_t n = 0;
    for (const auto &s : out.map)
        if (std::isfinite(s.snr))
        {
            se += std::log2(1.0 + s.snr);
            ++n;
        }
    const CVec v = [&] {
        CVec x = CVec::Zero(Eigen::Index(g.num_ports));
        for (auto e : g.excited)
            x(Eigen::Index(e)) = 1.0;
        return x;
    }();
    auto &r = out.record;
    r.se_bits_per_hz = n ? se / double(n) : 0.0;
    r.p_radiated_w = wire::radiated_power(Z, CMat::Identity(Z.rows(), Z.rows()), v);
    r.p_consumed_w = ref::power_consumption(p.power, {r.p_radiated_w, g.excited.size(), 0, 0});
    const std::size_t nz = p.z_over_lambda.size();
    r.extra = {{"null_count", double(wire::count_nulls(out.map, p.null_threshold))},
               {"null_z_over_lambda", p.z_over_lambda[wire::null_index(out.map, nz, 0)]},
               {"harmonics", double(out.impedance.harmonics)},
               {"quadrature_change", out.impedance.quadrature_change},
               {"truncation_change", out.impedance.truncation_change}};
    return out;
}

} // namespace trihybrid::exp
