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
#include "pixel_fas.hpp"
#include "sim_stack.hpp"

#include <functional>
#include <optional>
#include <random>

namespace trihybrid::opt
{

/// Iteration and population budgets shared by the search routines.
struct OptimizerBudget
{
    std::size_t max_iterations = 50;
    std::size_t population = 32;
    std::size_t generations = 100;
    std::size_t tournament = 3;
    std::uint64_t seed = 1;
    double tolerance = 1e-9;

    void validate() const
    {
        detail::require(max_iterations > 0 && population > 0 && generations > 0 && tournament > 0,
                        Errc::invalid_argument, "optimizers", "budgets must be positive");
        detail::require(tolerance >= 0.0, Errc::invalid_argument, "optimizers", "tolerance must be >= 0");
    }
};

// ---------------------------------------------------------------------------------------------
// Waterfilling
// ---------------------------------------------------------------------------------------------

struct WaterfillingResult
{
    std::vector<double> power;
    double mu = 0.0;
};

/// p_i = max(0, mu - noise / g_i) with sum p_i = P. mu is bracketed by
/// bisection, then fixed in closed form on the active set.
inline WaterfillingResult waterfilling(const std::vector<double> &gains, double p_total, double noise_var)
{
    const std::string_view m = "optimizers";
    detail::require(p_total > 0.0 && noise_var > 0.0, Errc::invalid_argument, m, "power and noise must be > 0");
    double top = 0.0;
    for (double g : gains)
    {
        detail::require(g >= 0.0 && std::isfinite(g), Errc::invalid_argument, m, "gains must be finite and >= 0");
        top = std::max(top, g);
    }
    detail::require(top > 0.0, Errc::invalid_argument, m, "all channel gains are zero");

    auto floor_of = [&](double g) { return noise_var / g; };
    auto used = [&](double mu) {
        double s = 0.0;
        for (double g : gains)
            if (g > 0.0)
                s += std::max(0.0, mu - floor_of(g));
        return s;
    };
    double lo = 0.0, hi = p_total + floor_of(top);
    for (double g : gains)
        if (g > 0.0)
            hi = std::max(hi, p_total + floor_of(g));
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        (used(mid) > p_total ? hi : lo) = mid;
    }
    // Closed form on the active set removes the bisection residual.
    double mu = 0.5 * (lo + hi);
    for (int pass = 0; pass < 4; ++pass)
    {
        double s = 0.0;
        std::size_t n = 0;
        for (double g : gains)
            if (g > 0.0 && mu - floor_of(g) > 0.0)
            {
                s += floor_of(g);
                ++n;
            }
        if (n == 0)
            break;
        mu = (p_total + s) / double(n);
    }
    WaterfillingResult r;
    r.mu = mu;
    for (double g : gains)
        r.power.push_back(g > 0.0 ? std::max(0.0, mu - floor_of(g)) : 0.0);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Quantized zero forcing
// ---------------------------------------------------------------------------------------------

/// Mid-rise uniform quantizer with 2^b levels on [-scale, scale].
inline double quantize_midrise(double x, unsigned bits, double scale)
{
    if (scale <= 0.0)
        return 0.0;
    const double step = 2.0 * scale / std::ldexp(1.0, int(bits));
    const double top = scale - 0.5 * step;
    return std::clamp(step * (std::floor(x / step) + 0.5), -top, top);
}

/// Zero-forcing pseudo-inverse normalized to ||F||_F^2 = p_total.
inline CMat zero_forcing(const CMat &H, double p_total)
{
    detail::require(p_total > 0.0, Errc::invalid_argument, "optimizers", "power must be > 0");
    if (numerical_rank(H) < H.rows())
        detail::fail(Errc::rank_deficient, "optimizers", "zero forcing needs full row rank, got " + dims(H));
    CMat F = pinv(H);
    return F * std::sqrt(p_total / frob2(F));
}

/// Zero forcing with b-bit real and imaginary parts, scaled to the largest
/// component magnitude, then renormalized to power p_total.
inline CMat quantized_zf(const CMat &H, unsigned bits, double p_total)
{
    detail::require(bits >= 1 && bits <= 16, Errc::invalid_argument, "optimizers", "DAC bits must lie in [1, 16]");
    const CMat F = zero_forcing(H, p_total);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < F.size(); ++i)
        scale = std::max({scale, std::abs(F(i).real()), std::abs(F(i).imag())});
    CMat Q(F.rows(), F.cols());
    for (Eigen::Index i = 0; i < F.size(); ++i)
        Q(i) = cd(quantize_midrise(F(i).real(), bits, scale), quantize_midrise(F(i).imag(), bits, scale));
    const double n = frob2(Q);
    if (n == 0.0)
        detail::fail(Errc::internal, "optimizers", "quantized precoder is zero");
    return Q * std::sqrt(p_total / n);
}

/// Sum over users of log2(1 + SINR) for single-stream users on the rows of H.
inline double sum_rate(const CMat &H, const CMat &F, double noise_var)
{
    require_product(H, F, "optimizers", "H * F");
    const CMat G = H * F;
    double r = 0.0;
    for (Eigen::Index u = 0; u < G.rows(); ++u)
    {
        const double s = u < G.cols() ? std::norm(G(u, u)) : 0.0;
        const double all = G.row(u).squaredNorm();
        r += std::log2(1.0 + s / (all - s + noise_var));
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Genetic search over discrete phases
// ---------------------------------------------------------------------------------------------

/// Phase of level l on a uniform grid over [-pi, pi).
inline double phase_level(std::size_t l, std::size_t levels) { return -pi + 2.0 * pi * double(l) / double(levels); }

struct GeneticResult
{
    std::vector<double> z;
    double value = 0.0;
    std::vector<double> trace; // best value per generation
};

/// Maximizes objective over genes taking `levels` discrete phases.
/// Tournament selection, uniform crossover, per-gene mutation 1/N and
/// elitism. The best individual only changes on strict improvement.
inline GeneticResult genetic_dma(const std::function<double(const std::vector<double> &)> &objective,
                                 std::size_t n_genes, const OptimizerBudget &budget, std::size_t levels = 16)
{
    budget.validate();
    detail::require(n_genes >= 1 && levels >= 2, Errc::invalid_argument, "optimizers", "need genes and >= 2 levels");
    std::mt19937_64 rng(budget.seed);
    auto uniform_index = [&](std::size_t n) { return std::size_t(rng() % n); };
    auto unit = [&]() { return double(rng() >> 11) * 0x1.0p-53; };

    using Genome = std::vector<std::size_t>;
    auto decode = [&](const Genome &g) {
        std::vector<double> z(g.size());
        for (std::size_t i = 0; i < g.size(); ++i)
            z[i] = phase_level(g[i], levels);
        return z;
    };

    std::vector<Genome> pop(budget.population, Genome(n_genes));
    for (auto &g : pop)
        for (auto &x : g)
            x = uniform_index(levels);
    std::vector<double> fit(pop.size());
    for (std::size_t i = 0; i < pop.size(); ++i)
        fit[i] = objective(decode(pop[i]));

    std::size_t bi = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (fit[i] > fit[bi])
            bi = i;
    Genome best = pop[bi];
    double best_v = fit[bi];

    GeneticResult r;
    auto pick = [&]() {
        std::size_t w = uniform_index(pop.size());
        for (std::size_t t = 1; t < budget.tournament; ++t)
        {
            const std::size_t c = uniform_index(pop.size());
            if (fit[c] > fit[w])
                w = c;
        }
        return w;
    };
    const double p_mut = 1.0 / double(n_genes);
    for (std::size_t gen = 0; gen < budget.generations; ++gen)
    {
        std::vector<Genome> next;
        next.reserve(pop.size());
        next.push_back(best);
        while (next.size() < pop.size())
        {
            const Genome &a = pop[pick()], &b = pop[pick()];
            Genome c(n_genes);
            for (std::size_t i = 0; i < n_genes; ++i)
            {
                c[i] = unit() < 0.5 ? a[i] : b[i];
                if (unit() < p_mut)
                    c[i] = uniform_index(levels);
            }
            next.push_back(std::move(c));
        }
        pop = std::move(next);
        for (std::size_t i = 0; i < pop.size(); ++i)
        {
            fit[i] = i == 0 ? best_v : objective(decode(pop[i]));
            if (fit[i] > best_v)
            {
                best_v = fit[i];
                best = pop[i];
            }
        }
        r.trace.push_back(best_v);
    }
    r.z = decode(best);
    r.value = best_v;
    return r;
}

/// Best phase vector over the full levels^N grid; for small oracles only.
inline GeneticResult exhaustive_phases(const std::function<double(const std::vector<double> &)> &objective,
                                       std::size_t n_genes, std::size_t levels = 16, double cap = 1e7)
{
    const double space = std::pow(double(levels), double(n_genes));
    if (space > cap)
        detail::fail(Errc::search_space_too_large, "optimizers", "phase grid of " + std::to_string(space) + " points");
    std::vector<std::size_t> g(n_genes, 0);
    std::vector<double> z(n_genes, phase_level(0, levels));
    GeneticResult r;
    r.value = -std::numeric_limits<double>::infinity();
    while (true)
    {
        const double v = objective(z);
        if (v > r.value)
        {
            r.value = v;
            r.z = z;
        }
        std::size_t i = 0;
        while (i < n_genes && ++g[i] == levels)
        {
            g[i] = 0;
            z[i] = phase_level(0, levels);
            ++i;
        }
        if (i == n_genes)
            break;
        z[i] = phase_level(g[i], levels);
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// SIM coordinate ascent
// ---------------------------------------------------------------------------------------------

struct CoordinateResult
{
    sim::SimConfig config;
    double value = 0.0;
    std::vector<double> trace; // objective after every sweep, starting with the initial value
};

/// Cyclic per-atom sweeps over a `grid`-point phase grid. A phase is only
/// replaced on strict improvement, so the trace is nondecreasing.
inline CoordinateResult coordinate_ascent_sim(const std::function<double(const sim::SimConfig &)> &objective,
                                              sim::SimConfig init, const OptimizerBudget &budget, std::size_t grid = 64)
{
    budget.validate();
    detail::require(grid >= 2, Errc::invalid_argument, "optimizers", "phase grid needs >= 2 points");
    CoordinateResult r;
    r.config = std::move(init);
    r.value = objective(r.config);
    r.trace.push_back(r.value);
    for (std::size_t sweep = 0; sweep < budget.max_iterations; ++sweep)
    {
        const double start = r.value;
        for (auto &layer : r.config.theta)
            for (auto &theta : layer)
            {
                const double keep = theta;
                double best_t = keep, best_v = r.value;
                for (std::size_t i = 0; i < grid; ++i)
                {
                    theta = 2.0 * pi * double(i) / double(grid);
                    const double v = objective(r.config);
                    if (v > best_v)
                    {
                        best_v = v;
                        best_t = theta;
                    }
                }
                theta = best_t;
                r.value = best_v;
            }
        r.trace.push_back(r.value);
        if (r.value - start <= budget.tolerance * std::max(1.0, std::abs(start)))
            break;
    }
    return r;
}

/// Coordinate ascent for an ideal reflectionless stack with interlayer
/// transfer W, where H_RI Psi H_IT = U diag(e^{j theta_l}) V for the layer
/// being swept. Each atom trial is a rank-one update of the effective
/// channel; acceptance and trace match coordinate_ascent_sim.
inline CoordinateResult coordinate_ascent_sim_channel(const CMat &H_RI, const CMat &W, const CMat &H_IT,
                                                      sim::SimConfig init,
                                                      const std::function<double(const CMat &)> &objective,
                                                      const OptimizerBudget &budget, std::size_t grid = 64)
{
    budget.validate();
    detail::require(grid >= 2, Errc::invalid_argument, "optimizers", "phase grid needs >= 2 points");
    const auto n = W.rows();
    detail::require(W.cols() == n && H_RI.cols() == n && H_IT.rows() == n, Errc::dimension_mismatch, "optimizers",
                    "H_RI, W and H_IT do not chain");
    auto &th = init.theta;
    for (const auto &layer : th)
        detail::require(Eigen::Index(layer.size()) == n, Errc::dimension_mismatch, "optimizers", "layer size");
    auto diag = [&](std::size_t l) {
        CVec d(n);
        for (Eigen::Index i = 0; i < n; ++i)
            d(i) = std::polar(1.0, th[l][std::size_t(i)]);
        return d;
    };
    auto channel = [&]() {
        CMat P = CMat::Identity(n, n);
        for (std::size_t l = 0; l < th.size(); ++l)
            P = (l ? diag(l).asDiagonal() * W : CMat(diag(l).asDiagonal())) * P;
        return CMat(H_RI * P * H_IT);
    };

    CoordinateResult r;
    r.value = objective(channel());
    r.trace.push_back(r.value);
    const std::size_t L = th.size();
    for (std::size_t sweep = 0; sweep < budget.max_iterations; ++sweep)
    {
        const double start = r.value;
        for (std::size_t l = 0; l < L; ++l)
        {
            // Psi = A diag(e^{j theta_l}) B with A = Theta_{L-1} W ... W, B = W Theta_{l-1} ... Theta_0.
            CMat A = CMat::Identity(n, n), B = CMat::Identity(n, n);
            for (std::size_t m = L - 1; m > l; --m)
                A = A * diag(m).asDiagonal() * W;
            for (std::size_t m = 0; m < l; ++m)
                B = (m ? diag(m).asDiagonal() * W : CMat(diag(m).asDiagonal())) * B;
            if (l > 0)
                B = W * B;
            const CMat U = H_RI * A, V = B * H_IT;
            for (Eigen::Index a = 0; a < n; ++a)
            {
                const CVec d = diag(l);
                const CMat H0 = U * d.asDiagonal() * V;
                const CMat uv = U.col(a) * V.row(a);
                const double keep = th[l][std::size_t(a)];
                double best_t = keep, best_v = r.value;
                for (std::size_t i = 0; i < grid; ++i)
                {
                    const double t = 2.0 * pi * double(i) / double(grid);
                    const double v = objective(H0 + (std::polar(1.0, t) - d(a)) * uv);
                    if (v > best_v)
                    {
                        best_v = v;
                        best_t = t;
                    }
                }
                th[l][std::size_t(a)] = best_t;
                r.value = best_v;
            }
        }
        r.trace.push_back(r.value);
        if (r.value - start <= budget.tolerance * std::max(1.0, std::abs(start)))
            break;
    }
    r.config = std::move(init);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Pixel state selection
// ---------------------------------------------------------------------------------------------

struct SelectionResult
{
    pixel::SelectionState state;
    double value = 0.0;
};

/// Global maximum over the product of admissible sets, visited in
/// lexicographic order; the first maximum wins.
inline SelectionResult exhaustive_selection(const pixel::StateDictionary &dict,
                                            const std::function<double(const pixel::SelectionState &)> &objective,
                                            double cap = 1e6)
{
    dict.validate();
    double space = 1.0;
    for (const auto &a : dict.admissible)
        space *= double(a.size());
    if (space > cap)
        detail::fail(Errc::search_space_too_large, "optimizers",
                     std::to_string(space) + " joint states exceed the cap; use greedy_selection");
    std::vector<std::vector<std::size_t>> sets = dict.admissible;
    for (auto &s : sets)
        std::sort(s.begin(), s.end());
    std::vector<std::size_t> idx(sets.size(), 0);
    pixel::SelectionState s;
    for (const auto &set : sets)
        s.n.push_back(set[0]);
    SelectionResult r{s, -std::numeric_limits<double>::infinity()};
    while (true)
    {
        const double v = objective(s);
        if (v > r.value)
            r = {s, v};
        std::size_t p = sets.size();
        while (p-- > 0)
        {
            if (++idx[p] < sets[p].size())
            {
                s.n[p] = sets[p][idx[p]];
                break;
            }
            idx[p] = 0;
            s.n[p] = sets[p][0];
        }
        if (p == std::size_t(-1))
            break;
    }
    return r;
}

/// Per-feed coordinate ascent for state spaces beyond the exhaustive cap.
inline SelectionResult greedy_selection(const pixel::StateDictionary &dict,
                                        const std::function<double(const pixel::SelectionState &)> &objective,
                                        std::size_t max_sweeps = 20)
{
    dict.validate();
    pixel::SelectionState s;
    for (const auto &a : dict.admissible)
        s.n.push_back(*std::min_element(a.begin(), a.end()));
    SelectionResult r{s, objective(s)};
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep)
    {
        bool moved = false;
        for (std::size_t p = 0; p < s.n.size(); ++p)
            for (auto n : dict.admissible[p])
            {
                auto t = r.state;
                t.n[p] = n;
                const double v = objective(t);
                if (v > r.value)
                {
                    r = {t, v};
                    moved = true;
                }
            }
        if (!moved)
            break;
    }
    return r;
}

// ---------------------------------------------------------------------------------------------
// Tri-hybrid alternating matching
// ---------------------------------------------------------------------------------------------

/// sqrt(P / N_s) times the leading N_s right singular vectors of H.
inline CMat optimal_precoder(const CMat &H, std::size_t n_s, double power)
{
    detail::require(n_s >= 1 && Eigen::Index(n_s) <= std::min(H.rows(), H.cols()), Errc::invalid_argument,
                    "optimizers", "stream count exceeds channel rank bound");
    Eigen::JacobiSVD<CMat> svd(H, Eigen::ComputeThinV);
    return svd.matrixV().leftCols(Eigen::Index(n_s)) * std::sqrt(power / double(n_s));
}

/// Entrywise unit-modulus projection scaled by 1/sqrt(rows); zero entries map to phase 0.
inline CMat phase_projection(const CMat &A)
{
    const double s = 1.0 / std::sqrt(double(A.rows()));
    CMat P(A.rows(), A.cols());
    for (Eigen::Index i = 0; i < A.size(); ++i)
        P(i) = std::polar(s, std::arg(A(i)));
    return P;
}

/// Deterministic analog initialization from the phases of A^H F_opt.
inline CMat initial_analog(const CMat &A, const CMat &F_opt, std::size_t n_rf)
{
    const CMat C = A.adjoint() * F_opt;
    CMat F(A.cols(), Eigen::Index(n_rf));
    for (Eigen::Index j = 0; j < F.cols(); ++j)
        for (Eigen::Index i = 0; i < F.rows(); ++i)
            F(i, j) = j < C.cols() ? C(i, j) : std::polar(1.0, pi * double(i * j) / double(F.rows()));
    return phase_projection(F);
}

/// Analog step: phase projection of the least-squares analog precoder.
inline CMat analog_step(const CMat &A, const CMat &F_opt, const CMat &F_dig)
{
    return phase_projection(pinv(A) * F_opt * pinv(F_dig));
}

/// Digital step: least squares against F_opt.
inline CMat digital_step(const CMat &A, const CMat &F_ana, const CMat &F_opt) { return pinv(A * F_ana) * F_opt; }

struct MatchingResult
{
    CMat F_ana, F_dig;
    std::vector<double> trace;
};

/// Two-stage hybrid matching for fixed A = F_ra: alternate the analog and
/// digital steps, each accepted only if it lowers ||F_opt - A F_ana F_dig||.
inline MatchingResult two_stage_matching(const CMat &A, const CMat &F_opt, std::size_t n_rf, std::size_t iterations,
                                         double tol = 1e-12)
{
    MatchingResult r;
    r.F_ana = initial_analog(A, F_opt, n_rf);
    r.F_dig = digital_step(A, r.F_ana, F_opt);
    auto cost = [&](const CMat &Fa, const CMat &Fd) { return frob2(F_opt - A * Fa * Fd); };
    double c = cost(r.F_ana, r.F_dig);
    r.trace.push_back(c);
    for (std::size_t it = 0; it < iterations; ++it)
    {
        const double start = c;
        const CMat Fa = analog_step(A, F_opt, r.F_dig);
        if (const double v = cost(Fa, r.F_dig); v < c)
        {
            r.F_ana = Fa;
            c = v;
        }
        const CMat Fd = digital_step(A, r.F_ana, F_opt);
        if (const double v = cost(r.F_ana, Fd); v < c)
        {
            r.F_dig = Fd;
            c = v;
        }
        r.trace.push_back(c);
        if (start - c <= tol * std::max(1.0, start))
            break;
    }
    return r;
}

template <class Config>
struct AlternatingResult
{
    PrecoderSet<Config> precoders;
    std::vector<double> trace;    // matching objective after each round, before renormalization
    double final_objective = 0.0; // after power renormalization
};

/// Block-coordinate descent on sum_k ||F_opt,k - F_ra F_ana,k F_dig,k||^2:
/// the antenna configuration moves to its best feasible neighbor, then each
/// subcarrier takes an analog and a digital step. Every block is accepted
/// only if it lowers the objective, so the trace is nonincreasing. F_dig is
/// finally scaled so ||F_ra F_ana F_dig||_F^2 = power on every subcarrier.
template <SeparableFrontEnd FE>
AlternatingResult<typename FE::config_type> alternating_trihybrid(
    const FE &fe, const ChannelTensor &F_opt, typename FE::config_type init, std::size_t n_rf, double power,
    const std::function<std::vector<typename FE::config_type>(const typename FE::config_type &)> &neighbors,
    const OptimizerBudget &budget)
{
    using Config = typename FE::config_type;
    budget.validate();
    detail::require(F_opt.size() == fe.num_subcarriers(), Errc::dimension_mismatch, "optimizers",
                    "optimal precoders differ in subcarrier count");
    if (!fe.is_feasible(init))
        detail::fail(Errc::infeasible, "optimizers", "initial antenna configuration is infeasible");
    const std::size_t K = fe.num_subcarriers();

    AlternatingResult<Config> r;
    auto &pre = r.precoders;
    pre.antenna_config = std::move(init);
    for (std::size_t k = 0; k < K; ++k)
    {
        const CMat A = fe.ra_precoder(pre.antenna_config, k);
        pre.F_ana.push_back(initial_analog(A, F_opt[k], n_rf));
        pre.F_dig.push_back(digital_step(A, pre.F_ana[k], F_opt[k]));
    }
    auto cost_of = [&](const Config &c, const std::vector<CMat> &Fa, const std::vector<CMat> &Fd) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            s += frob2(F_opt[k] - fe.ra_precoder(c, k) * Fa[k] * Fd[k]);
        return s;
    };
    double c = cost_of(pre.antenna_config, pre.F_ana, pre.F_dig);
    r.trace.push_back(c);

    for (std::size_t it = 0; it < budget.max_iterations; ++it)
    {
        const double start = c;
        if (neighbors)
        {
            std::optional<Config> best;
            for (auto &cand : neighbors(pre.antenna_config))
            {
                if (!fe.is_feasible(cand))
                    continue;
                const double v = cost_of(cand, pre.F_ana, pre.F_dig);
                if (v < c)
                {
                    c = v;
                    best = std::move(cand);
                }
            }
            if (best)
                pre.antenna_config = std::move(*best);
        }
        for (std::size_t k = 0; k < K; ++k)
        {
            const CMat A = fe.ra_precoder(pre.antenna_config, k);
            double best_k = frob2(F_opt[k] - A * pre.F_ana[k] * pre.F_dig[k]);
            const CMat Fa = analog_step(A, F_opt[k], pre.F_dig[k]);
            if (const double v = frob2(F_opt[k] - A * Fa * pre.F_dig[k]); v < best_k)
            {
                pre.F_ana[k] = Fa;
                best_k = v;
            }
            const CMat Fd = digital_step(A, pre.F_ana[k], F_opt[k]);
            if (const double v = frob2(F_opt[k] - A * pre.F_ana[k] * Fd); v < best_k)
            {
                pre.F_dig[k] = Fd;
                best_k = v;
            }
        }
        // Termwise decreases summed in a fixed order keep the total monotone.
        c = cost_of(pre.antenna_config, pre.F_ana, pre.F_dig);
        r.trace.push_back(c);
        if (start - c <= budget.tolerance * std::max(1.0, start))
            break;
    }

    for (std::size_t k = 0; k < K; ++k)
    {
        const double n = frob2(fe.ra_precoder(pre.antenna_config, k) * pre.F_ana[k] * pre.F_dig[k]);
        if (n > 0.0)
            pre.F_dig[k] *= std::sqrt(power / n);
    }
    r.final_objective = cost_of(pre.antenna_config, pre.F_ana, pre.F_dig);
    if (!fe.is_feasible(pre.antenna_config))
        detail::fail(Errc::internal, "optimizers", "optimizer left the feasible set");
    return r;
}

} // namespace trihybrid::opt
