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

#include "helpers.hpp"

using namespace th_test;
namespace sm = trihybrid::sim;

namespace
{

std::vector<double> random_phases(std::size_t n, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
    std::vector<double> t;
    for (std::size_t i = 0; i < n; ++i)
        t.push_back(u(rng));
    return t;
}

sm::SimStack ideal_stack(const std::vector<std::vector<double>> &theta, const CMat &W)
{
    sm::SimStack s;
    for (const auto &t : theta)
        s.layers.push_back(sm::MetaLayer::ideal(t));
    s.P.assign(theta.size() - 1, sm::interlayer_tparam(W));
    s.H_IT = CMat::Identity(W.rows(), W.rows());
    return s;
}

/// Field propagated element by element: phase screen, then transfer W.
CMat direct_propagation(const std::vector<std::vector<double>> &theta, const CMat &W)
{
    const auto n = W.rows();
    CMat out(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
    {
        std::vector<cd> x(std::size_t(n), cd(0.0));
        x[std::size_t(c)] = 1.0;
        for (std::size_t l = 0; l < theta.size(); ++l)
        {
            if (l > 0)
            {
                std::vector<cd> y(std::size_t(n), cd(0.0));
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j)
                        y[std::size_t(i)] += W(i, j) * x[std::size_t(j)];
                x = y;
            }
            for (Eigen::Index i = 0; i < n; ++i)
                x[std::size_t(i)] *= std::polar(1.0, theta[l][std::size_t(i)]);
        }
        for (Eigen::Index i = 0; i < n; ++i)
            out(i, c) = x[std::size_t(i)];
    }
    return out;
}

} // namespace

TEST(LayerTparam, UnitTransmissionIsIdentity)
{
    sm::MetaLayer l{{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}};
    EXPECT_EQ(max_abs(sm::layer_tparam(l) - CMat::Identity(6, 6)), 0.0);
}

TEST(LayerTparam, ReflectiveScalarArithmetic)
{
    const CMat G = sm::layer_tparam({{0.5}, {0.5}});
    EXPECT_NEAR(std::abs(G(0, 0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(G(0, 1) - cd(1.0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(G(1, 0) - cd(-1.0)), 0.0, 1e-16);
    EXPECT_NEAR(std::abs(G(1, 1) - cd(2.0)), 0.0, 1e-16);
}

TEST(LayerTparam, OpaqueAtomRejected)
{
    EXPECT_ERRC(sm::layer_tparam({{1.0, 0.0}, {0.0, 0.0}}), Errc::opaque_atom);
}

TEST(LayerTparamProperty, LosslessReductionToPhaseBlocks)
{
    std::mt19937_64 rng(50);
    for (int t = 0; t < 200; ++t)
    {
        const auto th = random_phases(1 + std::size_t(t % 6), rng);
        const auto n = Eigen::Index(th.size());
        CVec d(n);
        for (Eigen::Index i = 0; i < n; ++i)
            d(i) = std::polar(1.0, th[std::size_t(i)]);
        const CMat oracle = blkdiag(CMat(d.asDiagonal()), CMat(d.cwiseInverse().asDiagonal()));
        EXPECT_LT(max_abs(sm::layer_tparam(sm::MetaLayer::ideal(th)) - oracle), 1e-14);
    }
}

TEST(Cascade, SingleLayerIsPhaseScreen)
{
    std::mt19937_64 rng(51);
    const auto th = random_phases(4, rng);
    const CMat Psi = sm::cascade(ideal_stack({th}, CMat::Identity(4, 4)));
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 4; ++j)
            EXPECT_NEAR(std::abs(Psi(i, j) - (i == j ? std::polar(1.0, th[std::size_t(i)]) : cd(0.0))), 0.0, 1e-14);
}

TEST(Cascade, TwoLayersOrderedProduct)
{
    std::mt19937_64 rng(52);
    const auto t1 = random_phases(3, rng), t2 = random_phases(3, rng);
    const CMat W = random_matrix(3, 3, rng) + 3.0 * CMat::Identity(3, 3);
    CVec d1(3), d2(3);
    for (Eigen::Index i = 0; i < 3; ++i)
    {
        d1(i) = std::polar(1.0, t1[std::size_t(i)]);
        d2(i) = std::polar(1.0, t2[std::size_t(i)]);
    }
    const CMat oracle = d2.asDiagonal() * W * d1.asDiagonal();
    EXPECT_LT(max_abs(sm::cascade(ideal_stack({t1, t2}, W)) - oracle), 1e-12);
}

TEST(Cascade, MismatchedStackRejected)
{
    auto s = ideal_stack({{0.1, 0.2}, {0.3, 0.4}}, CMat::Identity(2, 2));
    s.P.clear();
    EXPECT_ERRC(sm::cascade(s), Errc::dimension_mismatch);
    EXPECT_ERRC(sm::cascade(sm::SimStack{}), Errc::invalid_argument);
}

TEST(Cascade, SingularTransferRejected)
{
    EXPECT_ERRC(sm::interlayer_tparam(CMat::Zero(2, 2)), Errc::non_transmissive_stack);
}

TEST(CascadeProperty, MatchesDirectPropagation)
{
    std::mt19937_64 rng(53);
    for (Eigen::Index n = 1; n <= 4; ++n)
        for (std::size_t L = 1; L <= 3; ++L)
            for (int t = 0; t < 5; ++t)
            {
                const CMat W = random_matrix(n, n, rng) + 2.0 * CMat::Identity(n, n);
                std::vector<std::vector<double>> th;
                for (std::size_t l = 0; l < L; ++l)
                    th.push_back(random_phases(std::size_t(n), rng));
                const CMat oracle = direct_propagation(th, W);
                EXPECT_LT(max_abs(sm::cascade(ideal_stack(th, W)) - oracle), 1e-9 * std::max(1.0, max_abs(oracle)));
            }
}

TEST(CascadeProperty, UnitaryTransferGivesUnitaryPsi)
{
    std::mt19937_64 rng(54);
    for (int t = 0; t < 50; ++t)
    {
        const CMat W = random_unitary(4, rng);
        const auto Psi = sm::cascade(ideal_stack({random_phases(4, rng), random_phases(4, rng), random_phases(4, rng)}, W));
        EXPECT_LT(max_abs(Psi.adjoint() * Psi - CMat::Identity(4, 4)), 1e-10);
    }
}

TEST(CascadeProperty, LayerOrderMatters)
{
    std::mt19937_64 rng(55);
    const CMat W = random_unitary(3, rng);
    const auto a = random_phases(3, rng), b = random_phases(3, rng);
    EXPECT_GT(max_abs(sm::cascade(ideal_stack({a, b}, W)) - sm::cascade(ideal_stack({b, a}, W))), 1e-3);
}

TEST(RsKernel, AxialEntryClosedForm)
{
    sm::SimGeometry g;
    g.atoms_per_side = 2;
    g.atom_spacing = 0.5;
    g.layer_spacing = 2.0;
    g.wavelength = 1.0;
    const CMat W = sm::rs_kernel(g);
    const double d = 2.0;
    const cd oracle = (0.25 / d) * cd(1.0 / (2.0 * pi * d), -1.0) * std::polar(1.0, 2.0 * pi * d);
    EXPECT_NEAR(std::abs(W(0, 0) - oracle), 0.0, 1e-15);
    EXPECT_LT(max_abs(W - W.transpose()), 1e-15);
    g.layer_spacing = 0.0;
    EXPECT_ERRC(sm::rs_kernel(g), Errc::invalid_geometry);
}

TEST(RsPropagation, IdealModeDefaultsToIdentity)
{
    sm::SimGeometry g;
    EXPECT_EQ(max_abs(sm::rs_propagation(g, sm::PropagationMode::ideal) - CMat::Identity(8, 8)), 0.0);
}

TEST(SimChannelAndPower, IdentityPsiAndNorm)
{
    std::mt19937_64 rng(56);
    const CMat Hri = random_matrix(2, 4, rng), Hit = random_matrix(4, 2, rng);
    EXPECT_LT(max_abs(sm::effective_channel(Hri, CMat::Identity(4, 4), Hit) - Hri * Hit), 1e-14);
    const CMat Psi = random_unitary(4, rng), Fa = random_matrix(2, 2, rng), Fd = random_matrix(2, 1, rng);
    EXPECT_NEAR(sm::radiated_power(Psi, Hit, Fa, Fd), (Hit * Fa * Fd).squaredNorm(), 1e-12);
    EXPECT_ERRC(sm::effective_channel(Hri, CMat::Identity(3, 3), Hit), Errc::dimension_mismatch);
}

TEST(SimFrontEnd, SharedPsiAndNoLayerIdentity)
{
    static_assert(FrontEnd<sm::FrontEndModel>);
    std::mt19937_64 rng(57);
    const CMat W = random_unitary(4, rng);
    const ChannelTensor H{{random_matrix(2, 4, rng), random_matrix(2, 4, rng)}, {0.0, 1.0}};
    const sm::FrontEndModel fe(H, random_matrix(4, 2, rng), sm::interlayer_tparam(W));
    EXPECT_EQ(max_abs(fe.psi({}) - CMat::Identity(4, 4)), 0.0);
    const sm::SimConfig c{{random_phases(4, rng), random_phases(4, rng)}};
    EXPECT_EQ(max_abs(fe.ra_precoder(c, 0) - fe.ra_precoder(c, 1)), 0.0);
    EXPECT_TRUE(fe.is_feasible(c));
    EXPECT_FALSE(fe.is_feasible({{{0.0, 7.0, 0.0, 0.0}}}));
}

TEST(SimAscentProperty, RankOneMatchesGenericAscent)
{
    std::mt19937_64 rng(58);
    for (int t = 0; t < 5; ++t)
    {
        const CMat W = random_unitary(4, rng), Hri = random_matrix(2, 4, rng), Hit = random_matrix(4, 2, rng);
        const sm::FrontEndModel fe({{Hri}, {0.0}}, Hit, sm::interlayer_tparam(W));
        auto rate = [](const CMat &G) { return log2_det_identity_plus(G * G.adjoint()); };
        const sm::SimConfig init{{random_phases(4, rng), random_phases(4, rng), random_phases(4, rng)}};
        opt::OptimizerBudget b;
        b.max_iterations = 3;
        const auto generic =
            opt::coordinate_ascent_sim([&](const sm::SimConfig &c) { return rate(fe.effective_channel(c, 0)); }, init,
                                         b, 16);
        const auto fast = opt::coordinate_ascent_sim_channel(Hri, W, Hit, init, rate, b, 16);
        EXPECT_NEAR(fast.value, generic.value, 1e-9);
        ASSERT_EQ(fast.trace.size(), generic.trace.size());
        for (std::size_t i = 1; i < fast.trace.size(); ++i)
        {
            EXPECT_GE(fast.trace[i], fast.trace[i - 1]);
            EXPECT_NEAR(fast.trace[i], generic.trace[i], 1e-9);
        }
        EXPECT_NEAR(rate(fe.effective_channel(fast.config, 0)), fast.value, 1e-9);
    }
}
