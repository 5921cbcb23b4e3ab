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

// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Exits nonzero when any criterion fails.

#include "runner.hpp"

#include <chrono>
#include <cstring>
#include <iostream>
#include <random>

using namespace trihybrid;

namespace
{

const std::string scenario_dir = TRIHYBRID_SCENARIO_DIR;

struct Outcome
{
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string &what)
    {
        pass = pass && ok;
        details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
    }
    void note(const std::string &what) { details.push_back("      " + what); }
};

std::string num(double v, int prec = 6)
{
    std::ostringstream o;
    o.precision(prec);
    o << v;
    return o.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CMat random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64 &rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    CMat A(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i)
        {
            const double re = nd(rng);
            A(i, j) = cd(re, nd(rng));
        }
    return A;
}

CMat random_unitary(Eigen::Index n, std::mt19937_64 &rng)
{
    Eigen::HouseholderQR<CMat> qr(random_matrix(n, n, rng));
    return qr.householderQ() * CMat::Identity(n, n);
}

std::vector<double> random_phases(std::size_t n, std::mt19937_64 &rng)
{
    std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
    std::vector<double> t;
    for (std::size_t i = 0; i < n; ++i)
        t.push_back(u(rng));
    return t;
}

double max_abs(const CMat &A) { return A.size() ? A.cwiseAbs().maxCoeff() : 0.0; }

// Shared scenario runs; criterion 12 reruns them.
struct Runs
{
    std::map<std::string, cli::Scenario> scenarios;
    std::map<std::string, cli::RunResult> first;
    std::map<std::string, double> seconds;

    const cli::RunResult &get(const std::string &id)
    {
        if (!first.count(id))
        {
            scenarios.emplace(id, cli::load_scenario(scenario_dir + "/" + id + ".json"));
            const auto t0 = std::chrono::steady_clock::now();
            first.emplace(id, cli::run_scenario(scenarios.at(id)));
            seconds[id] = seconds_since(t0);
        }
        return first.at(id);
    }
};

// Upsilon per sweep point, keyed by the point's axes; NaN where undefined.
std::map<std::string, double> upsilon_by_axes(const cli::RunResult &r)
{
    std::map<std::string, double> m;
    for (const auto &row : r.summary_json["ref"]["rows"])
        m[row["axes"].dump()] =
            row.contains("upsilon") && row["upsilon"].is_number() ? row["upsilon"].get<double>() : std::nan("");
    return m;
}

template <class... Kv>
std::string axes_key(Kv... kv)
{
    cli::json j = cli::json::object();
    ((j[kv.first] = kv.second), ...);
    return j.dump();
}

// ---------------------------------------------------------------------------------------------

Outcome c1_table_designs()
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = cli::load_metrics(scenario_dir + "/table3_metrics.json");
    const auto rows = cli::ref_report(m);
    const double dt = seconds_since(t0);
    std::map<std::string, double> u;
    for (const auto &r : rows)
        u[r.design] = r.result.upsilon.value_or(std::nan(""));
    const double d1 = u["parasitic_design_1"], d2 = u["parasitic_design_2"];
    o.check(std::abs(d1 - 0.2) <= 1e-12, "design 1 upsilon = " + num(d1, 17) + " (0.200, tol 1e-12)");
    o.check(std::abs(d2 - 0.11625) <= 1e-12, "design 2 upsilon = " + num(d2, 17) + " (0.11625, tol 1e-12)");
    o.check(std::abs(d2 - 0.12) <= 0.01, "design 2 within 0.01 of rounded 0.12");
    o.check(dt < 1.0, "runtime " + num(dt, 3) + " s (< 1 s)");
    return o;
}

Outcome c2_sim_peak()
{
    Outcome o;
    ref::RefSpec s;
    s.benefits = {{"spectral_efficiency", 1.0}};
    s.costs = {{"power", 1.0}};
    const auto r = ref::compute_ref(s, {{"spectral_efficiency", 3.9}, {"power", 0.021}});
    o.check(r.upsilon && std::abs(r.db() - 22.69) <= 0.05, "upsilon = " + num(r.db(), 6) + " dB (22.69 +- 0.05)");
    return o;
}

Outcome c3_presets()
{
    Outcome o;
    auto val = [](const char *preset, std::map<std::string, double> d) {
        return ref::compute_ref(ref::regime_preset(preset), d).upsilon.value_or(std::nan(""));
    };
    const double perf = val("perf", {{"spectral_efficiency", 0.5}, {"complexity", 0.25}});
    const double save = val("save", {{"power", 0.8}, {"spectral_efficiency", 0.1}});
    const double area = val("area", {{"power", 0.4}, {"aperture", 0.2}});
    o.check(std::abs(perf - 2.0) <= 1e-12, "perf = " + num(perf, 17));
    o.check(std::abs(save - 8.0) <= 1e-12, "save = " + num(save, 17));
    o.check(std::abs(area - 2.0) <= 1e-12, "area = " + num(area, 17));
    return o;
}

Outcome c4_parasitic()
{
    Outcome o;
    std::mt19937_64 rng(401);
    std::uniform_real_distribution<double> lr(-1.0, 3.0), ux(-1e3, 1e3);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t)
    {
        const double R = std::pow(10.0, lr(rng));
        const cd w = parasitic::scalar_weight_locus(R, {ux(rng)})[0];
        worst = std::max(worst, std::abs(std::abs(w - 1.0 / (2.0 * R)) - 1.0 / (2.0 * R)));
    }
    o.check(worst <= 1e-12, "circle identity, 1e4 samples, R in [0.1, 1000]: max error " + num(worst, 3));

    double pmin = std::numeric_limits<double>::infinity();
    std::uniform_real_distribution<double> r(0.0, 20.0), x(-200.0, 200.0);
    for (int t = 0; t < 1000; ++t)
    {
        const CMat Z = parasitic::synthesize_passive_impedance(6, rng);
        const auto b = parasitic::partition(Z, random_matrix(2, 6, rng), 2);
        parasitic::ParasiticLoads loads;
        for (int i = 0; i < 4; ++i)
        {
            const double re = r(rng);
            loads.Z_R.emplace_back(re, x(rng));
        }
        const CMat F = parasitic::parasitic_precoder(b.Z_P, loads);
        pmin = std::min(pmin, parasitic::radiated_power(b, F, random_matrix(2, 2, rng), random_matrix(2, 2, rng)));
    }
    o.check(pmin >= -1e-9, "passivity on 1e3 synthesized sets: min P = " + num(pmin, 6));
    return o;
}

Outcome c5_dma()
{
    Outcome o;
    std::mt19937_64 rng(501);
    const auto g = dma::DmaGeometry::uniform(8, 2, 1.0, 0.4);
    const CMat Fa = random_matrix(2, 2, rng), Fd = random_matrix(2, 2, rng);
    for (double z : {pi, -pi})
    {
        const double p = dma::radiated_power(g, {std::vector<double>(g.num_elements(), z)}, Fa, Fd);
        o.check(p == 0.0, "all z = " + std::string(z > 0 ? "+" : "-") + "pi: radiated power " + num(p, 17));
    }
    const double c1 = dma::calibrate_coupling(1), c8 = dma::calibrate_coupling(8);
    o.check(std::abs(c1 - 0.6838) <= 1e-4, "calibrate_coupling(1) = " + num(c1, 8) + " (0.6838 +- 1e-4)");
    o.check(std::abs(c8 - 0.2) <= 1e-4, "calibrate_coupling(8) = " + num(c8, 8) + " (0.2 +- 1e-4)");
    std::uniform_real_distribution<double> uz(-pi, pi), un(1e-3, 1.0);
    double lo = 1.0, hi = 0.0;
    for (int t = 0; t < 10000; ++t)
    {
        const auto gt = dma::DmaGeometry::uniform(1 + std::size_t(t % 16), 1, 1.0, un(rng));
        dma::DmaConfig c;
        for (std::size_t i = 0; i < gt.num_elements(); ++i)
            c.z.push_back(uz(rng));
        const double s = std::norm(dma::residual_transmission(gt, c, 0));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    o.check(lo >= 0.0 && hi <= 1.0, "|S12|^2 over 1e4 configs in [" + num(lo, 4) + ", " + num(hi, 6) + "]");
    return o;
}

Outcome c6_pass()
{
    Outcome o;
    std::mt19937_64 rng(601);
    std::uniform_real_distribution<double> ud(1e-3, 1.0 - 1e-3);
    double worst = 0.0;
    for (int t = 0; t < 10000; ++t)
    {
        std::vector<double> d;
        for (int m = 0; m < 1 + t % 12; ++m)
            d.push_back(ud(rng));
        const auto a = pass::amplitudes(d);
        double s = 0.0, prod = 1.0;
        for (std::size_t m = 0; m < d.size(); ++m)
        {
            s += a[m] * a[m];
            prod *= 1.0 - d[m] * d[m];
        }
        worst = std::max(worst, std::abs(s + prod - 1.0));
    }
    o.check(worst <= 1e-14, "telescoping identity, 1e4 draws: max error " + num(worst, 3));

    double rt = 0.0;
    for (std::size_t M = 1; M <= 16; ++M)
        for (double alpha : {0.05, 0.1, 0.2, 0.25, 0.3, 0.5})
            if (pass::equal_power_feasible(M, alpha))
                for (double a : pass::amplitudes(pass::equal_power_deltas(M, alpha)))
                    rt = std::max(rt, std::abs(a - alpha));
    o.check(rt <= 1e-12, "equal-power round trip: max error " + num(rt, 3));

    bool exact = true;
    std::uniform_real_distribution<double> up(0.01, 0.5);
    for (int t = 0; t < 200; ++t)
    {
        pass::WaveguideLayout l;
        l.beta_g = 5.0;
        for (std::size_t n : {3u, 4u})
        {
            std::vector<double> x, d;
            for (std::size_t m = 0; m < n; ++m)
            {
                x.push_back(0.2 * double(m + 1));
                d.push_back(ud(rng));
            }
            l.positions.push_back(x);
            l.deltas.push_back(d);
        }
        const CMat Fa = random_matrix(2, 2, rng), Fd = random_matrix(2, 2, rng);
        const double before = pass::radiated_power(l, Fa, Fd);
        for (auto &x : l.positions)
            for (std::size_t m = 0; m < x.size(); ++m)
                x[m] = (m ? x[m - 1] : 0.0) + up(rng);
        exact = exact && pass::radiated_power(l, Fa, Fd) == before;
    }
    o.check(exact, "radiated power bitwise invariant to pinch positions over 200 layouts");
    return o;
}

sim::SimStack ideal_stack(const std::vector<std::vector<double>> &theta, const CMat &W)
{
    sim::SimStack s;
    for (const auto &t : theta)
        s.layers.push_back(sim::MetaLayer::ideal(t));
    s.P.assign(theta.size() - 1, sim::interlayer_tparam(W));
    s.H_IT = CMat::Identity(W.rows(), W.rows());
    return s;
}

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

Outcome c7_sim()
{
    Outcome o;
    std::mt19937_64 rng(701);
    double unit = 0.0;
    for (int t = 0; t < 50; ++t)
    {
        const CMat W = random_unitary(4, rng);
        const CMat Psi =
            sim::cascade(ideal_stack({random_phases(4, rng), random_phases(4, rng), random_phases(4, rng)}, W));
        unit = std::max(unit, max_abs(Psi.adjoint() * Psi - CMat::Identity(4, 4)));
    }
    o.check(unit <= 1e-10, "unitary Psi for lossless reflectionless stacks: max error " + num(unit, 3));

    double cas = 0.0;
    for (Eigen::Index n = 1; n <= 4; ++n)
        for (std::size_t L = 1; L <= 3; ++L)
            for (int t = 0; t < 5; ++t)
            {
                const CMat W = random_matrix(n, n, rng) + 2.0 * CMat::Identity(n, n);
                std::vector<std::vector<double>> th;
                for (std::size_t l = 0; l < L; ++l)
                    th.push_back(random_phases(std::size_t(n), rng));
                const CMat ref = direct_propagation(th, W);
                cas = std::max(cas, max_abs(sim::cascade(ideal_stack(th, W)) - ref) / std::max(1.0, max_abs(ref)));
            }
    o.check(cas <= 1e-9, "T-parameter cascade vs direct propagation, N_m <= 4, L <= 3: max error " + num(cas, 3));

    double red = 0.0;
    for (int t = 0; t < 200; ++t)
    {
        const auto th = random_phases(1 + std::size_t(t % 6), rng);
        const auto n = Eigen::Index(th.size());
        CMat oracle = CMat::Zero(2 * n, 2 * n);
        for (Eigen::Index i = 0; i < n; ++i)
        {
            oracle(i, i) = std::polar(1.0, th[std::size_t(i)]);
            oracle(n + i, n + i) = std::polar(1.0, -th[std::size_t(i)]);
        }
        red = std::max(red, max_abs(sim::layer_tparam(sim::MetaLayer::ideal(th)) - oracle));
    }
    o.check(red <= 1e-14, "lossless layer reduces to blkdiag(Theta, Theta^-1): max error " + num(red, 3));
    return o;
}

Outcome c8_wire(Runs &runs)
{
    Outcome o;
    const auto &r = runs.get("wire_fields");
    const auto &s = runs.scenarios.at("wire_fields");
    const auto &cfg = s.config;
    wire::WireGeometry g;
    g.radius = cfg["radius"].get<double>();
    g.spacing = cfg["spacing"].get<double>();
    g.k0 = cfg["k0"].get<double>();
    g.feed_gap = cfg["feed_gap"].get<double>();
    g.num_ports = cfg["num_ports"].get<std::size_t>();
    g.excited = {7};
    g.set_uniform_load(cd(377.0, 0.0));
    const auto imp = wire::port_impedances(g, g.num_ports);
    const CMat Z = wire::toeplitz(imp.z, g.num_ports);
    bool sym = true;
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        for (Eigen::Index j = 0; j < Z.cols(); ++j)
        {
            sym = sym && Z(i, j) == Z(j, i);
            if (i + 1 < Z.rows() && j + 1 < Z.cols())
                sym = sym && Z(i, j) == Z(i + 1, j + 1);
        }
    o.check(sym, "Z_ra symmetric Toeplitz, bitwise (" + std::to_string(g.num_ports) + " ports)");
    o.check(imp.quadrature_change < 1e-6,
            "quadrature self-convergence " + num(imp.quadrature_change, 3) + " (< 1e-6 relative)");
    o.check(imp.truncation_change < 1e-6, "kernel truncation self-convergence " + num(imp.truncation_change, 3) +
                                              " (< 1e-6 relative), " + std::to_string(imp.harmonics) + " harmonics");

    const auto &ax = s.axes;
    std::size_t load_ax = 0, exc_ax = 1;
    if (ax[0].name != "load_ohm")
        std::swap(load_ax, exc_ax);
    const auto zs = cfg["z_over_lambda"];
    const std::vector<double> zgrid = cli::parse::reals(zs, "/config/z_over_lambda");
    std::map<std::string, std::map<double, std::size_t>> idx;
    for (std::size_t p = 0; p < r.points.size(); ++p)
    {
        const double load = r.points[p][load_ax].get<double>();
        const std::string exc = r.points[p][exc_ax].dump();
        const double nz = r.summary[p].mean.at("null_z_over_lambda");
        const auto it = std::find(zgrid.begin(), zgrid.end(), nz);
        idx[exc][load] = std::size_t(it - zgrid.begin());
        o.note("excited " + exc + ", load " + num(load) + " ohm: null at z/lambda = " + num(nz) + " (index " +
               std::to_string(idx[exc][load]) + "), " + num(r.summary[p].mean.at("null_count")) + " nulls");
    }
    const auto &ref = idx.at("[7]");
    o.check(ref.at(377.0) != ref.at(50.0), "377 -> 50 ohm moves the null index with port 7 excited (" +
                                               std::to_string(ref.at(377.0)) + " vs " + std::to_string(ref.at(50.0)) +
                                               ")");
    return o;
}

Outcome c9_pixel()
{
    Outcome o;
    std::mt19937_64 rng(901);
    std::uniform_real_distribution<double> ue(0.2, 1.0);
    std::size_t states = 0, bad = 0;
    for (std::size_t n_p = 1; n_p <= 3; ++n_p)
        for (Eigen::Index n_sub = 1; n_sub <= 4; ++n_sub)
        {
            std::vector<CMat> D;
            std::vector<std::vector<double>> eta;
            for (std::size_t p = 0; p < n_p; ++p)
            {
                D.push_back(random_matrix(3, n_sub, rng));
                eta.emplace_back();
                for (Eigen::Index n = 0; n < n_sub; ++n)
                    eta.back().push_back(ue(rng));
            }
            const auto d = pixel::StateDictionary::from_complex(std::move(D), eta);
            std::vector<pixel::SelectionState> all{{}};
            for (std::size_t p = 0; p < n_p; ++p)
            {
                std::vector<pixel::SelectionState> next;
                for (const auto &s : all)
                    for (Eigen::Index n = 0; n < n_sub; ++n)
                    {
                        auto t = s;
                        t.n.push_back(std::size_t(n));
                        next.push_back(t);
                    }
                all = std::move(next);
            }
            for (const auto &s : all)
            {
                ++states;
                bad += !(pixel::nearest_state(d, pixel::fra_from_selection(d, s)) == s);
            }
        }
    o.check(bad == 0, "round trip over full enumeration, N_p <= 3, N_sub <= 4: " + std::to_string(states) +
                          " states, " + std::to_string(bad) + " mismatches");

    bool bounded = true;
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<CMat> D;
        std::vector<std::vector<double>> eta;
        for (int p = 0; p < 3; ++p)
        {
            D.push_back(random_matrix(2, 4, rng));
            eta.push_back({ue(rng), ue(rng), ue(rng), ue(rng)});
        }
        const auto d = pixel::StateDictionary::from_complex(std::move(D), eta);
        const pixel::SelectionState s{{std::size_t(t % 4), std::size_t(t % 3), std::size_t(t % 2)}};
        const CMat Fa = random_matrix(3, 3, rng), Fd = random_matrix(3, 2, rng);
        double lo = 1.0, hi = 0.0;
        for (std::size_t p = 0; p < 3; ++p)
        {
            lo = std::min(lo, d.eta[p][s.n[p]]);
            hi = std::max(hi, d.eta[p][s.n[p]]);
        }
        const double f = (Fa * Fd).squaredNorm();
        const double P = pixel::radiated_power(d, pixel::fra_from_selection(d, s), Fa, Fd);
        bounded = bounded && P <= hi * f * (1.0 + 1e-12) && P >= lo * f * (1.0 - 1e-12);
    }
    o.check(bounded, "min(eta) ||F||^2 <= P <= max(eta) ||F||^2 on 1e3 draws");
    return o;
}

Outcome c10_optimizers()
{
    Outcome o;
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> lg(-3.0, 2.0), up(0.01, 100.0);
    double kkt = 0.0;
    for (int t = 0; t < 1000; ++t)
    {
        std::vector<double> g;
        for (int i = 0; i < 1 + t % 16; ++i)
            g.push_back(std::pow(10.0, lg(rng)));
        const double P = up(rng);
        const auto r = opt::waterfilling(g, P, 1.0);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
        {
            s += r.power[i];
            // Stationarity with the multiplier of p_i >= 0, scaled by the water level.
            const double slack = 1.0 / g[i] + r.power[i] - r.mu;
            const double res = r.power[i] > 0.0 ? std::abs(slack) : std::max(0.0, -slack);
            kkt = std::max(kkt, res / std::max(1.0, r.mu));
        }
        kkt = std::max(kkt, std::abs(s - P) / std::max(1.0, P));
    }
    o.check(kkt < 1e-8, "waterfilling KKT residual over 1e3 instances: " + num(kkt, 3));

    const auto g = dma::DmaGeometry::uniform(4, 1, 1.0, 0.4);
    auto gain = [&](const std::vector<double> &z) { return dma::realized_gain(g, {z}); };
    const auto ex = opt::exhaustive_phases(gain, 4, 16);
    const auto ga = opt::genetic_dma(gain, 4, opt::OptimizerBudget{}, 16);
    o.check(ga.value >= 0.95 * ex.value, "genetic DMA " + num(ga.value) + " vs exhaustive " + num(ex.value) +
                                             " (ratio " + num(ga.value / ex.value, 4) + ", >= 0.95)");

    bool mono = true;
    for (int t = 0; t < 20; ++t)
    {
        const CMat W = random_unitary(3, rng), Hri = random_matrix(2, 3, rng), Hit = random_matrix(3, 2, rng);
        auto rate = [](const CMat &G) { return log2_det_identity_plus(G * G.adjoint()); };
        const auto init = sim::SimConfig{{random_phases(3, rng), random_phases(3, rng)}};
        opt::OptimizerBudget b;
        b.max_iterations = 5;
        const auto rc = opt::coordinate_ascent_sim_channel(Hri, W, Hit, init, rate, b, 32);
        for (std::size_t i = 1; i < rc.trace.size(); ++i)
            mono = mono && rc.trace[i] >= rc.trace[i - 1];
        auto generic = [&](const sim::SimConfig &c) {
            sim::SimStack s;
            for (const auto &th : c.theta)
                s.layers.push_back(sim::MetaLayer::ideal(th));
            s.P.assign(c.theta.size() - 1, sim::interlayer_tparam(W));
            s.H_IT = Hit;
            return rate(Hri * sim::cascade(s));
        };
        const auto rg = opt::coordinate_ascent_sim(generic, init, b, 32);
        for (std::size_t i = 1; i < rg.trace.size(); ++i)
            mono = mono && rg.trace[i] >= rg.trace[i - 1];
    }
    o.check(mono, "coordinate-ascent traces nondecreasing on 20 random stacks");
    return o;
}

Outcome c11_qualitative(Runs &runs)
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double run_time = 0.0;
    for (const auto *id : {"dma_ref", "sim_ref", "polarization_ref"})
    {
        runs.get(id);
        run_time += runs.seconds.at(id);
        o.check(runs.scenarios.at(id).realizations <= 50,
                std::string(id) + ": " + std::to_string(runs.scenarios.at(id).realizations) +
                    " realizations (<= 50), " + num(runs.seconds.at(id), 3) + " s");
    }

    // DMA: increasing in N_x at every N_y; interior maximum over N_y at every N_x.
    {
        const auto u = upsilon_by_axes(runs.get("dma_ref"));
        const std::vector<int> nx{4, 6, 8}, ny{1, 2, 3, 4};
        auto at = [&](int x, int y) { return u.at(axes_key(std::pair{"n_x", x}, std::pair{"n_y", y})); };
        for (int y : ny)
        {
            std::string line = "DMA N_y = " + std::to_string(y) + ":";
            bool inc = true;
            for (std::size_t i = 0; i < nx.size(); ++i)
            {
                line += " " + (std::isnan(at(nx[i], y)) ? std::string("cost-neutral") : num(at(nx[i], y), 5));
                if (i)
                    inc = inc && at(nx[i], y) > at(nx[i - 1], y);
            }
            o.check(inc, line + " (increasing in N_x)");
        }
        for (int x : nx)
        {
            std::size_t best = 0;
            for (std::size_t i = 1; i < ny.size(); ++i)
                if (at(x, ny[i]) > at(x, ny[best]))
                    best = i;
            o.check(best > 0 && best + 1 < ny.size(),
                    "DMA N_x = " + std::to_string(x) + ": max over N_y at N_y = " + std::to_string(ny[best]) +
                        " (interior)");
        }
    }

    // SIM: second differences in L nonpositive beyond the first layers.
    {
        const auto u = upsilon_by_axes(runs.get("sim_ref"));
        for (int b : {1, 2, 4, 8})
        {
            std::vector<double> v;
            std::string line = "SIM b = " + std::to_string(b) + ", L = 1..6:";
            for (int L = 1; L <= 6; ++L)
            {
                v.push_back(u.at(axes_key(std::pair{"layers", L}, std::pair{"dac_bits", b})));
                line += " " + num(v.back(), 5);
            }
            std::string d2s;
            bool concave = true;
            for (std::size_t i = 1; i + 1 < v.size(); ++i)
            {
                const double d2 = v[i + 1] - 2.0 * v[i] + v[i - 1];
                d2s += " " + num(d2, 4);
                concave = concave && d2 <= 0.0;
            }
            o.note(line);
            o.check(concave, "SIM b = " + std::to_string(b) + " second differences (L = 2..5):" + d2s + " (<= 0)");
        }
    }

    // Polarization: reconfigurable above dual at every chi in [0.1, 0.5].
    {
        const auto u = upsilon_by_axes(runs.get("polarization_ref"));
        for (double chi : {0.1, 0.2, 0.3, 0.4, 0.5})
        {
            const double d = u.at(axes_key(std::pair{"design", "dual"}, std::pair{"chi", chi}));
            const double r = u.at(axes_key(std::pair{"design", "reconfig"}, std::pair{"chi", chi}));
            o.check(r > d, "chi = " + num(chi) + ": reconfig " + num(r, 5) + " > dual " + num(d, 5));
        }
    }
    const double total = seconds_since(t0);
    o.check(total < 300.0, "desk-scale runtime " + num(total, 4) + " s (< 300 s), scenario runs " +
                               num(run_time, 4) + " s");
    return o;
}

Outcome c12_determinism(Runs &runs, const std::filesystem::path &work)
{
    Outcome o;
    for (const auto *id : {"parasitic_aperture", "pixel_selection", "pass_pinches", "wire_fields", "dma_ref",
                           "sim_ref", "polarization_ref"})
    {
        const auto &first = runs.get(id);
        const auto &s = runs.scenarios.at(id);
        cli::RunOptions a, b;
        a.out_dir = (work / "run_a").string();
        b.out_dir = (work / "run_b").string();
        const auto pa = cli::write_outputs(s, first, a);
        const auto second = cli::run_scenario(s, b);
        const auto pb = cli::write_outputs(s, second, b);
        bool same = pa.size() == pb.size();
        for (std::size_t i = 0; same && i < pa.size(); ++i)
            same = cli::read_file(pa[i].string()) == cli::read_file(pb[i].string());
        o.check(same, std::string(id) + ": " + std::to_string(pa.size()) + " output file(s) byte-identical on rerun");
    }
    return o;
}

} // namespace

int main(int argc, char **argv)
{
    std::filesystem::path work = std::filesystem::temp_directory_path() / "trihybrid_acceptance";
    for (int i = 1; i < argc; ++i)
    {
        if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc)
            work = argv[++i];
        else
        {
            std::cerr << "usage: " << argv[0] << " [--work-dir DIR]\n";
            return 2;
        }
    }
    std::filesystem::remove_all(work);
    std::filesystem::create_directories(work);

    Runs runs;
    struct Criterion
    {
        int id;
        const char *title;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "REF regression on tabulated parasitic designs", c1_table_designs},
        {2, "SIM REF peak in decibels", c2_sim_peak},
        {3, "regime presets", c3_presets},
        {4, "parasitic circle locus and passivity", c4_parasitic},
        {5, "DMA off state, calibration, residual bounds", c5_dma},
        {6, "PASS identities", c6_pass},
        {7, "SIM cascade oracles", c7_sim},
        {8, "wire numerics and null shift", [&] { return c8_wire(runs); }},
        {9, "pixel round trip and power bounds", c9_pixel},
        {10, "optimizer sanity", c10_optimizers},
        {11, "qualitative REF trends at desk scale", [&] { return c11_qualitative(runs); }},
        {12, "end-to-end determinism", [&] { return c12_determinism(runs, work); }},
    };

    int failed = 0;
    for (const auto &c : criteria)
    {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try
        {
            o = c.run();
        }
        catch (const std::exception &e)
        {
            o.check(false, std::string("exception: ") + e.what());
        }
        failed += !o.pass;
        std::cout << "criterion " << (c.id < 10 ? " " : "") << c.id << ": " << (o.pass ? "PASS" : "FAIL") << "  "
                  << c.title << " [" << num(seconds_since(t0), 3) << " s]\n";
        for (const auto &d : o.details)
            std::cout << "    " << d << "\n";
        std::cout.flush();
    }
    std::cout << "summary: " << criteria.size() - std::size_t(failed) << "/" << criteria.size() << " PASS, " << failed
              << " FAIL\n";
    return failed ? 1 : 0;
}
