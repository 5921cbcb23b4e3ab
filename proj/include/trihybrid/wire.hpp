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
#include "special_functions.hpp"

#include <algorithm>
#include <limits>

namespace trihybrid::wire
{

/// Free-space intrinsic impedance in Ohms.
inline constexpr double eta0 = 376.730313668;

/// Thin periodically fed wire along z. Ports sit at z = n * spacing.
struct WireGeometry
{
    double radius = 0.005;          // a, meters
    double spacing = 0.3;           // Delta, meters
    double k0 = 2.0 * pi;           // rad/m
    double Z0 = eta0;               // Ohms
    double feed_gap = 0.075;        // meters; 0 gives the unweighted harmonic sum
    std::size_t num_ports = 1;
    std::vector<std::size_t> excited{0};
    std::vector<cd> z_load;         // one per non-excited port, ascending port order
    cd source_impedance{0.0, 0.0};  // termination of excited ports

    double wavelength() const { return 2.0 * pi / k0; }
    double period() const { return 2.0 * pi / spacing; }

    std::vector<std::size_t> loaded_ports() const
    {
        std::vector<std::size_t> out;
        for (std::size_t n = 0; n < num_ports; ++n)
            if (std::find(excited.begin(), excited.end(), n) == excited.end())
                out.push_back(n);
        return out;
    }

    void validate() const
    {
        const std::string_view m = "wire";
        detail::require(radius > 0.0 && spacing > 0.0 && k0 > 0.0 && Z0 > 0.0, Errc::invalid_geometry, m,
                        "radius, spacing, k0 and Z0 must be > 0");
        detail::require(feed_gap >= 0.0 && feed_gap < spacing, Errc::invalid_geometry, m,
                        "feed gap must lie in [0, spacing)");
        detail::require(num_ports >= 1, Errc::invalid_geometry, m, "need at least one port");
        for (std::size_t i = 0; i < excited.size(); ++i)
        {
            detail::require(excited[i] < num_ports, Errc::invalid_geometry, m, "excited port out of range");
            for (std::size_t j = 0; j < i; ++j)
                detail::require(excited[i] != excited[j], Errc::invalid_geometry, m, "excited port listed twice");
        }
        detail::require(z_load.size() + excited.size() == num_ports, Errc::invalid_geometry, m,
                        "excited and loaded ports must partition the ports");
    }

    /// Same termination on every non-excited port.
    void set_uniform_load(cd z) { z_load.assign(num_ports - excited.size(), z); }

    /// Termination impedance of every port.
    std::vector<cd> terminations() const
    {
        validate();
        std::vector<cd> t(num_ports, source_impedance);
        const auto lp = loaded_ports();
        for (std::size_t i = 0; i < lp.size(); ++i)
            t[lp[i]] = z_load[i];
        return t;
    }
};

/// Tolerances of the harmonic truncation and quadrature loops.
struct KernelOptions
{
    double rel_tol = 1e-6;
    double fail_tol = 1e-4;
    std::size_t L_start = 8;
    std::size_t L_max = std::size_t(1) << 17;
    int level_start = 3;
    int level_max = 11;
    double t_max = 3.5;
};

namespace detail_wire
{
inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }
} // namespace detail_wire

/// One harmonic of the kernel: w / (beta^2 J0(beta a) H0^(2)(beta a)), with
/// beta = sqrt(k0^2 - alpha_l^2), Im(beta) <= 0, and w the feed-gap weight
/// sinc^2(alpha_l g / 2). Evanescent harmonics use beta = -j s and
/// J0 H0^(2) = (2j/pi) I0(s a) K0(s a).
inline cd phi_term(double alpha_l, const WireGeometry &g)
{
    const double b2 = g.k0 * g.k0 - alpha_l * alpha_l;
    const double w = g.feed_gap > 0.0 ? std::pow(detail_wire::sinc(0.5 * alpha_l * g.feed_gap), 2) : 1.0;
    if (b2 == 0.0)
        detail::fail(Errc::singular_harmonic, "wire", "grazing harmonic at alpha_l = " + std::to_string(alpha_l));
    if (b2 > 0.0)
    {
        const double beta = std::sqrt(b2);
        return w / (b2 * special::j0h02(beta * g.radius));
    }
    const double s = std::sqrt(-b2);
    return cd(0.0, w * pi / (2.0 * s * s * special::i0k0(s * g.radius)));
}

/// Phi(alpha) over the harmonics l = -L+1, ..., L. This set maps onto itself
/// under l -> 1 - l, so Phi(alpha) = Phi(2 pi / Delta - alpha) exactly.
inline cd phi_kernel(double alpha, const WireGeometry &g, std::size_t L)
{
    detail::require(L >= 1, Errc::invalid_argument, "wire", "truncation must be >= 1");
    const double P = g.period();
    cd s = 0.0;
    // Largest magnitudes last for a stable accumulation of the decaying tail.
    for (std::size_t i = L; i >= 1; --i)
    {
        const double l_hi = double(i), l_lo = 1.0 - double(i);
        s += phi_term(alpha - P * l_hi, g);
        s += phi_term(alpha - P * l_lo, g);
    }
    return s;
}

/// Smallest L in the doubling sequence with |Phi_L - Phi_2L| < tol |Phi_2L|.
inline std::size_t converged_truncation(double alpha, const WireGeometry &g, const KernelOptions &o = {})
{
    std::size_t L = o.L_start;
    cd prev = phi_kernel(alpha, g, L);
    while (2 * L <= o.L_max)
    {
        const cd next = phi_kernel(alpha, g, 2 * L);
        if (std::abs(next - prev) < o.rel_tol * std::abs(next))
            return L;
        prev = next;
        L *= 2;
    }
    detail::fail(Errc::convergence, "wire",
                 "harmonic sum not converged at L = " + std::to_string(o.L_max) +
                     " (alpha = " + std::to_string(alpha) + "); a feed gap > 0 is needed for a convergent sum");
}

/// Port impedances z[m Delta], m = 0..count-1, with convergence diagnostics.
struct ImpedanceResult
{
    std::vector<cd> z;
    std::size_t harmonics = 0;       // truncation L used for the quadrature
    int level = 0;                   // final tanh-sinh level
    double quadrature_change = 0.0;  // relative change of the last level doubling
    double truncation_change = 0.0;  // relative change from doubling L
};

namespace detail_wire
{
/// Breakpoints of the kernel in [0, 2 pi / Delta]: grazing harmonics.
inline std::vector<double> segments(const WireGeometry &g)
{
    const double P = g.period();
    const double b = std::fmod(g.k0, P);
    std::vector<double> pts{0.0, P, b, P - b};
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double x : pts)
        if (out.empty() || x - out.back() > 1e-12 * P)
            out.push_back(x);
    return out;
}

inline double rel_change(const std::vector<cd> &a, const std::vector<cd> &b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return den > 0.0 ? num / den : num;
}

/// Tanh-sinh integration of e^{j alpha m Delta} / Phi(alpha) over each
/// segment; nodes within 1e-12 of a breakpoint are dropped.
class Integrator
{
public:
    Integrator(const WireGeometry &g, std::size_t count, std::size_t L, const KernelOptions &o)
        : g_(g), count_(count), L_(L), o_(o), bp_(segments(g))
    {
    }

    /// Sum over nodes at odd multiples of h (all multiples when first).
    std::vector<cd> partial(double h, bool first) const
    {
        std::vector<cd> acc(count_, 0.0);
        const double P = g_.period();
        const long kmax = long(std::ceil(o_.t_max / h));
        for (std::size_t s = 0; s + 1 < bp_.size(); ++s)
        {
            const double a = bp_[s], b = bp_[s + 1], half = 0.5 * (b - a);
            for (long k = -kmax; k <= kmax; ++k)
            {
                if (!first && (k % 2 == 0))
                    continue;
                const double t = double(k) * h;
                const double u = 0.5 * pi * std::sinh(t);
                const double ch = std::cosh(u);
                const double w = half * 0.5 * pi * std::cosh(t) / (ch * ch);
                // distance to the nearer endpoint, computed without cancellation
                const double dist = (b - a) / (1.0 + std::exp(2.0 * std::abs(u)));
                if (dist < 1e-12 * P || w == 0.0)
                    continue;
                const double alpha = t < 0.0 ? a + dist : b - dist;
                const cd inv = 1.0 / phi_kernel(alpha, g_, L_);
                for (std::size_t m = 0; m < count_; ++m)
                    acc[m] += w * std::polar(1.0, alpha * double(m) * g_.spacing) * inv;
            }
        }
        return acc;
    }

private:
    const WireGeometry &g_;
    std::size_t count_, L_;
    const KernelOptions &o_;
    std::vector<double> bp_;
};

inline std::vector<cd> integrate(const WireGeometry &g, std::size_t count, std::size_t L, const KernelOptions &o,
                                 int &level, double &change)
{
    Integrator it(g, count, L, o);
    double h = std::ldexp(1.0, -o.level_start);
    std::vector<cd> raw = it.partial(h, true);
    std::vector<cd> cur(count);
    for (std::size_t m = 0; m < count; ++m)
        cur[m] = h * raw[m];
    // A single fixed level is a plain evaluation with nothing to compare.
    change = o.level_max > o.level_start ? std::numeric_limits<double>::infinity() : 0.0;
    for (level = o.level_start + 1; level <= o.level_max; ++level)
    {
        h *= 0.5;
        const auto add = it.partial(h, false);
        std::vector<cd> next(count);
        for (std::size_t m = 0; m < count; ++m)
        {
            raw[m] += add[m];
            next[m] = h * raw[m];
        }
        change = rel_change(cur, next);
        cur = std::move(next);
        if (change < o.rel_tol)
            return cur;
    }
    level = std::max(o.level_start, o.level_max);
    if (change > o.fail_tol)
        detail::fail(Errc::convergence, "wire",
                     "quadrature relative change " + std::to_string(change) + " at the node cap");
    return cur;
}
} // namespace detail_wire

/// z[m Delta] = Z0 Delta^2 / (8 pi k0) * integral over [0, 2 pi / Delta] of
/// e^{j alpha m Delta} / Phi(alpha). The truncation is the largest converged
/// L over probe points; it is then checked again by doubling.
inline ImpedanceResult port_impedances(const WireGeometry &g, std::size_t count, const KernelOptions &o = {})
{
    g.validate();
    detail::require(count >= 1, Errc::invalid_argument, "wire", "need at least one separation");
    const auto bp = detail_wire::segments(g);
    std::size_t L = o.L_start;
    for (std::size_t s = 0; s + 1 < bp.size(); ++s)
        for (double f : {0.1, 0.5, 0.9})
            L = std::max(L, converged_truncation(bp[s] + f * (bp[s + 1] - bp[s]), g, o));

    ImpedanceResult r;
    r.harmonics = L;
    const auto I = detail_wire::integrate(g, count, L, o, r.level, r.quadrature_change);

    // Truncation check at the final quadrature level.
    KernelOptions fixed = o;
    fixed.level_start = r.level;
    fixed.level_max = r.level;
    int lv = 0;
    double ch = 0.0;
    const auto I2 = detail_wire::integrate(g, count, 2 * L, fixed, lv, ch);
    r.truncation_change = detail_wire::rel_change(I, I2);
    if (r.truncation_change > o.fail_tol)
        detail::fail(Errc::convergence, "wire",
                     "impedance changes by " + std::to_string(r.truncation_change) + " when doubling harmonics");

    const double C = g.Z0 * g.spacing * g.spacing / (8.0 * pi * g.k0);
    for (const auto &v : I2)
        r.z.push_back(C * v);
    return r;
}

inline cd port_impedance(std::size_t m, const WireGeometry &g, const KernelOptions &o = {})
{
    return port_impedances(g, m + 1, o).z.back();
}

/// Symmetric Toeplitz matrix [Z]_{ij} = z[|i - j| Delta].
inline CMat toeplitz(const std::vector<cd> &z, std::size_t n)
{
    detail::require(z.size() >= n, Errc::dimension_mismatch, "wire", "not enough separations for the matrix");
    const auto sz = Eigen::Index(n);
    CMat Z(sz, sz);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            Z(Eigen::Index(i), Eigen::Index(j)) = z[i > j ? i - j : j - i];
    return Z;
}

inline CMat impedance_matrix(const WireGeometry &g, const KernelOptions &o = {})
{
    return toeplitz(port_impedances(g, g.num_ports, o).z, g.num_ports);
}

/// F_ra = (Z_ra + diag(z_load))^{-1}.
inline CMat wire_precoder(const CMat &Z_ra, const std::vector<cd> &z_load)
{
    if (Z_ra.rows() != Z_ra.cols() || Z_ra.rows() != Eigen::Index(z_load.size()))
        detail::fail(Errc::dimension_mismatch, "wire", "Z_ra " + dims(Z_ra) + " and " + std::to_string(z_load.size()) +
                                                          " terminations");
    CMat M = Z_ra;
    for (std::size_t i = 0; i < z_load.size(); ++i)
        M(Eigen::Index(i), Eigen::Index(i)) += z_load[i];
    return checked_inverse(M, "wire");
}

/// Tr(F^H Re{Z_ra^{-1}} F), F = F_ana F_dig.
inline double radiated_power(const CMat &Z_ra, const CMat &F_ana, const CMat &F_dig)
{
    require_product(F_ana, F_dig, "wire", "F_ana * F_dig");
    const CMat F = F_ana * F_dig;
    if (F.rows() != Z_ra.rows())
        detail::fail(Errc::dimension_mismatch, "wire", "hybrid precoder rows differ from port count");
    return hermitian_form_trace(F, real_part(checked_inverse(Z_ra, "wire")));
}

/// One observation point of the SNR map, lengths normalized by lambda.
struct FieldSample
{
    double z_over_lambda = 0.0;
    double r_over_lambda = 0.0;
    double snr = 0.0; // linear; NaN where the point coincides with a port
};

/// Port currents i = F_ra v with unit voltage on the excited ports.
inline CVec port_currents(const WireGeometry &g, const CMat &Z_ra)
{
    const CMat F = wire_precoder(Z_ra, g.terminations());
    CVec v = CVec::Zero(Eigen::Index(g.num_ports));
    for (auto e : g.excited)
        v(Eigen::Index(e)) = 1.0;
    return F * v;
}

/// SNR |h F_ra v|^2 / sigma^2 with h_n = e^{-j k0 d_n} / (4 pi d_n).
inline std::vector<FieldSample> snr_field_map(const WireGeometry &g, const CMat &Z_ra,
                                              const std::vector<double> &z_over_lambda,
                                              const std::vector<double> &r_over_lambda, double noise_var)
{
    detail::require(!z_over_lambda.empty() && !r_over_lambda.empty(), Errc::invalid_argument, "wire",
                    "observation grid is empty");
    detail::require(noise_var > 0.0, Errc::invalid_argument, "wire", "noise variance must be > 0");
    const CVec i = port_currents(g, Z_ra);
    const double lam = g.wavelength();
    std::vector<FieldSample> out;
    out.reserve(z_over_lambda.size() * r_over_lambda.size());
    for (double rl : r_over_lambda)
        for (double zl : z_over_lambda)
        {
            FieldSample s{zl, rl, 0.0};
            cd y = 0.0;
            bool singular = false;
            for (std::size_t n = 0; n < g.num_ports; ++n)
            {
                const double dz = zl * lam - double(n) * g.spacing, dr = rl * lam;
                const double d = std::sqrt(dz * dz + dr * dr);
                if (d == 0.0)
                {
                    singular = true;
                    break;
                }
                y += std::polar(1.0 / (4.0 * pi * d), -g.k0 * d) * i(Eigen::Index(n));
            }
            s.snr = singular ? std::numeric_limits<double>::quiet_NaN() : std::norm(y) / noise_var;
            out.push_back(s);
        }
    return out;
}

/// Number of samples whose SNR falls below threshold times the map maximum.
inline std::size_t count_nulls(const std::vector<FieldSample> &map, double rel_threshold)
{
    double mx = 0.0;
    for (const auto &s : map)
        if (std::isfinite(s.snr))
            mx = std::max(mx, s.snr);
    std::size_t n = 0;
    for (const auto &s : map)
        if (std::isfinite(s.snr) && s.snr < rel_threshold * mx)
            ++n;
    return n;
}

/// Index along z of the smallest SNR on the row r = r_over_lambda[row].
inline std::size_t null_index(const std::vector<FieldSample> &map, std::size_t n_z, std::size_t row)
{
    std::size_t best = 0;
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_z; ++i)
    {
        const double s = map[row * n_z + i].snr;
        if (std::isfinite(s) && s < v)
        {
            v = s;
            best = i;
        }
    }
    return best;
}

/// Wire front end: the configuration is the load vector of the non-excited
/// ports; H_eff,k = H_k F_ra.
class FrontEndModel
{
public:
    using config_type = std::vector<cd>;

    FrontEndModel(ChannelTensor H, WireGeometry g, CMat Z_ra) : H_(std::move(H)), g_(std::move(g)), Z_(std::move(Z_ra))
    {
        H_.validate("wire");
        g_.validate();
        detail::require(H_[0].cols() == Z_.rows() && Z_.rows() == Eigen::Index(g_.num_ports),
                        Errc::dimension_mismatch, "wire", "channel, impedance matrix and port count disagree");
    }

    std::size_t num_subcarriers() const { return H_.size(); }
    CMat propagation_channel(std::size_t k) const { return H_[k]; }
    const CMat &impedance() const { return Z_; }

    bool is_feasible(const config_type &c) const
    {
        if (c.size() + g_.excited.size() != g_.num_ports)
            return false;
        for (const auto &z : c)
            if (!(z.real() >= 0.0) || !std::isfinite(z.imag()))
                return false;
        return true;
    }

    CMat ra_precoder(const config_type &c, std::size_t) const
    {
        WireGeometry g = g_;
        g.z_load = c;
        return wire_precoder(Z_, g.terminations());
    }

    CMat effective_channel(const config_type &c, std::size_t k) const { return H_[k] * ra_precoder(c, k); }

    double radiated_power(const config_type &, std::size_t, const CMat &F_ana, const CMat &F_dig) const
    {
        return wire::radiated_power(Z_, F_ana, F_dig);
    }

private:
    ChannelTensor H_;
    WireGeometry g_;
    CMat Z_;
};

} // namespace trihybrid::wire
