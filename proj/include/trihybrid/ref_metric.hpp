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

#include "errors.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace trihybrid::ref
{

/// A metric value in linear units. Logarithmic values are rejected by every
/// REF operation.
struct Metric
{
    double value = 0.0;
    std::string unit;
    bool is_logarithmic = false;
};

/// Named metrics of one design.
struct DesignPoint
{
    std::string name;
    std::map<std::string, Metric> metrics;

    const Metric &at(const std::string &key) const
    {
        auto it = metrics.find(key);
        if (it == metrics.end())
            detail::fail(Errc::specification, "ref_metric", "design '" + name + "' has no metric '" + key + "'");
        return it->second;
    }
};

/// |q - q_ref| / |q_ref|.
inline double relative_change(const Metric &q, const Metric &q_ref)
{
    if (q.is_logarithmic || q_ref.is_logarithmic)
        detail::fail(Errc::linearity_violation, "ref_metric",
                     "metric in logarithmic units (" + (q.is_logarithmic ? q.unit : q_ref.unit) +
                         "); convert to linear units first");
    if (!std::isfinite(q.value) || !std::isfinite(q_ref.value))
        detail::fail(Errc::non_finite, "ref_metric", "metric value is not finite");
    if (q_ref.value == 0.0)
        detail::fail(Errc::undefined_baseline, "ref_metric", "baseline metric is zero");
    return std::abs(q.value - q_ref.value) / std::abs(q_ref.value);
}

inline double relative_change(double q, double q_ref) { return relative_change(Metric{q, "", false}, Metric{q_ref, "", false}); }

/// Benefit set G, cost set B (disjoint, nonempty) with weights in [0, 1];
/// constraints K are reported but never enter the ratio.
struct RefSpec
{
    std::map<std::string, double> benefits;
    std::map<std::string, double> costs;
    std::vector<std::string> constraints;
    double epsilon = 1e-3;

    void validate() const
    {
        const std::string_view m = "ref_metric";
        detail::require(!benefits.empty() && !costs.empty(), Errc::specification, m,
                        "benefit and cost sets must be nonempty");
        detail::require(epsilon >= 0.0, Errc::specification, m, "epsilon must be >= 0");
        for (const auto &[k, w] : benefits)
        {
            detail::require(!costs.count(k), Errc::specification, m, "metric '" + k + "' is both benefit and cost");
            detail::require(w >= 0.0 && w <= 1.0, Errc::specification, m, "weight of '" + k + "' outside [0, 1]");
        }
        for (const auto &[k, w] : costs)
            detail::require(w >= 0.0 && w <= 1.0, Errc::specification, m, "weight of '" + k + "' outside [0, 1]");
        detail::require(total_weight() > 0.0, Errc::specification, m, "weights sum to zero");
    }

    double total_weight() const
    {
        double s = 0.0;
        for (const auto &[k, w] : benefits)
            s += w;
        for (const auto &[k, w] : costs)
            s += w;
        return s;
    }
};

/// Upsilon, or cost-neutral status when the weighted cost sum is below epsilon
/// (or zero with epsilon = 0).
struct RefResult
{
    std::optional<double> upsilon;
    bool cost_neutral = false;
    double benefit_sum = 0.0;
    double cost_sum = 0.0;
    std::map<std::string, double> deltas;

    double db() const
    {
        if (!upsilon)
            detail::fail(Errc::undefined_baseline, "ref_metric", "cost-neutral result has no ratio");
        return 10.0 * std::log10(*upsilon);
    }
};

/// Weights are normalized to sum to one over G and B before use, so only
/// their proportions matter.
inline RefResult compute_ref(const RefSpec &spec, const std::map<std::string, double> &deltas)
{
    spec.validate();
    const double norm = spec.total_weight();
    RefResult r;
    auto take = [&](const std::string &k) {
        auto it = deltas.find(k);
        if (it == deltas.end())
            detail::fail(Errc::specification, "ref_metric", "no relative change for metric '" + k + "'");
        detail::require(it->second >= 0.0 && std::isfinite(it->second), Errc::invalid_argument, "ref_metric",
                        "relative change of '" + k + "' must be finite and >= 0");
        r.deltas[k] = it->second;
        return it->second;
    };
    for (const auto &[k, w] : spec.benefits)
        r.benefit_sum += w / norm * take(k);
    for (const auto &[k, w] : spec.costs)
        r.cost_sum += w / norm * take(k);
    if (r.cost_sum < spec.epsilon || r.cost_sum == 0.0)
        r.cost_neutral = true;
    else
        r.upsilon = r.benefit_sum / r.cost_sum;
    return r;
}

/// REF of a design against a baseline; every G and B metric must be present in both.
inline RefResult compute_ref(const RefSpec &spec, const DesignPoint &design, const DesignPoint &baseline)
{
    std::map<std::string, double> d;
    for (const auto *set : {&spec.benefits, &spec.costs})
        for (const auto &[k, w] : *set)
            d[k] = relative_change(design.at(k), baseline.at(k));
    return compute_ref(spec, d);
}

/// perf: SE over complexity; save: power over SE; area: power over aperture
/// with SE held as a constraint.
inline RefSpec regime_preset(const std::string &name)
{
    RefSpec s;
    if (name == "perf")
    {
        s.benefits = {{"spectral_efficiency", 1.0}};
        s.costs = {{"complexity", 1.0}};
    }
    else if (name == "save")
    {
        s.benefits = {{"power", 1.0}};
        s.costs = {{"spectral_efficiency", 1.0}};
    }
    else if (name == "area")
    {
        s.benefits = {{"power", 1.0}};
        s.costs = {{"aperture", 1.0}};
        s.constraints = {"spectral_efficiency"};
    }
    else
        detail::fail(Errc::specification, "ref_metric", "unknown regime preset '" + name + "'");
    return s;
}

/// Component powers in Watts. Defaults follow a common low-resolution DAC
/// transceiver model and are inputs, not measured values.
struct PowerModel
{
    double eta_pa = 0.27;
    double p_lo = 22.5e-3;
    double p_rf = 31.6e-3;    // per RF chain
    double p_bias = 0.65e-3;  // per tunable element
    double c_dac = 494e-15;   // J per conversion step
    double f_s = 1e9;         // sample rate

    void validate() const
    {
        detail::require(eta_pa > 0.0 && eta_pa <= 1.0, Errc::invalid_argument, "ref_metric", "PA efficiency outside (0, 1]");
        detail::require(p_lo >= 0.0 && p_rf >= 0.0 && p_bias >= 0.0 && c_dac >= 0.0 && f_s >= 0.0,
                        Errc::invalid_argument, "ref_metric", "power components must be >= 0");
    }

    /// c_DAC 2^b f_s; zero bits means no signal DAC.
    double dac_power(unsigned bits) const { return bits == 0 ? 0.0 : c_dac * std::ldexp(1.0, int(bits)) * f_s; }
};

enum class Variant
{
    static_array,
    dual,
    reconfig
};

/// Counts entering the consumption model. DAC chains default to the RF chains
/// and double for the dual-polarized variant.
struct HardwareCounts
{
    double p_tx = 0.0;
    std::size_t n_rf = 0;
    unsigned dac_bits = 0;
    std::size_t n_bias = 0;
    Variant variant = Variant::static_array;
    double chi = 0.0;
};

/// P_tx/eta + P_LO + factor N_rf P_RF + N_bias P_bias + chains P_DAC(b), with
/// factor 1 (static), 2 (dual) or 1 + chi (reconfig).
inline double power_consumption(const PowerModel &m, const HardwareCounts &c)
{
    m.validate();
    detail::require(c.p_tx >= 0.0, Errc::invalid_argument, "ref_metric", "transmit power must be >= 0");
    detail::require(c.chi >= 0.0, Errc::invalid_argument, "ref_metric", "chi must be >= 0");
    double factor = 1.0;
    double chains = double(c.n_rf);
    if (c.variant == Variant::dual)
    {
        factor = 2.0;
        chains *= 2.0;
    }
    else if (c.variant == Variant::reconfig)
        factor = 1.0 + c.chi;
    return c.p_tx / m.eta_pa + m.p_lo + factor * double(c.n_rf) * m.p_rf + double(c.n_bias) * m.p_bias +
           chains * m.dac_power(c.dac_bits);
}

} // namespace trihybrid::ref
