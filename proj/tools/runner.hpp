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

#include "trihybrid/trihybrid.hpp"

#include <json.hpp>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace trihybrid::cli
{

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------------------------

/// One schema or cross-reference problem, addressed by a JSON pointer.
struct Diagnostic
{
    std::string path;
    std::string message;

    std::string str() const { return (path.empty() ? std::string("/") : path) + ": " + message; }
};

struct FieldError
{
    std::string path;
    std::string message;
};

/// Raised when a scenario or metrics file cannot be used; carries every
/// diagnostic found.
class ScenarioError : public Error
{
public:
    ScenarioError(const std::string &file, std::vector<Diagnostic> d)
        : Error(Errc::parse, "cli", summary(file, d)), diagnostics_(std::move(d))
    {
    }
    const std::vector<Diagnostic> &diagnostics() const { return diagnostics_; }

private:
    static std::string summary(const std::string &file, const std::vector<Diagnostic> &d)
    {
        std::string s = file + ": " + std::to_string(d.size()) + " problem(s)";
        for (const auto &x : d)
            s += "\n  " + x.str();
        return s;
    }
    std::vector<Diagnostic> diagnostics_;
};

inline std::string read_file(const std::string &path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        detail::fail(Errc::parse, "cli", "cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

/// Parses JSON text; syntax errors report line and column.
inline json parse_json(const std::string &text, const std::string &file)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
        std::string what = e.what();
        if (auto p = what.find("syntax error"); p != std::string::npos)
            what = what.substr(p);
        detail::fail(Errc::parse, "cli", file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    char b[17];
    std::snprintf(b, sizeof b, "%016" PRIx64, v);
    return b;
}

/// %.17g: round-trips every double.
inline std::string fmt(double v)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

// ---------------------------------------------------------------------------------------------
// Field parsers
// ---------------------------------------------------------------------------------------------

namespace parse
{

[[noreturn]] inline void bad(const std::string &path, const std::string &msg) { throw FieldError{path, msg}; }

inline double real(const json &j, const std::string &path)
{
    if (!j.is_number())
        bad(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        bad(path, "expected a finite number");
    return v;
}

inline auto real_min(double lo, bool strict)
{
    return [=](const json &j, const std::string &path) {
        const double v = real(j, path);
        if (strict ? !(v > lo) : !(v >= lo))
            bad(path, std::string("must be ") + (strict ? "> " : ">= ") + fmt(lo));
        return v;
    };
}

inline auto real_range(double lo, double hi)
{
    return [=](const json &j, const std::string &path) {
        const double v = real(j, path);
        if (v < lo || v > hi)
            bad(path, "must lie in [" + fmt(lo) + ", " + fmt(hi) + "]");
        return v;
    };
}

inline auto count(std::size_t lo)
{
    return [=](const json &j, const std::string &path) {
        if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
            bad(path, "expected a non-negative integer");
        const auto v = j.get<std::uint64_t>();
        if (v < lo)
            bad(path, "must be >= " + std::to_string(lo));
        return std::size_t(v);
    };
}

inline auto bits()
{
    return [](const json &j, const std::string &path) {
        const auto v = count(1)(j, path);
        if (v > 16)
            bad(path, "DAC resolution must lie in [1, 16] bits");
        return unsigned(v);
    };
}

inline auto text(std::vector<std::string> allowed = {})
{
    return [=](const json &j, const std::string &path) {
        if (!j.is_string())
            bad(path, "expected a string");
        auto s = j.get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end())
        {
            std::string list;
            for (const auto &a : allowed)
                list += (list.empty() ? "" : ", ") + a;
            bad(path, "unknown value '" + s + "' (expected one of: " + list + ")");
        }
        return s;
    };
}

/// Array of numbers, or {"start", "stop", "count"} for an inclusive linear grid.
inline std::vector<double> reals(const json &j, const std::string &path)
{
    std::vector<double> out;
    if (j.is_array())
    {
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(real(j[i], path + "/" + std::to_string(i)));
        return out;
    }
    if (j.is_object())
    {
        for (const auto &k : {"start", "stop", "count"})
            if (!j.contains(k))
                bad(path + "/" + k, "missing");
        for (const auto &[k, v] : j.items())
            if (k != "start" && k != "stop" && k != "count")
                bad(path + "/" + k, "unknown field");
        const double a = real(j["start"], path + "/start"), b = real(j["stop"], path + "/stop");
        const auto n = count(1)(j["count"], path + "/count");
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
        return out;
    }
    bad(path, "expected an array of numbers or a {start, stop, count} grid");
}

inline std::vector<std::size_t> counts(const json &j, const std::string &path)
{
    if (!j.is_array())
        bad(path, "expected an array of non-negative integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(count(0)(j[i], path + "/" + std::to_string(i)));
    return out;
}

} // namespace parse

/// Named setters for the fields of one parameter struct.
template <class P>
struct Schema
{
    std::map<std::string, std::function<void(P &, const json &, const std::string &)>> set;

    template <class Acc, class Parse>
    Schema &add(const std::string &name, Acc acc, Parse p)
    {
        set[name] = [acc, p](P &x, const json &j, const std::string &path) { acc(x) = p(j, path); };
        return *this;
    }

    bool has(const std::string &name) const { return set.count(name) > 0; }

    /// Applies every member of an object; unknown members and type errors are
    /// collected rather than thrown.
    void apply(P &x, const json &obj, const std::string &path, std::vector<Diagnostic> &diag) const
    {
        if (!obj.is_object())
        {
            diag.push_back({path, "expected an object"});
            return;
        }
        for (const auto &[k, v] : obj.items())
        {
            auto it = set.find(k);
            if (it == set.end())
            {
                diag.push_back({path + "/" + k, "unknown field"});
                continue;
            }
            try
            {
                it->second(x, v, path + "/" + k);
            }
            catch (const FieldError &e)
            {
                diag.push_back({e.path, e.message});
            }
        }
    }
};

inline Schema<opt::OptimizerBudget> budget_schema()
{
    using B = opt::OptimizerBudget;
    Schema<B> s;
    s.add("max_iterations", [](B &b) -> auto & { return b.max_iterations; }, parse::count(1))
        .add("population", [](B &b) -> auto & { return b.population; }, parse::count(2))
        .add("generations", [](B &b) -> auto & { return b.generations; }, parse::count(1))
        .add("tournament", [](B &b) -> auto & { return b.tournament; }, parse::count(1))
        .add("tolerance", [](B &b) -> auto & { return b.tolerance; }, parse::real_min(0.0, false));
    return s;
}

inline Schema<ref::PowerModel> power_schema()
{
    using M = ref::PowerModel;
    Schema<M> s;
    s.add("eta_pa", [](M &m) -> auto & { return m.eta_pa; }, parse::real_range(1e-12, 1.0))
        .add("p_lo", [](M &m) -> auto & { return m.p_lo; }, parse::real_min(0.0, false))
        .add("p_rf", [](M &m) -> auto & { return m.p_rf; }, parse::real_min(0.0, false))
        .add("p_bias", [](M &m) -> auto & { return m.p_bias; }, parse::real_min(0.0, false))
        .add("c_dac", [](M &m) -> auto & { return m.c_dac; }, parse::real_min(0.0, false))
        .add("f_s", [](M &m) -> auto & { return m.f_s; }, parse::real_min(0.0, false));
    return s;
}

// ---------------------------------------------------------------------------------------------
// Architectures
// ---------------------------------------------------------------------------------------------

/// State shared by every task of one run.
struct RunContext
{
    exp::SimPhaseCache sim_cache;
    std::filesystem::path scenario_dir;
};

/// Output of one task: the record and, for wire, the field map.
struct TaskResult
{
    exp::Record record;
    std::vector<wire::FieldSample> field;
};

/// Type-erased architecture: checks a merged config and evaluates it.
struct Architecture
{
    std::vector<std::string> extras;
    std::set<std::string> fields;
    bool uses_optimizer = false;
    bool has_field_map = false;
    /// Returns the diagnostics of one merged config (config, optimizer, power).
    std::function<std::vector<Diagnostic>(const json &, const json &, const json &, const RunContext &)> check;
    std::function<TaskResult(const json &, const json &, const json &, std::uint64_t, RunContext &)> run;
};

namespace arch
{

template <class P>
P build(const Schema<P> &s, const json &cfg, const json &optimizer, const json &power, std::vector<Diagnostic> &d,
        opt::OptimizerBudget *budget_of(P &))
{
    P p{};
    s.apply(p, cfg, "/config", d);
    if (!optimizer.is_null())
    {
        if (auto *b = budget_of ? budget_of(p) : nullptr)
            budget_schema().apply(*b, optimizer, "/optimizer", d);
        else
            d.push_back({"/optimizer", "architecture has no configurable optimizer"});
    }
    if (!power.is_null())
        power_schema().apply(p.power, power, "/power", d);
    return p;
}

template <class P>
std::set<std::string> names(const Schema<P> &s)
{
    std::set<std::string> n;
    for (const auto &[k, v] : s.set)
        n.insert(k);
    return n;
}

/// Architecture whose evaluation is a pure function of (params, seed).
template <class P, class Eval, class Feasible>
Architecture make(Schema<P> s, std::vector<std::string> extras, opt::OptimizerBudget *(*budget_of)(P &), Eval eval,
                  Feasible feasible)
{
    Architecture a;
    a.extras = std::move(extras);
    a.fields = names(s);
    a.uses_optimizer = budget_of != nullptr;
    a.check = [s, budget_of, feasible](const json &cfg, const json &o, const json &pw, const RunContext &ctx) {
        std::vector<Diagnostic> d;
        P p = build(s, cfg, o, pw, d, budget_of);
        if (d.empty())
            feasible(p, ctx, d);
        return d;
    };
    a.run = [s, budget_of, eval](const json &cfg, const json &o, const json &pw, std::uint64_t seed, RunContext &ctx) {
        std::vector<Diagnostic> d;
        P p = build(s, cfg, o, pw, d, budget_of);
        if (!d.empty())
            throw ScenarioError("scenario", d);
        return eval(p, seed, ctx);
    };
    return a;
}

inline auto no_check = [](const auto &, const RunContext &, std::vector<Diagnostic> &) {};

inline Architecture dma()
{
    using P = exp::DmaParams;
    Schema<P> s;
    s.add("n_x", [](P &p) -> auto & { return p.n_x; }, parse::count(1))
        .add("n_y", [](P &p) -> auto & { return p.n_y; }, parse::count(1))
        .add("target_residual", [](P &p) -> auto & { return p.target_residual; }, parse::real_range(1e-12, 1.0 - 1e-12))
        .add("nu_floor", [](P &p) -> auto & { return p.nu_floor; }, parse::real_range(0.0, 1.0))
        .add("p_tx", [](P &p) -> auto & { return p.p_tx; }, parse::real_min(0.0, true))
        .add("snr_ref", [](P &p) -> auto & { return p.snr_ref; }, parse::real_min(0.0, true))
        .add("dac_bits", [](P &p) -> auto & { return p.dac_bits; }, parse::bits());
    return make<P>(
        s, {"gain", "nu"}, [](P &p) { return &p.ga; },
        [](const P &p, std::uint64_t seed, RunContext &) { return TaskResult{exp::evaluate_dma(p, seed), {}}; },
        no_check);
}

inline Architecture sim()
{
    using P = exp::SimParams;
    Schema<P> s;
    s.add("antennas", [](P &p) -> auto & { return p.antennas; }, parse::count(1))
        .add("users", [](P &p) -> auto & { return p.users; }, parse::count(1))
        .add("atoms_per_side", [](P &p) -> auto & { return p.atoms_per_side; }, parse::count(1))
        .add("layers", [](P &p) -> auto & { return p.layers; }, parse::count(0))
        .add("dac_bits", [](P &p) -> auto & { return p.dac_bits; }, parse::bits())
        .add("p_tx", [](P &p) -> auto & { return p.p_tx; }, parse::real_min(0.0, true))
        .add("noise_var", [](P &p) -> auto & { return p.noise_var; }, parse::real_min(0.0, true))
        .add("propagation", [](P &p) -> auto & { return p.propagation; }, parse::text({"dft", "rs"}))
        .add("layer_spacing", [](P &p) -> auto & { return p.layer_spacing; }, parse::real_min(0.0, true))
        .add("atom_spacing", [](P &p) -> auto & { return p.atom_spacing; }, parse::real_min(0.0, true));
    return make<P>(
        s, {"se_zf_unquantized"}, [](P &p) { return &p.ascent; },
        [](const P &p, std::uint64_t seed, RunContext &ctx) {
            return TaskResult{exp::evaluate_sim(p, seed, &ctx.sim_cache), {}};
        },
        [](const P &p, const RunContext &, std::vector<Diagnostic> &d) {
            if (p.users > p.antennas)
                d.push_back({"/config/users", "zero forcing needs users <= antennas"});
        });
}

inline Architecture polarization()
{
    using P = exp::PolarizationParams;
    Schema<P> s;
    s.add("design", [](P &p) -> auto & { return p.design; }, parse::text({"static", "dual", "reconfig"}))
        .add("chi", [](P &p) -> auto & { return p.chi; }, parse::real_min(0.0, false))
        .add("n_t_side", [](P &p) -> auto & { return p.n_t_side; }, parse::count(1))
        .add("n_r_side", [](P &p) -> auto & { return p.n_r_side; }, parse::count(1))
        .add("subcarriers", [](P &p) -> auto & { return p.subcarriers; }, parse::count(1))
        .add("paths", [](P &p) -> auto & { return p.paths; }, parse::count(1))
        .add("xpd_db", [](P &p) -> auto & { return p.xpd_db; }, parse::real)
        .add("snr_db", [](P &p) -> auto & { return p.snr_db; }, parse::real)
        .add("p_tx", [](P &p) -> auto & { return p.p_tx; }, parse::real_min(0.0, true))
        .add("grid_res", [](P &p) -> auto & { return p.grid_res; }, parse::count(1))
        .add("sweeps", [](P &p) -> auto & { return p.sweeps; }, parse::count(0));
    return make<P>(
        s, {}, nullptr,
        [](const P &p, std::uint64_t seed, RunContext &) { return TaskResult{exp::evaluate_polarization(p, seed), {}}; },
        no_check);
}

inline Architecture parasitic()
{
    using P = exp::ParasiticParams;
    Schema<P> s;
    s.add("n_active", [](P &p) -> auto & { return p.n_active; }, parse::count(1))
        .add("parasitic_columns", [](P &p) -> auto & { return p.parasitic_columns; }, parse::count(0))
        .add("target_se", [](P &p) -> auto & { return p.target_se; }, parse::real_min(0.0, true))
        .add("noise_var", [](P &p) -> auto & { return p.noise_var; }, parse::real_min(0.0, true))
        .add("n_r", [](P &p) -> auto & { return p.n_r; }, parse::count(1))
        .add("paths", [](P &p) -> auto & { return p.paths; }, parse::count(1))
        .add("load_resistance", [](P &p) -> auto & { return p.load_resistance; }, parse::real_min(0.0, true))
        .add("reactance_grid", [](P &p) -> auto & { return p.reactance_grid; }, parse::count(2))
        .add("reactance_max", [](P &p) -> auto & { return p.reactance_max; }, parse::real_min(0.0, true))
        .add("sweeps", [](P &p) -> auto & { return p.sweeps; }, parse::count(0));
    return make<P>(
        s, {"aperture"}, nullptr,
        [](const P &p, std::uint64_t seed, RunContext &) { return TaskResult{exp::evaluate_parasitic(p, seed), {}}; },
        no_check);
}

inline Architecture pixel()
{
    using P = exp::PixelParams;
    Schema<P> s;
    s.add("feeds", [](P &p) -> auto & { return p.feeds; }, parse::count(1))
        .add("elements_per_feed", [](P &p) -> auto & { return p.elements_per_feed; }, parse::count(2))
        .add("eta_single", [](P &p) -> auto & { return p.eta_single; }, parse::real_range(0.0, 1.0))
        .add("eta_pair", [](P &p) -> auto & { return p.eta_pair; }, parse::real_range(0.0, 1.0))
        .add("n_r", [](P &p) -> auto & { return p.n_r; }, parse::count(1))
        .add("p_tx", [](P &p) -> auto & { return p.p_tx; }, parse::real_min(0.0, true))
        .add("noise_var", [](P &p) -> auto & { return p.noise_var; }, parse::real_min(0.0, true))
        .add("dictionary", [](P &p) -> auto & { return p.dictionary_path; }, parse::text());
    auto resolve = [](P p, const RunContext &ctx) {
        if (!p.dictionary_path.empty() && std::filesystem::path(p.dictionary_path).is_relative())
            p.dictionary_path = (ctx.scenario_dir / p.dictionary_path).string();
        return p;
    };
    return make<P>(
        s, {"joint_states"}, nullptr,
        [resolve](const P &p, std::uint64_t seed, RunContext &ctx) {
            return TaskResult{exp::evaluate_pixel(resolve(p, ctx), seed), {}};
        },
        [resolve](const P &p, const RunContext &ctx, std::vector<Diagnostic> &d) {
            const P q = resolve(p, ctx);
            if (q.dictionary_path.empty())
                return;
            try
            {
                pixel::StateDictionary::load_file(q.dictionary_path);
            }
            catch (const Error &e)
            {
                d.push_back({"/config/dictionary", e.what()});
            }
        });
}

inline Architecture pass()
{
    using P = exp::PassParams;
    Schema<P> s;
    s.add("guides", [](P &p) -> auto & { return p.guides; }, parse::count(1))
        .add("pinches", [](P &p) -> auto & { return p.pinches; }, parse::count(1))
        .add("alpha", [](P &p) -> auto & { return p.alpha; }, parse::real_range(0.0, 1.0))
        .add("guide_length", [](P &p) -> auto & { return p.guide_length; }, parse::real_min(0.0, true))
        .add("guide_spacing", [](P &p) -> auto & { return p.guide_spacing; }, parse::real_min(0.0, true))
        .add("height", [](P &p) -> auto & { return p.height; }, parse::real_min(0.0, true))
        .add("neff", [](P &p) -> auto & { return p.neff; }, parse::real_min(0.0, true))
        .add("p_tx", [](P &p) -> auto & { return p.p_tx; }, parse::real_min(0.0, true))
        .add("noise_var", [](P &p) -> auto & { return p.noise_var; }, parse::real_min(0.0, true))
        .add("position_grid", [](P &p) -> auto & { return p.position_grid; }, parse::count(1));
    return make<P>(
        s, {"guide_efficiency"}, nullptr,
        [](const P &p, std::uint64_t seed, RunContext &) { return TaskResult{exp::evaluate_pass(p, seed), {}}; },
        [](const P &p, const RunContext &, std::vector<Diagnostic> &d) {
            if (auto msg = exp::pass_feasibility(p); !msg.empty())
                d.push_back({"/config/alpha", "infeasible: " + msg});
        });
}

inline Architecture wire()
{
    using P = exp::WireParams;
    Schema<P> s;
    s.add("radius", [](P &p) -> auto & { return p.geometry.radius; }, parse::real_min(0.0, true))
        .add("spacing", [](P &p) -> auto & { return p.geometry.spacing; }, parse::real_min(0.0, true))
        .add("k0", [](P &p) -> auto & { return p.geometry.k0; }, parse::real_min(0.0, true))
        .add("Z0", [](P &p) -> auto & { return p.geometry.Z0; }, parse::real_min(0.0, true))
        .add("feed_gap", [](P &p) -> auto & { return p.geometry.feed_gap; }, parse::real_min(0.0, false))
        .add("num_ports", [](P &p) -> auto & { return p.geometry.num_ports; }, parse::count(1))
        .add("excited", [](P &p) -> auto & { return p.geometry.excited; }, parse::counts)
        .add("load_ohm", [](P &p) -> auto & { return p.load_ohm; }, parse::real_min(0.0, false))
        .add("z_over_lambda", [](P &p) -> auto & { return p.z_over_lambda; }, parse::reals)
        .add("r_over_lambda", [](P &p) -> auto & { return p.r_over_lambda; }, parse::reals)
        .add("noise_var", [](P &p) -> auto & { return p.noise_var; }, parse::real_min(0.0, true))
        .add("null_threshold", [](P &p) -> auto & { return p.null_threshold; }, parse::real_range(0.0, 1.0));
    auto a = make<P>(
        s, {"null_count", "null_z_over_lambda", "harmonics", "quadrature_change", "truncation_change"}, nullptr,
        [](const P &p, std::uint64_t, RunContext &) {
            auto o = exp::evaluate_wire(p);
            return TaskResult{std::move(o.record), std::move(o.map)};
        },
        [](const P &p, const RunContext &, std::vector<Diagnostic> &d) {
            auto g = p.geometry;
            if (p.z_over_lambda.empty())
                d.push_back({"/config/z_over_lambda", "observation grid is empty"});
            if (p.r_over_lambda.empty())
                d.push_back({"/config/r_over_lambda", "observation grid is empty"});
            try
            {
                if (g.excited.size() > g.num_ports)
                    detail::fail(Errc::invalid_geometry, "wire", "more excited ports than ports");
                g.set_uniform_load(cd(p.load_ohm, 0.0));
                g.validate();
            }
            catch (const Error &e)
            {
                d.push_back({"/config", e.what()});
            }
        });
    a.has_field_map = true;
    return a;
}

} // namespace arch

inline const std::map<std::string, Architecture> &architectures()
{
    static const std::map<std::string, Architecture> m = {
        {"dma", arch::dma()},       {"sim", arch::sim()},   {"polarization", arch::polarization()},
        {"parasitic", arch::parasitic()}, {"pixel", arch::pixel()}, {"pass", arch::pass()},
        {"wire", arch::wire()}};
    return m;
}

// ---------------------------------------------------------------------------------------------
// Scenario
// ---------------------------------------------------------------------------------------------

struct Axis
{
    std::string name;
    std::vector<json> values;
};

struct RefRequest
{
    json baseline; // config overrides selecting the baseline point
    ref::RefSpec spec;
};

struct Scenario
{
    std::string id;
    std::string architecture;
    json config = json::object();
    json optimizer;
    json power;
    std::vector<Axis> axes;
    std::size_t realizations = 1;
    std::uint64_t seed = 1;
    std::optional<RefRequest> ref;
    std::string out_dir = ".";
    std::string stem;
    std::filesystem::path dir;
    std::string canonical;
};

inline const std::vector<std::string> &base_columns()
{
    static const std::vector<std::string> c = {"se_bits_per_hz", "p_radiated_w", "p_consumed_w"};
    return c;
}

/// Metric name used by REF specs to the results column it reads.
inline std::optional<std::string> metric_column(const std::string &name, const Architecture &a)
{
    static const std::map<std::string, std::string> alias = {
        {"spectral_efficiency", "se_bits_per_hz"}, {"power", "p_consumed_w"}, {"radiated_power", "p_radiated_w"}};
    if (auto it = alias.find(name); it != alias.end())
        return it->second;
    for (const auto &c : base_columns())
        if (c == name)
            return c;
    for (const auto &c : a.extras)
        if (c == name)
            return c;
    return std::nullopt;
}

inline ref::RefSpec parse_ref_spec(const json &j, const std::string &path, std::vector<Diagnostic> &d)
{
    ref::RefSpec s;
    if (!j.is_object())
    {
        d.push_back({path, "expected an object"});
        return s;
    }
    if (j.contains("preset"))
    {
        try
        {
            s = ref::regime_preset(parse::text({"perf", "save", "area"})(j["preset"], path + "/preset"));
        }
        catch (const FieldError &e)
        {
            d.push_back({e.path, e.message});
        }
    }
    auto weights = [&](const char *key, std::map<std::string, double> &into) {
        if (!j.contains(key))
            return;
        const auto &w = j[key];
        if (!w.is_object())
        {
            d.push_back({path + "/" + key, "expected an object of metric weights"});
            return;
        }
        into.clear();
        for (const auto &[k, v] : w.items())
        {
            try
            {
                into[k] = parse::real_range(0.0, 1.0)(v, path + "/" + key + "/" + k);
            }
            catch (const FieldError &e)
            {
                d.push_back({e.path, e.message});
            }
        }
    };
    weights("benefits", s.benefits);
    weights("costs", s.costs);
    if (j.contains("constraints"))
    {
        s.constraints.clear();
        const auto &c = j["constraints"];
        if (!c.is_array())
            d.push_back({path + "/constraints", "expected an array of metric names"});
        else
            for (std::size_t i = 0; i < c.size(); ++i)
            {
                if (c[i].is_string())
                    s.constraints.push_back(c[i].get<std::string>());
                else
                    d.push_back({path + "/constraints/" + std::to_string(i), "expected a string"});
            }
    }
    if (j.contains("epsilon"))
    {
        try
        {
            s.epsilon = parse::real_min(0.0, false)(j["epsilon"], path + "/epsilon");
        }
        catch (const FieldError &e)
        {
            d.push_back({e.path, e.message});
        }
    }
    for (const auto &[k, v] : j.items())
        if (k != "preset" && k != "benefits" && k != "costs" && k != "constraints" && k != "epsilon" &&
            k != "baseline")
            d.push_back({path + "/" + k, "unknown field"});
    if (d.empty())
    {
        try
        {
            s.validate();
        }
        catch (const Error &e)
        {
            d.push_back({path, e.what()});
        }
    }
    return s;
}

/// Cartesian product of the axes, first axis slowest. An axis without values
/// yields no points.
inline std::vector<std::vector<json>> sweep_points(const std::vector<Axis> &axes)
{
    std::vector<std::vector<json>> pts{{}};
    for (const auto &a : axes)
    {
        std::vector<std::vector<json>> next;
        for (const auto &p : pts)
            for (const auto &v : a.values)
            {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        pts = std::move(next);
    }
    return pts;
}

inline json merged_config(const Scenario &s, const std::vector<json> &point)
{
    json c = s.config;
    for (std::size_t i = 0; i < s.axes.size(); ++i)
        c[s.axes[i].name] = point[i];
    return c;
}

/// Checks of the sweep points and the REF request against the architecture.
inline void cross_check(const Scenario &s, std::vector<Diagnostic> &d)
{
    auto it = architectures().find(s.architecture);
    if (it == architectures().end())
        return;
    const auto &a = it->second;
    RunContext ctx;
    ctx.scenario_dir = s.dir;
    for (std::size_t i = 0; i < s.axes.size(); ++i)
        if (!a.fields.count(s.axes[i].name))
            d.push_back({"/sweep/" + std::to_string(i) + "/name",
                         "'" + s.axes[i].name + "' is not a field of architecture '" + s.architecture + "'"});
    if (!d.empty())
        return;
    std::set<std::string> seen;
    auto check_point = [&](const json &cfg, const std::string &where) {
        for (auto &x : a.check(cfg, s.optimizer, s.power, ctx))
        {
            if (!where.empty())
                x.message += " (" + where + ")";
            if (seen.insert(x.str()).second)
                d.push_back(x);
        }
    };
    const auto pts = sweep_points(s.axes);
    for (const auto &p : pts)
    {
        std::string where;
        for (std::size_t i = 0; i < p.size(); ++i)
            where += (where.empty() ? "at " : ", ") + s.axes[i].name + " = " + p[i].dump();
        check_point(merged_config(s, p), where);
    }
    if (pts.empty())
        check_point(s.config, "");
    if (s.ref)
    {
        for (const auto &[k, v] : s.ref->baseline.items())
            if (!a.fields.count(k))
                d.push_back({"/ref/baseline/" + k, "'" + k + "' is not a field of architecture '" + s.architecture + "'"});
        auto metric = [&](const std::string &m, const std::string &path) {
            if (!metric_column(m, a))
                d.push_back({path, "unknown metric '" + m + "' for architecture '" + s.architecture + "'"});
        };
        for (const auto &[k, w] : s.ref->spec.benefits)
            metric(k, "/ref/benefits/" + k);
        for (const auto &[k, w] : s.ref->spec.costs)
            metric(k, "/ref/costs/" + k);
        for (std::size_t i = 0; i < s.ref->spec.constraints.size(); ++i)
            metric(s.ref->spec.constraints[i], "/ref/constraints/" + std::to_string(i));
    }
}

/// Parses and fully checks a scenario without running it.
inline Scenario load_scenario_text(const std::string &text, const std::string &file)
{
    const json j = parse_json(text, file);
    std::vector<Diagnostic> d;
    Scenario s;
    s.dir = std::filesystem::path(file).parent_path();
    if (!j.is_object())
        throw ScenarioError(file, {{"", "scenario must be a JSON object"}});
    static const std::set<std::string> known = {"id", "architecture", "config", "optimizer", "power", "sweep",
                                                "realizations", "seed", "ref", "output"};
    for (const auto &[k, v] : j.items())
        if (!known.count(k))
            d.push_back({"/" + k, "unknown field"});
    auto get = [&](const char *key, auto parser, auto &into) {
        if (!j.contains(key))
            return;
        try
        {
            into = parser(j[key], std::string("/") + key);
        }
        catch (const FieldError &e)
        {
            d.push_back({e.path, e.message});
        }
    };
    get("id", parse::text(), s.id);
    if (!j.contains("architecture"))
        d.push_back({"/architecture", "missing"});
    else
    {
        std::vector<std::string> names;
        for (const auto &[k, v] : architectures())
            names.push_back(k);
        get("architecture", parse::text(names), s.architecture);
    }
    if (j.contains("config"))
    {
        if (j["config"].is_object())
            s.config = j["config"];
        else
            d.push_back({"/config", "expected an object"});
    }
    if (j.contains("optimizer"))
        s.optimizer = j["optimizer"];
    if (j.contains("power"))
        s.power = j["power"];
    get("realizations", parse::count(1), s.realizations);
    if (j.contains("seed"))
    {
        if (j["seed"].is_number_unsigned())
            s.seed = j["seed"].get<std::uint64_t>();
        else
            d.push_back({"/seed", "expected a non-negative integer"});
    }
    if (j.contains("sweep"))
    {
        const auto &sw = j["sweep"];
        if (!sw.is_array())
            d.push_back({"/sweep", "expected an array of {name, values} axes"});
        else
            for (std::size_t i = 0; i < sw.size(); ++i)
            {
                const std::string p = "/sweep/" + std::to_string(i);
                const auto &ax = sw[i];
                if (!ax.is_object() || !ax.contains("name") || !ax["name"].is_string())
                {
                    d.push_back({p + "/name", "expected a string axis name"});
                    continue;
                }
                if (!ax.contains("values") || !ax["values"].is_array())
                {
                    d.push_back({p + "/values", "expected an array"});
                    continue;
                }
                for (const auto &[k, v] : ax.items())
                    if (k != "name" && k != "values")
                        d.push_back({p + "/" + k, "unknown field"});
                Axis a{ax["name"].get<std::string>(), {}};
                for (const auto &v : ax["values"])
                    a.values.push_back(v);
                for (const auto &b : s.axes)
                    if (b.name == a.name)
                        d.push_back({p + "/name", "axis '" + a.name + "' is listed twice"});
                s.axes.push_back(std::move(a));
            }
    }
    if (j.contains("ref"))
    {
        RefRequest r;
        r.spec = parse_ref_spec(j["ref"], "/ref", d);
        r.baseline = json::object();
        if (j["ref"].is_object() && j["ref"].contains("baseline"))
        {
            if (j["ref"]["baseline"].is_object())
                r.baseline = j["ref"]["baseline"];
            else
                d.push_back({"/ref/baseline", "expected an object of config overrides"});
        }
        s.ref = r;
    }
    if (j.contains("output"))
    {
        const auto &o = j["output"];
        if (!o.is_object())
            d.push_back({"/output", "expected an object"});
        else
            for (const auto &[k, v] : o.items())
            {
                if (k == "dir" || k == "stem")
                {
                    if (!v.is_string() || v.get<std::string>().empty())
                        d.push_back({"/output/" + k, "expected a nonempty string"});
                    else
                        (k == "dir" ? s.out_dir : s.stem) = v.get<std::string>();
                }
                else
                    d.push_back({"/output/" + k, "unknown field"});
            }
    }
    if (s.id.empty() && d.empty())
        s.id = std::filesystem::path(file).stem().string();
    if (s.stem.empty())
        s.stem = s.id;
    if (d.empty())
        cross_check(s, d);
    if (!d.empty())
        throw ScenarioError(file, d);
    s.canonical = j.dump();
    return s;
}

inline Scenario load_scenario(const std::string &path) { return load_scenario_text(read_file(path), path); }

// ---------------------------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------------------------

struct RunOptions
{
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::size_t jobs = 1;
    std::string format = "csv"; // csv | json
};

/// Per-point aggregate over realizations.
struct PointSummary
{
    json axes;
    std::map<std::string, double> mean;
    std::map<std::string, double> stderr_;
};

struct RunResult
{
    std::uint64_t seed = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<json>> points;
    std::vector<std::vector<TaskResult>> results; // [point][realization]
    std::vector<PointSummary> summary;
    std::optional<PointSummary> baseline; // evaluated outside the sweep
    json summary_json;
};

inline std::vector<std::string> result_columns(const Scenario &s, const Architecture &a)
{
    std::vector<std::string> c{"scenario_id"};
    for (const auto &ax : s.axes)
        c.push_back(ax.name);
    c.push_back("realization");
    for (const auto &x : base_columns())
        c.push_back(x);
    for (const auto &x : a.extras)
        c.push_back(x);
    return c;
}

inline std::map<std::string, double> record_values(const exp::Record &r, const Architecture &a)
{
    std::map<std::string, double> v{
        {"se_bits_per_hz", r.se_bits_per_hz}, {"p_radiated_w", r.p_radiated_w}, {"p_consumed_w", r.p_consumed_w}};
    if (r.extra.size() != a.extras.size())
        detail::fail(Errc::internal, "cli", "record has an unexpected number of extra columns");
    for (std::size_t i = 0; i < r.extra.size(); ++i)
    {
        if (r.extra[i].first != a.extras[i])
            detail::fail(Errc::internal, "cli", "record extra column '" + r.extra[i].first + "' is unexpected");
        v[a.extras[i]] = r.extra[i].second;
    }
    return v;
}

inline PointSummary summarize(const json &axes, const std::vector<TaskResult> &rs, const Architecture &a)
{
    PointSummary p;
    p.axes = axes;
    std::map<std::string, std::vector<double>> cols;
    for (const auto &r : rs)
        for (const auto &[k, v] : record_values(r.record, a))
            cols[k].push_back(v);
    for (const auto &[k, xs] : cols)
    {
        double m = 0.0;
        for (double x : xs)
            m += x;
        m /= double(xs.size());
        double ss = 0.0;
        for (double x : xs)
            ss += (x - m) * (x - m);
        p.mean[k] = m;
        p.stderr_[k] = xs.size() > 1 ? std::sqrt(ss / double(xs.size() - 1) / double(xs.size())) : 0.0;
    }
    return p;
}

/// Runs tasks on `jobs` threads; results land at fixed indices so output
/// order never depends on scheduling. The lowest-index failure is rethrown.
inline void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &f)
{
    std::vector<std::exception_ptr> errs(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;)
        {
            try
            {
                f(i);
            }
            catch (...)
            {
                errs[i] = std::current_exception();
            }
        }
    };
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < jobs; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto &t : pool)
        t.join();
    for (auto &e : errs)
        if (e)
            std::rethrow_exception(e);
}

/// Realization r of every sweep point shares one seed (common random
/// numbers), so differences between points are not masked by channel noise.
inline std::uint64_t task_seed(std::uint64_t root, std::size_t realization) { return exp::mix_seed(root, realization); }

inline json point_axes(const Scenario &s, const std::vector<json> &p)
{
    json o = json::object();
    for (std::size_t i = 0; i < p.size(); ++i)
        o[s.axes[i].name] = p[i];
    return o;
}

inline json summary_to_json(const PointSummary &p)
{
    json o = json::object();
    o["axes"] = p.axes;
    o["mean"] = p.mean;
    o["stderr"] = p.stderr_;
    return o;
}

/// REF of every sweep point against the baseline, from per-point means.
inline json ref_table(const Scenario &s, const Architecture &a, const RunResult &r, const PointSummary &base)
{
    const auto &spec = s.ref->spec;
    json t = json::object();
    t["baseline"] = s.ref->baseline;
    t["baseline_mean"] = base.mean;
    t["benefits"] = spec.benefits;
    t["costs"] = spec.costs;
    t["constraints"] = spec.constraints;
    t["epsilon"] = spec.epsilon;
    json rows = json::array();
    auto design = [&](const PointSummary &p, const std::string &name) {
        ref::DesignPoint d{name, {}};
        auto add = [&](const std::string &m) { d.metrics[m] = ref::Metric{p.mean.at(*metric_column(m, a)), "", false}; };
        for (const auto &[k, w] : spec.benefits)
            add(k);
        for (const auto &[k, w] : spec.costs)
            add(k);
        for (const auto &k : spec.constraints)
            add(k);
        return d;
    };
    const auto b = design(base, "baseline");
    for (const auto &p : r.summary)
    {
        const auto d = design(p, "point");
        json row = json::object();
        row["axes"] = p.axes;
        try
        {
            const auto res = ref::compute_ref(spec, d, b);
            json deltas = json::object();
            for (const auto &[k, w] : spec.benefits)
                deltas[k] = {{"role", "benefit"}, {"delta", res.deltas.at(k)}};
            for (const auto &[k, w] : spec.costs)
                deltas[k] = {{"role", "cost"}, {"delta", res.deltas.at(k)}};
            for (const auto &k : spec.constraints)
                deltas[k] = {{"role", "constraint"}, {"delta", ref::relative_change(d.at(k), b.at(k))}};
            row["deltas"] = deltas;
            row["cost_neutral"] = res.cost_neutral;
            row["upsilon"] = res.upsilon ? json(*res.upsilon) : json(nullptr);
            row["upsilon_db"] = res.upsilon && *res.upsilon > 0.0 ? json(res.db()) : json(nullptr);
        }
        catch (const Error &e)
        {
            row["error"] = e.what();
        }
        rows.push_back(row);
    }
    t["rows"] = rows;
    return t;
}

inline RunResult run_scenario(const Scenario &s, const RunOptions &o = {})
{
    const auto &a = architectures().at(s.architecture);
    RunResult r;
    r.seed = o.seed.value_or(s.seed);
    r.columns = result_columns(s, a);
    r.points = sweep_points(s.axes);

    // The baseline joins the sweep unless one of its points already matches.
    std::optional<std::size_t> base_idx;
    json base_cfg;
    if (s.ref)
    {
        base_cfg = s.config;
        for (const auto &[k, v] : s.ref->baseline.items())
            base_cfg[k] = v;
        for (std::size_t i = 0; i < r.points.size() && !base_idx; ++i)
            if (merged_config(s, r.points[i]) == base_cfg)
                base_idx = i;
    }
    const bool extra_base = s.ref && !base_idx;
    const std::size_t np = r.points.size() + (extra_base ? 1 : 0);
    std::vector<std::vector<TaskResult>> res(np, std::vector<TaskResult>(s.realizations));
    RunContext ctx;
    ctx.scenario_dir = s.dir;
    parallel_for(np * s.realizations, o.jobs, [&](std::size_t t) {
        const std::size_t pi = t / s.realizations, ri = t % s.realizations;
        const json cfg = pi < r.points.size() ? merged_config(s, r.points[pi]) : base_cfg;
        res[pi][ri] = a.run(cfg, s.optimizer, s.power, task_seed(r.seed, ri), ctx);
    });
    for (std::size_t i = 0; i < r.points.size(); ++i)
        r.summary.push_back(summarize(point_axes(s, r.points[i]), res[i], a));
    if (extra_base)
        r.baseline = summarize(s.ref->baseline, res.back(), a);
    res.resize(r.points.size());
    r.results = std::move(res);

    json sj = json::object();
    sj["scenario_id"] = s.id;
    sj["architecture"] = s.architecture;
    sj["scenario_fnv1a64"] = hex64(fnv1a(s.canonical));
    sj["seed"] = r.seed;
    sj["version"] = std::string(version);
    sj["realizations"] = s.realizations;
    json pts = json::array();
    for (const auto &p : r.summary)
        pts.push_back(summary_to_json(p));
    sj["points"] = pts;
    if (s.ref)
        sj["ref"] = ref_table(s, a, r, extra_base ? *r.baseline : r.summary[*base_idx]);
    r.summary_json = sj;
    return r;
}

// ---------------------------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------------------------

inline std::string csv_cell(const json &v)
{
    std::string s;
    if (v.is_number())
        s = fmt(v.get<double>());
    else if (v.is_string())
        s = v.get<std::string>();
    else if (v.is_array())
    {
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? ";" : "") + csv_cell(v[i]);
        return s;
    }
    else
        s = v.dump();
    if (s.find_first_of(",\"\n") != std::string::npos)
    {
        std::string q = "\"";
        for (char c : s)
            q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    }
    return s;
}

inline std::string provenance(const Scenario &s, std::uint64_t seed)
{
    std::string h;
    h += "# trihybrid " + std::string(version) + "\n";
    h += "# scenario " + s.id + " fnv1a64=" + hex64(fnv1a(s.canonical)) + "\n";
    h += "# seed " + std::to_string(seed) + "\n";
    h += "# modules core parasitic pixel_fas dma polarization sim_stack pass wire ref_metric optimizers cli " +
         std::string(version) + "\n";
    return h;
}

inline std::string results_csv(const Scenario &s, const RunResult &r)
{
    const auto &a = architectures().at(s.architecture);
    std::string out = provenance(s, r.seed);
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        out += (i ? "," : "") + r.columns[i];
    out += "\n";
    for (std::size_t p = 0; p < r.points.size(); ++p)
        for (std::size_t k = 0; k < r.results[p].size(); ++k)
        {
            std::string row = csv_cell(s.id);
            for (const auto &v : r.points[p])
                row += "," + csv_cell(v);
            row += "," + std::to_string(k);
            const auto vals = record_values(r.results[p][k].record, a);
            for (const auto &c : base_columns())
                row += "," + fmt(vals.at(c));
            for (const auto &c : a.extras)
                row += "," + fmt(vals.at(c));
            out += row + "\n";
        }
    return out;
}

inline std::string results_json(const Scenario &s, const RunResult &r)
{
    const auto &a = architectures().at(s.architecture);
    json j = json::object();
    j["scenario_id"] = s.id;
    j["scenario_fnv1a64"] = hex64(fnv1a(s.canonical));
    j["seed"] = r.seed;
    j["version"] = std::string(version);
    j["columns"] = r.columns;
    json rows = json::array();
    for (std::size_t p = 0; p < r.points.size(); ++p)
        for (std::size_t k = 0; k < r.results[p].size(); ++k)
        {
            json row = json::array({s.id});
            for (const auto &v : r.points[p])
                row.push_back(v);
            row.push_back(k);
            const auto vals = record_values(r.results[p][k].record, a);
            for (const auto &c : base_columns())
                row.push_back(vals.at(c));
            for (const auto &c : a.extras)
                row.push_back(vals.at(c));
            rows.push_back(row);
        }
    j["rows"] = rows;
    return j.dump(2) + "\n";
}

/// Field map of one sweep point; SNR in dB, NaN where undefined.
inline std::string field_csv(const Scenario &s, const RunResult &r, std::size_t point)
{
    std::string out = provenance(s, r.seed) + "z_over_lambda,r_over_lambda,snr_db\n";
    for (const auto &f : r.results[point].front().field)
        out += fmt(f.z_over_lambda) + "," + fmt(f.r_over_lambda) + "," +
               (std::isfinite(f.snr) ? fmt(to_db(f.snr)) : std::string("nan")) + "\n";
    return out;
}

inline void write_text(const std::filesystem::path &p, const std::string &text)
{
    std::ofstream f(p, std::ios::binary);
    if (!f)
        detail::fail(Errc::internal, "cli", "cannot write " + p.string());
    f << text;
    if (!f)
        detail::fail(Errc::internal, "cli", "write failed for " + p.string());
}

/// Writes results, summary and field maps; returns the paths written.
inline std::vector<std::filesystem::path> write_outputs(const Scenario &s, const RunResult &r, const RunOptions &o)
{
    const std::filesystem::path dir = o.out_dir.value_or(s.out_dir);
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](const std::string &name, const std::string &text) {
        write_text(dir / name, text);
        written.push_back(dir / name);
    };
    if (o.format == "json")
        put(s.stem + ".json", results_json(s, r));
    else
        put(s.stem + ".csv", results_csv(s, r));
    put(s.stem + "_summary.json", r.summary_json.dump(2) + "\n");
    if (architectures().at(s.architecture).has_field_map)
        for (std::size_t p = 0; p < r.points.size(); ++p)
            if (!r.results[p].empty())
                put(s.stem + "_field_" + std::to_string(p) + ".csv", field_csv(s, r, p));
    return written;
}

// ---------------------------------------------------------------------------------------------
// Standalone REF from a metrics file
// ---------------------------------------------------------------------------------------------

struct MetricsFile
{
    std::string baseline;
    ref::RefSpec spec;
    std::vector<ref::DesignPoint> designs;
};

inline MetricsFile load_metrics_text(const std::string &text, const std::string &file)
{
    const json j = parse_json(text, file);
    std::vector<Diagnostic> d;
    MetricsFile m;
    if (!j.is_object())
        throw ScenarioError(file, {{"", "metrics file must be a JSON object"}});
    json spec = json::object();
    for (const auto &[k, v] : j.items())
    {
        if (k == "preset" || k == "benefits" || k == "costs" || k == "constraints" || k == "epsilon")
            spec[k] = v;
        else if (k != "baseline" && k != "designs")
            d.push_back({"/" + k, "unknown field"});
    }
    m.spec = parse_ref_spec(spec, "", d);
    if (!j.contains("baseline") || !j["baseline"].is_string())
        d.push_back({"/baseline", "expected the name of the baseline design"});
    else
        m.baseline = j["baseline"].get<std::string>();
    if (!j.contains("designs") || !j["designs"].is_array())
        d.push_back({"/designs", "expected an array of designs"});
    else
        for (std::size_t i = 0; i < j["designs"].size(); ++i)
        {
            const auto &x = j["designs"][i];
            const std::string p = "/designs/" + std::to_string(i);
            ref::DesignPoint dp;
            if (!x.is_object() || !x.contains("name") || !x["name"].is_string())
            {
                d.push_back({p + "/name", "expected a string"});
                continue;
            }
            dp.name = x["name"].get<std::string>();
            if (!x.contains("metrics") || !x["metrics"].is_object())
            {
                d.push_back({p + "/metrics", "expected an object"});
                continue;
            }
            for (const auto &[k, v] : x["metrics"].items())
            {
                const std::string mp = p + "/metrics/" + k;
                ref::Metric mt;
                if (v.is_number())
                    mt.value = v.get<double>();
                else if (v.is_object() && v.contains("value") && v["value"].is_number())
                {
                    mt.value = v["value"].get<double>();
                    if (v.contains("unit") && v["unit"].is_string())
                        mt.unit = v["unit"].get<std::string>();
                    if (v.contains("logarithmic"))
                    {
                        if (v["logarithmic"].is_boolean())
                            mt.is_logarithmic = v["logarithmic"].get<bool>();
                        else
                            d.push_back({mp + "/logarithmic", "expected a boolean"});
                    }
                    for (const auto &[f, fv] : v.items())
                        if (f != "value" && f != "unit" && f != "logarithmic")
                            d.push_back({mp + "/" + f, "unknown field"});
                }
                else
                {
                    d.push_back({mp, "expected a number or {value, unit, logarithmic}"});
                    continue;
                }
                dp.metrics[k] = mt;
            }
            for (const auto &e : m.designs)
                if (e.name == dp.name)
                    d.push_back({p + "/name", "design '" + dp.name + "' is listed twice"});
            m.designs.push_back(std::move(dp));
        }
    if (d.empty())
    {
        const auto it = std::find_if(m.designs.begin(), m.designs.end(),
                                     [&](const ref::DesignPoint &x) { return x.name == m.baseline; });
        if (it == m.designs.end())
            d.push_back({"/baseline", "no design named '" + m.baseline + "'"});
        for (std::size_t i = 0; i < m.designs.size(); ++i)
        {
            auto need = [&](const std::string &k) {
                if (!m.designs[i].metrics.count(k))
                    d.push_back({"/designs/" + std::to_string(i) + "/metrics", "missing metric '" + k + "'"});
            };
            for (const auto &[k, w] : m.spec.benefits)
                need(k);
            for (const auto &[k, w] : m.spec.costs)
                need(k);
            for (const auto &k : m.spec.constraints)
                need(k);
        }
    }
    if (!d.empty())
        throw ScenarioError(file, d);
    return m;
}

inline MetricsFile load_metrics(const std::string &path) { return load_metrics_text(read_file(path), path); }

struct RefReportRow
{
    std::string design;
    ref::RefResult result;
    std::map<std::string, double> constraint_deltas;
};

/// REF of every non-baseline design.
inline std::vector<RefReportRow> ref_report(const MetricsFile &m)
{
    const auto &base = *std::find_if(m.designs.begin(), m.designs.end(),
                                     [&](const ref::DesignPoint &x) { return x.name == m.baseline; });
    std::vector<RefReportRow> rows;
    for (const auto &d : m.designs)
    {
        if (d.name == m.baseline)
            continue;
        RefReportRow r{d.name, ref::compute_ref(m.spec, d, base), {}};
        for (const auto &k : m.spec.constraints)
            r.constraint_deltas[k] = ref::relative_change(d.at(k), base.at(k));
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string ref_report_csv(const MetricsFile &m, const std::vector<RefReportRow> &rows)
{
    std::string out = "design";
    for (const auto &[k, w] : m.spec.benefits)
        out += ",delta_" + k + "[benefit]";
    for (const auto &[k, w] : m.spec.costs)
        out += ",delta_" + k + "[cost]";
    for (const auto &k : m.spec.constraints)
        out += ",delta_" + k + "[constraint]";
    out += ",upsilon,upsilon_db,cost_neutral\n";
    for (const auto &r : rows)
    {
        out += csv_cell(r.design);
        for (const auto &[k, w] : m.spec.benefits)
            out += "," + fmt(r.result.deltas.at(k));
        for (const auto &[k, w] : m.spec.costs)
            out += "," + fmt(r.result.deltas.at(k));
        for (const auto &k : m.spec.constraints)
            out += "," + fmt(r.constraint_deltas.at(k));
        const bool db = r.result.upsilon && *r.result.upsilon > 0.0;
        out += "," + (r.result.upsilon ? fmt(*r.result.upsilon) : std::string()) + "," +
               (db ? fmt(r.result.db()) : std::string()) + "," + (r.result.cost_neutral ? "true" : "false") + "\n";
    }
    return out;
}

inline std::string ref_report_json(const MetricsFile &m, const std::vector<RefReportRow> &rows)
{
    json out = json::array();
    for (const auto &r : rows)
    {
        json o = json::object();
        o["design"] = r.design;
        json deltas = json::object();
        for (const auto &[k, w] : m.spec.benefits)
            deltas[k] = {{"role", "benefit"}, {"delta", r.result.deltas.at(k)}};
        for (const auto &[k, w] : m.spec.costs)
            deltas[k] = {{"role", "cost"}, {"delta", r.result.deltas.at(k)}};
        for (const auto &k : m.spec.constraints)
            deltas[k] = {{"role", "constraint"}, {"delta", r.constraint_deltas.at(k)}};
        o["deltas"] = deltas;
        o["upsilon"] = r.result.upsilon ? json(*r.result.upsilon) : json(nullptr);
        o["upsilon_db"] = r.result.upsilon && *r.result.upsilon > 0.0 ? json(r.result.db()) : json(nullptr);
        o["cost_neutral"] = r.result.cost_neutral;
        out.push_back(o);
    }
    return out.dump(2) + "\n";
}

} // namespace trihybrid::cli
