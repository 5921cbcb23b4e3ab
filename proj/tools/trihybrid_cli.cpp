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

#include "runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace
{

using namespace trihybrid;

// Exit codes: 0 success, 1 usage or scenario problems, 2 model errors.
constexpr int exit_scenario = 1;
constexpr int exit_model = 2;

int report(const std::exception &e)
{
    if (const auto *s = dynamic_cast<const cli::ScenarioError *>(&e))
    {
        std::cerr << "error: " << s->what() << "\n";
        return exit_scenario;
    }
    if (const auto *m = dynamic_cast<const Error *>(&e))
    {
        std::cerr << "error [" << m->module() << "]: " << m->what() << "\n";
        return m->code() == Errc::parse ? exit_scenario : exit_model;
    }
    std::cerr << "error: " << e.what() << "\n";
    return exit_model;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Tri-hybrid MIMO transmit simulation runner"};
    app.require_subcommand(1);

    std::string scenario_path, metrics_path, format = "csv", out_dir;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;

    auto *run = app.add_subcommand("run", "Run a scenario and write results, summary and field maps");
    run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
    auto *seed_opt = run->add_option("--seed", seed, "Root seed; overrides the scenario seed");
    auto *out_opt = run->add_option("--out-dir", out_dir, "Output directory; overrides the scenario output.dir");
    run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run->add_option("--format", format, "Results format")->check(CLI::IsMember({"csv", "json"}));

    auto *validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);

    auto *refc = app.add_subcommand("ref", "Compute the REF of designs in a metrics file");
    refc->add_option("metrics", metrics_path, "Metrics JSON file")->required()->check(CLI::ExistingFile);
    auto *ref_out = refc->add_option("--out-dir", out_dir, "Write ref_report.<format> here instead of stdout");
    refc->add_option("--format", format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run)
        {
            const auto s = cli::load_scenario(scenario_path);
            cli::RunOptions o;
            if (*seed_opt)
                o.seed = seed;
            if (*out_opt)
                o.out_dir = out_dir;
            o.jobs = jobs;
            o.format = format;
            const auto r = cli::run_scenario(s, o);
            for (const auto &p : cli::write_outputs(s, r, o))
                std::cout << p.string() << "\n";
        }
        else if (*validate)
        {
            cli::load_scenario(scenario_path);
            std::cout << scenario_path << ": ok\n";
        }
        else if (*refc)
        {
            const auto m = cli::load_metrics(metrics_path);
            const auto rows = cli::ref_report(m);
            const std::string text = format == "json" ? cli::ref_report_json(m, rows) : cli::ref_report_csv(m, rows);
            if (*ref_out)
            {
                std::filesystem::create_directories(out_dir);
                const auto p = std::filesystem::path(out_dir) / ("ref_report." + format);
                cli::write_text(p, text);
                std::cout << p.string() << "\n";
            }
            else
                std::cout << text;
        }
    }
    catch (const std::exception &e)
    {
        return report(e);
    }
    return 0;
}
