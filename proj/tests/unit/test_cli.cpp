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

#include "runner.hpp"

using namespace th_test;

namespace
{

const std::string scenario_dir = TRIHYBRID_SCENARIO_DIR;

std::vector<cli::Diagnostic> diagnostics_of(const std::string &text)
{
    try
    {
        cli::load_scenario_text(text, "inline.json");
    }
    catch (const cli::ScenarioError &e)
    {
        return e.diagnostics();
    }
    return {};
}

const char *small_pass = R"({
  "id": "small_pass",
  "architecture": "pass",
  "config": {"guides": 2, "alpha": 0.3, "guide_length": 10.0, "guide_spacing": 2.0, "height": 3.0, "neff": 1.4},
  "sweep": [{"name": "pinches", "values": [2, 4]}],
  "realizations": 3,
  "seed": 9
})";

} // namespace

TEST(ScenarioParse, SyntaxErrorReportsLine)
{
    try
    {
        cli::load_scenario_text("{\n  \"id\": \"x\",\n  \"architecture\": ,\n}", "broken.json");
        ADD_FAILURE() << "expected a parse error";
    }
    catch (const Error &e)
    {
        EXPECT_EQ(e.code(), Errc::parse);
        EXPECT_NE(std::string(e.what()).find("broken.json:3:"), std::string::npos) << e.what();
    }
}

TEST(ScenarioParse, UnknownArchitectureIsOneDiagnostic)
{
    const auto d = diagnostics_of(R"({"id": "x", "architecture": "holographic", "config": {}})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].path, "/architecture");
}

TEST(ScenarioParse, AllProblemsReportedTogether)
{
    const auto d = diagnostics_of(R"({"architecture": "pass", "realizations": 0, "seed": -1, "colour": 1})");
    std::set<std::string> paths;
    for (const auto &x : d)
        paths.insert(x.path);
    EXPECT_TRUE(paths.count("/realizations"));
    EXPECT_TRUE(paths.count("/seed"));
    EXPECT_TRUE(paths.count("/colour"));
}

TEST(ScenarioParse, InfeasiblePassAlphaNamesField)
{
    const auto d = diagnostics_of(R"({"architecture": "pass",
        "config": {"guides": 1, "alpha": 0.3, "guide_length": 10.0, "guide_spacing": 2.0, "height": 3.0, "neff": 1.4},
        "sweep": [{"name": "pinches", "values": [4, 12]}]})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].path, "/config/alpha");
    EXPECT_NE(d[0].message.find("pinches = 12"), std::string::npos) << d[0].message;
}

TEST(ScenarioParse, UnknownAxisAndMetricRejected)
{
    auto d = diagnostics_of(R"({"architecture": "dma", "sweep": [{"name": "layers", "values": [1]}]})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].path, "/sweep/0/name");
    d = diagnostics_of(R"({"architecture": "dma", "ref": {"benefits": {"beauty": 1.0}, "costs": {"power": 1.0}}})");
    ASSERT_EQ(d.size(), 1u);
    EXPECT_EQ(d[0].path, "/ref/benefits/beauty");
}

TEST(ScenarioParse, ShippedScenariosValidate)
{
    for (const auto *f : {"dma_ref", "sim_ref", "polarization_ref", "parasitic_aperture", "pixel_selection",
                          "pass_pinches", "wire_fields"})
        EXPECT_NO_THROW(cli::load_scenario(scenario_dir + "/" + f + ".json")) << f;
}

TEST(ScenarioRun, EmptyAxisGivesHeaderOnlyCsv)
{
    const auto s = cli::load_scenario_text(R"({"id": "empty", "architecture": "pass",
        "config": {"guides": 1, "alpha": 0.3, "guide_length": 10.0, "guide_spacing": 2.0, "height": 3.0, "neff": 1.4},
        "sweep": [{"name": "pinches", "values": []}]})",
                                           "empty.json");
    const auto r = cli::run_scenario(s);
    const std::string csv = cli::results_csv(s, r);
    std::vector<std::string> data;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        if (!line.empty() && line[0] != '#')
            data.push_back(line);
    ASSERT_EQ(data.size(), 1u);
    EXPECT_EQ(data[0].rfind("scenario_id,pinches,realization,", 0), 0u) << data[0];
}

TEST(ScenarioRun, RerunIsByteIdenticalAndJobsIndependent)
{
    const auto s = cli::load_scenario_text(small_pass, "small_pass.json");
    cli::RunOptions one, two;
    two.jobs = 2;
    const auto a = cli::results_csv(s, cli::run_scenario(s, one));
    const auto b = cli::results_csv(s, cli::run_scenario(s, one));
    const auto c = cli::results_csv(s, cli::run_scenario(s, two));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    cli::RunOptions other;
    other.seed = 10;
    EXPECT_NE(a, cli::results_csv(s, cli::run_scenario(s, other)));
}

TEST(ScenarioRun, RowsAndProvenance)
{
    const auto s = cli::load_scenario_text(small_pass, "small_pass.json");
    const auto r = cli::run_scenario(s);
    ASSERT_EQ(r.points.size(), 2u);
    ASSERT_EQ(r.results[0].size(), 3u);
    const std::string csv = cli::results_csv(s, r);
    EXPECT_NE(csv.find("# seed 9\n"), std::string::npos);
    EXPECT_NE(csv.find("fnv1a64=" + cli::hex64(cli::fnv1a(s.canonical))), std::string::npos);
    std::size_t rows = 0;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);)
        rows += line.rfind("small_pass,", 0) == 0;
    EXPECT_EQ(rows, 6u);
    const auto j = cli::json::parse(cli::results_json(s, r));
    EXPECT_EQ(j["rows"].size(), 6u);
    EXPECT_EQ(j["columns"].size(), r.columns.size());
}

TEST(ScenarioRun, TaskSeedsDifferAcrossRealizations)
{
    EXPECT_NE(cli::task_seed(1, 0), cli::task_seed(1, 1));
    EXPECT_EQ(cli::task_seed(5, 3), cli::task_seed(5, 3));
}

TEST(ScenarioRun, RefTableUsesBaselineOutsideSweep)
{
    const auto s = cli::load_scenario_text(R"({"id": "pass_ref", "architecture": "pass",
        "config": {"guides": 2, "alpha": 0.2, "guide_length": 10.0, "guide_spacing": 2.0, "height": 3.0, "neff": 1.4},
        "sweep": [{"name": "pinches", "values": [2, 4]}],
        "realizations": 2,
        "ref": {"baseline": {"pinches": 1}, "benefits": {"spectral_efficiency": 1.0}, "costs": {"power": 1.0}}})",
                                           "pass_ref.json");
    const auto r = cli::run_scenario(s);
    ASSERT_TRUE(r.baseline.has_value());
    const auto &rows = r.summary_json["ref"]["rows"];
    ASSERT_EQ(rows.size(), 2u);
    for (const auto &row : rows)
        EXPECT_TRUE(row.contains("upsilon") || row.contains("error")) << row.dump();
}

TEST(MetricsFile, TableValuesGiveUpsilonColumn)
{
    const auto m = cli::load_metrics(scenario_dir + "/table3_metrics.json");
    const auto rows = cli::ref_report(m);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(*rows[0].result.upsilon, 0.2, 1e-12);
    EXPECT_NEAR(*rows[1].result.upsilon, 0.11625, 1e-12);
    const std::string csv = cli::ref_report_csv(m, rows);
    EXPECT_EQ(csv.rfind("design,delta_tx_power[benefit],delta_aperture[cost],delta_spectral_efficiency[constraint],"
                        "upsilon,upsilon_db,cost_neutral\n",
                        0),
              0u)
        << csv;
    const auto j = cli::json::parse(cli::ref_report_json(m, rows));
    EXPECT_EQ(j[0]["deltas"]["spectral_efficiency"]["role"], "constraint");
}

TEST(MetricsFile, MissingMetricAndBaselineReported)
{
    try
    {
        cli::load_metrics_text(R"({"baseline": "b", "benefits": {"g": 1.0}, "costs": {"c": 1.0},
            "designs": [{"name": "a", "metrics": {"g": 1.0, "c": 2.0}}, {"name": "d", "metrics": {"g": 1.0}}]})",
                               "m.json");
        ADD_FAILURE() << "expected diagnostics";
    }
    catch (const cli::ScenarioError &e)
    {
        std::set<std::string> paths;
        for (const auto &x : e.diagnostics())
            paths.insert(x.path);
        EXPECT_TRUE(paths.count("/baseline"));
    }
}
