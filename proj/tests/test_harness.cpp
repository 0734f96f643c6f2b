#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "hris/harness/config.hpp"
#include "hris/harness/csv.hpp"
#include "hris/harness/sweep.hpp"

using namespace hris;
using namespace hris::harness;

namespace {

/// Small, quick sweep used by the runner tests.
SimulationConfig quick(int threads = 1) {
  auto c = parse_config(R"(
sweep: {variable: pt, values: [-5, 0, 5]}
realizations: 2
schemes: [hybrid, noris]
design: {iterations: 2, n_rand: 20}
seed: 11
)",
                        Profile::Desk);
  c.threads = threads;
  return c;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hris_" + name)).string();
}

}  // namespace

TEST(Config, EmptyDocumentGivesFullScaleScenario) {
  const auto c = parse_config("");
  EXPECT_EQ(c.geometry.antennas, 16);
  EXPECT_EQ(c.spec.elements, 100);
  EXPECT_EQ(c.users, 2u);
  EXPECT_EQ(c.targets, 4u);
  EXPECT_EQ(c.spec.active, 20);
  EXPECT_NEAR(c.spec.eta, std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(c.design.gamma, std::pow(10.0, 0.5), 1e-12);
  EXPECT_NEAR(c.design.sigma2 / std::pow(10.0, -9.4), 1.0, 1e-12);
  EXPECT_NEAR(c.spec.nu2, 1e-6, 1e-18);
  EXPECT_NEAR(c.design.r_max, 1e-9, 1e-21);
  EXPECT_NEAR(c.design.p_t, 16.0, 1e-12);
  EXPECT_EQ(c.design.max_iterations, 10);
  EXPECT_EQ(c.realizations, 100);
  EXPECT_EQ(c.fading.rician_factor, 10.0);
  EXPECT_EQ(c.fading.direct.slope, 22.0);
  EXPECT_EQ(c.fading.ris_link.slope, 35.0);
  EXPECT_EQ(c.geometry.ris, channel::Position(10, -8, 5));
  EXPECT_EQ(c.area.corner, channel::Position(5, -2, 0));
}

TEST(Config, DeskProfile) {
  const auto c = parse_config("", Profile::Desk);
  EXPECT_EQ(c.geometry.antennas, 8);
  EXPECT_EQ(c.spec.elements, 16);
  EXPECT_EQ(c.spec.active, 4);
  EXPECT_EQ(c.targets, 2u);
  EXPECT_EQ(c.realizations, 20);
  EXPECT_EQ(c.design.max_iterations, 5);
  EXPECT_NEAR(c.design.p_t, 8.0, 1e-12);
}

TEST(Config, DecibelFieldsConverted) {
  const auto c = parse_config("ris: {eta_db: 10, nu2_dbm: -70}\ndesign: {gamma_db: 10, pt_per_antenna_db: 3}");
  EXPECT_NEAR(c.spec.eta, std::sqrt(10.0), 1e-12);
  EXPECT_NEAR(c.spec.nu2, 1e-7, 1e-19);
  EXPECT_NEAR(c.design.gamma, 10.0, 1e-12);
  EXPECT_NEAR(c.design.p_t, 16.0 * std::pow(10.0, 0.3), 1e-12);
}

TEST(Config, SweepMustIncrease) {
  EXPECT_THROW(parse_config("sweep: {variable: gamma, values: [3, 1, 2]}"), RangeError);
  EXPECT_THROW(parse_config("sweep: {values: [1, 1]}"), RangeError);
}

TEST(Config, SweepVariableBringsItsDefaults) {
  const auto c = parse_config("sweep: {variable: eta}", Profile::Desk);
  EXPECT_EQ(c.sweep, SweepVariable::Eta);
  EXPECT_EQ(c.sweep_values, (std::vector<double>{0, 5, 10}));
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(parse_config("realizations: 0"), RangeError);
  EXPECT_THROW(parse_config("sweep: {variable: L, values: [0, 200]}"), RangeError);
  EXPECT_THROW(parse_config("sweep: {variable: L, values: [0, 2.5]}"), RangeError);
  EXPECT_THROW(parse_config("ris: {elements: 15}"), RangeError);  // not a square array
  EXPECT_THROW(parse_config("ris: {active: 101}"), RangeError);
  EXPECT_THROW(parse_config("design: {gamma_db: .inf}"), RangeError);
  EXPECT_THROW(parse_config("geometry: {targets: 0}"), RangeError);
  EXPECT_THROW(parse_config("schemes: []"), RangeError);
}

TEST(Config, ParseErrorsCarryLineAndField) {
  try {
    parse_config("seed: 3\nris:\n  elements: 16\n  eta: 10\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.field(), "ris.eta");
  }
  try {
    parse_config("realizations: 5\ndesign:\n  n_rand: many\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.field(), "design.n_rand");
  }
  try {
    parse_config("schemes: [hybrid, magic]");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "schemes");
  }
  EXPECT_THROW(parse_config("geometry: {dfbs: [0, 0]}"), ParseError);
  EXPECT_THROW(parse_config("sweep: [1, 2"), ParseError);
  EXPECT_THROW(parse_config("sweep: {variable: power}"), ParseError);
}

TEST(Config, MissingFileIsIoError) {
  EXPECT_THROW(load_config("/nonexistent/dir/config.yaml"), IoError);
}

TEST(Config, LoadsFromFile) {
  const auto path = temp_path("config.yaml");
  std::ofstream(path) << "seed: 42\noutput: out.csv\n";
  const auto c = load_config(path, Profile::Desk);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.output, "out.csv");
  std::filesystem::remove(path);
}

TEST(Sweep, RowAccountingAndOrder) {
  const auto c = quick();
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 12u);
  std::size_t i = 0;
  for (double v : c.sweep_values)
    for (auto s : c.schemes)
      for (int r = 0; r < 2; ++r, ++i) {
        EXPECT_EQ(rows[i].sweep_value, v);
        EXPECT_EQ(rows[i].scheme, s);
        EXPECT_EQ(rows[i].realization, r);
      }
}

TEST(Sweep, FeasibleRowsPassChecksAndBound) {
  const auto c = quick();
  for (const auto& row : run_sweep(c)) {
    ASSERT_TRUE(row.feasible()) << row.detail;
    EXPECT_TRUE(check_row(row, row_gamma_db(c, row), c.r_max_dbm).ok());
    // no tolerance: the bound column must dominate the realized output power
    if (row.scheme == opt::Scheme::Hybrid) {
      EXPECT_GE(row.thm1_bound_dbm, row.pris_dbm);
    }
    if (row.scheme == opt::Scheme::NoRIS) {
      EXPECT_EQ(row.pris_dbm, -std::numeric_limits<double>::infinity());
      EXPECT_EQ(row.max_tgt_noise_dbm, -std::numeric_limits<double>::infinity());
    }
  }
}

TEST(Sweep, SchemesShareChannels) {
  auto c = quick();
  c.schemes = {opt::Scheme::NoRIS, opt::Scheme::NoRIS};
  const auto rows = run_sweep(c);
  for (std::size_t i = 0; i < rows.size(); i += 4) {
    EXPECT_EQ(rows[i].wc_illum_dbm, rows[i + 2].wc_illum_dbm);
    EXPECT_EQ(rows[i + 1].wc_illum_dbm, rows[i + 3].wc_illum_dbm);
  }
}

TEST(Sweep, InfeasibleCellsBecomeRows) {
  auto c = quick();
  c.sweep = SweepVariable::Gamma;
  c.sweep_values = {5.0, 120.0};
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(rows[i].feasible());
  for (std::size_t i = 4; i < 8; ++i) {
    EXPECT_EQ(rows[i].status, RowStatus::Infeasible);
    EXPECT_TRUE(std::isnan(rows[i].wc_illum_dbm));
  }
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const auto a = format_csv(run_sweep(quick(1)));
  const auto b = format_csv(run_sweep(quick(4)));
  const auto c = format_csv(run_sweep(quick(4)));
  EXPECT_EQ(a, b);
  EXPECT_EQ(b, c);
}

TEST(Csv, EmptyResultIsHeaderOnly) {
  EXPECT_EQ(format_csv({}), std::string(kCsvHeader) + "\n");
}

TEST(Csv, RowHasElevenFields) {
  SweepResult r;
  r.sweep_value = -5.0;
  r.wc_illum_dbm = -35.123456789;
  r.min_sinr_db = 5.0;
  r.max_tgt_noise_dbm = -100.0;
  r.pris_dbm = -40.0;
  r.thm1_bound_dbm = -20.0;
  r.iterations = 3;
  r.status = RowStatus::Ok;
  const auto text = format_csv({r});
  const auto line = text.substr(text.find('\n') + 1);
  EXPECT_EQ(line, "pt,-5.000000,hybrid,0,-35.123457,5.000000,-100.000000,-40.000000,-20.000000,3,ok\n");
}

TEST(Csv, NonFiniteValuesSpelledOut) {
  EXPECT_EQ(format_fixed(std::nan("")), "nan");
  EXPECT_EQ(format_fixed(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_fixed(-1e-9), "0.000000");
}

TEST(Csv, RoundTripKeepsMedians) {
  const auto c = quick();
  const auto rows = run_sweep(c);
  const auto path = temp_path("roundtrip.csv");
  emit_csv(rows, path);
  const auto parsed = read_csv(path);
  std::filesystem::remove(path);
  ASSERT_EQ(parsed.size(), rows.size());

  std::map<std::pair<double, std::string>, std::vector<double>> direct, back;
  for (const auto& r : rows) direct[{r.sweep_value, opt::to_string(r.scheme)}].push_back(r.wc_illum_dbm);
  for (const auto& r : parsed) back[{r.sweep_value, r.scheme}].push_back(r.wc_illum_dbm);
  ASSERT_EQ(direct.size(), back.size());
  for (const auto& [key, values] : direct) {
    // six printed decimals bound the difference
    EXPECT_NEAR(median(back.at(key)), median(values), 5e-7);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].status, to_string(rows[i].status));
    EXPECT_EQ(parsed[i].iterations, rows[i].iterations);
  }
}

TEST(Csv, WriteFailureIsIoError) {
  EXPECT_THROW(emit_csv({}, "/nonexistent/dir/out.csv"), IoError);
}

TEST(Csv, ParseRejectsBadInput) {
  EXPECT_THROW(parse_csv("a,b\n"), ParseError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\npt,1,hybrid\n"), ParseError);
  EXPECT_THROW(parse_csv(std::string(kCsvHeader) + "\npt,x,hybrid,0,1,1,1,1,1,1,ok\n"), ParseError);
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_TRUE(std::isnan(median({})));
}
