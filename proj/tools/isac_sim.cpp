// isac-sim: run a Monte-Carlo sweep from a YAML config and write the CSV.
//
// exit codes: 0 ok, 1 config error, 2 I/O error

#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hris/harness/config.hpp"
#include "hris/harness/csv.hpp"
#include "hris/harness/sweep.hpp"

using namespace hris;
using namespace hris::harness;

namespace {

std::vector<opt::Scheme> parse_scheme_list(const std::string& text) {
  std::vector<opt::Scheme> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(opt::parse_scheme(item));
  if (out.empty()) throw ValidationError("--schemes is empty");
  return out;
}

int summarize(const std::vector<SweepResult>& rows) {
  std::size_t ok = 0, fallback = 0, infeasible = 0;
  for (const auto& r : rows) {
    if (r.status == RowStatus::Ok) ++ok;
    if (r.status == RowStatus::Fallback) ++fallback;
    if (r.status == RowStatus::Infeasible) ++infeasible;
  }
  std::cerr << rows.size() << " rows: " << ok << " ok, " << fallback << " fallback, " << infeasible << " infeasible\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid RIS ISAC simulator"};
  app.require_subcommand(1);

  std::string config_path, profile_name = "desk", sweep_name, schemes_text, out_path;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "run a sweep and write the result CSV");
  run->add_option("--config", config_path, "YAML config file")->required();
  run->add_option("--profile", profile_name, "defaults for omitted fields")->check(CLI::IsMember({"desk", "paper"}));
  run->add_option("--sweep", sweep_name, "swept variable")->check(CLI::IsMember({"pt", "eta", "L", "gamma"}));
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  run->add_option("--schemes", schemes_text, "comma separated: hybrid,passive,random,noris");
  run->add_option("--out", out_path, "output CSV path");

  auto* validate = app.add_subcommand("validate", "check a config file and exit");
  validate->add_option("--config", config_path, "YAML config file")->required();
  validate->add_option("--profile", profile_name, "defaults for omitted fields")->check(CLI::IsMember({"desk", "paper"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    auto cfg = load_config(config_path, parse_profile(profile_name));
    if (validate->parsed()) {
      cfg.validate();
      std::cout << "config ok: " << cfg.sweep_values.size() << " sweep values x " << cfg.schemes.size() << " schemes x "
                << cfg.realizations << " realizations\n";
      return 0;
    }

    if (!sweep_name.empty()) {
      const auto v = parse_sweep_variable(sweep_name);
      if (v != cfg.sweep) {
        cfg.sweep = v;
        cfg.sweep_values = default_sweep_values(v, parse_profile(profile_name));
      }
    }
    if (*seed_opt) cfg.seed = seed;
    if (!schemes_text.empty()) cfg.schemes = parse_scheme_list(schemes_text);
    if (!out_path.empty()) cfg.output = out_path;
    cfg.validate();
    // fail before spending the run time, not after
    emit_csv({}, cfg.output);

    const auto rows = run_sweep(cfg);
    emit_csv(rows, cfg.output);
    return summarize(rows);
  } catch (const ParseError& e) {
    std::cerr << "config error: " << config_path << ":" << e.line() << ": " << e.field() << ": " << e.what() << "\n";
    return 1;
  } catch (const RangeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  }
}
