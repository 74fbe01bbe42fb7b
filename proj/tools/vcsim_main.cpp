#include "vcsim/chain.hpp"
#include "vcsim/error.hpp"
#include "vcsim/io.hpp"
#include "vcsim/scenario.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <future>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace vcsim;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> horizon;
  std::string mode;
};

void add_overrides(CLI::App *cmd, Overrides &o) {
  cmd->add_option("--seed", o.seed, "Run seed");
  cmd->add_option("--horizon", o.horizon, "Run length in hours");
  cmd->add_option("--mode", o.mode, "Force scor or vcor process wiring")
      ->check(CLI::IsMember({"scor", "vcor"}));
}

Scenario load_or_builtin(const std::string &path, const std::string &mode) {
  if (path.empty())
    return case_study_profile(mode == "vcor" ? RunMode::kVcor : RunMode::kScor);
  return load_scenario(path);
}

Scenario apply(Scenario s, const Overrides &o) {
  if (o.seed)
    s.seed = *o.seed;
  if (o.horizon)
    s.horizon = *o.horizon;
  if (!o.mode.empty())
    force_mode(s, o.mode == "vcor" ? RunMode::kVcor : RunMode::kScor);
  validate(s);
  return s;
}

void print_summary(const KpiReport &r, std::ostream &out) {
  out << "mode " << to_string(r.mode) << ", seed " << r.seed << ", " << format_number(r.period)
      << " h, " << r.total_orders << " orders, " << r.support_tickets << " support tickets\n";
  for (const auto &a : r.actors) {
    if (a.orders_received == 0)
      continue;
    out << "  " << a.actor << ": delivered " << a.orders_delivered << "/" << a.orders_received;
    if (a.delivery.mean)
      out << ", mean delivery " << format_number(*a.delivery.mean) << " h";
    out << "\n";
  }
}

KpiReport kpi_for(const std::string &input, const Overrides &o) {
  if (fs::is_directory(input))
    return read_kpi_report(input);
  return run_scenario(apply(load_scenario(input), o)).report;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Value chain simulator: SCOR and VCOR supply-chain runs and KPI reports"};
  app.require_subcommand(1);

  Overrides run_o;
  std::string run_path, run_out;
  auto *run = app.add_subcommand("run", "Run one scenario and write its artifacts");
  run->add_option("scenario", run_path, "Scenario YAML (default: built-in case study)");
  run->add_option("--out", run_out, "Output directory")->required();
  add_overrides(run, run_o);

  Overrides cmp_o;
  std::string cmp_scor, cmp_vcor, cmp_out;
  auto *compare = app.add_subcommand("compare", "Compare a SCOR run with a VCOR run");
  compare->add_option("scor", cmp_scor, "SCOR scenario YAML or artifact directory")->required();
  compare->add_option("vcor", cmp_vcor, "VCOR scenario YAML or artifact directory")->required();
  compare->add_option("--out", cmp_out, "Output directory")->required();
  compare->add_option("--seed", cmp_o.seed, "Run seed (scenario inputs only)");
  compare->add_option("--horizon", cmp_o.horizon, "Run length in hours (scenario inputs only)");

  std::string val_path;
  auto *val = app.add_subcommand("validate", "Validate a scenario file");
  val->add_option("scenario", val_path, "Scenario YAML")->required();

  std::string demo_out;
  auto *demo = app.add_subcommand("demo", "Write the built-in case-study scenario pair");
  demo->add_option("--out", demo_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::kValidation);
  }

  try {
    if (*run) {
      const Scenario s = apply(load_or_builtin(run_path, run_o.mode), run_o);
      const RunResult r = run_scenario(s);
      write_run_artifacts(run_out, r, s);
      print_summary(r.report, std::cout);
    } else if (*compare) {
      auto scor = std::async(std::launch::async, kpi_for, cmp_scor, cmp_o);
      auto vcor = std::async(std::launch::async, kpi_for, cmp_vcor, cmp_o);
      const KpiReport a = scor.get();
      const KpiReport b = vcor.get();
      const ComparisonReport c = compare_runs(a, b);
      write_comparison(cmp_out, c);
      for (const auto &row : c.rows)
        if (!row.finding.empty() && row.finding != "unchanged")
          std::cout << row.key << ": " << row.finding << "\n";
    } else if (*val) {
      const Scenario s = load_scenario(val_path);
      std::cout << "ok " << s.name << " " << scenario_digest(s) << "\n";
    } else if (*demo) {
      fs::create_directories(demo_out);
      write_text_file(fs::path(demo_out) / "scor.yaml",
                      serialize_scenario(case_study_profile(RunMode::kScor)));
      write_text_file(fs::path(demo_out) / "vcor.yaml",
                      serialize_scenario(case_study_profile(RunMode::kVcor)));
      std::cout << "wrote " << (fs::path(demo_out) / "scor.yaml").string() << " and "
                << (fs::path(demo_out) / "vcor.yaml").string() << "\n";
    }
  } catch (const Error &e) {
    std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
    return static_cast<int>(e.exit_code());
  } catch (const fs::filesystem_error &e) {
    std::cerr << "error [io_error]: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kIo);
  } catch (const std::exception &e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return static_cast<int>(ExitCode::kInvariant);
  }
  return 0;
}
