// hetshare: two-tier spectrum sharing rate allocation simulator.
//
// Subcommands:
//   run       solve one scenario and write the per-user report
//   sweep     re-run the scenario while one capacity steps over a range
//   trace     write the shadow-price bisection log of every stage
//   validate  parse and check a scenario file
//
// Exit codes: 0 success, 2 input error, 3 solver failure, 4 I/O error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hetshare/errors.hpp"
#include "hetshare/report_io.hpp"
#include "hetshare/scenario_io.hpp"
#include "hetshare/sharing.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
  std::string scenario_path;
  std::vector<std::string> small_cell_overrides;  // "<value>" or "<cell>=<value>"
  double macro_override = -1.0;
  std::string out_path = "-";
  std::string format = "csv";
  double tol_cap = 1e-6;
  int max_iterations = 200;
  long seed = 0;  // reserved; the engine has no randomness
};

struct SweepArgs {
  std::string target = "rs";  // rb | rs | rs:<cell_id>
  double from = 0.0;
  double to = 0.0;
  double step = 0.0;
};

double parse_positive(const std::string& flag, const std::string& text) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size() && value > 0.0) return value;
  } catch (const std::exception&) {
  }
  throw hetshare::ValidationError(flag + ": expected a positive number, got '" + text + "'");
}

void apply_overrides(hetshare::Scenario& scenario, const CommonArgs& args) {
  if (args.macro_override > 0.0) {
    scenario.macro_capacity = args.macro_override;
  }
  for (const auto& spec : args.small_cell_overrides) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      const double value = parse_positive("--rs", spec);
      for (auto& cell : scenario.small_cells) cell.capacity = value;
      continue;
    }
    const std::string cell_id = spec.substr(0, eq);
    const double value = parse_positive("--rs", spec.substr(eq + 1));
    bool found = false;
    for (auto& cell : scenario.small_cells) {
      if (cell.cell_id == cell_id) {
        cell.capacity = value;
        found = true;
      }
    }
    if (!found) {
      throw hetshare::ValidationError("--rs: unknown small cell '" + cell_id + "'");
    }
  }
}

// Output is fully rendered before the file is opened, so a failed run or an
// unwritable path never leaves a partial file behind.
void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    if (!std::cout) throw std::ios_base::failure("writing to stdout failed");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::ios_base::failure("cannot open output file '" + path + "'");
  out << content;
  out.flush();
  if (!out) throw std::ios_base::failure("writing '" + path + "' failed");
}

hetshare::RunOptions run_options(const CommonArgs& args) {
  hetshare::RunOptions options;
  options.capacity_tolerance_rel = args.tol_cap;
  options.max_iterations = args.max_iterations;
  return options;
}

int cmd_run(const CommonArgs& args) {
  hetshare::Scenario scenario = hetshare::load_scenario(args.scenario_path);
  apply_overrides(scenario, args);
  const hetshare::AllocationReport report = hetshare::run_scenario(scenario, run_options(args));
  write_output(args.out_path, args.format == "json" ? hetshare::report_to_json(report)
                                                    : hetshare::report_to_csv(report));
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const SweepArgs& sweep) {
  hetshare::Scenario base = hetshare::load_scenario(args.scenario_path);
  apply_overrides(base, args);

  if (!(sweep.step > 0.0)) throw hetshare::ValidationError("--step must be > 0");
  if (sweep.from > sweep.to) throw hetshare::ValidationError("--from must be <= --to");
  if ((sweep.to - sweep.from) / sweep.step > 1e5) {
    throw hetshare::ValidationError("sweep exceeds 100000 points");
  }
  std::string target_cell;  // empty: every small cell
  bool target_macro = false;
  if (sweep.target == "rb") {
    target_macro = true;
  } else if (sweep.target == "rs") {
    if (base.small_cells.empty()) {
      throw hetshare::ValidationError("--target rs: scenario has no small cells");
    }
  } else if (sweep.target.rfind("rs:", 0) == 0) {
    target_cell = sweep.target.substr(3);
    const bool known = std::any_of(base.small_cells.begin(), base.small_cells.end(),
                                   [&](const auto& c) { return c.cell_id == target_cell; });
    if (!known) {
      throw hetshare::ValidationError("--target: unknown small cell '" + target_cell + "'");
    }
  } else {
    throw hetshare::ValidationError("--target: expected rb, rs or rs:<cell_id>, got '" +
                                    sweep.target + "'");
  }

  std::vector<std::pair<double, hetshare::AllocationReport>> points;
  for (double value = sweep.from; value <= sweep.to + 1e-9 * sweep.step;
       value += sweep.step) {
    hetshare::Scenario scenario = base;
    if (target_macro) {
      scenario.macro_capacity = value;
    } else {
      for (auto& cell : scenario.small_cells) {
        if (target_cell.empty() || cell.cell_id == target_cell) cell.capacity = value;
      }
    }
    points.emplace_back(value, hetshare::run_scenario(scenario, run_options(args)));
  }
  write_output(args.out_path, args.format == "json" ? hetshare::sweep_to_json(points)
                                                    : hetshare::sweep_to_csv(points));
  return kExitOk;
}

int cmd_trace(const CommonArgs& args) {
  hetshare::Scenario scenario = hetshare::load_scenario(args.scenario_path);
  apply_overrides(scenario, args);
  std::vector<hetshare::StageTrace> traces;
  hetshare::RunOptions options = run_options(args);
  options.trace_sink = &traces;
  hetshare::run_scenario(scenario, options);
  write_output(args.out_path, args.format == "json" ? hetshare::trace_to_json(traces)
                                                    : hetshare::trace_to_csv(traces));
  return kExitOk;
}

int cmd_validate(const CommonArgs& args) {
  const hetshare::Scenario scenario = hetshare::load_scenario(args.scenario_path);
  std::size_t sues = 0;
  for (const auto& user : scenario.users) {
    if (user.tier == hetshare::Tier::kSue) ++sues;
  }
  std::cout << "OK: " << args.scenario_path << ": " << scenario.small_cells.size()
            << " small cell(s), " << sues << " SUE(s), " << scenario.users.size() - sues
            << " MUE(s), macro capacity " << hetshare::format_number(scenario.macro_capacity)
            << "\n";
  return kExitOk;
}

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_output) {
  cmd->add_option("scenario", args.scenario_path, "scenario file")->required();
  cmd->add_option("--rs", args.small_cell_overrides,
                  "small-cell capacity override, <value> or <cell_id>=<value>");
  cmd->add_option("--rb", args.macro_override, "macro capacity override");
  cmd->add_option("--tol-cap", args.tol_cap, "relative capacity tolerance of the solver")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", args.max_iterations,
                  "shadow-price bisection iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "reserved (the engine has no randomness)");
  if (with_output) {
    cmd->add_option("--out", args.out_path, "output path, '-' for stdout");
    cmd->add_option("--format", args.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-tier spectrum sharing rate allocation simulator"};
  app.require_subcommand(1);

  CommonArgs args;
  SweepArgs sweep;

  CLI::App* run = app.add_subcommand("run", "solve one scenario and write the report");
  add_common_flags(run, args, true);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run a capacity sweep");
  add_common_flags(sweep_cmd, args, true);
  sweep_cmd->add_option("--target", sweep.target, "which capacity varies: rb, rs or rs:<cell_id>");
  sweep_cmd->add_option("--from", sweep.from, "first capacity value")->required();
  sweep_cmd->add_option("--to", sweep.to, "last capacity value")->required();
  sweep_cmd->add_option("--step", sweep.step, "capacity increment")->required();

  CLI::App* trace = app.add_subcommand("trace", "write per-stage bisection logs");
  add_common_flags(trace, args, true);

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  add_common_flags(validate, args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (run->parsed()) return cmd_run(args);
    if (sweep_cmd->parsed()) return cmd_sweep(args, sweep);
    if (trace->parsed()) return cmd_trace(args);
    return cmd_validate(args);
  } catch (const hetshare::SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const hetshare::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const hetshare::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const hetshare::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const hetshare::Error& e) {
    // load_scenario reports unopenable files here
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
