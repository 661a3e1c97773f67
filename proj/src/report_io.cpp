#include "hetshare/report_io.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace hetshare {

namespace {

using ordered_json = nlohmann::ordered_json;

std::optional<double> stage_price(const AllocationReport& report, const UserOutcome& user) {
  if (user.tier == Tier::kSue) {
    for (const auto& stage : report.small_cell_stages) {
      if (stage.cell_id == user.cell_id) return stage.shadow_price;
    }
    return std::nullopt;
  }
  return std::nullopt;
}

std::optional<double> macro_price(const AllocationReport& report, const UserOutcome& user) {
  const bool in_macro_round = user.tier == Tier::kMue || user.escalated;
  if (in_macro_round && report.macro_stage.has_value()) {
    return report.macro_stage->shadow_price;
  }
  return std::nullopt;
}

std::string optional_number(std::optional<double> value) {
  return value.has_value() ? format_number(*value) : std::string();
}

const char* requirement_text(Requirement requirement) {
  switch (requirement) {
    case Requirement::kMet:
      return "true";
    case Requirement::kNotMet:
      return "false";
    default:
      return "na";
  }
}

void append_rows(std::ostringstream& out, const AllocationReport& report,
                 std::optional<double> sweep_value) {
  for (const auto& user : report.users) {
    out << optional_number(sweep_value) << ',' << user.user_id << ','
        << (user.tier == Tier::kSue ? "sue" : "mue") << ',' << user.cell_id << ','
        << format_number(user.small_cell_rate) << ','
        << (user.escalated ? "true" : "false") << ',' << format_number(user.macro_rate)
        << ',' << format_number(user.total_rate) << ','
        << format_number(user.achieved_utility) << ','
        << optional_number(user.required_utility) << ','
        << requirement_text(user.requirement) << ','
        << optional_number(stage_price(report, user)) << ','
        << optional_number(macro_price(report, user)) << '\n';
  }
}

ordered_json stage_to_json(const StageSummary& stage) {
  return ordered_json{{"cell_id", stage.cell_id},
                      {"shadow_price", stage.shadow_price},
                      {"objective", stage.objective},
                      {"iterations", stage.iterations},
                      {"residual", stage.residual}};
}

ordered_json report_to_json_value(const AllocationReport& report) {
  ordered_json users = ordered_json::array();
  for (const auto& user : report.users) {
    ordered_json row{{"user_id", user.user_id},
                     {"tier", user.tier == Tier::kSue ? "sue" : "mue"},
                     {"cell_id", user.cell_id},
                     {"small_cell_rate", user.small_cell_rate},
                     {"escalated", user.escalated},
                     {"macro_rate", user.macro_rate},
                     {"total_rate", user.total_rate},
                     {"utility", user.achieved_utility}};
    row["u_req"] = user.required_utility.has_value() ? ordered_json(*user.required_utility)
                                                     : ordered_json(nullptr);
    row["met_requirement"] = user.requirement == Requirement::kNotApplicable
                                 ? ordered_json(nullptr)
                                 : ordered_json(user.requirement == Requirement::kMet);
    const auto small = stage_price(report, user);
    row["small_cell_price"] = small.has_value() ? ordered_json(*small) : ordered_json(nullptr);
    const auto macro = macro_price(report, user);
    row["macro_price"] = macro.has_value() ? ordered_json(*macro) : ordered_json(nullptr);
    users.push_back(std::move(row));
  }
  ordered_json cells = ordered_json::array();
  for (const auto& stage : report.small_cell_stages) cells.push_back(stage_to_json(stage));
  ordered_json result{{"users", std::move(users)}, {"small_cells", std::move(cells)}};
  result["macro"] = report.macro_stage.has_value() ? stage_to_json(*report.macro_stage)
                                                   : ordered_json(nullptr);
  return result;
}

}  // namespace

std::string format_number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

std::string report_to_csv(const AllocationReport& report, std::optional<double> sweep_value) {
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  append_rows(out, report, sweep_value);
  return out.str();
}

std::string sweep_to_csv(const std::vector<std::pair<double, AllocationReport>>& points) {
  std::ostringstream out;
  out << kReportCsvHeader << '\n';
  for (const auto& [value, report] : points) {
    append_rows(out, report, value);
  }
  return out.str();
}

std::string report_to_json(const AllocationReport& report) {
  return report_to_json_value(report).dump(2) + "\n";
}

std::string sweep_to_json(const std::vector<std::pair<double, AllocationReport>>& points) {
  ordered_json sweep = ordered_json::array();
  for (const auto& [value, report] : points) {
    sweep.push_back(ordered_json{{"sweep_value", value}, {"report", report_to_json_value(report)}});
  }
  return ordered_json{{"sweep", std::move(sweep)}}.dump(2) + "\n";
}

std::string trace_to_csv(const std::vector<StageTrace>& traces) {
  std::ostringstream out;
  out << "stage,iteration,p_lo,p_hi,p_mid,excess_demand\n";
  for (const auto& trace : traces) {
    for (const auto& step : trace.steps) {
      out << trace.stage_id << ',' << step.iteration << ',' << format_number(step.price_lo)
          << ',' << format_number(step.price_hi) << ',' << format_number(step.price_mid)
          << ',' << format_number(step.excess_demand) << '\n';
    }
  }
  return out.str();
}

std::string trace_to_json(const std::vector<StageTrace>& traces) {
  ordered_json stages = ordered_json::array();
  for (const auto& trace : traces) {
    ordered_json steps = ordered_json::array();
    for (const auto& step : trace.steps) {
      steps.push_back(ordered_json{{"iteration", step.iteration},
                                   {"p_lo", step.price_lo},
                                   {"p_hi", step.price_hi},
                                   {"p_mid", step.price_mid},
                                   {"excess_demand", step.excess_demand}});
    }
    stages.push_back(ordered_json{{"stage", trace.stage_id}, {"steps", std::move(steps)}});
  }
  return ordered_json{{"trace", std::move(stages)}}.dump(2) + "\n";
}

}  // namespace hetshare
