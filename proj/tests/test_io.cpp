#include <sstream>
#include <string>

#include <doctest.h>

#include "hetshare/errors.hpp"
#include "hetshare/report_io.hpp"
#include "hetshare/scenario_io.hpp"
#include "hetshare/sharing.hpp"

using hetshare::ParseError;
using hetshare::Scenario;
using hetshare::Tier;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return hetshare::parse_scenario(in, "test");
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    hetshare::parse_scenario(in, "test");
  } catch (const ParseError& e) {
    return e.line_number;
  }
  return -1;
}

const char* kGood =
    "# fixture\n"
    "macro capacity=100\n"
    "small_cell id=s1 capacity=50\n"
    "user id=A tier=sue cell=s1 utility=sigmoidal a=3 b=20 u_req=0.8\n"
    "user id=B tier=mue utility=logarithmic k=0.5 r_max=100\n";

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("well-formed scenario parses") {
  const auto scenario = parse(kGood);
  CHECK(scenario.macro_capacity == 100.0);
  REQUIRE(scenario.small_cells.size() == 1);
  CHECK(scenario.small_cells[0].capacity == 50.0);
  REQUIRE(scenario.users.size() == 2);
  CHECK(scenario.users[0].tier == Tier::kSue);
  CHECK(scenario.users[0].required_utility == 0.8);
  CHECK(scenario.users[1].tier == Tier::kMue);
  CHECK(scenario.users[1].cell_id == std::string(hetshare::kMacroCellId));
}

TEST_CASE("bundled fixture loads") {
  const auto scenario =
      hetshare::load_scenario(std::string(HETSHARE_DATA_DIR) + "/table1.scenario");
  CHECK(scenario.macro_capacity == 100.0);
  REQUIRE(scenario.small_cells.size() == 1);
  CHECK(scenario.small_cells[0].cell_id == "s1");
  CHECK(scenario.small_cells[0].capacity == 50.0);
  REQUIRE(scenario.users.size() == 8);
  int sues = 0;
  for (const auto& user : scenario.users) {
    if (user.tier == Tier::kSue) ++sues;
  }
  CHECK(sues == 4);
  CHECK(scenario.users[0].utility.params() ==
        std::variant<hetshare::Sigmoidal, hetshare::Logarithmic>(
            hetshare::Sigmoidal{3.0, 20.0}));
  CHECK(scenario.users[7].utility.params() ==
        std::variant<hetshare::Sigmoidal, hetshare::Logarithmic>(
            hetshare::Logarithmic{0.5, 100.0}));
}

TEST_CASE("parse errors carry the offending line") {
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=50\n"
                         "user id=A tier=mue utility=sigmoidal a=5 b=10 u_req=0.5\n") == 3);
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=50\n"
                         "user id=A tier=sue cell=s1 utility=sigmoidal a=3 b=20\n") == 3);
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=nan\n") == 2);
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=50\n"
                         "user id=A tier=sue cell=s2 utility=sigmoidal a=3 b=20 u_req=0.5\n") ==
        3);
  CHECK(parse_error_line("macro capacity=100\n"
                         "wibble id=x\n") == 2);
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=50 capacity=60\n") == 2);
  CHECK(parse_error_line("small_cell id=s1 capacity=50\n") == 1);  // missing macro
  CHECK(parse_error_line("macro capacity=100\n"
                         "small_cell id=s1 capacity=50\n"
                         "user id=A tier=sue cell=s1 utility=sigmoidal a=3 b=20 u_req=1.5\n") ==
        3);
}

TEST_CASE("empty user list is rejected") {
  CHECK_THROWS_AS(parse("macro capacity=100\nsmall_cell id=s1 capacity=50\n"),
                  hetshare::ValidationError);
}

TEST_CASE("missing file reports an error") {
  CHECK_THROWS_AS(hetshare::load_scenario("/nonexistent/nowhere.scenario"), hetshare::Error);
}

TEST_CASE("csv report has the fixed column layout") {
  const auto scenario = parse(kGood);
  const auto report = hetshare::run_scenario(scenario);
  const std::string csv = hetshare::report_to_csv(report);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == hetshare::kReportCsvHeader);
  std::string row;
  int rows = 0;
  while (std::getline(lines, row)) {
    ++rows;
    CHECK(std::count(row.begin(), row.end(), ',') == 12);  // 13 columns
    CHECK(row.front() == ',');                             // no sweep value
  }
  CHECK(rows == 2);

  // MUE rows leave u_req empty and met_requirement not applicable.
  std::istringstream again(csv);
  std::getline(again, header);
  std::string sue_row, mue_row;
  std::getline(again, sue_row);
  std::getline(again, mue_row);
  CHECK(sue_row.find(",A,sue,s1,") != std::string::npos);
  CHECK(mue_row.find(",B,mue,macro,") != std::string::npos);
  CHECK(mue_row.find(",,na,") != std::string::npos);
}

TEST_CASE("number formatting is 9 significant digits") {
  CHECK(hetshare::format_number(0.0) == "0");
  CHECK(hetshare::format_number(12.3456789123) == "12.3456789");
  CHECK(hetshare::format_number(1e-12) == "1e-12");
}

TEST_CASE("json report mirrors the csv content") {
  const auto scenario = parse(kGood);
  const auto report = hetshare::run_scenario(scenario);
  const std::string json = hetshare::report_to_json(report);
  CHECK(json.find("\"user_id\": \"A\"") != std::string::npos);
  CHECK(json.find("\"tier\": \"sue\"") != std::string::npos);
  CHECK(json.find("\"macro\"") != std::string::npos);
}

TEST_CASE("trace csv rows are per bisection step") {
  // Two users per stage: single-user stages converge at a bracket probe and
  // leave no bisection steps to log.
  const auto scenario = parse(
      "macro capacity=80\n"
      "small_cell id=s1 capacity=50\n"
      "user id=A tier=sue cell=s1 utility=sigmoidal a=3 b=20 u_req=0.8\n"
      "user id=B tier=sue cell=s1 utility=logarithmic k=3 r_max=100 u_req=0.5\n"
      "user id=C tier=mue utility=logarithmic k=0.5 r_max=100\n"
      "user id=D tier=mue utility=sigmoidal a=5 b=10\n");
  std::vector<hetshare::StageTrace> traces;
  hetshare::RunOptions options;
  options.trace_sink = &traces;
  hetshare::run_scenario(scenario, options);
  const std::string csv = hetshare::trace_to_csv(traces);
  std::istringstream lines(csv);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "stage,iteration,p_lo,p_hi,p_mid,excess_demand");
  bool saw_s1 = false;
  bool saw_macro = false;
  std::string row;
  while (std::getline(lines, row)) {
    if (row.rfind("s1,", 0) == 0) saw_s1 = true;
    if (row.rfind("macro,", 0) == 0) saw_macro = true;
  }
  CHECK(saw_s1);
  CHECK(saw_macro);
}

TEST_SUITE_END();
