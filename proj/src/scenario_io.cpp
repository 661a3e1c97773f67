#include "hetshare/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <vector>

#include "hetshare/errors.hpp"

namespace hetshare {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) == 0 && c != '_' && c != '-' &&
        c != '.') {
      return false;
    }
  }
  return true;
}

// key=value fields of one record line, with duplicate detection.
class Fields {
 public:
  Fields(const std::string& source, int line) : source_(source), line_(line) {}

  void add(const std::string& token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= token.size()) {
      fail("expected key=value, got '" + token + "'");
    }
    const std::string key = token.substr(0, eq);
    if (!values_.emplace(key, token.substr(eq + 1)).second) {
      fail("duplicate field '" + key + "'");
    }
  }

  std::string take_string(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) fail("missing field '" + key + "'");
    std::string value = it->second;
    values_.erase(it);
    return value;
  }

  std::optional<std::string> take_optional(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    std::string value = it->second;
    values_.erase(it);
    return value;
  }

  double take_number(const std::string& key) { return to_number(key, take_string(key)); }

  double to_number(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty() || !std::isfinite(value)) {
      fail("field '" + key + "': expected a finite number, got '" + text + "'");
    }
    return value;
  }

  void expect_empty(const std::string& record) {
    if (!values_.empty()) {
      fail(record + ": unknown field '" + values_.begin()->first + "'");
    }
  }

  [[noreturn]] void fail(const std::string& message) {
    throw ParseError(source_, line_, message);
  }

 private:
  std::string source_;
  int line_;
  std::map<std::string, std::string> values_;
};

UtilityFunction parse_utility(Fields& fields) {
  const std::string kind = fields.take_string("utility");
  if (kind == "sigmoidal") {
    const double a = fields.take_number("a");
    const double b = fields.take_number("b");
    if (!(a > 0.0) || !(b > 0.0)) fields.fail("sigmoidal utility requires a > 0 and b > 0");
    return UtilityFunction::sigmoidal(a, b);
  }
  if (kind == "logarithmic") {
    const double k = fields.take_number("k");
    const double r_max = fields.take_number("r_max");
    if (!(k > 0.0) || !(r_max > 0.0)) {
      fields.fail("logarithmic utility requires k > 0 and r_max > 0");
    }
    return UtilityFunction::logarithmic(k, r_max);
  }
  fields.fail("field 'utility': expected sigmoidal or logarithmic, got '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& source_name) {
  Scenario scenario;
  bool have_macro = false;
  std::map<std::string, int> cell_lines;
  std::map<std::string, int> user_lines;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::istringstream tokens(line);
    std::string record;
    if (!(tokens >> record) || record.front() == '#') continue;

    Fields fields(source_name, line_number);
    std::string token;
    while (tokens >> token) {
      if (token.front() == '#') break;
      fields.add(token);
    }

    if (record == "macro") {
      if (have_macro) fields.fail("duplicate macro record");
      have_macro = true;
      scenario.macro_capacity = fields.take_number("capacity");
      if (!(scenario.macro_capacity > 0.0)) fields.fail("field 'capacity': must be > 0");
      fields.expect_empty("macro");
    } else if (record == "small_cell") {
      SmallCell cell;
      cell.cell_id = fields.take_string("id");
      if (!valid_identifier(cell.cell_id)) fields.fail("field 'id': invalid identifier");
      if (cell.cell_id == kMacroCellId) fields.fail("field 'id': 'macro' is reserved");
      if (!cell_lines.emplace(cell.cell_id, line_number).second) {
        fields.fail("duplicate small cell id '" + cell.cell_id + "'");
      }
      cell.capacity = fields.take_number("capacity");
      if (!(cell.capacity > 0.0)) fields.fail("field 'capacity': must be > 0");
      fields.expect_empty("small_cell");
      scenario.small_cells.push_back(std::move(cell));
    } else if (record == "user") {
      const std::string id = fields.take_string("id");
      if (!valid_identifier(id)) fields.fail("field 'id': invalid identifier");
      if (!user_lines.emplace(id, line_number).second) {
        fields.fail("duplicate user id '" + id + "'");
      }
      const std::string tier = fields.take_string("tier");
      if (tier != "sue" && tier != "mue") {
        fields.fail("field 'tier': expected sue or mue, got '" + tier + "'");
      }
      UserProfile user{id, tier == "sue" ? Tier::kSue : Tier::kMue, kMacroCellId,
                       parse_utility(fields), std::nullopt};
      if (const auto cell = fields.take_optional("cell"); cell.has_value()) {
        user.cell_id = *cell;
      }
      if (const auto u_req = fields.take_optional("u_req"); u_req.has_value()) {
        user.required_utility = fields.to_number("u_req", *u_req);
      }
      fields.expect_empty("user");
      if (user.tier == Tier::kSue) {
        if (user.cell_id == kMacroCellId) {
          fields.fail("user '" + id + "': tier=sue requires cell=<small cell id>");
        }
        if (cell_lines.count(user.cell_id) == 0) {
          fields.fail("user '" + id + "': cell '" + user.cell_id +
                      "' not declared (small_cell records precede users)");
        }
        if (!user.required_utility.has_value()) {
          fields.fail("user '" + id + "': tier=sue requires u_req");
        }
        if (!(*user.required_utility > 0.0 && *user.required_utility < 1.0)) {
          fields.fail("user '" + id + "': u_req must be in (0,1)");
        }
      } else {
        if (user.required_utility.has_value()) {
          fields.fail("user '" + id + "': tier=mue must not set u_req");
        }
        if (user.cell_id != kMacroCellId) {
          fields.fail("user '" + id + "': tier=mue is served by the macro cell only");
        }
      }
      scenario.users.push_back(std::move(user));
    } else {
      fields.fail("unknown record '" + record + "' (expected macro, small_cell or user)");
    }
  }
  if (!have_macro) {
    throw ParseError(source_name, line_number, "missing macro record");
  }
  validate_scenario(scenario);  // cross-checks everything the line checks missed
  return scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open scenario file '" + path + "'");
  }
  return parse_scenario(in, path);
}

}  // namespace hetshare
