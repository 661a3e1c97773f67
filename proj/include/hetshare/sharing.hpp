#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetshare/pf_solver.hpp"
#include "hetshare/utility.hpp"

namespace hetshare {

// Reserved cell id for the macro eNodeB.
inline constexpr const char* kMacroCellId = "macro";

enum class Tier { kSue, kMue };

struct UserProfile {
  std::string user_id;
  Tier tier = Tier::kMue;
  std::string cell_id;  // small-cell id for SUEs, kMacroCellId for MUEs
  UtilityFunction utility;
  std::optional<double> required_utility;  // present iff SUE, in (0,1)
};

struct SmallCell {
  std::string cell_id;
  double capacity = 0.0;
};

struct Scenario {
  double macro_capacity = 0.0;
  std::vector<SmallCell> small_cells;
  std::vector<UserProfile> users;
};

// Enforces all scenario invariants (unique ids, tier/required-utility pairing,
// cell references, positive capacities, at least one user).  Throws
// ValidationError with a field-precise message.
void validate_scenario(const Scenario& scenario);

// What a UE transmits to its serving eNodeB: utility parameters, plus the
// required utility for SUEs only.
struct ParameterMessage {
  std::string user_id;
  UtilityFunction utility;
  std::optional<double> required_utility;
};

// Sent by a small cell to the macro eNodeB for each under-served SUE.
struct EscalationRecord {
  std::string user_id;
  double small_cell_rate = 0.0;
  UtilityFunction utility;
};

enum class Requirement { kMet, kNotMet, kNotApplicable };

struct UserOutcome {
  std::string user_id;
  Tier tier = Tier::kMue;
  std::string cell_id;
  double small_cell_rate = 0.0;  // 0 for MUEs
  bool escalated = false;
  double macro_rate = 0.0;  // 0 for users outside the macro round
  double total_rate = 0.0;
  double achieved_utility = 0.0;  // U(total_rate)
  std::optional<double> required_utility;
  Requirement requirement = Requirement::kNotApplicable;
};

struct StageSummary {
  std::string cell_id;  // small-cell id or kMacroCellId
  double shadow_price = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

struct AllocationReport {
  std::vector<UserOutcome> users;  // scenario user order
  std::vector<StageSummary> small_cell_stages;
  std::optional<StageSummary> macro_stage;

  const UserOutcome& outcome_of(std::string_view user_id) const;
};

// Bisection trace of one allocation stage, keyed by cell id.
struct StageTrace {
  std::string stage_id;
  std::vector<BisectionStep> steps;
};

struct RunOptions {
  double capacity_tolerance_rel = 1e-6;
  int max_iterations = 200;
  std::vector<StageTrace>* trace_sink = nullptr;
};

// The UE-side parameter exchange: per-cell inboxes of ParameterMessages, SUEs
// addressed to their small cell (with required utility), MUEs to the macro
// (without).  The eNodeB rounds below consume only these messages.
std::map<std::string, std::vector<ParameterMessage>> exchange_parameters(
    const Scenario& scenario);

// Stage one for a single small cell: proportional-fair allocation of the
// cell's capacity over its SUEs (all offsets zero), then an EscalationRecord
// for every SUE whose achieved utility falls strictly below its requirement.
// A cell with no SUEs yields an empty allocation and no escalations.
std::pair<CellAllocation, std::vector<EscalationRecord>> small_cell_round(
    const Scenario& scenario, const std::string& cell_id, const RunOptions& options = {});

// Stage two: allocates the macro capacity over all MUEs plus the escalated
// SUEs, whose small-cell rates enter as carrier-aggregation offsets.  An
// empty user group yields an empty allocation.
CellAllocation macro_round(const Scenario& scenario,
                           const std::vector<EscalationRecord>& escalations,
                           const RunOptions& options = {});

// Full protocol: every small-cell round, escalation-set union, macro round,
// and report assembly.  Deterministic for identical scenarios.
AllocationReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

}  // namespace hetshare
