#include "hetshare/sharing.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "hetshare/errors.hpp"

namespace hetshare {

namespace {

SolverOptions solver_options(const RunOptions& options, const std::string& stage_id,
                             std::vector<BisectionStep>** trace_out) {
  SolverOptions solver;
  solver.capacity_tolerance_rel = options.capacity_tolerance_rel;
  solver.max_iterations = options.max_iterations;
  *trace_out = nullptr;
  if (options.trace_sink != nullptr) {
    options.trace_sink->push_back({stage_id, {}});
    *trace_out = &options.trace_sink->back().steps;
    solver.trace = *trace_out;
  }
  return solver;
}

CellAllocation run_stage(const std::vector<ParameterMessage>& inbox,
                         const std::vector<EscalationRecord>& escalations, double capacity,
                         const std::string& stage_id, const RunOptions& options) {
  AllocationProblem problem;
  problem.capacity = capacity;
  for (const auto& message : inbox) {
    problem.entries.push_back({message.user_id, message.utility, 0.0});
  }
  for (const auto& record : escalations) {
    problem.entries.push_back({record.user_id, record.utility, record.small_cell_rate});
  }
  std::vector<BisectionStep>* trace = nullptr;
  return allocate(problem, solver_options(options, stage_id, &trace));
}

}  // namespace

void validate_scenario(const Scenario& scenario) {
  if (!(scenario.macro_capacity > 0.0)) {
    throw ValidationError("scenario: macro capacity must be > 0");
  }
  std::unordered_set<std::string> cell_ids;
  for (const auto& cell : scenario.small_cells) {
    if (cell.cell_id == kMacroCellId) {
      throw ValidationError("scenario: small cell id 'macro' is reserved");
    }
    if (!cell_ids.insert(cell.cell_id).second) {
      throw ValidationError("scenario: duplicate small cell id '" + cell.cell_id + "'");
    }
    if (!(cell.capacity > 0.0)) {
      throw ValidationError("scenario: small cell '" + cell.cell_id +
                            "' capacity must be > 0");
    }
  }
  if (scenario.users.empty()) {
    throw ValidationError("scenario: at least one user required");
  }
  std::unordered_set<std::string> user_ids;
  for (const auto& user : scenario.users) {
    if (!user_ids.insert(user.user_id).second) {
      throw ValidationError("scenario: duplicate user id '" + user.user_id + "'");
    }
    if (user.tier == Tier::kSue) {
      if (!user.required_utility.has_value()) {
        throw ValidationError("scenario: user '" + user.user_id +
                              "': tier=sue requires u_req");
      }
      if (!(*user.required_utility > 0.0 && *user.required_utility < 1.0)) {
        throw ValidationError("scenario: user '" + user.user_id +
                              "': u_req must be in (0,1)");
      }
      if (cell_ids.count(user.cell_id) == 0) {
        throw ValidationError("scenario: user '" + user.user_id +
                              "': cell '" + user.cell_id + "' does not exist");
      }
    } else {
      if (user.required_utility.has_value()) {
        throw ValidationError("scenario: user '" + user.user_id +
                              "': tier=mue must not set u_req");
      }
      if (user.cell_id != kMacroCellId) {
        throw ValidationError("scenario: user '" + user.user_id +
                              "': tier=mue must be served by the macro cell");
      }
    }
  }
}

const UserOutcome& AllocationReport::outcome_of(std::string_view user_id) const {
  for (const auto& outcome : users) {
    if (outcome.user_id == user_id) return outcome;
  }
  throw ValidationError("no outcome for user '" + std::string(user_id) + "'");
}

std::map<std::string, std::vector<ParameterMessage>> exchange_parameters(
    const Scenario& scenario) {
  std::map<std::string, std::vector<ParameterMessage>> inboxes;
  for (const auto& user : scenario.users) {
    ParameterMessage message{user.user_id, user.utility,
                             user.tier == Tier::kSue ? user.required_utility : std::nullopt};
    inboxes[user.tier == Tier::kSue ? user.cell_id : kMacroCellId].push_back(
        std::move(message));
  }
  return inboxes;
}

std::pair<CellAllocation, std::vector<EscalationRecord>> small_cell_round(
    const Scenario& scenario, const std::string& cell_id, const RunOptions& options) {
  validate_scenario(scenario);
  const auto cell = std::find_if(scenario.small_cells.begin(), scenario.small_cells.end(),
                                 [&](const SmallCell& c) { return c.cell_id == cell_id; });
  if (cell == scenario.small_cells.end()) {
    throw ValidationError("small_cell_round: unknown cell '" + cell_id + "'");
  }
  auto inboxes = exchange_parameters(scenario);
  const auto& inbox = inboxes[cell_id];
  if (inbox.empty()) {
    return {CellAllocation{}, {}};
  }
  CellAllocation allocation = run_stage(inbox, {}, cell->capacity, cell_id, options);

  // Escalate every SUE whose utility at the stage-one rate falls strictly
  // below its requirement; the rest are finalized at that rate.
  std::vector<EscalationRecord> escalations;
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    const auto& message = inbox[i];
    const double rate = allocation.rates[i].rate;
    if (message.utility.evaluate(rate) < *message.required_utility) {
      escalations.push_back({message.user_id, rate, message.utility});
    }
  }
  return {std::move(allocation), std::move(escalations)};
}

CellAllocation macro_round(const Scenario& scenario,
                           const std::vector<EscalationRecord>& escalations,
                           const RunOptions& options) {
  validate_scenario(scenario);
  std::unordered_map<std::string, const UserProfile*> by_id;
  for (const auto& user : scenario.users) by_id[user.user_id] = &user;
  for (const auto& record : escalations) {
    const auto it = by_id.find(record.user_id);
    if (it == by_id.end() || it->second->tier != Tier::kSue) {
      throw ValidationError("macro_round: escalation for '" + record.user_id +
                            "' does not reference an SUE");
    }
  }
  auto inboxes = exchange_parameters(scenario);
  const auto& mue_inbox = inboxes[kMacroCellId];
  if (mue_inbox.empty() && escalations.empty()) {
    return CellAllocation{};
  }
  return run_stage(mue_inbox, escalations, scenario.macro_capacity, kMacroCellId, options);
}

AllocationReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  validate_scenario(scenario);
  const auto inboxes = exchange_parameters(scenario);

  AllocationReport report;
  std::unordered_map<std::string, UserOutcome> outcomes;
  for (const auto& user : scenario.users) {
    UserOutcome outcome;
    outcome.user_id = user.user_id;
    outcome.tier = user.tier;
    outcome.cell_id = user.tier == Tier::kSue ? user.cell_id : kMacroCellId;
    outcome.required_utility = user.required_utility;
    outcomes.emplace(user.user_id, std::move(outcome));
  }

  // Stage one per small cell, in scenario cell order.
  std::vector<EscalationRecord> escalations;
  for (const auto& cell : scenario.small_cells) {
    const auto it = inboxes.find(cell.cell_id);
    if (it == inboxes.end() || it->second.empty()) continue;
    const auto& inbox = it->second;
    CellAllocation allocation = run_stage(inbox, {}, cell.capacity, cell.cell_id, options);
    for (std::size_t i = 0; i < inbox.size(); ++i) {
      const auto& message = inbox[i];
      const double rate = allocation.rates[i].rate;
      auto& outcome = outcomes.at(message.user_id);
      outcome.small_cell_rate = rate;
      if (message.utility.evaluate(rate) < *message.required_utility) {
        outcome.escalated = true;
        escalations.push_back({message.user_id, rate, message.utility});
      }
    }
    report.small_cell_stages.push_back({cell.cell_id, allocation.shadow_price,
                                        allocation.objective, allocation.iterations,
                                        allocation.residual});
  }

  // Stage two: MUEs plus the union of all escalation sets.
  const auto mue_it = inboxes.find(kMacroCellId);
  const bool have_macro_users =
      (mue_it != inboxes.end() && !mue_it->second.empty()) || !escalations.empty();
  if (have_macro_users) {
    const std::vector<ParameterMessage> empty;
    const auto& mue_inbox = mue_it != inboxes.end() ? mue_it->second : empty;
    CellAllocation allocation =
        run_stage(mue_inbox, escalations, scenario.macro_capacity, kMacroCellId, options);
    for (const auto& user_rate : allocation.rates) {
      outcomes.at(user_rate.user_id).macro_rate = user_rate.rate;
    }
    report.macro_stage = StageSummary{kMacroCellId, allocation.shadow_price,
                                      allocation.objective, allocation.iterations,
                                      allocation.residual};
  }

  for (const auto& user : scenario.users) {
    auto& outcome = outcomes.at(user.user_id);
    outcome.total_rate = outcome.small_cell_rate + outcome.macro_rate;
    outcome.achieved_utility = user.utility.evaluate(outcome.total_rate);
    outcome.requirement = !outcome.required_utility.has_value() ? Requirement::kNotApplicable
                          : outcome.achieved_utility >= *outcome.required_utility
                              ? Requirement::kMet
                              : Requirement::kNotMet;
    report.users.push_back(std::move(outcome));
  }
  return report;
}

}  // namespace hetshare
