#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hetshare/sharing.hpp"

namespace hetshare {

// One report row per user, 13 fixed columns:
//   sweep_value,user_id,tier,cell_id,small_cell_rate,escalated,macro_rate,
//   total_rate,utility,u_req,met_requirement,small_cell_price,macro_price
// Numbers carry 9 significant digits; absent values are empty fields.
inline constexpr const char* kReportCsvHeader =
    "sweep_value,user_id,tier,cell_id,small_cell_rate,escalated,macro_rate,"
    "total_rate,utility,u_req,met_requirement,small_cell_price,macro_price";

std::string format_number(double value);  // %.9g

std::string report_to_csv(const AllocationReport& report,
                          std::optional<double> sweep_value = std::nullopt);

std::string sweep_to_csv(const std::vector<std::pair<double, AllocationReport>>& points);

std::string report_to_json(const AllocationReport& report);
std::string sweep_to_json(const std::vector<std::pair<double, AllocationReport>>& points);

std::string trace_to_csv(const std::vector<StageTrace>& traces);
std::string trace_to_json(const std::vector<StageTrace>& traces);

}  // namespace hetshare
