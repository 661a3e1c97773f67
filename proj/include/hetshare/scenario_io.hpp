#pragma once

#include <iosfwd>
#include <string>

#include "hetshare/sharing.hpp"

namespace hetshare {

// Parses the scenario text format:
//
//   # comment
//   macro capacity=100
//   small_cell id=s1 capacity=50
//   user id=UE1 tier=sue cell=s1 utility=sigmoidal a=3 b=20 u_req=0.8
//   user id=UE5 tier=mue utility=logarithmic k=0.5 r_max=100
//
// Exactly one `macro` line; sigmoidal utilities take a= b=, logarithmic take
// k= r_max=; SUEs require cell= and u_req=, MUEs take neither (cell=macro is
// accepted).  Throws ParseError with a line number on malformed input and
// ValidationError on scenario invariant violations.
Scenario parse_scenario(std::istream& in, const std::string& source_name);

// Reads and parses a scenario file.  Throws Error("...") when the file cannot
// be opened.
Scenario load_scenario(const std::string& path);

}  // namespace hetshare
