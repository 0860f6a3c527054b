#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fsm/forcing.hpp"

namespace fsm {

// Exit codes: 0 certified success, 1 input error, 2 Unknown or budget exhaustion.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
// Arguments without the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Five small oracle tables used by the cone demo.
std::vector<Name> toy_functionals();

// One JSON object per stage.
std::vector<std::string> fusion_log(const FusionState& st);

}  // namespace fsm
