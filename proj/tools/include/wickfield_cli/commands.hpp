#pragma once

#include "wickfield/wightman.hpp"

#include <json.hpp>

#include <ostream>
#include <string>
#include <vector>

namespace wickfield::cli {

nlohmann::json term_to_json(const WightmanTerm& term);

/// Names of the subcommands, in usage order.
const std::vector<std::string>& command_names();

/// Full command line dispatch; returns the process exit code
/// (0 ok, 2 validation, 3 numerical failure, 64 unknown command).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace wickfield::cli
