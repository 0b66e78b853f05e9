#pragma once

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gridcast/eval/search.hpp"

namespace gridcast::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Entry point of the `gridcast` tool; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Search space file: {"schema_version", "model", "budget", "seed", "values":
// {name: [v, ...]}}, with value lists kept in file order.
std::string search_space_to_json(const SearchSpace& space);
SearchSpace parse_search_space(std::string_view json_text);

std::string_view tool_version() noexcept;

}  // namespace gridcast::cli
