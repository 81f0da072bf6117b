#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace satsched::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Runs one subcommand. `args` excludes the program name. Returns 0 on
/// success, 1 on runtime errors (and failed validation), 2 on usage errors.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace satsched::cli
