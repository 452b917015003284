#pragma once

#include <iosfwd>

namespace betalab::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kSchema = "betalab.report/1";

/// Runs one subcommand. Exit status: 0 when every asserted property holds,
/// 1 for a failed property or a domain error, 2 for usage errors, 3 for
/// precision and budget limits.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace betalab::cli
