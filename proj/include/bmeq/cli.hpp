#pragma once

#include <iosfwd>

namespace bmeq {

/// Entry point of the `bmeq` command. Exit codes: 0 success or Equal,
/// 1 NotEqual or failing diagnostics, 2 errors, 3 Inconclusive.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bmeq
