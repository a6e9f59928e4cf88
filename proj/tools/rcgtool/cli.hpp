#pragma once

#include <iosfwd>

namespace rcg::cli {

/// Exit codes: 0 success, 1 usage error, 2 data error, 3 degenerate statistics.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rcg::cli
