#pragma once

#include <iosfwd>

namespace sleepsched {

/// Entry point of the `sleepsched` tool. Returns 0 on success, 1 on a
/// configuration or usage error, 2 on an I/O error.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sleepsched
