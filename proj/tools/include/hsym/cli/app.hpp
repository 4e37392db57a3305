#pragma once

#include <iosfwd>

namespace hsym::cli {

// Exit code 0 iff every check passes; 1 on failed checks; 2 on usage or spec errors.
int run_app(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace hsym::cli
