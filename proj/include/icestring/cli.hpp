#pragma once

#include <iosfwd>

namespace icestr {

// exit codes: 0 ok, 1 verification failure, 2 bad arguments, 3 capacity, 4 numerical guard
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace icestr
