#pragma once

#include <string>
#include <utility>

#include "icestring/lattice.hpp"

namespace icestr {

// {"m":int,"n":int,"topology":"torus"|"strip","h":[[...]],"v":[[...]]}, row-major
std::pair<LatticeSpec, EdgeColouring> parse_colouring(const std::string& text);
std::string dump_colouring(const LatticeSpec& spec, const EdgeColouring& c);
std::pair<LatticeSpec, EdgeColouring> read_colouring_file(const std::string& path);

}  // namespace icestr
