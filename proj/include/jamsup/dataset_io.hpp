#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jamsup/sigmodel.hpp"

namespace jamsup {

// Flat record stream, little-endian float32: u32 S, S complex chips of r,
// S complex chips of y, u16 K_active, then (u32 index, complex symbol) per
// active user.
void write_dataset(const std::vector<Example>& examples, std::ostream& sink);
void write_dataset(const std::vector<Example>& examples, const std::string& path);

std::vector<Example> read_dataset(std::istream& source);
std::vector<Example> read_dataset(const std::string& path);

}  // namespace jamsup
