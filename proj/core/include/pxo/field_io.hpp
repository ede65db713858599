#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>

#include "pxo/grid.hpp"

namespace pxo {

class FieldFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text field files. Line 1 is `dim n1 [n2] extent1 [extent2]`; the remaining
// lines hold one node value each, 17 significant digits, with axis 0 running
// fastest (row-major in (y, x)).
void writeField(std::ostream& os, const ScalarField& field);
void writeField(const std::filesystem::path& path, const ScalarField& field);

/// Throws FieldFormatError on a malformed header, short data or trailing values.
ScalarField readField(std::istream& is);
ScalarField readField(const std::filesystem::path& path);

}  // namespace pxo
