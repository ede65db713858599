#include "pxo/field_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace pxo {

void writeField(std::ostream& os, const ScalarField& field) {
  const Grid& g = field.grid();
  os << g.dim() << ' ' << g.n(0);
  if (g.dim() == 2) os << ' ' << g.n(1);
  os << std::setprecision(17) << ' ' << g.extent(0);
  if (g.dim() == 2) os << ' ' << g.extent(1);
  os << '\n';
  for (double v : field.values()) os << v << '\n';
}

void writeField(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream os(path);
  if (!os) throw FieldFormatError("cannot open " + path.string() + " for writing");
  writeField(os, field);
}

ScalarField readField(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw FieldFormatError("field file: missing header");
  std::istringstream hs(header);
  int dim = 0;
  if (!(hs >> dim) || (dim != 1 && dim != 2)) throw FieldFormatError("field file: bad dimension in header");
  std::array<int, 2> n{0, 0};
  std::array<double, 2> extent{0.0, 0.0};
  for (int a = 0; a < dim; ++a) {
    if (!(hs >> n[static_cast<std::size_t>(a)])) throw FieldFormatError("field file: bad node count in header");
  }
  for (int a = 0; a < dim; ++a) {
    if (!(hs >> extent[static_cast<std::size_t>(a)])) throw FieldFormatError("field file: bad extent in header");
  }
  std::string rest;
  if (hs >> rest) throw FieldFormatError("field file: trailing tokens in header");

  Grid grid = [&] {
    try {
      return Grid::make(dim, n, extent);
    } catch (const std::invalid_argument& e) {
      throw FieldFormatError(std::string("field file: ") + e.what());
    }
  }();

  std::vector<double> values;
  values.reserve(grid.nodeCount());
  std::string line;
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double v = 0.0;
    if (!(ls >> v) || !std::isfinite(v)) {
      throw FieldFormatError("field file: bad value on data line " + std::to_string(values.size() + 1));
    }
    values.push_back(v);
  }
  if (values.size() != grid.nodeCount()) {
    throw FieldFormatError("field file: expected " + std::to_string(grid.nodeCount()) + " values, read " +
                           std::to_string(values.size()));
  }
  return {grid, std::move(values)};
}

ScalarField readField(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FieldFormatError("cannot open " + path.string());
  return readField(is);
}

}  // namespace pxo
