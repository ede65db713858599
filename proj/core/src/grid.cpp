#include "pxo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pxo {

Grid Grid::make(int dim, int n, double extent) {
  return make(dim, {n, n}, {extent, extent});
}

Grid Grid::make(int dim, std::array<int, 2> n, std::array<double, 2> extent) {
  if (dim != 1 && dim != 2) {
    throw std::invalid_argument("grid: dimension must be 1 or 2, got " + std::to_string(dim));
  }
  Grid g;
  g.dim_ = dim;
  for (int a = 0; a < dim; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (n[ua] < 3) {
      throw std::invalid_argument("grid: need at least 3 nodes per axis, got " + std::to_string(n[ua]));
    }
    if (!(extent[ua] > 0.0) || !std::isfinite(extent[ua])) {
      throw std::invalid_argument("grid: extent must be positive and finite");
    }
    g.n_[ua] = n[ua];
    g.extent_[ua] = extent[ua];
    g.h_[ua] = extent[ua] / static_cast<double>(n[ua] - 1);
  }
  g.nodeCount_ = static_cast<std::size_t>(g.n_[0]) * static_cast<std::size_t>(g.n_[1]);
  return g;
}

double Grid::maxExtent() const {
  return dim_ == 1 ? extent_[0] : std::max(extent_[0], extent_[1]);
}

double Grid::minSpacing() const {
  return dim_ == 1 ? h_[0] : std::min(h_[0], h_[1]);
}

double Grid::maxSpacing() const {
  return dim_ == 1 ? h_[0] : std::max(h_[0], h_[1]);
}

double Grid::volume() const {
  return dim_ == 1 ? extent_[0] : extent_[0] * extent_[1];
}

double Grid::cellVolume() const {
  return dim_ == 1 ? h_[0] : h_[0] * h_[1];
}

Point Grid::point(std::size_t k) const {
  const auto ij = lattice(k);
  return {ij[0] * h_[0], dim_ == 2 ? ij[1] * h_[1] : 0.0};
}

bool Grid::isBoundary(std::size_t k) const {
  const auto ij = lattice(k);
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (ij[ua] == 0 || ij[ua] == n_[ua] - 1) return true;
  }
  return false;
}

double Grid::weight(std::size_t k) const {
  const auto ij = lattice(k);
  double w = cellVolume();
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    if (ij[ua] == 0 || ij[ua] == n_[ua] - 1) w *= 0.5;
  }
  return w;
}

std::size_t Grid::faceCount(int axis) const {
  if (axis >= dim_) return 0;
  if (axis == 0) return static_cast<std::size_t>(n_[0] - 1) * static_cast<std::size_t>(n_[1]);
  return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1] - 1);
}

std::size_t Grid::faceLowNode(int axis, std::size_t f) const {
  if (axis == 0) {
    const auto m = static_cast<std::size_t>(n_[0] - 1);
    return index(static_cast<int>(f % m), static_cast<int>(f / m));
  }
  return f;
}

std::size_t Grid::faceFromLowNode(int axis, std::size_t k) const {
  if (axis == 0) {
    const auto ij = lattice(k);
    return static_cast<std::size_t>(ij[0]) + static_cast<std::size_t>(n_[0] - 1) * static_cast<std::size_t>(ij[1]);
  }
  return k;
}

Point Grid::facePoint(int axis, std::size_t f) const {
  Point p = point(faceLowNode(axis, f));
  p[static_cast<std::size_t>(axis)] += 0.5 * h_[static_cast<std::size_t>(axis)];
  return p;
}

double Grid::faceWeight(int axis, std::size_t f) const {
  const auto ij = lattice(faceLowNode(axis, f));
  double w = cellVolume();
  for (int a = 0; a < dim_; ++a) {
    if (a == axis) continue;
    const auto ua = static_cast<std::size_t>(a);
    if (ij[ua] == 0 || ij[ua] == n_[ua] - 1) w *= 0.5;
  }
  return w;
}

std::vector<std::size_t> Grid::interiorNodes() const {
  std::vector<std::size_t> out;
  out.reserve(nodeCount_);
  for (std::size_t k = 0; k < nodeCount_; ++k) {
    if (!isBoundary(k)) out.push_back(k);
  }
  return out;
}

void requireSameGrid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw std::invalid_argument(std::string(what) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------

ScalarField::ScalarField(Grid grid, double value)
    : grid_(grid), values_(grid.nodeCount(), value) {
  if (!std::isfinite(value)) throw std::invalid_argument("ScalarField: non-finite value");
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodeCount()) {
    throw std::invalid_argument("ScalarField: expected " + std::to_string(grid_.nodeCount()) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw std::invalid_argument("ScalarField: non-finite value at node " + std::to_string(k));
    }
  }
}

ScalarField ScalarField::fromFunction(const Grid& grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.nodeCount());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid.point(k));
  return {grid, std::move(v)};
}

double ScalarField::maxAbs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

VectorField::VectorField(Grid grid, std::array<std::vector<double>, 2> components)
    : grid_(grid), components_(std::move(components)) {
  for (int a = 0; a < 2; ++a) {
    const auto& c = components_[static_cast<std::size_t>(a)];
    if (c.size() != grid_.faceCount(a)) throw std::invalid_argument("VectorField: face count mismatch");
    for (double v : c) {
      if (!std::isfinite(v)) throw std::invalid_argument("VectorField: non-finite component");
    }
  }
}

RegionMask::RegionMask(Grid grid, bool value) : grid_(grid), flags_(grid.nodeCount(), value ? 1 : 0) {}

RegionMask::RegionMask(Grid grid, std::vector<char> flags) : grid_(grid), flags_(std::move(flags)) {
  if (flags_.size() != grid_.nodeCount()) throw std::invalid_argument("RegionMask: size mismatch");
  for (auto& f : flags_) f = f ? 1 : 0;
}

RegionMask RegionMask::fromPredicate(const Grid& grid, const std::function<bool(std::size_t)>& pred) {
  std::vector<char> f(grid.nodeCount());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = pred(k) ? 1 : 0;
  return {grid, std::move(f)};
}

RegionMask RegionMask::interior(const Grid& grid) {
  return fromPredicate(grid, [&](std::size_t k) { return !grid.isBoundary(k); });
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
}

RegionMask RegionMask::operator&(const RegionMask& other) const {
  requireSameGrid(grid_, other.grid_, "RegionMask::&");
  std::vector<char> f(flags_.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = flags_[k] & other.flags_[k];
  return {grid_, std::move(f)};
}

RegionMask RegionMask::operator|(const RegionMask& other) const {
  requireSameGrid(grid_, other.grid_, "RegionMask::|");
  std::vector<char> f(flags_.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = flags_[k] | other.flags_[k];
  return {grid_, std::move(f)};
}

RegionMask RegionMask::operator!() const {
  std::vector<char> f(flags_.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = flags_[k] ? 0 : 1;
  return {grid_, std::move(f)};
}

RegionMask RegionMask::minus(const RegionMask& other) const { return *this & !other; }

// ---------------------------------------------------------------------------

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid();
  std::array<std::vector<double>, 2> comp;
  for (int a = 0; a < g.dim(); ++a) {
    auto& c = comp[static_cast<std::size_t>(a)];
    c.resize(g.faceCount(a));
    const double h = g.h(a);
    for (std::size_t f = 0; f < c.size(); ++f) {
      c[f] = (u[g.faceHighNode(a, f)] - u[g.faceLowNode(a, f)]) / h;
    }
  }
  return {g, std::move(comp)};
}

ScalarField divergence(const VectorField& q) {
  const Grid& g = q.grid();
  std::vector<double> d(g.nodeCount(), 0.0);
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (g.isBoundary(k)) continue;
    double s = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const auto c = q.component(a);
      const std::size_t fr = g.faceFromLowNode(a, k);
      const std::size_t fl = g.faceFromLowNode(a, k - g.stride(a));
      s += (c[fr] - c[fl]) / g.h(a);
    }
    d[k] = s;
  }
  return {g, std::move(d)};
}

double integrate(const ScalarField& v, const RegionMask& region) {
  requireSameGrid(v.grid(), region.grid(), "integrate");
  const Grid& g = v.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (region[k]) s += v[k] * g.weight(k);
  }
  return s;
}

double integrate(const ScalarField& v) { return integrate(v, RegionMask(v.grid(), true)); }

double measure(const RegionMask& region) {
  const Grid& g = region.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < region.size(); ++k) {
    if (region[k]) s += g.weight(k);
  }
  return s;
}

RegionMask symmetricDifference(const RegionMask& a, const RegionMask& b) {
  requireSameGrid(a.grid(), b.grid(), "symmetricDifference");
  std::vector<char> f(a.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = a[k] != b[k] ? 1 : 0;
  return {a.grid(), std::move(f)};
}

RegionMask edgeCollar(const RegionMask& region, double radius) {
  const Grid& g = region.grid();
  const int r0 = static_cast<int>(std::floor(radius / g.h(0) + 1e-9));
  const int r1 = g.dim() == 2 ? static_cast<int>(std::floor(radius / g.h(1) + 1e-9)) : 0;
  const double r2 = radius * radius * (1.0 + 1e-12);
  std::vector<char> out(region.size(), 0);
  for (std::size_t k = 0; k < region.size(); ++k) {
    const auto ij = g.lattice(k);
    bool hit = false;
    for (int dj = -r1; dj <= r1 && !hit; ++dj) {
      const int j = ij[1] + dj;
      if (j < 0 || j >= g.n(1)) continue;
      for (int di = -r0; di <= r0; ++di) {
        const int i = ij[0] + di;
        if (i < 0 || i >= g.n(0)) continue;
        const double dx = di * g.h(0);
        const double dy = g.dim() == 2 ? dj * g.h(1) : 0.0;
        if (dx * dx + dy * dy > r2) continue;
        if (region[g.index(i, j)] != region[k]) {
          hit = true;
          break;
        }
      }
    }
    out[k] = hit ? 1 : 0;
  }
  return {g, std::move(out)};
}

namespace {

template <typename Op>
ScalarField zipWith(const ScalarField& a, const ScalarField& b, Op op, const char* what) {
  requireSameGrid(a.grid(), b.grid(), what);
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(a[k], b[k]);
  return {a.grid(), std::move(v)};
}

template <typename Op>
ScalarField mapField(const ScalarField& a, Op op) {
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = op(a[k]);
  return {a.grid(), std::move(v)};
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return zipWith(a, b, [](double x, double y) { return x + y; }, "operator+");
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return zipWith(a, b, [](double x, double y) { return x - y; }, "operator-");
}

ScalarField operator*(double c, const ScalarField& a) {
  return mapField(a, [c](double x) { return c * x; });
}

ScalarField abs(const ScalarField& a) {
  return mapField(a, [](double x) { return std::abs(x); });
}

ScalarField positivePart(const ScalarField& a) {
  return mapField(a, [](double x) { return std::max(x, 0.0); });
}

ScalarField pointwiseMax(const ScalarField& a, const ScalarField& b) {
  return zipWith(a, b, [](double x, double y) { return std::max(x, y); }, "pointwiseMax");
}

ScalarField pointwiseMin(const ScalarField& a, const ScalarField& b) {
  return zipWith(a, b, [](double x, double y) { return std::min(x, y); }, "pointwiseMin");
}

ScalarField indicator(const RegionMask& region) {
  std::vector<double> v(region.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = region[k] ? 1.0 : 0.0;
  return {region.grid(), std::move(v)};
}

ScalarField zeroBoundary(const ScalarField& a) {
  const Grid& g = a.grid();
  std::vector<double> v = a.vector();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (g.isBoundary(k)) v[k] = 0.0;
  }
  return {g, std::move(v)};
}

}  // namespace pxo
