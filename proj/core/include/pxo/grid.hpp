#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pxo {

/// Node coordinates in physical units. Unused trailing components are zero.
using Point = std::array<double, 2>;

/**
 * Uniform tensor lattice on the box [0, extent_0] x [0, extent_1].
 *
 * Nodes are numbered with axis 0 running fastest: k = i + n_0 * j.
 * Faces on axis a join node k to its +a neighbour; face numbering mirrors
 * node numbering on the reduced lattice ((n_0 - 1) x n_1 for axis 0,
 * n_0 x (n_1 - 1) for axis 1).
 *
 * A Grid is a small value type; fields carry a copy.
 */
class Grid {
 public:
  /// Throws std::invalid_argument for dim outside {1,2}, n < 3 or extent <= 0.
  static Grid make(int dim, int n, double extent);
  static Grid make(int dim, std::array<int, 2> n, std::array<double, 2> extent);

  int dim() const { return dim_; }
  int n(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
  double extent(int axis) const { return extent_[static_cast<std::size_t>(axis)]; }
  double h(int axis) const { return h_[static_cast<std::size_t>(axis)]; }
  double maxExtent() const;
  double minSpacing() const;
  double maxSpacing() const;
  /// Product of the extents.
  double volume() const;
  /// h_0 * ... * h_{dim-1}.
  double cellVolume() const;

  std::size_t nodeCount() const { return nodeCount_; }
  std::size_t index(int i, int j = 0) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(j);
  }
  std::array<int, 2> lattice(std::size_t k) const {
    return {static_cast<int>(k % static_cast<std::size_t>(n_[0])),
            static_cast<int>(k / static_cast<std::size_t>(n_[0]))};
  }
  Point point(std::size_t k) const;
  bool isBoundary(std::size_t k) const;
  /// Trapezoidal weight: cell volume halved once per axis on which the node sits on a face.
  double weight(std::size_t k) const;
  /// Offset between neighbouring node indices along an axis.
  std::size_t stride(int axis) const { return axis == 0 ? 1 : static_cast<std::size_t>(n_[0]); }

  std::size_t faceCount(int axis) const;
  /// Node on the low side of a face.
  std::size_t faceLowNode(int axis, std::size_t f) const;
  std::size_t faceHighNode(int axis, std::size_t f) const { return faceLowNode(axis, f) + stride(axis); }
  /// Face whose low node is k (k must not lie on the high face of the axis).
  std::size_t faceFromLowNode(int axis, std::size_t k) const;
  Point facePoint(int axis, std::size_t f) const;
  /// cellVolume() halved for every tangential axis on which the face lies on the boundary.
  double faceWeight(int axis, std::size_t f) const;

  std::vector<std::size_t> interiorNodes() const;

  bool operator==(const Grid& other) const = default;

 private:
  Grid() = default;

  int dim_ = 1;
  std::array<int, 2> n_{1, 1};
  std::array<double, 2> extent_{0.0, 0.0};
  std::array<double, 2> h_{0.0, 0.0};
  std::size_t nodeCount_ = 0;
};

/// Node-valued real field. Values are finite; the object is immutable.
class ScalarField {
 public:
  ScalarField(Grid grid, double value);
  /// Throws std::invalid_argument on size mismatch or non-finite entries.
  ScalarField(Grid grid, std::vector<double> values);

  static ScalarField fromFunction(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vector() const { return values_; }

  double maxAbs() const;
  double min() const;
  double max() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Face-centred field: one component array per axis.
class VectorField {
 public:
  VectorField(Grid grid, std::array<std::vector<double>, 2> components);

  const Grid& grid() const { return grid_; }
  std::span<const double> component(int axis) const { return components_[static_cast<std::size_t>(axis)]; }

 private:
  Grid grid_;
  std::array<std::vector<double>, 2> components_;
};

/// Nodewise boolean set on a grid.
class RegionMask {
 public:
  RegionMask(Grid grid, bool value);
  RegionMask(Grid grid, std::vector<char> flags);

  static RegionMask fromPredicate(const Grid& grid, const std::function<bool(std::size_t)>& pred);
  static RegionMask interior(const Grid& grid);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return flags_.size(); }
  bool operator[](std::size_t k) const { return flags_[k] != 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }

  RegionMask operator&(const RegionMask& other) const;
  RegionMask operator|(const RegionMask& other) const;
  RegionMask operator!() const;
  /// Set difference this \ other.
  RegionMask minus(const RegionMask& other) const;

  bool operator==(const RegionMask& other) const = default;

 private:
  Grid grid_;
  std::vector<char> flags_;
};

// Differential operators on the staggered lattice. Boundary nodes carry zero
// divergence.
VectorField gradient(const ScalarField& u);
ScalarField divergence(const VectorField& q);

double integrate(const ScalarField& v, const RegionMask& region);
double integrate(const ScalarField& v);
double measure(const RegionMask& region);
RegionMask symmetricDifference(const RegionMask& a, const RegionMask& b);

/// Nodes whose Euclidean distance to a node of opposite membership is at most `radius`.
RegionMask edgeCollar(const RegionMask& region, double radius);

// Nodewise arithmetic.
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
ScalarField abs(const ScalarField& a);
ScalarField positivePart(const ScalarField& a);
ScalarField pointwiseMax(const ScalarField& a, const ScalarField& b);
ScalarField pointwiseMin(const ScalarField& a, const ScalarField& b);
ScalarField indicator(const RegionMask& region);
/// Copy of `a` with boundary nodes set to zero.
ScalarField zeroBoundary(const ScalarField& a);

/// Throws std::invalid_argument when the grids differ.
void requireSameGrid(const Grid& a, const Grid& b, const char* what);

}  // namespace pxo
