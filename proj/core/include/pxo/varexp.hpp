#pragma once

#include <vector>

#include "pxo/grid.hpp"

namespace pxo {

/**
 * Variable exponent sampled at the nodes of a grid.
 *
 * Construction requires 1 < min p and finite values. The ambient dimension
 * used by the Sobolev exponent algebra is the grid dimension.
 */
class ExponentField {
 public:
  ExponentField(Grid grid, std::vector<double> values);
  static ExponentField constant(const Grid& grid, double p);
  explicit ExponentField(const ScalarField& samples);

  const Grid& grid() const { return samples_.grid(); }
  int ambientDim() const { return samples_.grid().dim(); }
  double operator[](std::size_t k) const { return samples_[k]; }
  const ScalarField& samples() const { return samples_; }
  double pMin() const { return pMin_; }
  double pMax() const { return pMax_; }
  bool isConstant() const { return pMin_ == pMax_; }

  /// Arithmetic mean of the two endpoint exponents.
  double atFace(int axis, std::size_t f) const;

 private:
  ScalarField samples_;
  double pMin_;
  double pMax_;
};

struct ExponentReport {
  double logHolderConstant = 0.0;
  std::size_t pairsExamined = 0;
  /// 1 < pMin and pMax < N.
  bool boundsOk = false;
  /// min_x N p'(x) / (N - p(x)) exceeds sup p' (equivalently p - 1 << q1).
  bool q1ConditionOk = false;
  double q1ConditionLhs = 0.0;
  double supConjugate = 0.0;
};

/// Never throws; regime violations are reported in the flags.
ExponentReport validateExponent(const ExponentField& p);

struct DerivedExponents {
  ScalarField pStar;  // N p / (N - p)
  ScalarField pConj;  // p / (p - 1)
  ScalarField q0;     // pStar / sup pConj
  ScalarField q1;     // q0 p / (q0 + 1)
};

/// Throws std::domain_error when pMax >= N.
DerivedExponents derivedExponents(const ExponentField& p);

/// Integral of |v|^p(x).
double modular(const ScalarField& v, const ExponentField& p);
double modular(const ScalarField& v, const ScalarField& p);

/// Face-quadrature modular of a face field, sum over axes of the integral of
/// |q_a|^p, exponent averaged to faces.
double faceModular(const VectorField& q, const ScalarField& p);

inline constexpr double kDefaultBisectionTol = 1e-10;

/// Luxemburg norm inf{lambda > 0 : modular(v / lambda) <= 1} by bracketed bisection.
double luxemburgNorm(const ScalarField& v, const ExponentField& p, double tol = kDefaultBisectionTol);
double luxemburgNorm(const ScalarField& v, const ScalarField& p, double tol = kDefaultBisectionTol);

/// max over the levels t of the integral of t^q(x) over {|u| > t}.
double marcinkiewiczBound(const ScalarField& u, const ScalarField& q, const std::vector<double>& tLevels);

/// `count` logarithmically spaced levels on [1e-3 max|u|, max|u|]; empty when u == 0.
std::vector<double> defaultLevels(const ScalarField& u, int count = 64);

}  // namespace pxo
