#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pxo/grid.hpp"
#include "pxo/varexp.hpp"

namespace pxo {

enum class FluxKind { PLaplacian, PerturbedPLaplacian };

/**
 * Regularized p(x)-Laplacian flux a(x, xi) = (|xi|^2 + delta^2)^((p(x)-2)/2) xi.
 *
 * alpha and gamma are declared structure constants; they are audited by
 * auditStructure(), never inferred. The perturbed kind carries a nonnegative
 * coefficient j(x) that only enters the growth bound.
 */
class FluxSpec {
 public:
  FluxSpec(FluxKind kind, ExponentField p, double delta, std::optional<ScalarField> j = std::nullopt,
           double alpha = 1.0, double gamma = 1.0);

  static FluxSpec pLaplacian(ExponentField p, double delta) {
    return {FluxKind::PLaplacian, std::move(p), delta};
  }

  FluxKind kind() const { return kind_; }
  const ExponentField& p() const { return p_; }
  const Grid& grid() const { return p_.grid(); }
  double delta() const { return delta_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  /// j(x) at node k; zero for the plain kind.
  double j(std::size_t k) const { return j_ ? (*j_)[k] : 0.0; }
  const std::optional<ScalarField>& jField() const { return j_; }

 private:
  FluxKind kind_;
  ExponentField p_;
  double delta_;
  std::optional<ScalarField> j_;
  double alpha_;
  double gamma_;
};

/// 1e-8 times the largest box extent.
double defaultDelta(const Grid& grid);

/// Flux magnitude factor and its derivative along one face, for a scalar gradient s.
struct FaceFlux {
  double value;       // a(s)
  double derivative;  // da/ds
};

/// exponent = (p - 2) / 2 on the face, delta2 = delta^2.
inline FaceFlux faceFlux(double exponent, double delta2, double pMinusOne, double s) {
  if (exponent == 0.0) return {s, 1.0};
  const double t = s * s + delta2;
  if (t == 0.0) return {0.0, 0.0};
  const double base = std::pow(t, exponent);
  return {base * s, base * (pMinusOne * s * s + delta2) / t};
}

/// a(x, xi) for a vector xi of length dim, with p the exponent at x.
std::array<double, 2> evalFlux(const FluxSpec& spec, double p, std::span<const double> xi);

/// Energy density Phi(s) = ((s^2 + delta^2)^(p/2) - delta^p) / p, with Phi' = a.
double energyDensity(double p, double delta, double s);

struct OperatorOutput {
  ScalarField Au;  // -div a(x, grad u); zero on boundary nodes
  VectorField flux;
};

OperatorOutput applyA(const FluxSpec& spec, const ScalarField& u);

/// Sum over faces of faceWeight * Phi(face gradient).
double energy(const FluxSpec& spec, const ScalarField& u);

/**
 * Precomputed face exponents for repeated operator evaluation on one grid.
 *
 * The flux on each face uses only the normal difference quotient, so the
 * assembled operator is the gradient of a separable face energy.
 */
class DiscreteOperator {
 public:
  explicit DiscreteOperator(const FluxSpec& spec);

  const Grid& grid() const { return grid_; }

  /// Flux on the face whose low node is k.
  double fluxFromLowNode(int axis, std::size_t k, std::span<const double> u) const {
    const auto ua = static_cast<std::size_t>(axis);
    const auto& e = faces_[ua];
    return faceFlux(e.exponent[k], delta2_, e.pMinusOne[k], (u[k + grid_.stride(axis)] - u[k]) * invH_[ua]).value;
  }

  /// (Au)_k as a function of the value v at interior node k, neighbours frozen.
  FaceFlux nodeOperator(std::size_t k, double v, std::span<const double> u) const;

  /// Au at interior nodes, zero on the boundary.
  void apply(std::span<const double> u, std::span<double> out) const;

 private:
  // Indexed by the low node of each face.
  struct AxisFaces {
    std::vector<double> exponent;
    std::vector<double> pMinusOne;
  };
  Grid grid_;
  double delta2_;
  std::array<double, 2> invH_{0.0, 0.0};
  std::array<AxisFaces, 2> faces_;
};

struct StructureAudit {
  std::size_t samples = 0;
  /// min of (a.xi - alpha |xi|^p + delta^p) / max(1, |xi|^p); >= 0 means coercive.
  double coercivityMargin = 0.0;
  /// min of (gamma (j + |xi|^(p-1) + delta^(p-1)) - |a|) / max(1, |xi|^(p-1)).
  double growthMargin = 0.0;
  /// min of (a(xi) - a(xi')).(xi - xi') / |xi - xi'|^2 over distinct pairs; > 0 means strictly monotone.
  double monotonicityMargin = 0.0;
  std::size_t monotonicityPairs = 0;
  bool coercive() const { return coercivityMargin >= -1e-12; }
  bool bounded() const { return growthMargin >= -1e-12; }
  bool strictlyMonotone() const { return monotonicityMargin > 0.0; }
};

/// Deterministic for a fixed seed. Throws std::invalid_argument for sampleCount < 1.
StructureAudit auditStructure(const FluxSpec& spec, std::size_t sampleCount, std::uint64_t seed);

}  // namespace pxo
