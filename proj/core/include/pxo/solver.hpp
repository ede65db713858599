#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>

#include "pxo/grid.hpp"
#include "pxo/op.hpp"

namespace pxo {

/// One instance of the discrete obstacle problem: find u >= psi, u = 0 on the
/// boundary, with Au - f >= 0 and (Au - f)(u - psi) = 0 at interior nodes.
class ObstacleProblem {
 public:
  /// Throws std::invalid_argument when grids differ or psi > 0 at a boundary node.
  ObstacleProblem(FluxSpec spec, ScalarField f, ScalarField psi);

  const FluxSpec& spec() const { return spec_; }
  const ScalarField& f() const { return f_; }
  const ScalarField& psi() const { return psi_; }
  const Grid& grid() const { return f_.grid(); }
  /// 1 + max|f|; the unit for residual tolerances.
  double scale() const { return 1.0 + f_.maxAbs(); }

 private:
  FluxSpec spec_;
  ScalarField f_;
  ScalarField psi_;
};

/// Obstacle value standing in for "no obstacle".
inline constexpr double kNoObstacle = -1e300;

struct SolverOptions {
  /// Complementarity tolerance; defaults to 1e-10 * problem scale.
  std::optional<double> tol;
  std::size_t maxIter = 1'000'000;
  /// Relaxation factor of the projected update; defaults to 2 / (1 + sin(pi / (n_max - 1))).
  std::optional<double> omega;
  /// Sweeps between residual evaluations.
  std::size_t checkEvery = 4;
  /// Starting iterate; projected onto the constraint set. Defaults to max(psi, 0).
  std::optional<ScalarField> initial;
};

struct SolveReport {
  ScalarField u;
  ScalarField Au;
  std::size_t iterations = 0;
  double complementarityResidual = 0.0;
  bool converged = false;
  double tol = 0.0;
  double omega = 1.0;  // relaxation in use when the iteration stopped
  double wallTime = 0.0;  // seconds
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t node, std::size_t iteration)
      : std::runtime_error(what), node_(node), iteration_(iteration) {}
  std::size_t node() const { return node_; }
  std::size_t iteration() const { return iteration_; }

 private:
  std::size_t node_;
  std::size_t iteration_;
};

double defaultTolerance(const ObstacleProblem& prob);
double defaultRelaxation(const Grid& grid);

/**
 * Projected nonlinear symmetric Gauss-Seidel (SOR when omega != 1).
 *
 * Each iteration sweeps the interior nodes lexicographically and then in
 * reverse. At a node the scalar equation (Au - f)_k = 0 is solved in the node
 * value with neighbours frozen, by safeguarded Newton steps inside a sign
 * bracket with bisection fallback; the relaxed value is then projected onto
 * [psi_k, inf). Iteration stops once the complementarity residual is at most
 * tol. Non-convergence is reported through `converged`; a NaN throws SolverError.
 */
SolveReport solveVI(const ObstacleProblem& prob, const SolverOptions& options = {});

/// solveVI with the obstacle pushed to kNoObstacle; the residual is then max|Au - f|.
SolveReport solveUnconstrained(const FluxSpec& spec, const ScalarField& f, const SolverOptions& options = {});

/// max over interior nodes of |min(u - psi, Au - f)|.
double complementarityResidual(const ObstacleProblem& prob, const ScalarField& u);

}  // namespace pxo
