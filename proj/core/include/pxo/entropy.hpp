#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "pxo/grid.hpp"
#include "pxo/solver.hpp"

namespace pxo {

/// Nodewise max(-t, min(t, v)). Throws std::invalid_argument for t <= 0.
ScalarField truncate(const ScalarField& v, double t);

/// Both sides of the truncated variational inequality for one (test function, level) pair.
struct EntropyCertificate {
  std::size_t testFunctionId = 0;
  double t = 0.0;
  double lhs = 0.0;  // sum over faces of a(x, grad u) . grad T_t(phi - u)
  double rhs = 0.0;  // integral of f T_t(phi - u)
  double margin = 0.0;
};

class InadmissibleTestFunction : public std::invalid_argument {
 public:
  InadmissibleTestFunction(const std::string& what, std::size_t index)
      : std::invalid_argument(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Every phi must satisfy phi >= psi and vanish on the boundary; otherwise
/// InadmissibleTestFunction names the offending index.
std::vector<EntropyCertificate> entropyCertify(const ObstacleProblem& prob, const ScalarField& u,
                                               const std::vector<ScalarField>& testSet,
                                               const std::vector<double>& tLevels);

/// 1e-6 (1 + ||f||_1) (1 + t).
double entropyTolerance(const ObstacleProblem& prob, double t);

/**
 * Admissible test functions for entropyCertify: psi^+ first, then alternating
 * max(psi, bump) and T_h(u) +/- eps * bump with eps small enough to keep the
 * result above psi. Bumps have random centre, width and height; the family is
 * a pure function of (prob, u, count, seed).
 */
std::vector<ScalarField> makeTestSet(const ObstacleProblem& prob, const ScalarField& u, std::size_t count,
                                     std::uint64_t seed);

struct TruncationEnergyRow {
  double t = 0.0;
  double energy = 0.0;
};

/// Face energy of |grad u|^p over faces whose two nodes satisfy |u| <= t.
std::vector<TruncationEnergyRow> truncationEnergy(const ObstacleProblem& prob, const ScalarField& u,
                                                  const std::vector<double>& tLevels);

/// T_n(f).
ScalarField approximateData(const ScalarField& f, double n);

/// measure{|u - v| > s}.
double inMeasureDistance(const ScalarField& u, const ScalarField& v, double s);

struct ChainLevel {
  double n = 0.0;
  ScalarField fn;
  SolveReport report;
  double l1DataGap = 0.0;     // ||T_n f - f||_1
  double inMeasure = 0.0;     // distance to the previous level; NaN for the first
  double modularU = 0.0;      // modular(u_n, 0.95 q0)
  double modularGrad = 0.0;   // face modular(grad u_n, 0.95 q1)
  double marcinkiewicz = 0.0; // marcinkiewiczBound(u_n, 0.95 q0)
};

struct ApproximationChain {
  double s = 0.0;
  std::vector<double> tLevels;  // shared Marcinkiewicz levels, from the densest level
  std::vector<ChainLevel> levels;
};

/**
 * Solves the obstacle problem for T_n f at each level (levels may run
 * concurrently; results do not depend on scheduling) and records the
 * consecutive in-measure distances and the integrability diagnostics. The
 * exponent columns are NaN when max p >= N.
 */
ApproximationChain runApproximationChain(const FluxSpec& spec, const ScalarField& f, const ScalarField& psi,
                                         const std::vector<double>& nLevels, double s,
                                         const SolverOptions& options = {}, bool concurrent = true);

/// Columns: n, iterations, residual, inMeasure(s), modular_u, modular_grad, marcinkiewicz_M.
void writeChainCsv(std::ostream& os, const ApproximationChain& chain);

}  // namespace pxo
