#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pxo/grid.hpp"
#include "pxo/solver.hpp"

namespace pxo {

/// max(10 tol, h^2) with h the largest spacing.
double defaultCoincidenceEps(const Grid& grid, double solverTol);

/// Interior nodes with u - psi <= eps. Throws std::invalid_argument for eps < 0.
RegionMask coincidenceSet(const ScalarField& u, const ScalarField& psi, double eps);

/// Nodes (boundary included) with u - psi <= eps; used to locate free-boundary collars.
RegionMask contactClassification(const ScalarField& u, const ScalarField& psi, double eps);

/// Two-sided bound f <= Au <= f + (A psi - f)^+ at interior nodes.
struct LSReport {
  double lowerViolation = 0.0;  // max(0, max (f - Au)) outside the collars
  double upperViolation = 0.0;  // max(0, max (Au - f - (A psi - f)^+)) outside the collars
  double collarLowerViolation = 0.0;
  double collarUpperViolation = 0.0;
  std::size_t checkedNodes = 0;
  std::size_t collarNodes = 0;
  double tol = 0.0;
  bool lowerPass = false;
  bool upperPass = false;
  /// Exponent bounds and the p - 1 << q1 condition both hold.
  bool withinHypotheses = false;
  bool pass() const { return lowerPass && upperPass; }
};

struct LSOptions {
  /// Contact threshold; defaults to defaultCoincidenceEps with the default solver tolerance.
  std::optional<double> eps;
  /// Collar radius around the contact edge; defaults to 2h. Zero keeps every node.
  std::optional<double> collarRadius;
};

LSReport lewyStampacchiaCheck(const ObstacleProblem& prob, const ScalarField& u, double tol,
                              const LSOptions& options = {});

struct BetaReconstruction {
  ScalarField beta;            // -(A psi - f)^+ on the coincidence set, zero elsewhere
  RegionMask strictInterior;   // interior nodes farther than the collar radius from the contact edge
  double strictInteriorResidual = 0.0;  // max |Au + beta - f| over strictInterior
};

BetaReconstruction reconstructBeta(const ObstacleProblem& prob, const ScalarField& u, const LSOptions& options = {});

/// f - Au at interior nodes, zero on the boundary.
ScalarField xiField(const ObstacleProblem& prob, const ScalarField& u);

/// Node where the declared non-degeneracy f_i - A psi <= -lambda fails.
struct NonDegeneracyWitness {
  int problem = 0;  // 1 or 2
  std::size_t node = 0;
  double value = 0.0;  // f_i - A psi at the node
};

struct StabilityReport {
  ScalarField xi1;
  ScalarField xi2;
  double l1DataDistance = 0.0;
  double l1XiDistance = 0.0;
  RegionMask D;
  double lambda = 0.0;
  double symDiffMeasure = 0.0;
  double bound = 0.0;  // l1DataDistance / lambda
  double tol = 0.0;
  bool contractionPass = false;
  /// Set by stabilityCheck; false when refused.
  bool stabilityPass = false;
  std::optional<NonDegeneracyWitness> refusal;
  SolveReport solve1;
  SolveReport solve2;
};

/// Solves both problems (same spec and obstacle) and compares ||xi1 - xi2||_1 with ||f1 - f2||_1.
StabilityReport contractionCheck(const ObstacleProblem& prob1, const ObstacleProblem& prob2, double tol,
                                 const SolverOptions& options = {});

/**
 * contractionCheck plus meas((I1 sym-diff I2) n D) <= ||f1 - f2||_1 / lambda.
 * The declared (D, lambda) is verified first; if f_i - A psi > -lambda somewhere
 * on D the check is refused and `refusal` names the node.
 */
StabilityReport stabilityCheck(const ObstacleProblem& prob1, const ObstacleProblem& prob2, const RegionMask& D,
                               double lambda, double tol, const SolverOptions& options = {});

struct ChiLevel {
  std::size_t index = 0;
  double distance = 0.0;        // ||chi_n - chi||_q
  double symDiffMeasure = 0.0;  // meas(I_n sym-diff I)
  bool converged = false;
};

struct ChiTable {
  double q = 1.0;
  std::vector<ChiLevel> levels;
  /// Interior nodes with |A psi - f| < eta for the limit problem.
  std::size_t degenerateNodes = 0;
  std::optional<std::size_t> firstDegenerateNode;
  bool hypothesesMet() const { return degenerateNodes == 0; }
};

struct DataPair {
  ScalarField f;
  ScalarField psi;
};

/// Coincidence sets of each (f_n, psi_n) against those of (f, psi).
ChiTable chiConvergence(const FluxSpec& spec, const DataPair& limit, const std::vector<DataPair>& sequence, double q,
                        double eta, const SolverOptions& options = {});

/// max |Aw1 - Aw2| over interior nodes whose stencil lies in {|w1 - w2| <= eps}; 0 if there are none.
double localityCheck(const FluxSpec& spec, const ScalarField& w1, const ScalarField& w2, double eps);

std::string lsCsvHeader();
std::string toCsvRow(const LSReport& r);
std::string summary(const LSReport& r);

std::string stabilityCsvHeader();
std::string toCsvRow(const StabilityReport& r);
std::string summary(const StabilityReport& r);

}  // namespace pxo
