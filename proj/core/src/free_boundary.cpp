#include "pxo/free_boundary.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "pxo/varexp.hpp"

namespace pxo {

namespace {

ScalarField applyOperator(const FluxSpec& spec, const ScalarField& u) {
  std::vector<double> out(u.size(), 0.0);
  DiscreteOperator(spec).apply(u.values(), out);
  return {u.grid(), std::move(out)};
}

double resolveEps(const ObstacleProblem& prob, const LSOptions& o) {
  return o.eps.value_or(defaultCoincidenceEps(prob.grid(), defaultTolerance(prob)));
}

double resolveCollar(const Grid& g, const LSOptions& o) { return o.collarRadius.value_or(2.0 * g.maxSpacing()); }

RegionMask collarOf(const ScalarField& u, const ScalarField& psi, double eps, double radius) {
  if (radius <= 0.0) return {u.grid(), false};
  return edgeCollar(contactClassification(u, psi, eps), radius);
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double defaultCoincidenceEps(const Grid& grid, double solverTol) {
  const double h = grid.maxSpacing();
  return std::max(10.0 * solverTol, h * h);
}

RegionMask contactClassification(const ScalarField& u, const ScalarField& psi, double eps) {
  requireSameGrid(u.grid(), psi.grid(), "contactClassification");
  if (!(eps >= 0.0)) throw std::invalid_argument("contactClassification: eps must be >= 0");
  return RegionMask::fromPredicate(u.grid(), [&](std::size_t k) { return u[k] - psi[k] <= eps; });
}

RegionMask coincidenceSet(const ScalarField& u, const ScalarField& psi, double eps) {
  return contactClassification(u, psi, eps) & RegionMask::interior(u.grid());
}

LSReport lewyStampacchiaCheck(const ObstacleProblem& prob, const ScalarField& u, double tol,
                              const LSOptions& options) {
  requireSameGrid(prob.grid(), u.grid(), "lewyStampacchiaCheck");
  const Grid& g = prob.grid();
  const ScalarField au = applyOperator(prob.spec(), u);
  const ScalarField apsi = applyOperator(prob.spec(), prob.psi());
  const RegionMask collar = collarOf(u, prob.psi(), resolveEps(prob, options), resolveCollar(g, options));

  LSReport r;
  r.tol = tol;
  for (std::size_t k : g.interiorNodes()) {
    const double f = prob.f()[k];
    const double lower = std::max(0.0, f - au[k]);
    const double upper = std::max(0.0, au[k] - f - std::max(apsi[k] - f, 0.0));
    if (collar[k]) {
      ++r.collarNodes;
      r.collarLowerViolation = std::max(r.collarLowerViolation, lower);
      r.collarUpperViolation = std::max(r.collarUpperViolation, upper);
    } else {
      ++r.checkedNodes;
      r.lowerViolation = std::max(r.lowerViolation, lower);
      r.upperViolation = std::max(r.upperViolation, upper);
    }
  }
  r.lowerPass = r.lowerViolation <= tol;
  r.upperPass = r.upperViolation <= tol;
  const ExponentReport ex = validateExponent(prob.spec().p());
  r.withinHypotheses = ex.boundsOk && ex.q1ConditionOk;
  return r;
}

BetaReconstruction reconstructBeta(const ObstacleProblem& prob, const ScalarField& u, const LSOptions& options) {
  requireSameGrid(prob.grid(), u.grid(), "reconstructBeta");
  const Grid& g = prob.grid();
  const double eps = resolveEps(prob, options);
  const ScalarField au = applyOperator(prob.spec(), u);
  const ScalarField apsi = applyOperator(prob.spec(), prob.psi());
  const RegionMask contact = coincidenceSet(u, prob.psi(), eps);

  std::vector<double> beta(g.nodeCount(), 0.0);
  for (std::size_t k = 0; k < beta.size(); ++k) {
    if (contact[k]) beta[k] = -std::max(apsi[k] - prob.f()[k], 0.0);
  }
  const RegionMask strict =
      RegionMask::interior(g).minus(collarOf(u, prob.psi(), eps, resolveCollar(g, options)));
  double res = 0.0;
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    if (strict[k]) res = std::max(res, std::abs(au[k] + beta[k] - prob.f()[k]));
  }
  return {ScalarField(g, std::move(beta)), strict, res};
}

ScalarField xiField(const ObstacleProblem& prob, const ScalarField& u) {
  requireSameGrid(prob.grid(), u.grid(), "xiField");
  return zeroBoundary(prob.f() - applyOperator(prob.spec(), u));
}

namespace {

void requireComparable(const ObstacleProblem& a, const ObstacleProblem& b, const char* what) {
  requireSameGrid(a.grid(), b.grid(), what);
  if (a.psi().vector() != b.psi().vector()) {
    throw std::invalid_argument(std::string(what) + ": problems must share the obstacle");
  }
  if (a.spec().p().samples().vector() != b.spec().p().samples().vector() || a.spec().delta() != b.spec().delta()) {
    throw std::invalid_argument(std::string(what) + ": problems must share the operator");
  }
}

StabilityReport emptyReport(const Grid& g) {
  const ScalarField zero(g, 0.0);
  return {zero, zero, 0.0, 0.0, RegionMask(g, false), 0.0, 0.0, 0.0, 0.0, false, false, std::nullopt,
          SolveReport{zero, zero}, SolveReport{zero, zero}};
}

}  // namespace

StabilityReport contractionCheck(const ObstacleProblem& prob1, const ObstacleProblem& prob2, double tol,
                                 const SolverOptions& options) {
  requireComparable(prob1, prob2, "contractionCheck");
  StabilityReport r = emptyReport(prob1.grid());
  r.tol = tol;
  r.solve1 = solveVI(prob1, options);
  r.solve2 = solveVI(prob2, options);
  r.xi1 = xiField(prob1, r.solve1.u);
  r.xi2 = xiField(prob2, r.solve2.u);
  r.l1DataDistance = integrate(abs(prob1.f() - prob2.f()));
  r.l1XiDistance = integrate(abs(r.xi1 - r.xi2));
  r.contractionPass = r.solve1.converged && r.solve2.converged && r.l1XiDistance <= r.l1DataDistance + tol;
  return r;
}

StabilityReport stabilityCheck(const ObstacleProblem& prob1, const ObstacleProblem& prob2, const RegionMask& D,
                               double lambda, double tol, const SolverOptions& options) {
  requireComparable(prob1, prob2, "stabilityCheck");
  requireSameGrid(prob1.grid(), D.grid(), "stabilityCheck");
  if (!(lambda > 0.0)) throw std::invalid_argument("stabilityCheck: lambda must be positive");
  const Grid& g = prob1.grid();

  const ScalarField apsi = applyOperator(prob1.spec(), prob1.psi());
  std::optional<NonDegeneracyWitness> witness;
  for (int i = 1; i <= 2 && !witness; ++i) {
    const ScalarField& f = (i == 1 ? prob1 : prob2).f();
    for (std::size_t k : g.interiorNodes()) {
      if (D[k] && f[k] - apsi[k] > -lambda) {
        witness = NonDegeneracyWitness{i, k, f[k] - apsi[k]};
        break;
      }
    }
  }
  if (witness) {
    StabilityReport r = emptyReport(g);
    r.D = D;
    r.lambda = lambda;
    r.tol = tol;
    r.refusal = witness;
    r.l1DataDistance = integrate(abs(prob1.f() - prob2.f()));
    r.bound = r.l1DataDistance / lambda;
    return r;
  }

  StabilityReport r = contractionCheck(prob1, prob2, tol, options);
  r.D = D;
  r.lambda = lambda;
  r.bound = r.l1DataDistance / lambda;
  const RegionMask i1 = coincidenceSet(r.solve1.u, prob1.psi(), defaultCoincidenceEps(g, r.solve1.tol));
  const RegionMask i2 = coincidenceSet(r.solve2.u, prob2.psi(), defaultCoincidenceEps(g, r.solve2.tol));
  r.symDiffMeasure = measure(symmetricDifference(i1, i2) & D);
  r.stabilityPass = r.solve1.converged && r.solve2.converged && r.symDiffMeasure <= r.bound + tol;
  return r;
}

ChiTable chiConvergence(const FluxSpec& spec, const DataPair& limit, const std::vector<DataPair>& sequence, double q,
                        double eta, const SolverOptions& options) {
  if (!(q >= 1.0)) throw std::invalid_argument("chiConvergence: q must be >= 1");
  if (!(eta >= 0.0)) throw std::invalid_argument("chiConvergence: eta must be >= 0");
  const Grid& g = spec.grid();
  ChiTable table;
  table.q = q;

  const ScalarField apsi = applyOperator(spec, limit.psi);
  for (std::size_t k : g.interiorNodes()) {
    if (std::abs(apsi[k] - limit.f[k]) < eta) {
      if (!table.firstDegenerateNode) table.firstDegenerateNode = k;
      ++table.degenerateNodes;
    }
  }

  const auto contactOf = [&](const DataPair& d, bool& converged) {
    const ObstacleProblem prob(spec, d.f, d.psi);
    const SolveReport s = solveVI(prob, options);
    converged = s.converged;
    return coincidenceSet(s.u, d.psi, defaultCoincidenceEps(g, s.tol));
  };
  bool limitConverged = false;
  const RegionMask target = contactOf(limit, limitConverged);
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    ChiLevel level;
    level.index = i;
    bool ok = false;
    const RegionMask in = contactOf(sequence[i], ok);
    level.converged = ok && limitConverged;
    level.symDiffMeasure = measure(symmetricDifference(in, target));
    level.distance = std::pow(level.symDiffMeasure, 1.0 / q);
    table.levels.push_back(level);
  }
  return table;
}

double localityCheck(const FluxSpec& spec, const ScalarField& w1, const ScalarField& w2, double eps) {
  requireSameGrid(spec.grid(), w1.grid(), "localityCheck");
  requireSameGrid(w1.grid(), w2.grid(), "localityCheck");
  const Grid& g = w1.grid();
  const ScalarField a1 = applyOperator(spec, w1);
  const ScalarField a2 = applyOperator(spec, w2);
  const auto agree = [&](std::size_t k) { return std::abs(w1[k] - w2[k]) <= eps; };
  double worst = 0.0;
  for (std::size_t k : g.interiorNodes()) {
    bool inside = agree(k);
    for (int a = 0; a < g.dim() && inside; ++a) {
      const std::size_t s = g.stride(a);
      inside = agree(k - s) && agree(k + s);
    }
    if (inside) worst = std::max(worst, std::abs(a1[k] - a2[k]));
  }
  return worst;
}

std::string lsCsvHeader() {
  return "lower_violation[f-units],upper_violation[f-units],collar_lower_violation[f-units],"
         "collar_upper_violation[f-units],checked_nodes[count],collar_nodes[count],tol[f-units],"
         "lower_pass[bool],upper_pass[bool],within_hypotheses[bool]";
}

std::string toCsvRow(const LSReport& r) {
  return num(r.lowerViolation) + ',' + num(r.upperViolation) + ',' + num(r.collarLowerViolation) + ',' +
         num(r.collarUpperViolation) + ',' + std::to_string(r.checkedNodes) + ',' + std::to_string(r.collarNodes) +
         ',' + num(r.tol) + ',' + flag(r.lowerPass) + ',' + flag(r.upperPass) + ',' + flag(r.withinHypotheses);
}

std::string summary(const LSReport& r) {
  std::ostringstream os;
  os << "Lewy-Stampacchia bounds " << (r.pass() ? "hold" : "FAIL") << " on " << r.checkedNodes << " nodes\n"
     << "  lower violation " << r.lowerViolation << (r.lowerPass ? " <= " : " > ") << r.tol << '\n'
     << "  upper violation " << r.upperViolation << (r.upperPass ? " <= " : " > ") << r.tol << '\n'
     << "  collar nodes " << r.collarNodes << ": lower " << r.collarLowerViolation << ", upper "
     << r.collarUpperViolation << '\n';
  if (!r.withinHypotheses) os << "  outside the exponent hypotheses\n";
  return os.str();
}

std::string stabilityCsvHeader() {
  return "l1_data_distance[f-units*volume],l1_xi_distance[f-units*volume],lambda[f-units],"
         "sym_diff_measure[volume],bound[volume],tol[volume],contraction_pass[bool],stability_pass[bool],"
         "refused_node[index]";
}

std::string toCsvRow(const StabilityReport& r) {
  return num(r.l1DataDistance) + ',' + num(r.l1XiDistance) + ',' + num(r.lambda) + ',' + num(r.symDiffMeasure) +
         ',' + num(r.bound) + ',' + num(r.tol) + ',' + flag(r.contractionPass) + ',' + flag(r.stabilityPass) + ',' +
         (r.refusal ? std::to_string(r.refusal->node) : std::string());
}

std::string summary(const StabilityReport& r) {
  std::ostringstream os;
  os << "L1 contraction " << (r.contractionPass ? "holds" : "FAILS") << ": |xi1 - xi2|_1 = " << r.l1XiDistance
     << ", |f1 - f2|_1 = " << r.l1DataDistance << '\n';
  if (r.refusal) {
    os << "stability check refused: f" << r.refusal->problem << " - A psi = " << r.refusal->value << " > -"
       << r.lambda << " at node " << r.refusal->node << '\n';
  } else if (r.lambda > 0.0) {
    os << "coincidence-set stability " << (r.stabilityPass ? "holds" : "FAILS") << ": measure " << r.symDiffMeasure
       << " vs bound " << r.bound << " (lambda " << r.lambda << ")\n";
  }
  return os.str();
}

}  // namespace pxo
