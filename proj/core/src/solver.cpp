#include "pxo/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace pxo {

ObstacleProblem::ObstacleProblem(FluxSpec spec, ScalarField f, ScalarField psi)
    : spec_(std::move(spec)), f_(std::move(f)), psi_(std::move(psi)) {
  requireSameGrid(spec_.grid(), f_.grid(), "ObstacleProblem");
  requireSameGrid(f_.grid(), psi_.grid(), "ObstacleProblem");
  const Grid& g = f_.grid();
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    if (g.isBoundary(k) && psi_[k] > 0.0) {
      throw std::invalid_argument("ObstacleProblem: obstacle is positive on the boundary at node " +
                                  std::to_string(k) + " (constraint set is empty)");
    }
  }
}

double defaultTolerance(const ObstacleProblem& prob) { return 1e-10 * prob.scale(); }

double defaultRelaxation(const Grid& grid) {
  int n = grid.n(0);
  if (grid.dim() == 2) n = std::max(n, grid.n(1));
  return 2.0 / (1.0 + std::sin(std::numbers::pi / static_cast<double>(n - 1)));
}

namespace {

class ProjectedRelaxation {
 public:
  ProjectedRelaxation(const ObstacleProblem& prob, double tol)
      : grid_(prob.grid()),
        op_(prob.spec()),
        f_(prob.f().values()),
        psi_(prob.psi().values()),
        interior_(grid_.interiorNodes()),
        nodeTol_(1e-2 * tol) {
    const double h = grid_.maxSpacing();
    bracketBase_ = prob.f().maxAbs() * h * h + 1.0;
  }

  void sweep(std::vector<double>& u, std::size_t iteration, double omega) const {
    for (std::size_t k : interior_) update(k, u, iteration, omega);
    for (auto it = interior_.rbegin(); it != interior_.rend(); ++it) update(*it, u, iteration, omega);
  }

  double residual(std::span<const double> u) const {
    double r = 0.0;
    for (std::size_t k : interior_) {
      const double a = op_.nodeOperator(k, u[k], u).value - f_[k];
      r = std::max(r, std::abs(std::min(u[k] - psi_[k], a)));
    }
    return r;
  }

 private:
  void update(std::size_t k, std::vector<double>& u, std::size_t iteration, double omega) const {
    const double old = u[k];
    const double root = nodeRoot(k, u, iteration);
    const double relaxed = old + omega * (root - old);
    u[k] = std::max(relaxed, psi_[k]);
  }

  // Root of v -> (A u)_k(v) - f_k, which is strictly increasing in v.
  double nodeRoot(std::size_t k, std::span<const double> u, std::size_t iteration) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double x = u[k];
    FaceFlux r = op_.nodeOperator(k, x, u);
    double g = r.value - f_[k];
    check(g, k, iteration);
    if (std::abs(g) <= nodeTol_) return x;

    double lo = -inf;
    double hi = inf;
    (g < 0.0 ? lo : hi) = x;
    double expand = std::abs(x) + bracketBase_;
    double previousG = inf;

    for (int iter = 0; iter < 200; ++iter) {
      double next = std::numeric_limits<double>::quiet_NaN();
      const bool stalled = std::isfinite(lo) && std::isfinite(hi) && std::abs(g) > 0.5 * previousG;
      if (r.derivative > 0.0 && !stalled) next = x - g / r.derivative;
      if (!(next > lo && next < hi)) {
        if (std::isfinite(lo) && std::isfinite(hi)) {
          next = 0.5 * (lo + hi);
        } else if (std::isfinite(lo)) {
          next = lo + expand;
          expand *= 2.0;
        } else {
          next = hi - expand;
          expand *= 2.0;
        }
      }
      const double step = next - x;
      x = next;
      previousG = std::abs(g);
      r = op_.nodeOperator(k, x, u);
      g = r.value - f_[k];
      check(g, k, iteration);
      if (std::abs(g) <= nodeTol_) return x;
      (g < 0.0 ? lo : hi) = x;
      if (std::abs(step) <= 4.0 * eps * std::abs(x)) return x;
      if (hi - lo <= 4.0 * eps * std::max(std::abs(lo), std::abs(hi))) return x;
    }
    return x;
  }

  static void check(double g, std::size_t k, std::size_t iteration) {
    if (!std::isfinite(g)) {
      throw SolverError("solveVI: non-finite residual at node " + std::to_string(k) + " in sweep " +
                            std::to_string(iteration),
                        k, iteration);
    }
  }

  const Grid& grid_;
  DiscreteOperator op_;
  std::span<const double> f_;
  std::span<const double> psi_;
  std::vector<std::size_t> interior_;
  double nodeTol_;
  double bracketBase_ = 1.0;
};

}  // namespace

SolveReport solveVI(const ObstacleProblem& prob, const SolverOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const Grid& g = prob.grid();
  const double tol = options.tol.value_or(defaultTolerance(prob));
  const double omega = options.omega.value_or(defaultRelaxation(g));
  if (!(tol > 0.0)) throw std::invalid_argument("solveVI: tol must be positive");
  if (!(omega > 0.0 && omega < 2.0)) throw std::invalid_argument("solveVI: relaxation must lie in (0, 2)");

  std::vector<double> u(g.nodeCount());
  if (options.initial) {
    requireSameGrid(options.initial->grid(), g, "solveVI");
    u = options.initial->vector();
  } else {
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = std::max(prob.psi()[k], 0.0);
  }
  for (std::size_t k = 0; k < u.size(); ++k) {
    u[k] = g.isBoundary(k) ? 0.0 : std::max(u[k], prob.psi()[k]);
  }

  const ProjectedRelaxation relax(prob, tol);
  const std::size_t checkEvery = std::max<std::size_t>(options.checkEvery, 1);

  SolveReport report{ScalarField(g, 0.0), ScalarField(g, 0.0)};
  report.tol = tol;
  double res = relax.residual(u);
  std::size_t it = 0;
  // Rounding in the node solves is amplified by roughly 1 / (2 - omega); when
  // the residual stops improving the relaxation is pulled back towards 1.
  const std::size_t window = static_cast<std::size_t>(std::max(g.n(0), g.dim() == 2 ? g.n(1) : 0));
  double best = res;
  std::size_t bestAt = 0;
  double currentOmega = omega;
  while (res > tol && it < options.maxIter) {
    relax.sweep(u, it, currentOmega);
    ++it;
    if (it % checkEvery != 0 && it != options.maxIter) continue;
    res = relax.residual(u);
    if (res < 0.5 * best) {
      best = res;
      bestAt = it;
    } else if (it - bestAt >= window && currentOmega > 1.0) {
      currentOmega = std::max(1.0, 2.0 - 2.0 * (2.0 - currentOmega));
      best = res;
      bestAt = it;
    }
  }
  report.omega = currentOmega;

  report.iterations = it;
  report.complementarityResidual = res;
  report.converged = res <= tol;
  std::vector<double> au(g.nodeCount(), 0.0);
  DiscreteOperator(prob.spec()).apply(u, au);
  report.u = ScalarField(g, std::move(u));
  report.Au = ScalarField(g, std::move(au));
  report.wallTime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SolveReport solveUnconstrained(const FluxSpec& spec, const ScalarField& f, const SolverOptions& options) {
  const ObstacleProblem prob(spec, f, ScalarField(f.grid(), kNoObstacle));
  return solveVI(prob, options);
}

double complementarityResidual(const ObstacleProblem& prob, const ScalarField& u) {
  requireSameGrid(prob.grid(), u.grid(), "complementarityResidual");
  const Grid& g = prob.grid();
  const DiscreteOperator op(prob.spec());
  double r = 0.0;
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    if (g.isBoundary(k)) continue;
    const double a = op.nodeOperator(k, u[k], u.values()).value - prob.f()[k];
    r = std::max(r, std::abs(std::min(u[k] - prob.psi()[k], a)));
  }
  return r;
}

}  // namespace pxo
