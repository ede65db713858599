#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pxo/solver.hpp"

using namespace pxo;

namespace {

FluxSpec laplacian(const Grid& g) { return FluxSpec::pLaplacian(ExponentField::constant(g, 2.0), 0.0); }

ObstacleProblem constantCase(int n, double f, double psi) {
  const Grid g = Grid::make(1, n, 1.0);
  return {laplacian(g), ScalarField(g, f), ScalarField(g, psi)};
}

void expectInvariants(const ObstacleProblem& prob, const SolveReport& r) {
  const Grid& g = prob.grid();
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    EXPECT_GE(r.u[k], prob.psi()[k] - 1e-14 * prob.scale());
    if (g.isBoundary(k)) EXPECT_EQ(r.u[k], 0.0);
  }
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.complementarityResidual, r.tol);
}

}  // namespace

TEST(ObstacleProblem, RejectsPositiveObstacleOnBoundary) {
  const Grid g = Grid::make(1, 5, 1.0);
  EXPECT_THROW(ObstacleProblem(laplacian(g), ScalarField(g, 0.0), ScalarField(g, 0.1)), std::invalid_argument);
  const Grid h = Grid::make(1, 7, 1.0);
  EXPECT_THROW(ObstacleProblem(laplacian(h), ScalarField(g, 0.0), ScalarField(g, 0.0)), std::invalid_argument);
}

TEST(SolveVI, NegativeSourceRestsOnObstacle) {
  const ObstacleProblem prob = constantCase(65, -1.0, 0.0);
  const SolveReport r = solveVI(prob);
  expectInvariants(prob, r);
  for (std::size_t k = 0; k < r.u.size(); ++k) EXPECT_NEAR(r.u[k], 0.0, 1e-12);
}

TEST(SolveVI, PositiveSourceLeavesObstacle) {
  const ObstacleProblem prob = constantCase(65, 1.0, 0.0);
  const SolveReport r = solveVI(prob);
  expectInvariants(prob, r);
  const Grid& g = prob.grid();
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    const double x = g.point(k)[0];
    EXPECT_NEAR(r.u[k], 0.5 * x * (1.0 - x), 1e-10);
    if (!g.isBoundary(k)) EXPECT_GT(r.u[k], 0.0);
  }
}

TEST(SolveVI, AnalyticFreeBoundary) {
  const ObstacleProblem prob = constantCase(257, -8.0, -0.1);
  const SolveReport r = solveVI(prob);
  expectInvariants(prob, r);
  const Grid& g = prob.grid();
  const double a = oracle::contactEndpoint(8.0, 0.1);
  EXPECT_NEAR(a, 0.1581139, 1e-7);
  double err = 0.0;
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    err = std::max(err, std::abs(r.u[k] - oracle::obstacleExact(g.point(k)[0], 8.0, 0.1)));
  }
  EXPECT_LE(err, 1e-3);
}

TEST(SolveVI, AgreesWithLinearComplementarityOracle) {
  for (int dim : {1, 2}) {
    const int n = dim == 1 ? 65 : 21;
    const Grid g = Grid::make(dim, n, 1.0);
    const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) { return x[0] < 0.4 ? -6.0 : 3.0 * x[1] - 1.0; });
    const ScalarField psi = ScalarField::fromFunction(
        g, [](const Point& x) { return 0.06 - 0.5 * ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)); });
    const ObstacleProblem prob(laplacian(g), f, pointwiseMin(psi, zeroBoundary(psi)));
    SolverOptions opt;
    opt.tol = 1e-12;
    const SolveReport r = solveVI(prob, opt);
    ASSERT_TRUE(r.converged);
    const auto z = oracle::laplacianLcp(dim, n, 1.0, f.vector(), prob.psi().vector());
    for (std::size_t k = 0; k < z.size(); ++k) EXPECT_NEAR(r.u[k], z[k], 1e-8) << "dim " << dim << " node " << k;
  }
}

TEST(SolveUnconstrained, ParabolaAndZero) {
  const Grid g = Grid::make(1, 33, 1.0);
  const SolveReport r = solveUnconstrained(laplacian(g), ScalarField(g, 2.0));
  ASSERT_TRUE(r.converged);
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    const double x = g.point(k)[0];
    EXPECT_NEAR(r.u[k], x * (1.0 - x), 1e-10);
  }
  const Grid g2 = Grid::make(2, 9, 1.0);
  const FluxSpec s = FluxSpec::pLaplacian(ExponentField::constant(g2, 1.6), 1e-8);
  const SolveReport z = solveUnconstrained(s, ScalarField(g2, 0.0));
  EXPECT_TRUE(z.converged);
  EXPECT_EQ(z.u.maxAbs(), 0.0);
}

TEST(SolveUnconstrained, ManufacturedSecondOrder) {
  std::vector<double> errors;
  for (int n : {17, 33, 65}) {
    const Grid g = Grid::make(2, n, 1.0);
    const auto exact = [](const Point& x) { return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]); };
    const ScalarField f = ScalarField::fromFunction(
        g, [&](const Point& x) { return 2.0 * std::numbers::pi * std::numbers::pi * exact(x); });
    const SolveReport r = solveUnconstrained(laplacian(g), f);
    ASSERT_TRUE(r.converged);
    double e = 0.0;
    for (std::size_t k = 0; k < g.nodeCount(); ++k) e = std::max(e, std::abs(r.u[k] - exact(g.point(k))));
    errors.push_back(e);
  }
  for (std::size_t i = 1; i < errors.size(); ++i) EXPECT_GE(std::log2(errors[i - 1] / errors[i]), 1.8);
}

TEST(SolveUnconstrained, ImageOfSmoothFieldIsRecovered) {
  const Grid g = Grid::make(2, 17, 1.0);
  const FluxSpec s = FluxSpec::pLaplacian(ExponentField::constant(g, 2.0), 0.0);
  const ScalarField ustar = zeroBoundary(ScalarField::fromFunction(
      g, [](const Point& x) { return std::sin(std::numbers::pi * x[0]) * std::sin(std::numbers::pi * x[1]); }));
  const SolveReport r = solveUnconstrained(s, applyA(s, ustar).Au);
  for (std::size_t k = 0; k < g.nodeCount(); ++k) EXPECT_NEAR(r.u[k], ustar[k], 1e-9);
}

TEST(ComplementarityResidual, Examples) {
  const ObstacleProblem solved = constantCase(33, 1.0, 0.0);
  const SolveReport r = solveVI(solved);
  EXPECT_LE(complementarityResidual(solved, r.u), r.tol);

  const Grid g = Grid::make(1, 33, 1.0);
  const ScalarField psi =
      zeroBoundary(ScalarField::fromFunction(g, [](const Point& x) { return 0.25 - (x[0] - 0.5) * (x[0] - 0.5); }));
  const ObstacleProblem own(laplacian(g), ScalarField(g, 0.0), psi);
  EXPECT_NEAR(complementarityResidual(own, ScalarField::fromFunction(g, [](const Point& x) {
                return 0.25 - (x[0] - 0.5) * (x[0] - 0.5);
              })),
              0.0, 1e-12);

  std::vector<double> v = r.u.vector();
  v[10] = -0.3;
  EXPECT_GE(complementarityResidual(solved, ScalarField(g, v)), 0.3);
}

TEST(SolveVI, PLaplacianUniquenessAndDeterminism) {
  const Grid g = Grid::make(2, 25, 1.0);
  const ExponentField p(ScalarField::fromFunction(g, [](const Point& x) { return 1.5 + 0.4 * x[0]; }));
  const FluxSpec s = FluxSpec::pLaplacian(p, 1e-8);
  const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) { return x[0] < 0.5 ? -2.0 : 1.0; });
  const ScalarField psi = ScalarField::fromFunction(g, [](const Point& x) {
    return 0.05 * (1.0 - ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)) / 0.16);
  });
  const ObstacleProblem prob(s, f, psi);
  const SolveReport a = solveVI(prob);
  const SolveReport b = solveVI(prob);
  expectInvariants(prob, a);
  EXPECT_EQ(a.u.vector(), b.u.vector());
  EXPECT_EQ(a.iterations, b.iterations);

  SolverOptions lifted;
  lifted.initial = ScalarField(g, 0.7);
  const SolveReport c = solveVI(prob, lifted);
  ASSERT_TRUE(c.converged);
  EXPECT_LE((a.u - c.u).maxAbs(), 10.0 * a.tol);
}

TEST(SolveVI, ComparisonPrinciple) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const Grid g = Grid::make(2, 17, 1.0);
  const ExponentField p(ScalarField::fromFunction(g, [](const Point& x) { return 1.5 + 0.4 * x[0]; }));
  const FluxSpec s = FluxSpec::pLaplacian(p, 1e-8);
  const ScalarField psi(g, -0.02);
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<double> f1(g.nodeCount()), f2(g.nodeCount());
    for (std::size_t k = 0; k < f1.size(); ++k) {
      f1[k] = U(rng);
      f2[k] = f1[k] + std::abs(U(rng));
    }
    const SolveReport r1 = solveVI(ObstacleProblem(s, ScalarField(g, f1), psi));
    const SolveReport r2 = solveVI(ObstacleProblem(s, ScalarField(g, f2), psi));
    for (std::size_t k = 0; k < g.nodeCount(); ++k) EXPECT_LE(r1.u[k], r2.u[k] + 1e-8);
  }
}

TEST(SolveVI, ReportsNonConvergence) {
  const ObstacleProblem prob = constantCase(129, -8.0, -0.1);
  SolverOptions opt;
  opt.maxIter = 3;
  const SolveReport r = solveVI(prob, opt);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_GT(r.complementarityResidual, r.tol);
}

TEST(SolveVI, RejectsBadOptions) {
  const ObstacleProblem prob = constantCase(9, 1.0, 0.0);
  SolverOptions bad;
  bad.omega = 2.0;
  EXPECT_THROW(solveVI(prob, bad), std::invalid_argument);
  SolverOptions neg;
  neg.tol = -1.0;
  EXPECT_THROW(solveVI(prob, neg), std::invalid_argument);
}
