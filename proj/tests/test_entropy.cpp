#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "pxo/entropy.hpp"

using namespace pxo;

namespace {

ObstacleProblem constantCase(int n, double f, double psi) {
  const Grid g = Grid::make(1, n, 1.0);
  return {FluxSpec::pLaplacian(ExponentField::constant(g, 2.0), 0.0), ScalarField(g, f), ScalarField(g, psi)};
}

}  // namespace

TEST(Truncate, Definition) {
  const Grid g = Grid::make(1, 4, 1.0);
  const ScalarField v(g, std::vector<double>{3.0, -5.0, 0.5, -0.5});
  const ScalarField t2 = truncate(v, 2.0);
  EXPECT_EQ(t2[0], 2.0);
  EXPECT_EQ(t2[1], -2.0);
  EXPECT_EQ(truncate(v, 1.0)[2], 0.5);
  EXPECT_EQ(truncate(v, 5.0).vector(), v.vector());
  EXPECT_THROW(truncate(v, 0.0), std::invalid_argument);
}

TEST(EntropyCertify, SolutionAsTestFunctionGivesZero) {
  const ObstacleProblem prob = constantCase(65, -8.0, -0.1);
  const SolveReport r = solveVI(prob);
  const auto certs = entropyCertify(prob, r.u, {r.u}, {0.1, 1.0, 10.0});
  ASSERT_EQ(certs.size(), 3u);
  for (const auto& c : certs) {
    EXPECT_EQ(c.lhs, 0.0);
    EXPECT_EQ(c.rhs, 0.0);
    EXPECT_EQ(c.margin, 0.0);
  }
}

TEST(EntropyCertify, PositiveSourceAgainstZero) {
  const ObstacleProblem prob = constantCase(65, 1.0, 0.0);
  const SolveReport r = solveVI(prob);
  const double umax = r.u.maxAbs();
  const auto certs = entropyCertify(prob, r.u, {positivePart(prob.psi())}, {umax, 2.0 * umax, 1.0});
  for (const auto& c : certs) EXPECT_GE(c.margin, -1e-8);
}

TEST(EntropyCertify, RandomizedTestSetOnFreeBoundaryCase) {
  const ObstacleProblem prob = constantCase(129, -8.0, -0.1);
  const SolveReport r = solveVI(prob);
  const auto set = makeTestSet(prob, r.u, 25, 2024);
  const auto certs = entropyCertify(prob, r.u, set, {0.01, 0.05, 0.2, 1.0});
  EXPECT_EQ(certs.size(), 100u);
  for (const auto& c : certs) {
    EXPECT_GE(c.margin, -1e-8 * prob.scale()) << "phi " << c.testFunctionId << " t " << c.t;
    EXPECT_GE(c.margin, -entropyTolerance(prob, c.t));
  }
}

TEST(EntropyCertify, TwoDimensionalVariableExponent) {
  const Grid g = Grid::make(2, 25, 1.0);
  const ExponentField p(ScalarField::fromFunction(g, [](const Point& x) { return 1.5 + 0.4 * x[0]; }));
  const ScalarField psi = ScalarField::fromFunction(g, [](const Point& x) {
    return 0.05 * (1.0 - ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5)) / 0.16);
  });
  const ObstacleProblem prob(FluxSpec::pLaplacian(p, 1e-8),
                             ScalarField::fromFunction(g, [](const Point& x) { return x[0] < 0.5 ? -2.0 : -0.5; }), psi);
  const SolveReport r = solveVI(prob);
  ASSERT_TRUE(r.converged);
  const auto certs = entropyCertify(prob, r.u, makeTestSet(prob, r.u, 12, 5), {0.02, 0.1, 1.0});
  for (const auto& c : certs) EXPECT_GE(c.margin, -entropyTolerance(prob, c.t));
}

TEST(EntropyCertify, RejectsInadmissibleWithIndex) {
  const ObstacleProblem prob = constantCase(17, -8.0, -0.1);
  const SolveReport r = solveVI(prob);
  std::vector<double> below(17, -0.1);
  below[0] = below[16] = 0.0;
  below[8] = -0.2;
  try {
    entropyCertify(prob, r.u, {r.u, ScalarField(prob.grid(), below)}, {1.0});
    FAIL() << "expected rejection";
  } catch (const InadmissibleTestFunction& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(entropyCertify(prob, r.u, {ScalarField(prob.grid(), 0.3)}, {1.0}), InadmissibleTestFunction);
}

TEST(MakeTestSet, ContainsPositivePartAndIsAdmissibleAndSeedStable) {
  const Grid g = Grid::make(2, 17, 1.0);
  const ScalarField psi = ScalarField::fromFunction(
      g, [](const Point& x) { return 0.1 - std::max(std::abs(x[0] - 0.5), std::abs(x[1] - 0.5)); });
  const ObstacleProblem prob(FluxSpec::pLaplacian(ExponentField::constant(g, 1.8), 1e-8), ScalarField(g, -1.0), psi);
  const SolveReport r = solveVI(prob);
  const auto a = makeTestSet(prob, r.u, 9, 77);
  const auto b = makeTestSet(prob, r.u, 9, 77);
  ASSERT_EQ(a.size(), 9u);
  EXPECT_EQ(a[0].vector(), positivePart(prob.psi()).vector());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].vector(), b[i].vector());
    for (std::size_t k = 0; k < g.nodeCount(); ++k) {
      EXPECT_GE(a[i][k], prob.psi()[k]);
      if (g.isBoundary(k)) EXPECT_EQ(a[i][k], 0.0);
    }
  }
  EXPECT_NE(makeTestSet(prob, r.u, 9, 78)[1].vector(), a[1].vector());
  EXPECT_THROW(makeTestSet(prob, r.u, 0, 1), std::invalid_argument);
}

TEST(TruncationEnergy, ZeroAndSaturation) {
  const ObstacleProblem prob = constantCase(33, 1.0, 0.0);
  EXPECT_EQ(truncationEnergy(prob, ScalarField(prob.grid(), 0.0), {0.1, 1.0})[1].energy, 0.0);
  const SolveReport r = solveVI(prob);
  const double umax = r.u.maxAbs();
  const auto rows = truncationEnergy(prob, r.u, {0.25 * umax, 0.5 * umax, umax, 2.0 * umax, 4.0 * umax});
  const Grid& g = prob.grid();
  double full = 0.0;
  for (std::size_t f = 0; f < g.faceCount(0); ++f) {
    const double s = (r.u[f + 1] - r.u[f]) / g.h(0);
    full += s * s * g.h(0);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].energy, rows[i - 1].energy);
  EXPECT_NEAR(rows[2].energy, full, 1e-12 * full);
  EXPECT_EQ(rows[3].energy, rows[2].energy);
  EXPECT_EQ(rows[4].energy, rows[2].energy);
}

TEST(TruncationEnergy, SingularDataGrowsAtMostAffinely) {
  const Grid g = Grid::make(2, 33, 1.0);
  const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) {
    const double r = std::hypot(x[0], x[1]);
    return r > 0.0 ? std::pow(r, -1.5) : 0.0;
  });
  const ObstacleProblem prob(FluxSpec::pLaplacian(ExponentField::constant(g, 1.8), 1e-8), approximateData(f, 64.0),
                             ScalarField(g, kNoObstacle));
  const SolveReport r = solveVI(prob);
  ASSERT_TRUE(r.converged);
  std::vector<double> t;
  for (int i = 1; i <= 16; ++i) t.push_back(r.u.maxAbs() * i / 16.0);
  const auto rows = truncationEnergy(prob, r.u, t);
  // Least-squares slope of E(t); testing the equation with T_t(u) bounds E(t) by t |f|_1.
  const double n = static_cast<double>(rows.size());
  double st = 0, se = 0, stt = 0, ste = 0;
  for (const auto& row : rows) {
    st += row.t;
    se += row.energy;
    stt += row.t * row.t;
    ste += row.t * row.energy;
  }
  const double slope = (n * ste - st * se) / (n * stt - st * st);
  EXPECT_TRUE(std::isfinite(slope));
  EXPECT_GT(slope, 0.0);
  const double l1 = integrate(abs(prob.f()));
  for (const auto& row : rows) EXPECT_LE(row.energy, row.t * l1 * (1.0 + 1e-6));
}

TEST(ApproximateData, TruncationLevels) {
  const Grid g = Grid::make(2, 17, 1.0);
  const ScalarField bounded = ScalarField::fromFunction(g, [](const Point& x) { return x[0] - x[1]; });
  EXPECT_EQ(approximateData(bounded, 1.5).vector(), bounded.vector());
  const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) {
    const double r = std::hypot(x[0] - 0.53125, x[1] - 0.53125);
    return std::pow(r, -1.5);
  });
  const ScalarField f10 = approximateData(f, 10.0);
  EXPECT_EQ(f10.max(), 10.0);
  double previous = 1e300;
  for (double n : {1.0, 2.0, 4.0, 8.0, 16.0, 64.0}) {
    const double gap = integrate(abs(approximateData(f, n) - f));
    EXPECT_LE(gap, previous);
    previous = gap;
  }
  EXPECT_THROW(approximateData(f, 0.0), std::invalid_argument);
}

TEST(InMeasureDistance, Trivial) {
  const Grid g = Grid::make(2, 9, 1.0);
  const ScalarField u = ScalarField::fromFunction(g, [](const Point& x) { return x[0] * x[1]; });
  EXPECT_EQ(inMeasureDistance(u, u, 0.01), 0.0);
  EXPECT_NEAR(inMeasureDistance(u + ScalarField(g, 0.02), u, 0.01), 1.0, 1e-14);
}

TEST(ApproximationChain, BoundedDataIsConstantOnceLevelCoversData) {
  const Grid g = Grid::make(2, 17, 1.0);
  const FluxSpec s = FluxSpec::pLaplacian(ExponentField::constant(g, 1.8), 1e-8);
  const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) { return 3.0 * x[0] - 1.0; });
  const auto chain = runApproximationChain(s, f, ScalarField(g, -0.05), {1.0, 2.0, 4.0, 8.0}, 1e-2);
  ASSERT_EQ(chain.levels.size(), 4u);
  EXPECT_TRUE(std::isnan(chain.levels[0].inMeasure));
  for (std::size_t i = 2; i < 4; ++i) {
    EXPECT_EQ(chain.levels[i].report.u.vector(), chain.levels[1].report.u.vector());
    EXPECT_EQ(chain.levels[i].inMeasure, 0.0);
  }
  for (const auto& l : chain.levels) {
    EXPECT_LE(l.fn.maxAbs(), l.n);
    EXPECT_TRUE(l.report.converged);
  }
}

TEST(ApproximationChain, SerialAndConcurrentAgree) {
  const Grid g = Grid::make(2, 17, 1.0);
  const FluxSpec s = FluxSpec::pLaplacian(ExponentField::constant(g, 1.8), 1e-8);
  const ScalarField f = ScalarField::fromFunction(g, [](const Point& x) {
    const double r = std::hypot(x[0], x[1]);
    return r > 0.0 ? std::pow(r, -1.5) : 0.0;
  });
  const ScalarField psi(g, kNoObstacle);
  const auto a = runApproximationChain(s, f, psi, {4.0, 8.0, 16.0}, 1e-2, {}, false);
  const auto b = runApproximationChain(s, f, psi, {4.0, 8.0, 16.0}, 1e-2, {}, true);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a.levels[i].report.u.vector(), b.levels[i].report.u.vector());
    EXPECT_EQ(a.levels[i].modularU, b.levels[i].modularU);
    EXPECT_GT(a.levels[i].modularGrad, 0.0);
  }
  EXPECT_THROW(runApproximationChain(s, f, psi, {4.0, 2.0}, 1e-2), std::invalid_argument);
}

TEST(ApproximationChain, CsvHasHeaderAndOneRowPerLevel) {
  const Grid g = Grid::make(2, 9, 1.0);
  const FluxSpec s = FluxSpec::pLaplacian(ExponentField::constant(g, 1.8), 1e-8);
  const auto chain = runApproximationChain(s, ScalarField(g, 1.0), ScalarField(g, 0.0), {0.5, 1.0}, 1e-2);
  std::ostringstream os;
  writeChainCsv(os, chain);
  const std::string text = os.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.rfind("n[f-units],iterations[sweeps],residual[f-units],inMeasure(s=0.01)", 0), 0u);
}
