#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pxo/free_boundary.hpp"

using namespace pxo;

namespace {

FluxSpec laplacian(const Grid& g) { return FluxSpec::pLaplacian(ExponentField::constant(g, 2.0), 0.0); }

ObstacleProblem constantCase(int n, double f, double psi) {
  const Grid g = Grid::make(1, n, 1.0);
  return {laplacian(g), ScalarField(g, f), ScalarField(g, psi)};
}

struct Solved {
  ObstacleProblem prob;
  SolveReport report;
};

Solved solved(int n, double f, double psi) {
  ObstacleProblem prob = constantCase(n, f, psi);
  SolveReport r = solveVI(prob);
  return {std::move(prob), std::move(r)};
}

RegionMask contactOf(const Solved& s) {
  return coincidenceSet(s.report.u, s.prob.psi(), defaultCoincidenceEps(s.prob.grid(), s.report.tol));
}

}  // namespace

TEST(CoincidenceSet, FullAndEmpty) {
  const Solved down = solved(65, -1.0, 0.0);
  EXPECT_EQ(contactOf(down), RegionMask::interior(down.prob.grid()));
  const Solved up = solved(65, 1.0, 0.0);
  EXPECT_TRUE(contactOf(up).empty());
  EXPECT_THROW(coincidenceSet(up.report.u, up.prob.psi(), -1.0), std::invalid_argument);
}

TEST(CoincidenceSet, AnalyticEndpoints) {
  const Solved s = solved(257, -8.0, -0.1);
  const RegionMask m = contactOf(s);
  const Grid& g = s.prob.grid();
  double lo = 2.0, hi = -1.0;
  for (std::size_t k = 0; k < g.nodeCount(); ++k) {
    if (!m[k]) continue;
    lo = std::min(lo, g.point(k)[0]);
    hi = std::max(hi, g.point(k)[0]);
  }
  const double a = oracle::contactEndpoint(8.0, 0.1);
  EXPECT_NEAR(lo, a, 2.0 * g.h(0));
  EXPECT_NEAR(hi, 1.0 - a, 2.0 * g.h(0));
  EXPECT_NEAR(a, 0.1581, 1e-4);
  EXPECT_NEAR(1.0 - a, 0.8419, 1e-4);
}

TEST(LewyStampacchia, ObstacleIsItsOwnSolution) {
  const Grid g = Grid::make(1, 65, 1.0);
  const ScalarField psi = ScalarField::fromFunction(g, [](const Point& x) { return 0.25 - (x[0] - 0.5) * (x[0] - 0.5); });
  const ObstacleProblem prob(laplacian(g), ScalarField(g, 0.0), psi);
  const SolveReport r = solveVI(prob);
  for (std::size_t k = 0; k < g.nodeCount(); ++k) EXPECT_NEAR(r.u[k], psi[k], 1e-12);
  for (std::size_t k : g.interiorNodes()) EXPECT_NEAR(r.Au[k], 2.0, 1e-9);
  const double tol = 1e-6 * prob.scale();
  const LSReport ls = lewyStampacchiaCheck(prob, r.u, tol);
  EXPECT_TRUE(ls.pass());
  EXPECT_LE(ls.lowerViolation, tol);
  EXPECT_LE(ls.upperViolation, tol);
  EXPECT_EQ(ls.collarNodes, 0u);
}

TEST(LewyStampacchia, PositiveAndNegativeSources) {
  for (double f : {1.0, -1.0}) {
    const Solved s = solved(65, f, 0.0);
    const LSReport ls = lewyStampacchiaCheck(s.prob, s.report.u, 1e-6 * s.prob.scale());
    EXPECT_TRUE(ls.pass()) << f;
    EXPECT_FALSE(ls.withinHypotheses);  // p = 2 = N + 1 > N in 1D
    const ScalarField au = s.report.Au;
    for (std::size_t k : s.prob.grid().interiorNodes()) EXPECT_NEAR(au[k], f > 0 ? 1.0 : 0.0, 1e-8);
  }
}

TEST(LewyStampacchia, DetectsViolation) {
  const Solved s = solved(33, 1.0, 0.0);
  const ScalarField wrong = 0.5 * s.report.u;
  const LSReport ls = lewyStampacchiaCheck(s.prob, wrong, 1e-6, {std::nullopt, 0.0});
  EXPECT_FALSE(ls.lowerPass);
  EXPECT_NEAR(ls.lowerViolation, 0.5, 1e-8);
  EXPECT_NE(summary(ls).find("FAIL"), std::string::npos);
}

TEST(ReconstructBeta, AnalyticCases) {
  const Solved down = solved(65, -1.0, 0.0);
  const auto b = reconstructBeta(down.prob, down.report.u);
  for (std::size_t k : down.prob.grid().interiorNodes()) EXPECT_NEAR(b.beta[k], -1.0, 1e-12);
  EXPECT_LE(b.strictInteriorResidual, 1e-6 * down.prob.scale());

  const Solved up = solved(65, 1.0, 0.0);
  const auto z = reconstructBeta(up.prob, up.report.u);
  EXPECT_EQ(z.beta.maxAbs(), 0.0);

  const Solved fb = solved(513, -8.0, -0.1);
  const auto c = reconstructBeta(fb.prob, fb.report.u);
  EXPECT_LE(c.strictInteriorResidual, 1e-6 * fb.prob.scale());
  EXPECT_LT(c.strictInterior.count(), RegionMask::interior(fb.prob.grid()).count());
}

TEST(XiField, AnalyticCasesAndConsistencyWithBeta) {
  const Solved up = solved(65, 1.0, 0.0);
  EXPECT_LE(xiField(up.prob, up.report.u).maxAbs(), up.report.tol);

  const Solved down = solved(65, -1.0, 0.0);
  const ScalarField xi = xiField(down.prob, down.report.u);
  for (std::size_t k : down.prob.grid().interiorNodes()) EXPECT_NEAR(xi[k], -1.0, 1e-12);

  const Solved fb = solved(257, -8.0, -0.1);
  const ScalarField x = xiField(fb.prob, fb.report.u);
  const auto b = reconstructBeta(fb.prob, fb.report.u);
  const RegionMask contact = contactOf(fb);
  const double tolLs = 1e-6 * fb.prob.scale();
  for (std::size_t k = 0; k < fb.prob.grid().nodeCount(); ++k) {
    EXPECT_LE(x[k], tolLs);
    if (!contact[k]) EXPECT_NEAR(x[k], 0.0, tolLs);
    if (b.strictInterior[k]) EXPECT_NEAR(x[k], b.beta[k], tolLs);
  }
}

TEST(Contraction, IdenticalAndAnalyticPair) {
  const ObstacleProblem a = constantCase(257, -8.0, -0.1);
  const StabilityReport same = contractionCheck(a, a, 1e-8);
  EXPECT_EQ(same.l1DataDistance, 0.0);
  EXPECT_LE(same.l1XiDistance, 1e-8);
  EXPECT_TRUE(same.contractionPass);

  const ObstacleProblem b = constantCase(257, -9.0, -0.1);
  const StabilityReport r = contractionCheck(a, b, 1e-8);
  EXPECT_NEAR(r.l1DataDistance, 1.0, 1e-12);
  EXPECT_LE(r.l1XiDistance, 1.0);
  EXPECT_TRUE(r.contractionPass);
  EXPECT_THROW(contractionCheck(a, constantCase(257, -9.0, -0.2), 1e-8), std::invalid_argument);
}

TEST(Stability, AnalyticSymmetricDifference) {
  const ObstacleProblem a = constantCase(1025, -8.0, -0.1);
  const ObstacleProblem b = constantCase(1025, -9.0, -0.1);
  const Grid& g = a.grid();
  const StabilityReport r = stabilityCheck(a, b, RegionMask(g, true), 8.0, 1e-8);
  ASSERT_FALSE(r.refusal);
  const double expected = 2.0 * (std::sqrt(0.2 / 8.0) - std::sqrt(0.2 / 9.0));
  EXPECT_NEAR(expected, 0.018085369, 1e-9);
  EXPECT_NEAR(r.symDiffMeasure, expected, 2.0 * g.h(0));
  EXPECT_LE(r.symDiffMeasure, 1.0 / 8.0);
  EXPECT_NEAR(r.bound, 0.125, 1e-12);
  EXPECT_TRUE(r.stabilityPass);
}

TEST(Stability, IdenticalDataAndRefusal) {
  const ObstacleProblem a = constantCase(129, -8.0, -0.1);
  const Grid& g = a.grid();
  const StabilityReport same = stabilityCheck(a, a, RegionMask(g, true), 8.0, 1e-8);
  EXPECT_EQ(same.symDiffMeasure, 0.0);

  const ObstacleProblem b = constantCase(129, -9.0, -0.1);
  const StabilityReport refused = stabilityCheck(a, b, RegionMask(g, true), 8.5, 1e-8);
  ASSERT_TRUE(refused.refusal);
  EXPECT_EQ(refused.refusal->problem, 1);
  EXPECT_FALSE(g.isBoundary(refused.refusal->node));
  EXPECT_NEAR(refused.refusal->value, -8.0, 1e-12);
  EXPECT_FALSE(refused.stabilityPass);
  EXPECT_NE(summary(refused).find("refused"), std::string::npos);
  EXPECT_THROW(stabilityCheck(a, b, RegionMask(g, true), 0.0, 1e-8), std::invalid_argument);
}

TEST(ChiConvergence, IdenticalSequenceHasZeroDistance) {
  const Grid g = Grid::make(1, 129, 1.0);
  const DataPair limit{ScalarField(g, -8.0), ScalarField(g, -0.1)};
  const ChiTable t = chiConvergence(laplacian(g), limit, {limit, limit}, 2.0, 1.0);
  ASSERT_EQ(t.levels.size(), 2u);
  for (const auto& l : t.levels) {
    EXPECT_EQ(l.distance, 0.0);
    EXPECT_TRUE(l.converged);
  }
  EXPECT_TRUE(t.hypothesesMet());
}

TEST(ChiConvergence, ShrinkingObstacleBumpAndPowerIdentity) {
  const Grid g = Grid::make(1, 257, 1.0);
  const ScalarField psi(g, -0.1);
  const ScalarField bump = ScalarField::fromFunction(g, [](const Point& x) {
    const double s = 1.0 - (x[0] - 0.3) * (x[0] - 0.3) / 0.04;
    return s > 0.0 ? 0.2 * s * s : 0.0;
  });
  const DataPair limit{ScalarField(g, -8.0), psi};
  std::vector<DataPair> seq;
  for (double n : {1.0, 2.0, 4.0, 8.0}) seq.push_back({limit.f, psi + (1.0 / n) * bump});
  const double q = 3.0;
  const ChiTable t = chiConvergence(laplacian(g), limit, seq, q, 1.0);
  ASSERT_EQ(t.levels.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(t.levels[i].distance, std::pow(t.levels[i].symDiffMeasure, 1.0 / q), 1e-15);
    if (i > 0) EXPECT_LT(t.levels[i].distance, t.levels[i - 1].distance);
  }
}

TEST(ChiConvergence, ReportsDegenerateNodes) {
  const Grid g = Grid::make(1, 33, 1.0);
  const DataPair limit{ScalarField(g, 0.0), ScalarField(g, -0.1)};
  const ChiTable t = chiConvergence(laplacian(g), limit, {}, 1.0, 0.5);
  EXPECT_EQ(t.degenerateNodes, 31u);
  EXPECT_FALSE(t.hypothesesMet());
}

TEST(Locality, IdenticalAndHalfAgreement) {
  const Grid g = Grid::make(2, 21, 1.0);
  const ExponentField p(ScalarField::fromFunction(g, [](const Point& x) { return 1.5 + 0.4 * x[0]; }));
  const FluxSpec s = FluxSpec::pLaplacian(p, 1e-8);
  const ScalarField w1 = ScalarField::fromFunction(g, [](const Point& x) { return std::sin(3.0 * x[0]) * x[1]; });
  EXPECT_EQ(localityCheck(s, w1, w1, 0.0), 0.0);
  const ScalarField w2 = ScalarField::fromFunction(
      g, [](const Point& x) { return std::sin(3.0 * x[0]) * x[1] + (x[0] > 0.5 ? std::cos(5.0 * x[1]) : 0.0); });
  EXPECT_LE(localityCheck(s, w1, w2, 0.0), 1e-10);
}

TEST(Locality, SolutionEqualsObstacleOnContact) {
  const Solved s = solved(257, -8.0, -0.1);
  EXPECT_LE(localityCheck(s.prob.spec(), s.report.u, s.prob.psi(), 0.0), 1e-6 * s.prob.scale());
}

TEST(Reports, CsvRowsMatchHeaders) {
  const Solved s = solved(33, 1.0, 0.0);
  const LSReport ls = lewyStampacchiaCheck(s.prob, s.report.u, 1e-6);
  const auto commas = [](const std::string& t) { return std::count(t.begin(), t.end(), ','); };
  EXPECT_EQ(commas(lsCsvHeader()), commas(toCsvRow(ls)));
  const StabilityReport st = contractionCheck(s.prob, s.prob, 1e-8);
  EXPECT_EQ(commas(stabilityCsvHeader()), commas(toCsvRow(st)));
}
