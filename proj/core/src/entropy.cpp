#include "pxo/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>

#include "pxo/varexp.hpp"

namespace pxo {

ScalarField truncate(const ScalarField& v, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("truncate: level must be positive");
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::clamp(v[k], -t, t);
  return {v.grid(), std::move(out)};
}

double entropyTolerance(const ObstacleProblem& prob, double t) {
  return 1e-6 * (1.0 + integrate(abs(prob.f()))) * (1.0 + t);
}

std::vector<EntropyCertificate> entropyCertify(const ObstacleProblem& prob, const ScalarField& u,
                                               const std::vector<ScalarField>& testSet,
                                               const std::vector<double>& tLevels) {
  requireSameGrid(prob.grid(), u.grid(), "entropyCertify");
  const Grid& g = prob.grid();
  for (std::size_t i = 0; i < testSet.size(); ++i) {
    const ScalarField& phi = testSet[i];
    if (!(phi.grid() == g)) {
      throw InadmissibleTestFunction("entropyCertify: test function " + std::to_string(i) + " is on another grid", i);
    }
    for (std::size_t k = 0; k < g.nodeCount(); ++k) {
      if (phi[k] < prob.psi()[k] || (g.isBoundary(k) && phi[k] != 0.0)) {
        throw InadmissibleTestFunction("entropyCertify: test function " + std::to_string(i) +
                                           " leaves the constraint set at node " + std::to_string(k),
                                       i);
      }
    }
  }
  for (double t : tLevels) {
    if (!(t > 0.0)) throw std::invalid_argument("entropyCertify: levels must be positive");
  }

  const VectorField flux = applyA(prob.spec(), u).flux;
  std::vector<EntropyCertificate> out;
  out.reserve(testSet.size() * tLevels.size());
  for (std::size_t i = 0; i < testSet.size(); ++i) {
    const ScalarField diff = testSet[i] - u;
    for (double t : tLevels) {
      const ScalarField w = truncate(diff, t);
      double lhs = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const auto q = flux.component(a);
        for (std::size_t f = 0; f < g.faceCount(a); ++f) {
          const double dw = (w[g.faceHighNode(a, f)] - w[g.faceLowNode(a, f)]) / g.h(a);
          lhs += q[f] * dw * g.faceWeight(a, f);
        }
      }
      std::vector<double> fw(g.nodeCount());
      for (std::size_t k = 0; k < fw.size(); ++k) fw[k] = prob.f()[k] * w[k];
      const double rhs = integrate(ScalarField(g, std::move(fw)));
      out.push_back({i, t, lhs, rhs, lhs - rhs});
    }
  }
  return out;
}

namespace {

// (1 - r^2 / w^2)^2 inside the disc, zero outside; zero on the boundary.
ScalarField bump(const Grid& g, const Point& c, double width, double height) {
  std::vector<double> v(g.nodeCount(), 0.0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (g.isBoundary(k)) continue;
    const Point x = g.point(k);
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double d = x[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)];
      r2 += d * d;
    }
    const double s = 1.0 - r2 / (width * width);
    if (s > 0.0) v[k] = height * s * s;
  }
  return {g, std::move(v)};
}

}  // namespace

std::vector<ScalarField> makeTestSet(const ObstacleProblem& prob, const ScalarField& u, std::size_t count,
                                     std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("makeTestSet: count must be >= 1");
  requireSameGrid(prob.grid(), u.grid(), "makeTestSet");
  const Grid& g = prob.grid();
  const ScalarField& psi = prob.psi();
  const ScalarField psiPlus = positivePart(psi);
  const double supPsiPlus = psiPlus.max();
  const double uMax = std::max(u.maxAbs(), supPsiPlus);
  const double scale = uMax + 1.0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto drawBump = [&](double heightScale) {
    Point c{0.0, 0.0};
    for (int a = 0; a < g.dim(); ++a) c[static_cast<std::size_t>(a)] = g.extent(a) * (0.1 + 0.8 * unit(rng));
    const double width = g.maxExtent() * (0.05 + 0.4 * unit(rng));
    const double height = heightScale * (2.0 * unit(rng) - 1.0);
    return bump(g, c, width, height);
  };

  std::vector<ScalarField> out;
  out.reserve(count);
  out.push_back(psiPlus);
  for (std::size_t i = 1; i < count; ++i) {
    if (i % 2 == 1) {
      out.push_back(zeroBoundary(pointwiseMax(psi, drawBump(2.0 * scale))));
      continue;
    }
    const double h = supPsiPlus + (uMax - supPsiPlus) * unit(rng);
    const ScalarField th = h > 0.0 ? truncate(u, h) : ScalarField(g, 0.0);
    const ScalarField b = abs(drawBump(1.0));
    const bool down = unit(rng) < 0.5;
    double eps = 0.5 * scale;
    if (down) {
      // Half the largest eps keeping T_h(u) - eps b >= psi.
      double epsMax = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < g.nodeCount(); ++k) {
        if (b[k] > 0.0) epsMax = std::min(epsMax, std::max(th[k] - psi[k], 0.0) / b[k]);
      }
      eps = std::min(eps, 0.5 * epsMax);
    }
    out.push_back(th + (down ? -eps : eps) * b);
  }
  return out;
}

std::vector<TruncationEnergyRow> truncationEnergy(const ObstacleProblem& prob, const ScalarField& u,
                                                  const std::vector<double>& tLevels) {
  requireSameGrid(prob.grid(), u.grid(), "truncationEnergy");
  if (!std::is_sorted(tLevels.begin(), tLevels.end())) {
    throw std::invalid_argument("truncationEnergy: levels must be increasing");
  }
  const Grid& g = u.grid();
  const ExponentField& p = prob.spec().p();
  std::vector<TruncationEnergyRow> out;
  out.reserve(tLevels.size());
  for (double t : tLevels) {
    double e = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      for (std::size_t f = 0; f < g.faceCount(a); ++f) {
        const std::size_t lo = g.faceLowNode(a, f);
        const std::size_t hi = g.faceHighNode(a, f);
        if (std::abs(u[lo]) > t || std::abs(u[hi]) > t) continue;
        const double s = std::abs(u[hi] - u[lo]) / g.h(a);
        e += g.faceWeight(a, f) * std::pow(s, p.atFace(a, f));
      }
    }
    out.push_back({t, e});
  }
  return out;
}

ScalarField approximateData(const ScalarField& f, double n) {
  if (!(n > 0.0)) throw std::invalid_argument("approximateData: level must be positive");
  return truncate(f, n);
}

double inMeasureDistance(const ScalarField& u, const ScalarField& v, double s) {
  requireSameGrid(u.grid(), v.grid(), "inMeasureDistance");
  if (!(s > 0.0)) throw std::invalid_argument("inMeasureDistance: s must be positive");
  return measure(RegionMask::fromPredicate(u.grid(), [&](std::size_t k) { return std::abs(u[k] - v[k]) > s; }));
}

ApproximationChain runApproximationChain(const FluxSpec& spec, const ScalarField& f, const ScalarField& psi,
                                         const std::vector<double>& nLevels, double s,
                                         const SolverOptions& options, bool concurrent) {
  if (nLevels.empty()) throw std::invalid_argument("runApproximationChain: no levels");
  for (std::size_t i = 0; i < nLevels.size(); ++i) {
    if (!(nLevels[i] > 0.0) || (i > 0 && !(nLevels[i] > nLevels[i - 1]))) {
      throw std::invalid_argument("runApproximationChain: levels must be positive and increasing");
    }
  }
  if (!(s > 0.0)) throw std::invalid_argument("runApproximationChain: s must be positive");

  const auto solveLevel = [&](double n) {
    ChainLevel level{n, approximateData(f, n), SolveReport{ScalarField(f.grid(), 0.0), ScalarField(f.grid(), 0.0)}};
    level.report = solveVI(ObstacleProblem(spec, level.fn, psi), options);
    level.l1DataGap = integrate(abs(level.fn - f));
    return level;
  };

  ApproximationChain chain;
  chain.s = s;
  const bool parallel = concurrent && std::thread::hardware_concurrency() > 1 && nLevels.size() > 1;
  if (parallel) {
    std::vector<std::future<ChainLevel>> jobs;
    jobs.reserve(nLevels.size());
    for (double n : nLevels) jobs.push_back(std::async(std::launch::async, solveLevel, n));
    for (auto& j : jobs) chain.levels.push_back(j.get());
  } else {
    for (double n : nLevels) chain.levels.push_back(solveLevel(n));
  }

  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  std::optional<DerivedExponents> ex;
  if (spec.p().pMax() < static_cast<double>(spec.p().ambientDim())) ex = derivedExponents(spec.p());
  chain.tLevels = defaultLevels(chain.levels.back().report.u);
  for (std::size_t i = 0; i < chain.levels.size(); ++i) {
    ChainLevel& level = chain.levels[i];
    const ScalarField& u = level.report.u;
    level.inMeasure = i == 0 ? nan : inMeasureDistance(chain.levels[i - 1].report.u, u, s);
    if (ex) {
      const ScalarField qu = 0.95 * ex->q0;
      const ScalarField qg = 0.95 * ex->q1;
      level.modularU = modular(u, qu);
      level.modularGrad = faceModular(gradient(u), qg);
      level.marcinkiewicz = chain.tLevels.empty() ? 0.0 : marcinkiewiczBound(u, qu, chain.tLevels);
    } else {
      level.modularU = level.modularGrad = level.marcinkiewicz = nan;
    }
  }
  return chain;
}

void writeChainCsv(std::ostream& os, const ApproximationChain& chain) {
  const auto old = os.precision(17);
  os << "n[f-units],iterations[sweeps],residual[f-units],inMeasure(s=" << chain.s
     << ")[area],modular_u[1],modular_grad[1],marcinkiewicz_M[1]\n";
  for (const ChainLevel& l : chain.levels) {
    os << l.n << ',' << l.report.iterations << ',' << l.report.complementarityResidual << ',';
    if (!std::isnan(l.inMeasure)) os << l.inMeasure;
    os << ',' << l.modularU << ',' << l.modularGrad << ',' << l.marcinkiewicz << '\n';
  }
  os.precision(old);
}

}  // namespace pxo
