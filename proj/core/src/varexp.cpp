#include "pxo/varexp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace pxo {

namespace {

constexpr std::size_t kMaxHolderPairs = 1'000'000;

void checkExponentSamples(const ScalarField& s) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!(s[k] > 1.0)) {
      throw std::invalid_argument("ExponentField: p must exceed 1 everywhere (node " + std::to_string(k) + ")");
    }
  }
}

double holderTerm(const ExponentField& p, std::size_t a, std::size_t b) {
  // Lattice offsets keep equal separations bit-identical across the grid.
  const Grid& g = p.grid();
  const auto la = g.lattice(a);
  const auto lb = g.lattice(b);
  const double d = std::hypot((lb[0] - la[0]) * g.h(0), g.dim() == 2 ? (lb[1] - la[1]) * g.h(1) : 0.0);
  if (d >= 0.5 || d <= 0.0) return -1.0;
  return std::abs(p[a] - p[b]) * (-std::log(d));
}

}  // namespace

ExponentField::ExponentField(Grid grid, std::vector<double> values)
    : ExponentField(ScalarField(grid, std::move(values))) {}

ExponentField::ExponentField(const ScalarField& samples)
    : samples_(samples), pMin_(samples.min()), pMax_(samples.max()) {
  checkExponentSamples(samples_);
}

ExponentField ExponentField::constant(const Grid& grid, double p) {
  return ExponentField(ScalarField(grid, p));
}

double ExponentField::atFace(int axis, std::size_t f) const {
  const Grid& g = grid();
  return 0.5 * (samples_[g.faceLowNode(axis, f)] + samples_[g.faceHighNode(axis, f)]);
}

ExponentReport validateExponent(const ExponentField& p) {
  ExponentReport r;
  const Grid& g = p.grid();
  const std::size_t m = g.nodeCount();
  const std::size_t totalPairs = m * (m - 1) / 2;

  if (!p.isConstant()) {
    if (g.dim() == 1 || totalPairs <= kMaxHolderPairs) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          const double t = holderTerm(p, a, b);
          if (t < 0.0) continue;
          ++r.pairsExamined;
          r.logHolderConstant = std::max(r.logHolderConstant, t);
        }
      }
    } else {
      std::mt19937_64 rng(0x10c4019dULL);
      std::uniform_int_distribution<std::size_t> pick(0, m - 1);
      for (std::size_t s = 0; s < kMaxHolderPairs; ++s) {
        const std::size_t a = pick(rng);
        const std::size_t b = pick(rng);
        const double t = holderTerm(p, a, b);
        if (t < 0.0) continue;
        ++r.pairsExamined;
        r.logHolderConstant = std::max(r.logHolderConstant, t);
      }
    }
  }

  const double n = g.dim();
  r.boundsOk = p.pMin() > 1.0 && p.pMax() < n;
  r.supConjugate = p.pMin() / (p.pMin() - 1.0);
  double lhs = std::numeric_limits<double>::infinity();
  bool finite = true;
  for (std::size_t k = 0; k < m; ++k) {
    const double pk = p[k];
    if (!(pk < n)) {
      finite = false;
      break;
    }
    const double conj = pk / (pk - 1.0);
    lhs = std::min(lhs, n * conj / (n - pk));
  }
  r.q1ConditionLhs = finite ? lhs : std::numeric_limits<double>::quiet_NaN();
  r.q1ConditionOk = finite && lhs > r.supConjugate + 1e-12;
  return r;
}

DerivedExponents derivedExponents(const ExponentField& p) {
  const Grid& g = p.grid();
  const double n = g.dim();
  if (!(p.pMax() < n)) {
    throw std::domain_error("derivedExponents: requires max p < N (max p = " + std::to_string(p.pMax()) +
                            ", N = " + std::to_string(g.dim()) + ")");
  }
  const std::size_t m = g.nodeCount();
  std::vector<double> pStar(m), pConj(m), q0(m), q1(m);
  double supConj = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    pStar[k] = n * p[k] / (n - p[k]);
    pConj[k] = p[k] / (p[k] - 1.0);
    supConj = std::max(supConj, pConj[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    q0[k] = pStar[k] / supConj;
    q1[k] = q0[k] / (q0[k] + 1.0) * p[k];
  }
  return {ScalarField(g, std::move(pStar)), ScalarField(g, std::move(pConj)), ScalarField(g, std::move(q0)),
          ScalarField(g, std::move(q1))};
}

double modular(const ScalarField& v, const ScalarField& p) {
  requireSameGrid(v.grid(), p.grid(), "modular");
  const Grid& g = v.grid();
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = std::abs(v[k]);
    if (a == 0.0) continue;
    s += std::pow(a, p[k]) * g.weight(k);
  }
  return s;
}

double modular(const ScalarField& v, const ExponentField& p) { return modular(v, p.samples()); }

double faceModular(const VectorField& q, const ScalarField& p) {
  requireSameGrid(q.grid(), p.grid(), "faceModular");
  const Grid& g = q.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const auto c = q.component(a);
    for (std::size_t f = 0; f < c.size(); ++f) {
      const double v = std::abs(c[f]);
      if (v == 0.0) continue;
      const double pf = 0.5 * (p[g.faceLowNode(a, f)] + p[g.faceHighNode(a, f)]);
      s += std::pow(v, pf) * g.faceWeight(a, f);
    }
  }
  return s;
}

double luxemburgNorm(const ScalarField& v, const ScalarField& p, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("luxemburgNorm: tol must be positive");
  requireSameGrid(v.grid(), p.grid(), "luxemburgNorm");
  if (v.maxAbs() == 0.0) return 0.0;

  const auto rho = [&](double lambda) { return modular((1.0 / lambda) * v, p); };

  double hi = std::max(v.maxAbs(), std::numeric_limits<double>::min());
  while (rho(hi) > 1.0) hi *= 2.0;
  double lo = hi;
  while (rho(lo) <= 1.0) {
    hi = lo;
    lo *= 0.5;
  }
  // rho(lo) > 1 >= rho(hi)
  while (hi - lo > tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (rho(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double luxemburgNorm(const ScalarField& v, const ExponentField& p, double tol) {
  return luxemburgNorm(v, p.samples(), tol);
}

double marcinkiewiczBound(const ScalarField& u, const ScalarField& q, const std::vector<double>& tLevels) {
  requireSameGrid(u.grid(), q.grid(), "marcinkiewiczBound");
  for (std::size_t i = 0; i < tLevels.size(); ++i) {
    if (!(tLevels[i] > 0.0) || (i > 0 && !(tLevels[i] > tLevels[i - 1]))) {
      throw std::invalid_argument("marcinkiewiczBound: levels must be positive and increasing");
    }
  }
  const Grid& g = u.grid();
  double best = 0.0;
  for (double t : tLevels) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
      if (std::abs(u[k]) > t) s += std::pow(t, q[k]) * g.weight(k);
    }
    best = std::max(best, s);
  }
  return best;
}

std::vector<double> defaultLevels(const ScalarField& u, int count) {
  const double top = u.maxAbs();
  if (top == 0.0 || count < 1) return {};
  if (count == 1) return {top};
  std::vector<double> levels(static_cast<std::size_t>(count));
  const double lo = std::log(1e-3 * top);
  const double hi = std::log(top);
  for (int i = 0; i < count; ++i) {
    levels[static_cast<std::size_t>(i)] = std::exp(lo + (hi - lo) * i / (count - 1));
  }
  levels.back() = top;
  return levels;
}

}  // namespace pxo
