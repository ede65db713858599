#include "pxo/op.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace pxo {

FluxSpec::FluxSpec(FluxKind kind, ExponentField p, double delta, std::optional<ScalarField> j, double alpha,
                   double gamma)
    : kind_(kind), p_(std::move(p)), delta_(delta), j_(std::move(j)), alpha_(alpha), gamma_(gamma) {
  if (!(delta_ >= 0.0) || !std::isfinite(delta_)) throw std::invalid_argument("FluxSpec: delta must be >= 0");
  if (!(alpha_ > 0.0) || !(gamma_ > 0.0)) throw std::invalid_argument("FluxSpec: alpha and gamma must be > 0");
  if (j_) {
    requireSameGrid(j_->grid(), p_.grid(), "FluxSpec");
    if (j_->min() < 0.0) throw std::invalid_argument("FluxSpec: j must be nonnegative");
  }
  if (kind_ == FluxKind::PerturbedPLaplacian && !j_) {
    throw std::invalid_argument("FluxSpec: perturbed kind needs a coefficient field j");
  }
}

double defaultDelta(const Grid& grid) { return 1e-8 * grid.maxExtent(); }

std::array<double, 2> evalFlux(const FluxSpec& spec, double p, std::span<const double> xi) {
  double s2 = 0.0;
  for (double c : xi) s2 += c * c;
  const double d2 = spec.delta() * spec.delta();
  double factor = 1.0;
  if (p != 2.0) {
    const double t = s2 + d2;
    factor = t == 0.0 ? 0.0 : std::pow(t, 0.5 * (p - 2.0));
  }
  std::array<double, 2> out{0.0, 0.0};
  for (std::size_t i = 0; i < xi.size() && i < 2; ++i) out[i] = factor * xi[i];
  return out;
}

double energyDensity(double p, double delta, double s) {
  if (p == 2.0) return 0.5 * s * s;
  return (std::pow(s * s + delta * delta, 0.5 * p) - std::pow(delta, p)) / p;
}

DiscreteOperator::DiscreteOperator(const FluxSpec& spec)
    : grid_(spec.grid()), delta2_(spec.delta() * spec.delta()) {
  const ExponentField& p = spec.p();
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    invH_[ua] = 1.0 / grid_.h(a);
    auto& faces = faces_[ua];
    faces.exponent.assign(grid_.nodeCount(), 0.0);
    faces.pMinusOne.assign(grid_.nodeCount(), 1.0);
    for (std::size_t f = 0; f < grid_.faceCount(a); ++f) {
      const std::size_t k = grid_.faceLowNode(a, f);
      const double pf = p.atFace(a, f);
      faces.exponent[k] = 0.5 * (pf - 2.0);
      faces.pMinusOne[k] = pf - 1.0;
    }
  }
}

FaceFlux DiscreteOperator::nodeOperator(std::size_t k, double v, std::span<const double> u) const {
  double value = 0.0;
  double deriv = 0.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto ua = static_cast<std::size_t>(a);
    const std::size_t s = grid_.stride(a);
    const std::size_t kl = k - s;
    const auto& e = faces_[ua];
    const double ih = invH_[ua];
    const FaceFlux left = faceFlux(e.exponent[kl], delta2_, e.pMinusOne[kl], (v - u[kl]) * ih);
    const FaceFlux right = faceFlux(e.exponent[k], delta2_, e.pMinusOne[k], (u[k + s] - v) * ih);
    value += (left.value - right.value) * ih;
    deriv += (left.derivative + right.derivative) * ih * ih;
  }
  return {value, deriv};
}

void DiscreteOperator::apply(std::span<const double> u, std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t k = 0; k < grid_.nodeCount(); ++k) {
    if (grid_.isBoundary(k)) continue;
    out[k] = nodeOperator(k, u[k], u).value;
  }
}

OperatorOutput applyA(const FluxSpec& spec, const ScalarField& u) {
  requireSameGrid(spec.grid(), u.grid(), "applyA");
  const Grid& g = u.grid();
  const DiscreteOperator op(spec);
  std::array<std::vector<double>, 2> flux;
  for (int a = 0; a < g.dim(); ++a) {
    auto& c = flux[static_cast<std::size_t>(a)];
    c.resize(g.faceCount(a));
    for (std::size_t f = 0; f < c.size(); ++f) c[f] = op.fluxFromLowNode(a, g.faceLowNode(a, f), u.values());
  }
  VectorField q(g, std::move(flux));
  ScalarField div = divergence(q);
  return {-1.0 * div, std::move(q)};
}

double energy(const FluxSpec& spec, const ScalarField& u) {
  requireSameGrid(spec.grid(), u.grid(), "energy");
  const Grid& g = u.grid();
  double e = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    for (std::size_t f = 0; f < g.faceCount(a); ++f) {
      const double s = (u[g.faceHighNode(a, f)] - u[g.faceLowNode(a, f)]) / g.h(a);
      e += g.faceWeight(a, f) * energyDensity(spec.p().atFace(a, f), spec.delta(), s);
    }
  }
  return e;
}

StructureAudit auditStructure(const FluxSpec& spec, std::size_t sampleCount, std::uint64_t seed) {
  if (sampleCount < 1) throw std::invalid_argument("auditStructure: sampleCount must be >= 1");
  const Grid& g = spec.grid();
  const int dim = g.dim();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> node(0, g.nodeCount() - 1);
  std::uniform_real_distribution<double> logMag(-3.0, 3.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto draw = [&](std::array<double, 2>& xi) {
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (int i = 0; i < dim; ++i) {
        xi[static_cast<std::size_t>(i)] = gauss(rng);
        n2 += xi[static_cast<std::size_t>(i)] * xi[static_cast<std::size_t>(i)];
      }
    } while (n2 == 0.0);
    const double scale = std::pow(10.0, logMag(rng)) / std::sqrt(n2);
    for (int i = 0; i < dim; ++i) xi[static_cast<std::size_t>(i)] *= scale;
  };
  const auto norm = [dim](const std::array<double, 2>& v) { return dim == 1 ? std::abs(v[0]) : std::hypot(v[0], v[1]); };

  StructureAudit audit;
  audit.samples = sampleCount;
  audit.coercivityMargin = std::numeric_limits<double>::infinity();
  audit.growthMargin = std::numeric_limits<double>::infinity();
  audit.monotonicityMargin = std::numeric_limits<double>::infinity();
  const double delta = spec.delta();

  for (std::size_t s = 0; s < sampleCount; ++s) {
    const std::size_t k = node(rng);
    const double p = spec.p()[k];
    std::array<double, 2> xi{0.0, 0.0}, eta{0.0, 0.0};
    draw(xi);
    draw(eta);
    const std::span<const double> xs(xi.data(), static_cast<std::size_t>(dim));
    const std::span<const double> es(eta.data(), static_cast<std::size_t>(dim));
    const auto a = evalFlux(spec, p, xs);
    const auto b = evalFlux(spec, p, es);
    const double r = norm(xi);

    const double dot = a[0] * xi[0] + a[1] * xi[1];
    const double rp = std::pow(r, p);
    const double coercive = (dot - spec.alpha() * rp + std::pow(delta, p)) / std::max(1.0, rp);
    audit.coercivityMargin = std::min(audit.coercivityMargin, coercive);

    const double rp1 = std::pow(r, p - 1.0);
    const double bound = spec.gamma() * (spec.j(k) + rp1 + std::pow(delta, p - 1.0));
    audit.growthMargin = std::min(audit.growthMargin, (bound - norm(a)) / std::max(1.0, rp1));

    const std::array<double, 2> d{xi[0] - eta[0], xi[1] - eta[1]};
    const double d2 = d[0] * d[0] + d[1] * d[1];
    if (d2 > 0.0) {
      const double mono = ((a[0] - b[0]) * d[0] + (a[1] - b[1]) * d[1]) / d2;
      audit.monotonicityMargin = std::min(audit.monotonicityMargin, mono);
      ++audit.monotonicityPairs;
    }
  }
  return audit;
}

}  // namespace pxo
