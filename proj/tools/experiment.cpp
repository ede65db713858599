#include "experiment.hpp"

#include <cmath>
#include <numbers>

#include "pxo/field_io.hpp"

namespace pxo::cli {

namespace {

Grid buildGrid(const Config& c) {
  const long dim = c.integer("grid.dim");
  if (dim != 1 && dim != 2) throw ConfigError("grid.dim", "must be 1 or 2");
  const auto d = static_cast<std::size_t>(dim);
  auto perAxis = [&](const std::string& key) {
    std::vector<double> v = c.list(key);
    if (v.size() == 1) v.resize(d, v[0]);
    if (v.size() != d) throw ConfigError(key, "expected 1 or " + std::to_string(dim) + " values");
    return v;
  };
  const std::vector<double> n = perAxis("grid.n");
  const std::vector<double> extent = c.has("grid.extent") ? perAxis("grid.extent") : std::vector<double>(d, 1.0);
  std::array<int, 2> ni{1, 1};
  std::array<double, 2> ei{1.0, 1.0};
  for (std::size_t a = 0; a < d; ++a) {
    if (n[a] != std::floor(n[a]) || n[a] < 3 || n[a] > 1e5) throw ConfigError("grid.n", "node counts must be integers in [3, 1e5]");
    if (!(extent[a] > 0.0)) throw ConfigError("grid.extent", "extents must be positive");
    ni[a] = static_cast<int>(n[a]);
    ei[a] = extent[a];
  }
  return Grid::make(static_cast<int>(dim), ni, ei);
}

std::vector<double> vectorParam(const Config& c, const std::string& key, const Grid& g,
                                const std::vector<double>& fallback) {
  std::vector<double> v = c.list(key, fallback);
  if (v.size() != static_cast<std::size_t>(g.dim())) {
    throw ConfigError(key, "expected " + std::to_string(g.dim()) + " components");
  }
  v.resize(2, 0.0);
  return v;
}

ScalarField expression(const Config& c, const std::string& prefix, const Grid& g) {
  const std::string key = prefix + ".expr";
  const std::string id = c.text(key);
  const auto param = [&](const std::string& name) { return prefix + "." + name; };
  if (id == "constant") return ScalarField(g, c.number(param("value")));
  if (id == "affine") {
    const double v0 = c.number(param("value"));
    const std::vector<double> s = vectorParam(c, param("slope"), g, {});
    return ScalarField::fromFunction(g, [&](const Point& x) { return v0 + s[0] * x[0] + s[1] * x[1]; });
  }
  if (id == "quadratic-bump") {
    const double h = c.number(param("height"));
    const double r = c.number(param("radius"));
    if (!(r > 0.0)) throw ConfigError(param("radius"), "must be positive");
    const std::vector<double> x0 = vectorParam(c, param("center"), g, {});
    return ScalarField::fromFunction(g, [&](const Point& x) {
      const double d2 = (x[0] - x0[0]) * (x[0] - x0[0]) + (x[1] - x0[1]) * (x[1] - x0[1]);
      return h * (1.0 - d2 / (r * r));
    });
  }
  if (id == "radial-power") {
    const double scale = c.number(param("scale"), 1.0);
    const double alpha = c.number(param("power"));
    if (!(alpha > 0.0)) throw ConfigError(param("power"), "must be positive");
    const std::vector<double> x0 = vectorParam(c, param("center"), g, {});
    // The singular point itself, if it is a node, gets 0.
    return ScalarField::fromFunction(g, [&](const Point& x) {
      const double r = std::hypot(x[0] - x0[0], x[1] - x0[1]);
      return r > 0.0 ? scale * std::pow(r, -alpha) : 0.0;
    });
  }
  if (id == "sine-product") {
    const double amp = c.number(param("amplitude"), 1.0);
    const double k = c.number(param("frequency"), 1.0);
    return ScalarField::fromFunction(g, [&](const Point& x) {
      double v = amp;
      for (int a = 0; a < g.dim(); ++a) {
        v *= std::sin(k * std::numbers::pi * x[static_cast<std::size_t>(a)] / g.extent(a));
      }
      return v;
    });
  }
  if (id == "step") {
    const long axis = c.integer(param("axis"), 0);
    if (axis < 0 || axis >= g.dim()) throw ConfigError(param("axis"), "axis out of range");
    const double at = c.number(param("at"));
    const double below = c.number(param("below"));
    const double above = c.number(param("above"));
    return ScalarField::fromFunction(g, [&](const Point& x) { return x[static_cast<std::size_t>(axis)] < at ? below : above; });
  }
  if (id == "file") {
    const auto path = c.resolvePath(param("path"));
    ScalarField v = [&] {
      try {
        return readField(path);
      } catch (const std::exception& e) {
        throw ConfigError(param("path"), e.what());
      }
    }();
    if (!(v.grid() == g)) throw ConfigError(param("path"), "field grid differs from the configured grid");
    return v;
  }
  throw ConfigError(key, "unknown expression `" + id +
                             "` (constant, affine, quadratic-bump, radial-power, sine-product, step, file)");
}

ExponentField buildExponent(const Config& c, const Grid& g) {
  const std::string kind = c.text("exponent.kind");
  ScalarField samples(g, 2.0);
  if (kind == "constant") {
    samples = ScalarField(g, c.number("exponent.value"));
  } else if (kind == "affine") {
    const double v0 = c.number("exponent.value");
    const std::vector<double> s = vectorParam(c, "exponent.slope", g, {});
    samples = ScalarField::fromFunction(g, [&](const Point& x) { return v0 + s[0] * x[0] + s[1] * x[1]; });
  } else if (kind == "table") {
    const auto path = c.resolvePath("exponent.path");
    try {
      samples = readField(path);
    } catch (const std::exception& e) {
      throw ConfigError("exponent.path", e.what());
    }
    if (!(samples.grid() == g)) throw ConfigError("exponent.path", "field grid differs from the configured grid");
  } else {
    throw ConfigError("exponent.kind", "unknown kind `" + kind + "` (constant, affine, table)");
  }
  if (!(samples.min() > 1.0)) throw ConfigError("exponent", "p must exceed 1 at every node");
  return ExponentField(samples);
}

FluxSpec buildSpec(const Config& c, const Grid& g, const ExponentField& p) {
  const std::string kind = c.text("flux.kind", "p-laplacian");
  const double delta = c.number("flux.delta", defaultDelta(g));
  if (!(delta >= 0.0)) throw ConfigError("flux.delta", "must be >= 0");
  const double alpha = c.number("flux.alpha", 1.0);
  const double gamma = c.number("flux.gamma", 1.0);
  if (!(alpha > 0.0)) throw ConfigError("flux.alpha", "must be positive");
  if (!(gamma > 0.0)) throw ConfigError("flux.gamma", "must be positive");
  if (kind == "p-laplacian") return {FluxKind::PLaplacian, p, delta, std::nullopt, alpha, gamma};
  if (kind == "perturbed") {
    const double j = c.number("flux.j");
    if (!(j >= 0.0)) throw ConfigError("flux.j", "must be >= 0");
    return {FluxKind::PerturbedPLaplacian, p, delta, ScalarField(g, j), alpha, gamma};
  }
  throw ConfigError("flux.kind", "unknown kind `" + kind + "` (p-laplacian, perturbed)");
}

}  // namespace

Experiment::Experiment(Config config)
    : config_(std::move(config)),
      grid_(buildGrid(config_)),
      p_(buildExponent(config_, grid_)),
      spec_(buildSpec(config_, grid_, p_)) {}

ScalarField Experiment::field(const std::string& prefix) const { return expression(config_, prefix, grid_); }

ScalarField Experiment::psi() const {
  if (config_.text("obstacle.expr") == "none") return ScalarField(grid_, kNoObstacle);
  return field("obstacle");
}

ObstacleProblem Experiment::problem() const {
  const ScalarField obstacle = psi();
  for (std::size_t k = 0; k < grid_.nodeCount(); ++k) {
    if (grid_.isBoundary(k) && obstacle[k] > 0.0) {
      throw ConfigError("obstacle", "obstacle is positive at boundary node " + std::to_string(k));
    }
  }
  return {spec_, f(), obstacle};
}

SolverOptions Experiment::solverOptions() const {
  SolverOptions o;
  if (config_.has("solver.tol")) {
    o.tol = config_.number("solver.tol");
    if (!(*o.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  }
  const long maxIter = config_.integer("solver.max_iter", static_cast<long>(o.maxIter));
  if (maxIter < 1) throw ConfigError("solver.max_iter", "must be >= 1");
  o.maxIter = static_cast<std::size_t>(maxIter);
  if (config_.has("solver.omega")) {
    o.omega = config_.number("solver.omega");
    if (!(*o.omega > 0.0 && *o.omega < 2.0)) throw ConfigError("solver.omega", "must lie in (0, 2)");
  }
  return o;
}

ScalarField randomSmoothData(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double offset = -3.0 + 4.0 * unit(rng);
  struct Bump {
    Point c;
    double width;
    double height;
  };
  std::vector<Bump> bumps;
  for (int m = 0; m < 3; ++m) {
    Bump b{{0.0, 0.0}, 0.0, 0.0};
    for (int a = 0; a < grid.dim(); ++a) b.c[static_cast<std::size_t>(a)] = grid.extent(a) * unit(rng);
    b.width = grid.maxExtent() * (0.1 + 0.4 * unit(rng));
    b.height = -4.0 + 8.0 * unit(rng);
    bumps.push_back(b);
  }
  return ScalarField::fromFunction(grid, [&](const Point& x) {
    double v = offset;
    for (const Bump& b : bumps) {
      const double d2 = (x[0] - b.c[0]) * (x[0] - b.c[0]) + (x[1] - b.c[1]) * (x[1] - b.c[1]);
      const double s = 1.0 - d2 / (b.width * b.width);
      if (s > 0.0) v += b.height * s * s;
    }
    return v;
  });
}

}  // namespace pxo::cli
