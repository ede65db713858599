#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "pxo/entropy.hpp"
#include "pxo/field_io.hpp"
#include "pxo/free_boundary.hpp"

namespace pxo::cli {

namespace {

struct Failure {
  std::string check;
  std::string message;
};

class Run {
 public:
  Run(const Config& config, const RunContext& ctx) : exp_(config), ctx_(ctx) {}

  const Experiment& exp() const { return exp_; }
  const Config& config() const { return exp_.config(); }

  std::uint64_t seed() const {
    if (ctx_.seed) return *ctx_.seed;
    const long s = config().integer("run.seed", 0);
    if (s < 0) throw ConfigError("run.seed", "must be >= 0");
    return static_cast<std::uint64_t>(s);
  }

  std::ofstream open(const std::string& name) {
    std::ofstream os(ctx_.outDir / name);
    if (!os) throw std::runtime_error("cannot write " + (ctx_.outDir / name).string());
    os << std::setprecision(17);
    return os;
  }

  void field(const std::string& name, const ScalarField& v) { writeField(ctx_.outDir / name, v); }

  void log(const std::string& line) {
    if (ctx_.log) *ctx_.log << line << "\n";
  }

  void check(bool ok, const std::string& name, const std::string& message) {
    if (!ok) failures_.push_back({name, message});
    log(std::string(ok ? "ok    " : "FAIL  ") + name + ": " + message);
  }

  void solved(const SolveReport& r, const std::string& what) {
    if (!r.converged) {
      notConverged_ = true;
      failures_.push_back({"solver", what + " stopped after " + std::to_string(r.iterations) +
                                         " sweeps with residual " + fmt(r.complementarityResidual)});
    }
  }

  int finish(const std::string& preset) {
    const int code = notConverged_ ? kNotConverged : failures_.empty() ? kOk : kCheckFailed;
    nlohmann::ordered_json j;
    j["preset"] = preset;
    j["exit_code"] = code;
    j["failures"] = nlohmann::json::array();
    for (const Failure& f : failures_) j["failures"].push_back({{"check", f.check}, {"message", f.message}});
    open("failures.json") << j.dump(2) << "\n";
    return code;
  }

  static std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
  }

 private:
  Experiment exp_;
  RunContext ctx_;
  std::vector<Failure> failures_;
  bool notConverged_ = false;
};

void writeSolve(Run& run, const SolveReport& r) {
  run.field("u.field", r.u);
  run.field("Au.field", r.Au);
  auto os = run.open("solve.csv");
  os << "iterations[sweeps],residual[f-units],tol[f-units],omega[1],converged[bool]\n";
  os << r.iterations << "," << r.complementarityResidual << "," << r.tol << "," << r.omega << ","
     << (r.converged ? 1 : 0) << "\n";
}

int presetSolve(Run& run) {
  const ObstacleProblem prob = run.exp().problem();
  const SolveReport r = solveVI(prob, run.exp().solverOptions());
  writeSolve(run, r);
  run.solved(r, "solve");
  run.log("residual " + Run::fmt(r.complementarityResidual) + " after " + std::to_string(r.iterations) + " sweeps");
  return 0;
}

LSOptions lsOptions(const Run& run) {
  LSOptions o;
  if (run.config().has("run.eps")) o.eps = run.config().number("run.eps");
  if (run.config().has("run.collar")) o.collarRadius = run.config().number("run.collar");
  return o;
}

int presetLsAudit(Run& run) {
  const ObstacleProblem prob = run.exp().problem();
  const SolveReport r = solveVI(prob, run.exp().solverOptions());
  writeSolve(run, r);
  run.solved(r, "solve");
  const double tol = run.config().number("run.tol", 1e-6 * prob.scale());
  const LSReport ls = lewyStampacchiaCheck(prob, r.u, tol, lsOptions(run));
  run.open("ls.csv") << lsCsvHeader() << "\n" << toCsvRow(ls) << "\n";
  run.open("ls.txt") << summary(ls) << "\n";
  run.check(ls.lowerPass, "lower-bound", "f <= Au violated by " + Run::fmt(ls.lowerViolation));
  run.check(ls.upperPass, "upper-bound", "Au <= f + (A psi - f)^+ violated by " + Run::fmt(ls.upperViolation));
  return 0;
}

int presetEquationAudit(Run& run) {
  const ObstacleProblem prob = run.exp().problem();
  const SolveReport r = solveVI(prob, run.exp().solverOptions());
  writeSolve(run, r);
  run.solved(r, "solve");
  const BetaReconstruction b = reconstructBeta(prob, r.u, lsOptions(run));
  run.field("beta.field", b.beta);
  const double tol = run.config().number("run.tol", 1e-6 * prob.scale());
  auto os = run.open("equation.csv");
  os << "strict_interior_nodes[count],residual[f-units],tol[f-units]\n";
  os << b.strictInterior.count() << "," << b.strictInteriorResidual << "," << tol << "\n";
  run.check(b.strictInteriorResidual <= tol, "equation",
            "max |Au + beta - f| = " + Run::fmt(b.strictInteriorResidual) + " on " +
                std::to_string(b.strictInterior.count()) + " strict-interior nodes");
  return 0;
}

int presetChain(Run& run) {
  const Experiment& e = run.exp();
  const std::vector<double> levels = run.config().list("run.levels", {4, 8, 16, 32, 64});
  for (double n : levels) {
    if (!(n > 0.0)) throw ConfigError("run.levels", "truncation levels must be positive");
  }
  const double s = run.config().number("run.s", 1e-2);
  if (!(s > 0.0)) throw ConfigError("run.s", "must be positive");
  const auto count = run.config().integer("run.test_functions", 8);
  if (count < 1) throw ConfigError("run.test_functions", "must be >= 1");

  const ScalarField psi = e.psi();
  const ApproximationChain chain = runApproximationChain(e.spec(), e.f(), psi, levels, s, e.solverOptions());
  {
    auto csv = run.open("chain.csv");
    writeChainCsv(csv, chain);
  }
  for (const ChainLevel& l : chain.levels) run.solved(l.report, "level n=" + Run::fmt(l.n));

  for (std::size_t i = 2; i < chain.levels.size(); ++i) {
    const double prev = chain.levels[i - 1].inMeasure;
    const double cur = chain.levels[i].inMeasure;
    run.check(cur < prev, "in-measure-decreasing",
              "level " + Run::fmt(chain.levels[i].n) + ": " + Run::fmt(cur) + " vs " + Run::fmt(prev));
  }

  // Entropy certificate and truncation energy on the densest level.
  const ChainLevel& top = chain.levels.back();
  const ObstacleProblem prob(e.spec(), top.fn, psi);
  run.field("u_top.field", top.report.u);
  const std::vector<ScalarField> tests = makeTestSet(prob, top.report.u, static_cast<std::size_t>(count), run.seed());
  const std::vector<double> tLevels = run.config().list("run.t_levels", {0.01, 0.1, 1.0, 10.0});
  const auto certs = entropyCertify(prob, top.report.u, tests, tLevels);
  auto os = run.open("entropy.csv");
  os << "test_function[id],t[u-units],lhs[energy],rhs[energy],margin[energy],tol[energy]\n";
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const EntropyCertificate& c : certs) {
    const double tol = entropyTolerance(prob, c.t);
    os << c.testFunctionId << "," << c.t << "," << c.lhs << "," << c.rhs << "," << c.margin << "," << tol << "\n";
    ok = ok && c.margin >= -tol;
    worst = std::min(worst, c.margin);
  }
  run.check(ok, "entropy-inequality", "smallest margin " + Run::fmt(worst));

  auto te = run.open("truncation_energy.csv");
  te << "t[u-units],energy[energy]\n";
  for (const TruncationEnergyRow& row : truncationEnergy(prob, top.report.u, chain.tLevels)) {
    te << row.t << "," << row.energy << "\n";
  }
  return 0;
}

std::vector<std::pair<ScalarField, ScalarField>> dataPairs(Run& run) {
  const Experiment& e = run.exp();
  if (run.config().has("data2.expr")) return {{e.f(), e.field("data2")}};
  const long pairs = run.config().integer("run.pairs", 20);
  if (pairs < 1) throw ConfigError("run.pairs", "must be >= 1");
  std::mt19937_64 rng(run.seed());
  std::vector<std::pair<ScalarField, ScalarField>> out;
  for (long k = 0; k < pairs; ++k) {
    ScalarField a = randomSmoothData(e.grid(), rng);
    ScalarField b = randomSmoothData(e.grid(), rng);
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

int presetContraction(Run& run) {
  const Experiment& e = run.exp();
  const ScalarField psi = e.psi();
  const double tol = run.config().number("run.tol", 1e-8);
  auto os = run.open("contraction.csv");
  os << "pair[id]," << stabilityCsvHeader() << "\n";
  std::size_t id = 0;
  for (const auto& [f1, f2] : dataPairs(run)) {
    const ObstacleProblem p1(e.spec(), f1, psi);
    const ObstacleProblem p2(e.spec(), f2, psi);
    const StabilityReport r = contractionCheck(p1, p2, tol, e.solverOptions());
    os << id << "," << toCsvRow(r) << "\n";
    run.solved(r.solve1, "pair " + std::to_string(id) + " problem 1");
    run.solved(r.solve2, "pair " + std::to_string(id) + " problem 2");
    run.check(r.l1XiDistance <= r.l1DataDistance + tol, "contraction",
              "pair " + std::to_string(id) + ": " + Run::fmt(r.l1XiDistance) + " vs " + Run::fmt(r.l1DataDistance));
    ++id;
  }
  return 0;
}

int presetStability(Run& run) {
  const Experiment& e = run.exp();
  const ScalarField psi = e.psi();
  const double lambda = run.config().number("run.lambda");
  if (!(lambda > 0.0)) throw ConfigError("run.lambda", "must be positive");
  const double tol = run.config().number("run.tol", 0.0);
  const ObstacleProblem p1(e.spec(), e.f(), psi);
  const ObstacleProblem p2(e.spec(), e.field("data2"), psi);
  const StabilityReport r = stabilityCheck(p1, p2, RegionMask(e.grid(), true), lambda, tol, e.solverOptions());
  run.open("stability.csv") << stabilityCsvHeader() << "\n" << toCsvRow(r) << "\n";
  run.open("stability.txt") << summary(r) << "\n";
  if (r.refusal) {
    run.check(false, "non-degeneracy",
              "f" + std::to_string(r.refusal->problem) + " - A psi = " + Run::fmt(r.refusal->value) + " > -lambda at node " +
                  std::to_string(r.refusal->node));
    return 0;
  }
  run.solved(r.solve1, "problem 1");
  run.solved(r.solve2, "problem 2");
  run.check(r.contractionPass, "contraction", Run::fmt(r.l1XiDistance) + " vs " + Run::fmt(r.l1DataDistance));
  run.check(r.stabilityPass, "stability", "symdiff " + Run::fmt(r.symDiffMeasure) + " vs bound " + Run::fmt(r.bound));
  return 0;
}

int presetChiConvergence(Run& run) {
  const Experiment& e = run.exp();
  const ScalarField f = e.f();
  const ScalarField psi = e.psi();
  const std::vector<double> shifts = run.config().list("run.perturbations", {0.5, 0.25, 0.125, 0.0625});
  const double q = run.config().number("run.q", 2.0);
  const double eta = run.config().number("run.eta", 0.0);
  if (!(q >= 1.0)) throw ConfigError("run.q", "must be >= 1");
  if (!(eta >= 0.0)) throw ConfigError("run.eta", "must be >= 0");
  std::vector<DataPair> seq;
  for (double s : shifts) seq.push_back({f + ScalarField(e.grid(), s), psi});
  const ChiTable t = chiConvergence(e.spec(), {f, psi}, seq, q, eta, e.solverOptions());
  auto os = run.open("chi.csv");
  os << "level[id],perturbation[f-units],distance[area^(1/q)],symdiff[area],converged[bool]\n";
  for (const ChiLevel& l : t.levels) {
    os << l.index << "," << shifts[l.index] << "," << l.distance << "," << l.symDiffMeasure << ","
       << (l.converged ? 1 : 0) << "\n";
    if (!l.converged) run.check(false, "solver", "level " + std::to_string(l.index) + " did not converge");
  }
  run.check(t.hypothesesMet(), "non-degeneracy",
            std::to_string(t.degenerateNodes) + " interior nodes with |A psi - f| < eta");
  if (t.hypothesesMet() && t.levels.size() > 1) {
    run.check(t.levels.back().distance <= t.levels.front().distance, "chi-convergence",
              "distance " + Run::fmt(t.levels.front().distance) + " -> " + Run::fmt(t.levels.back().distance));
  }
  return 0;
}

int presetExponentReport(Run& run) {
  const ExponentField& p = run.exp().exponent();
  const ExponentReport r = validateExponent(p);
  nlohmann::ordered_json j;
  j["p_min"] = p.pMin();
  j["p_max"] = p.pMax();
  j["dimension"] = p.ambientDim();
  j["log_holder_constant"] = r.logHolderConstant;
  j["pairs_examined"] = r.pairsExamined;
  j["bounds_ok"] = r.boundsOk;
  j["q1_condition_ok"] = r.q1ConditionOk;
  j["q1_condition_lhs"] = r.q1ConditionLhs;
  j["sup_conjugate"] = r.supConjugate;
  run.open("exponent.json") << j.dump(2) << "\n";
  if (r.boundsOk) {
    const DerivedExponents d = derivedExponents(p);
    run.field("p_star.field", d.pStar);
    run.field("p_conj.field", d.pConj);
    run.field("q0.field", d.q0);
    run.field("q1.field", d.q1);
  }
  if (run.config().integer("run.require_hypotheses", 0) != 0) {
    run.check(r.boundsOk, "exponent-bounds", "p in [" + Run::fmt(p.pMin()) + ", " + Run::fmt(p.pMax()) + "]");
    run.check(r.q1ConditionOk, "q1-condition", "lhs " + Run::fmt(r.q1ConditionLhs) + " vs sup p' " + Run::fmt(r.supConjugate));
  }
  run.log("log-Hoelder constant " + Run::fmt(r.logHolderConstant));
  return 0;
}

int presetStructureAudit(Run& run) {
  const long samples = run.config().integer("run.samples", 10000);
  if (samples < 1) throw ConfigError("run.samples", "must be >= 1");
  const StructureAudit a = auditStructure(run.exp().spec(), static_cast<std::size_t>(samples), run.seed());
  auto os = run.open("structure.csv");
  os << "samples[count],coercivity_margin[1],growth_margin[1],monotonicity_margin[1],monotonicity_pairs[count]\n";
  os << a.samples << "," << a.coercivityMargin << "," << a.growthMargin << "," << a.monotonicityMargin << ","
     << a.monotonicityPairs << "\n";
  run.check(a.coercive(), "coercivity", "margin " + Run::fmt(a.coercivityMargin));
  run.check(a.bounded(), "growth", "margin " + Run::fmt(a.growthMargin));
  run.check(a.strictlyMonotone(), "monotonicity", "margin " + Run::fmt(a.monotonicityMargin));
  return 0;
}

int presetManufactured(Run& run) {
  const Experiment& e = run.exp();
  if (!(e.exponent().isConstant() && e.exponent().pMin() == 2.0)) {
    throw ConfigError("exponent", "manufactured preset needs constant p = 2");
  }
  const std::vector<double> ns = run.config().list("run.levels", {17, 33, 65});
  const double minOrder = run.config().number("run.min_order", 1.8);
  if (ns.size() < 2) throw ConfigError("run.levels", "need at least two grid sizes");
  auto os = run.open("manufactured.csv");
  os << "n[nodes],h[length],linf_error[u-units],order[1]\n";
  double prevErr = 0.0;
  double prevH = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] != std::floor(ns[i]) || ns[i] < 3) throw ConfigError("run.levels", "grid sizes must be integers >= 3");
    const int n = static_cast<int>(ns[i]);
    const Grid g = Grid::make(e.grid().dim(), {n, n}, {e.grid().extent(0), e.grid().extent(1)});
    const auto exact = [&](const Point& x) {
      double v = 1.0;
      for (int a = 0; a < g.dim(); ++a) v *= std::sin(std::numbers::pi * x[static_cast<std::size_t>(a)] / g.extent(a));
      return v;
    };
    double k2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) k2 += std::pow(std::numbers::pi / g.extent(a), 2);
    const ScalarField uStar = ScalarField::fromFunction(g, exact);
    const ScalarField f = ScalarField::fromFunction(g, [&](const Point& x) { return k2 * exact(x); });
    const FluxSpec spec = FluxSpec::pLaplacian(ExponentField::constant(g, 2.0), e.spec().delta());
    const SolveReport r = solveUnconstrained(spec, f, e.solverOptions());
    run.solved(r, "n=" + std::to_string(n));
    const double err = (r.u - uStar).maxAbs();
    const double h = g.maxSpacing();
    os << n << "," << h << "," << err << ",";
    if (i > 0) {
      const double order = std::log(prevErr / err) / std::log(prevH / h);
      os << order;
      run.check(order >= minOrder, "order", "n=" + std::to_string(n) + ": observed order " + Run::fmt(order));
    }
    os << "\n";
    prevErr = err;
    prevH = h;
  }
  return 0;
}

struct Preset {
  PresetInfo info;
  std::function<int(Run&)> body;
};

const std::vector<Preset>& table() {
  static const std::vector<Preset> t = {
      {{"solve", "solve the obstacle problem; writes u, Au and solve.csv"}, presetSolve},
      {{"ls-audit", "two-sided Lewy-Stampacchia bound away from free-boundary collars"}, presetLsAudit},
      {{"equation-audit", "reconstruct beta and check Au + beta = f in the strict interior"}, presetEquationAudit},
      {{"chain", "truncated-data chain: convergence in measure, integrability estimates, entropy certificates"},
       presetChain},
      {{"contraction", "L1 contraction of f - Au over data pairs"}, presetContraction},
      {{"stability", "coincidence-set stability under a non-degeneracy hypothesis"}, presetStability},
      {{"chi-convergence", "convergence of coincidence-set indicators under data perturbation"},
       presetChiConvergence},
      {{"exponent-report", "exponent bounds, log-Hoelder constant and derived exponents"}, presetExponentReport},
      {{"structure-audit", "sampled coercivity, growth and monotonicity of the flux"}, presetStructureAudit},
      {{"manufactured", "solver order on a smooth manufactured solution"}, presetManufactured},
  };
  return t;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
  static const std::vector<PresetInfo> list = [] {
    std::vector<PresetInfo> out;
    for (const Preset& p : table()) out.push_back(p.info);
    return out;
  }();
  return list;
}

int runPreset(const std::string& name, const Config& config, const RunContext& ctx) {
  const Preset* preset = nullptr;
  for (const Preset& p : table()) {
    if (p.info.name == name) preset = &p;
  }
  if (!preset) throw ConfigError("run.preset", "unknown preset `" + name + "`");
  std::filesystem::create_directories(ctx.outDir);
  std::optional<Run> run;
  try {
    run.emplace(config, ctx);
    preset->body(*run);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("run", e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError("exponent", e.what());
  }
  for (const std::string& k : run->config().unusedKeys()) {
    if (k != "run.preset" && k != "run.out") run->log("warning: unused key " + k);
  }
  run->open("config.txt") << config.canonical();
  return run->finish(name);
}

int runFromConfig(const std::string& preset, const Config& config, const std::optional<std::string>& outFlag,
                  const std::optional<std::uint64_t>& seed, std::ostream& log, std::ostream& err) {
  std::filesystem::path out = "pxo_out";
  if (outFlag) {
    out = *outFlag;
  } else if (config.has("run.out")) {
    out = config.text("run.out");
  } else if (const char* env = std::getenv("PXO_OUT_DIR"); env && *env) {
    out = env;
  }
  try {
    return runPreset(preset, config, {out, seed, &log});
  } catch (const ConfigError& e) {
    err << e.what() << "\n";
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    std::ofstream manifest(out / "failures.json");
    if (manifest) {
      nlohmann::ordered_json j;
      j["preset"] = preset;
      j["exit_code"] = static_cast<int>(kConfigError);
      j["failures"] = nlohmann::json::array({{{"check", "config"}, {"key", e.key()}, {"message", e.what()}}});
      manifest << j.dump(2) << "\n";
    }
    return kConfigError;
  }
}

}  // namespace pxo::cli
