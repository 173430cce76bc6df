// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cases.hpp"
#include "commands.hpp"
#include "thermodtn/dtn_assembly.hpp"
#include "thermodtn/oracle.hpp"
#include "thermodtn/reconstruction.hpp"
#include "thermodtn/symbol_calculus.hpp"

using namespace thermodtn;
using thermodtn::testing::RandomCase;
using C = Complex;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& e) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double x = std::log(t[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

MaterialJet<C> constant_material(int n, double lambda, double mu, double alpha, double beta, double omega) {
  auto sp = make_x_space(n, 4);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  return {k(lambda), k(mu), k(alpha), k(beta), 1.1, omega, 1.3, 0.8};
}

std::vector<std::vector<double>> covectors(int n, int count) {
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    const double r = 1.0 + 0.25 * i, th = 0.4 * i;
    if (n == 2)
      out.push_back({(i % 2 ? -1.0 : 1.0) * r});
    else
      out.push_back({r * std::cos(th), r * std::sin(th)});
  }
  return out;
}

const std::vector<RandomCase>& shared_cases() {
  static const std::vector<RandomCase> cases = thermodtn::testing::case_set(50, 4, 20240601u);
  return cases;
}

// Criteria 1 and 2 read the same depth-4 tables.
struct CaseTables {
  std::vector<SymbolTable<C>> tables;
  std::vector<SymbolContext<C>> contexts;
  double seconds = 0.0;
};

const CaseTables& shared_tables() {
  static const CaseTables t = [] {
    CaseTables out;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& c : shared_cases()) {
      out.contexts.push_back(make_context(c.metric, c.material, c.xi, 4));
      out.tables.push_back(build_table(out.contexts.back(), 4));
    }
    out.seconds = seconds_since(t0);
    return out;
  }();
  return t;
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& tabs = shared_tables();
  double worst = 0.0;
  std::string worst_case;
  for (std::size_t i = 0; i < tabs.tables.size(); ++i)
    for (int d = 2; d >= -2; --d) {
      const double r = grouped_residual(tabs.tables[i], d).relative();
      if (r > worst) {
        worst = r;
        worst_case = shared_cases()[i].label + " degree " + std::to_string(d);
      }
    }
  bool exact = true;
  for (const auto& xi : {std::vector<double>{3.0, 4.0}, std::vector<double>{5.0, 12.0}})
    for (long variant : {0L, 1L}) {
      const auto table = build_table(thermodtn::testing::rational_context(3, 4, 4, xi, variant), 4);
      for (int d = 2; d >= -2; --d) exact = exact && grouped_residual(table, d).value.is_zero();
    }
  {
    const auto table = build_table(thermodtn::testing::rational_context(2, 4, 4, {1.0}), 4);
    for (int d = 2; d >= -2; --d) exact = exact && grouped_residual(table, d).value.is_zero();
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = worst <= 1e-9 && exact && secs < 30.0;
  o.detail = "50 cases, worst relative residual " + fmt(worst) + " (" + worst_case + "), rational residuals " +
             (exact ? "exactly zero" : "NONZERO") + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion2() {
  const auto& tabs = shared_tables();
  double w1 = 0.0, w0 = 0.0;
  for (std::size_t i = 0; i < tabs.tables.size(); ++i) {
    const auto& t = tabs.tables[i];
    const auto& ctx = tabs.contexts[i];
    const Eigen::MatrixXcd p1 = t.p_at(1).value(), p0 = t.p_at(0).value();
    w1 = std::max(w1, (p1 - p1_closed_form(ctx).value()).cwiseAbs().maxCoeff() / p1.cwiseAbs().maxCoeff());
    w0 = std::max(w0, (p0 - p0_closed_form(ctx, t.q_at(0)).value()).cwiseAbs().maxCoeff() /
                          std::max(1.0, p0.cwiseAbs().maxCoeff()));
  }
  auto sp = make_x_space(2, 2);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  const MaterialJet<C> m{k(0.0), k(1.0), k(1.0), k(0.0), 1.0, 0.0, 1.0, 1.0};
  const auto spot = build_table(make_context(MetricJet<C>::euclidean(2, 2), m, {1.0}, 2), 1).p_at(1).value();
  const C I(0.0, 1.0);
  Eigen::Matrix3cd expected;
  expected << 4.0 / 3.0, -2.0 * I / 3.0, 0.0, 2.0 * I / 3.0, 4.0 / 3.0, 0.0, 0.0, 0.0, 1.0;
  const double spot_err = (spot - expected).cwiseAbs().maxCoeff();
  Outcome o;
  o.pass = w1 <= 1e-12 && w0 <= 1e-12 && spot_err <= 1e-12;
  o.detail = "p1 vs closed form " + fmt(w1) + ", p0 vs closed form " + fmt(w0) + ", spot value error " + fmt(spot_err);
  return o;
}

Outcome criterion3() {
  auto sp = make_x_space(2, 2);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  const MaterialJet<C> m{k(0.0), k(1.0), k(1.0), k(0.0), 1.0, 0.0, 1.0, 1.0};
  const auto ctx = make_context(MetricJet<C>::euclidean(2, 2), m, {1.0}, 1);
  const SylvesterSolver<C> solver(ctx);
  const auto E = SymbolMatrix<C>::identity(ctx.space, 3, 1);
  const auto xp = solver.solve(E, +1, false);
  const auto xm = solver.solve(E, -1, false);
  const C I(0.0, 1.0);
  Eigen::Matrix3cd expected;
  expected << 5.0 / 12.0, I / 6.0, 0.0, -I / 12.0, 17.0 / 24.0, 0.0, 0.0, 0.0, 0.5;
  const double x_err = (xp.value() - expected).cwiseAbs().maxCoeff();
  const double brute =
      (brute_force_sylvester(solver.lhs().value(), solver.rhs().value(), E.value()) - expected).cwiseAbs().maxCoeff();
  const double rp = solver.relative_residual(E, xp), rm = solver.relative_residual(E, xm);

  // the command line report must carry both variants
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "thermodtn_acceptance";
  fs::create_directories(dir);
  std::ofstream(dir / "spot.json") << R"({"dimension": 2, "metric": {"preset": "euclidean"},
    "material": {"lambda": 0, "mu": 1, "alpha": 1, "beta": 0}, "covectors": [[1.0]]})";
  cli::Options opt;
  opt.command = "sylvester-check";
  opt.manifest = (dir / "spot.json").string();
  opt.out = (dir / "sylvester.csv").string();
  std::ostringstream out, err;
  const int code = cli::run(opt, out, err);
  double cli_plus = -1.0, cli_minus = -1.0;
  std::ifstream csv(opt.out);
  for (std::string line; std::getline(csv, line);) {
    if (line.rfind("0,+,", 0) == 0) cli_plus = std::stod(line.substr(4));
    if (line.rfind("0,-,", 0) == 0) cli_minus = std::stod(line.substr(4));
  }
  Outcome o;
  o.pass = x_err <= 1e-12 && rp <= 1e-12 && rm >= 0.1 && brute <= 1e-12 && code == 0 && cli_plus >= 0.0 &&
           cli_plus <= 1e-12 && cli_minus >= 0.1;
  o.detail = "plus residual " + fmt(rp) + ", minus residual " + fmt(rm) + ", |X - expected| " + fmt(x_err) +
             ", Kronecker solve " + fmt(brute) + ", sylvester-check reports +" + fmt(cli_plus) + " / -" + fmt(cli_minus);
  return o;
}

Outcome criterion4() {
  double worst = 0.0;
  for (const auto& c : thermodtn::testing::case_set(100, 2, 777u)) {
    const auto ctx = make_context(c.metric, c.material, c.xi, 2);
    const auto f = structure_matrices(ctx);
    const auto ops = operator_symbols(ctx);
    const auto lhs = q1(ctx, ops) - ops.b1;
    const auto rhs = ctx.norm() * SymbolMatrix<C>::identity(ctx.space, ctx.size(), 1) + f.kappa * f.F2;
    const double scale = std::max(1.0, lhs.max_abs());
    worst = std::max({worst, (f.F1 * f.F1).max_abs() / scale, (f.F2 * f.F2).max_abs() / scale,
                      (lhs - rhs).max_abs() / scale});
  }
  bool exact = true;
  for (const auto& xi : {std::vector<double>{3.0, 4.0}, std::vector<double>{-8.0, 6.0}, std::vector<double>{5.0, 12.0}}) {
    const auto ctx = thermodtn::testing::rational_context(3, 2, 2, xi);
    const auto f = structure_matrices(ctx);
    const auto ops = operator_symbols(ctx);
    const auto rhs = ctx.norm() * SymbolMatrix<QComplex>::identity(ctx.space, ctx.size(), 1) + f.kappa * f.F2;
    exact = exact && (f.F1 * f.F1).is_zero() && (f.F2 * f.F2).is_zero() && (q1(ctx, ops) - ops.b1 - rhs).is_zero();
  }
  Outcome o;
  o.pass = worst <= 1e-12 && exact;
  o.detail = "100 cases, worst " + fmt(worst) + ", rational identities " + (exact ? "exact" : "NOT exact");
  return o;
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  // Uncoupled blocks expand in odd powers of 1/t only, so every other p_j
  // vanishes there and the error may drop faster than t^-M; those cases are
  // held to "at least rate M", the coupled ones to -M +- 0.3.
  struct Case {
    std::string name;
    MaterialJet<C> m;
    std::vector<double> dir;
    bool generic;
  };
  const std::vector<Case> cases{
      {"n=2 coupled omega=0.2 beta=1", constant_material(2, 0.7, 1.3, 0.9, 1.0, 0.2), {1.0}, true},
      {"n=3 coupled omega=0.2 beta=1", constant_material(3, 0.4, 1.1, 1.5, 1.0, 0.2), {0.6, -0.8}, true},
      {"n=2 coupled omega=0.5 beta=-0.6", constant_material(2, 0.2, 0.9, 1.4, -0.6, 0.5), {-1.0}, true},
      {"n=2 uncoupled omega=0.5", constant_material(2, 0.7, 1.3, 0.9, 0.0, 0.5), {1.0}, false},
      {"n=2 static elastic", constant_material(2, 0.7, 1.3, 0.9, 0.0, 0.0), {1.0}, false},
  };
  const std::vector<double> ts{8, 16, 32, 64};
  bool pass = true;
  std::string detail;
  for (const auto& c : cases) {
    const int n = static_cast<int>(c.dir.size()) + 1;
    const auto g = MetricJet<C>::euclidean(n, 4);
    detail += c.name + (c.generic ? " slopes" : " slopes (rate >= M)");
    for (int M = 1; M <= 3; ++M) {
      std::vector<double> err;
      double scale = 0.0;
      for (double t : ts) {
        std::vector<double> xi = c.dir;
        for (auto& v : xi) v *= t;
        const auto table = build_table(make_context(g, c.m, xi, M), M);
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n + 1, n + 1);
        for (int k = 0; k <= M; ++k) sum += table.p[static_cast<std::size_t>(k)].value();
        const Eigen::MatrixXcd exact = halfspace_multiplier(c.m, xi).lambda;
        err.push_back((exact - sum).norm());
        scale = std::max(scale, exact.norm());
      }
      const double worst = *std::max_element(err.begin(), err.end());
      if (!c.generic && worst <= 1e-12 * scale) {
        detail += " exact";
        continue;
      }
      const double s = loglog_slope(ts, err);
      pass = pass && (c.generic ? std::abs(s + M) <= 0.3 : s <= -M + 0.3);
      detail += " " + fmt(s);
    }
    detail += "; ";
  }
  double thermal = 0.0;
  for (const auto& xi : {std::vector<double>{0.5}, std::vector<double>{3.0}, std::vector<double>{40.0}}) {
    const auto h = halfspace_multiplier(constant_material(2, 0.3, 1.2, 1.7, 0.0, 0.0), xi);
    thermal = std::max(thermal, std::abs(h.lambda(2, 2) - C(1.7 * std::abs(xi[0]))));
  }
  const auto h3 = halfspace_multiplier(constant_material(3, 0.3, 1.2, 1.7, 0.0, 0.0), {1.2, 1.6});
  thermal = std::max(thermal, std::abs(h3.lambda(3, 3) - C(1.7 * 2.0)));
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = pass && thermal <= 1e-10 && secs < 60.0;
  o.detail = detail + "thermal entry error " + fmt(thermal) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion6() {
  bool pass = true;
  double worst_excess = -1e300, lo = 1e300, hi = 0.0;
  struct Case {
    MaterialJet<C> m;
    std::vector<double> xi;
  };
  const std::vector<Case> cases{
      {constant_material(2, 0.4, 1.1, 0.8, 0.0, 0.0), {0.5}},
      {constant_material(2, 0.4, 1.1, 0.8, 0.7, 0.3), {1.0}},
      {constant_material(2, 0.7, 1.3, 0.9, 1.0, 0.2), {4.0}},
      {constant_material(3, 0.4, 1.1, 1.5, 1.0, 0.2), {1.2, -1.6}},
  };
  for (const auto& c : cases) {
    const auto h = halfspace_multiplier(c.m, c.xi);
    const auto s = slab_dtn(c.m, c.xi);
    const double bound = 1e-8 + 5.0 * s.decay;
    const double err = (s.lambda - h.lambda).cwiseAbs().maxCoeff();
    worst_excess = std::max(worst_excess, err - bound);
    lo = std::min(lo, s.richardson_ratio);
    hi = std::max(hi, s.richardson_ratio);
    pass = pass && err <= bound && s.richardson_ratio >= 3.0 && s.richardson_ratio <= 5.0;
  }
  Outcome o;
  o.pass = pass;
  o.detail = "4 cases, worst (error - bound) " + fmt(worst_excess) + ", Richardson ratios in [" + fmt(lo) + ", " +
             fmt(hi) + "]";
  return o;
}

// Random x_n-polynomial coefficients of degree <= 3 with omega != 0 and beta
// away from zero, the regime where every derivative is determined.
MaterialJet<C> round_trip_material(const SpacePtr& sp, int n, std::mt19937& rng) {
  using thermodtn::testing::random_jet;
  using thermodtn::testing::uniform;
  const double mu = uniform(rng, 0.8, 1.8);
  const double beta = (uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(rng, 0.6, 1.4);
  MaterialJet<C> m;
  m.lambda = random_jet(sp, n, uniform(rng, -0.3 * mu, 1.5), 0.3, 3, rng, true);
  m.mu = random_jet(sp, n, mu, 0.3, 3, rng, true);
  m.alpha = random_jet(sp, n, uniform(rng, 0.6, 1.6), 0.3, 3, rng, true);
  m.beta = random_jet(sp, n, beta, 0.3, 3, rng, true);
  m.rho = uniform(rng, 0.8, 1.2);
  m.omega = uniform(rng, 0.2, 0.5);
  m.theta0 = uniform(rng, 0.8, 1.5);
  m.c_heat = uniform(rng, 0.5, 1.5);
  return m;
}

struct RoundTripCase {
  std::string label;
  ReconstructionProblem problem;
  MaterialJet<C> material;
};

const std::vector<RoundTripCase>& round_trip_cases() {
  static const std::vector<RoundTripCase> cases = [] {
    std::mt19937 rng(4242u);
    std::vector<RoundTripCase> out;
    for (int n : {2, 3})
      for (bool warped : {false, true}) {
        auto sp = make_x_space(n, 5);
        const auto g = thermodtn::testing::random_metric(sp, n, warped, 5, rng);
        const auto m = round_trip_material(sp, n, rng);
        out.push_back({"n=" + std::to_string(n) + (warped ? " warped" : " flat"), make_problem(g, m, covectors(n, 16), 4), m});
      }
    return out;
  }();
  return cases;
}

Outcome criterion7() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, closed = 0.0;
  std::string where;
  bool ok = true;
  for (const auto& c : round_trip_cases()) {
    try {
      const auto jet = layer_strip(c.problem, 4);
      for (const auto& e : compare_jets(jet, jet_from_material(c.material, 4)))
        if (e.order <= 3 && e.rel_err > worst) {
          worst = e.rel_err;
          where = c.label + " d^" + std::to_string(e.order) + " " + coefficient_name(e.coefficient);
        }
      const auto cf = recover_normal_derivative_thermal(c.problem, jet);
      closed = std::max({closed, std::abs(cf.dalpha - jet.alpha[1]), std::abs(cf.dbeta - jet.beta[1])});
    } catch (const Error& e) {
      ok = false;
      where = c.label + ": " + e.what();
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = ok && worst <= 1e-6 && closed <= 1e-8 && secs < 120.0;
  o.detail = "4 cases (flat/warped, n=2/3), worst relative error " + fmt(worst) + " at " + where +
             ", closed form vs affine " + fmt(closed) + ", " + fmt(secs) + " s";
  return o;
}

Outcome criterion8() {
  double worst = 0.0;
  int checked = 0;
  for (const auto& c : round_trip_cases()) {
    const auto truth = jet_from_material(c.material, 4);
    ReconstructionProblem pr = c.problem;
    pr.samples.resize(3);
    for (int s = 1; s <= 4; ++s)
      for (const auto& u : layer_unknowns(s)) {
        const auto& d = truth.of(u.coefficient);
        const double v0 = static_cast<std::size_t>(u.order) < d.size() ? d[static_cast<std::size_t>(u.order)] : 0.0;
        worst = std::max(worst, affinity_second_difference(pr, truth, s, u, v0, 0.5));
        ++checked;
      }
  }
  Outcome o;
  o.pass = worst <= 1e-11;
  o.detail = std::to_string(checked) + " (stage, unknown) pairs, worst second difference " + fmt(worst);
  return o;
}

struct SlabPipeline {
  Order0 order0;
  RecoveredJet jet;
  std::string failure;
};

SlabPipeline slab_pipeline(double omega) {
  auto sp = make_x_space(2, 4);
  const auto xn = TaylorJet<C>::x_coordinate(sp, 1);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  const MaterialJet<C> m{k(0.5), k(1.0), k(1.0) + xn * C(0.5), k(1.0), 1.0, omega, 1.0, 1.0};
  std::vector<DtnSample> samples;
  for (double t : {8.0, 11.0, 16.0, 22.0, 32.0, 45.0, 64.0, 90.0, 128.0}) samples.push_back(slab_dtn(m, {t}));
  const auto fit = fit_symbols_from_samples(samples, {1.0}, 4);
  const ReconstructionProblem pr{MetricJet<C>::euclidean(2, 4), m.rho, m.omega, m.theta0, m.c_heat, {fit.observation()}};
  SlabPipeline out;
  out.order0 = recover_order0(pr);
  try {
    LayerOptions opt;
    opt.residual_tolerance = 1e-2;
    out.jet = layer_strip(pr, 2, opt);
  } catch (const Error& e) {
    out.failure = e.what();
  }
  return out;
}

Outcome criterion9() {
  const auto r = slab_pipeline(0.0);
  const double e0 = std::max({std::abs(r.order0.lambda - 0.5) / 0.5, std::abs(r.order0.mu - 1.0),
                              std::abs(r.order0.alpha - 1.0), std::abs(r.order0.beta - 1.0)});
  Outcome o;
  std::string d1;
  bool first_ok = false;
  if (r.failure.empty()) {
    const double ea = std::abs(r.jet.alpha[1] - 0.5) / 1.0;
    first_ok = ea <= 1e-2;
    d1 = "d alpha/dx_n = " + fmt(r.jet.alpha[1]) + " (true 0.5)";
  } else {
    d1 = "first-derivative recovery failed: " + r.failure;
  }
  o.pass = e0 <= 1e-2 && first_ok;
  o.detail = "omega=0, order-0 relative error " + fmt(e0) + ", " + d1;
  return o;
}

std::string criterion9_supplement() {
  const auto r = slab_pipeline(0.3);
  if (!r.failure.empty()) return "omega=0.3 run failed: " + r.failure;
  return "omega=0.3 run of the same pipeline: d alpha/dx_n = " + fmt(r.jet.alpha[1]) + " (true 0.5), relative error " +
         fmt(std::abs(r.jet.alpha[1] - 0.5));
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %zu: %s  %s\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    if (i + 1 == 9) {
      try {
        std::printf("criterion 9 (informational, not scored): %s\n", criterion9_supplement().c_str());
      } catch (const std::exception& e) {
        std::printf("criterion 9 (informational, not scored): exception: %s\n", e.what());
      }
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
