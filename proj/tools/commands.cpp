#include "commands.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "manifest.hpp"
#include "thermodtn/dtn_assembly.hpp"
#include "thermodtn/oracle.hpp"
#include "thermodtn/parallel.hpp"
#include "thermodtn/reconstruction.hpp"
#include "thermodtn/symbol_calculus.hpp"

namespace thermodtn::cli {

namespace {

/// Thrown when a computed quantity misses its tolerance; maps to exit code 2.
struct ToleranceMiss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string header(const std::map<std::string, double>& tol, const std::vector<std::string>& used) {
  std::string h;
  for (const auto& name : used) h += "# tolerance_" + name + "=" + format_double(tol.at(name)) + "\n";
  return h;
}

int depth_of(const Manifest& m, const Options& opt) { return opt.depth ? *opt.depth : m.depth; }

std::string mode_of(const Manifest& m, const Options& opt) {
  const std::string mode = opt.mode ? *opt.mode : m.mode;
  if (mode != "float" && mode != "rational") throw Error(ErrorCode::ManifestError, "--mode must be float or rational");
  return mode;
}

std::vector<std::vector<double>> default_covectors(int n) {
  std::vector<std::vector<double>> cov;
  for (int i = 0; i < 16; ++i) {
    const double r = 1.0 + 0.25 * i, th = 0.4 * i;
    if (n == 2)
      cov.push_back({(i % 2 ? -1.0 : 1.0) * r});
    else {
      std::vector<double> xi(static_cast<std::size_t>(n - 1), 0.0);
      xi[0] = r * std::cos(th);
      xi[1] = r * std::sin(th);
      for (int k = 2; k < n - 1; ++k) xi[static_cast<std::size_t>(k)] = 0.3 * r * std::cos(th * (k + 1));
      cov.push_back(xi);
    }
  }
  return cov;
}

/// Manifest covectors, or the default fan when the manifest lists none.
std::vector<std::vector<double>> manifest_covectors(const Manifest& m) {
  return m.covectors.empty() ? default_covectors(m.dimension) : m.covectors;
}

template <class S>
SymbolTable<S> table_at(const Manifest& m, const std::vector<double>& xi, int depth) {
  const auto ctx = make_context(build_metric<S>(m), build_material<S>(m), xi, m.xi_order);
  return build_table(ctx, depth);
}

template <class S>
json symbols_json(const Manifest& m, int depth, int jobs) {
  const auto cov = manifest_covectors(m);
  std::vector<json> samples(cov.size());
  parallel_for(static_cast<int>(cov.size()), jobs, [&](int i) {
    const auto table = table_at<S>(m, cov[static_cast<std::size_t>(i)], depth);
    json p = json::array(), q = json::array();
    for (int k = 0; k <= depth; ++k) {
      p.push_back({{"degree", 1 - k}, {"value", matrix_json(table.p[static_cast<std::size_t>(k)].value())}});
      q.push_back({{"degree", 1 - k}, {"value", matrix_json(table.q[static_cast<std::size_t>(k)].value())}});
    }
    samples[static_cast<std::size_t>(i)] = {{"xi", cov[static_cast<std::size_t>(i)]}, {"p", p}, {"q", q}};
  });
  return samples;
}

int cmd_symbols(const Manifest& m, const Options& opt, std::ostream& out) {
  const int depth = depth_of(m, opt);
  const std::string mode = mode_of(m, opt);
  json doc;
  doc["dimension"] = m.dimension;
  doc["depth"] = depth;
  doc["mode"] = mode;
  doc["manifest"] = m.source;
  doc["samples"] = mode == "rational" ? symbols_json<QComplex>(m, depth, opt.jobs) : symbols_json<Complex>(m, depth, opt.jobs);
  write_text_file(opt.out, dump_json(doc));
  out << "symbols: p_1 .. p_" << 1 - depth << " at " << m.covectors.size() << " covectors (" << mode << ") -> "
      << opt.out << "\n";
  return Ok;
}

template <class S>
std::vector<double> residuals(const Manifest& m, int depth, int jobs) {
  const int lowest = 2 - depth;
  const auto cov = manifest_covectors(m);
  std::vector<std::vector<double>> per(cov.size());
  parallel_for(static_cast<int>(cov.size()), jobs, [&](int i) {
    const auto table = table_at<S>(m, cov[static_cast<std::size_t>(i)], depth);
    for (int d = 2; d >= lowest; --d) per[static_cast<std::size_t>(i)].push_back(grouped_residual(table, d).relative());
  });
  std::vector<double> worst(static_cast<std::size_t>(3 - lowest), 0.0);
  for (const auto& r : per)
    for (std::size_t k = 0; k < r.size(); ++k) worst[k] = std::max(worst[k], r[k]);
  return worst;
}

int cmd_residual(const Manifest& m, const Options& opt, std::ostream& out) {
  const int depth = depth_of(m, opt);
  if (depth < 1) throw Error(ErrorCode::ManifestError, "depth: residuals need depth >= 1");
  const std::string mode = mode_of(m, opt);
  const auto worst = mode == "rational" ? residuals<QComplex>(m, depth, opt.jobs) : residuals<Complex>(m, depth, opt.jobs);
  const double tol = m.tolerance("residual");
  std::string csv = header(m.tolerances, {"residual"}) + "degree,norm\n";
  double max_r = 0.0;
  for (std::size_t k = 0; k < worst.size(); ++k) {
    csv += std::to_string(2 - static_cast<int>(k)) + "," + format_double(worst[k]) + "\n";
    max_r = std::max(max_r, worst[k]);
  }
  write_text_file(opt.out, csv);
  out << "residual: worst relative " << format_double(max_r) << " (tolerance " << format_double(tol) << ", " << mode
      << ")\n";
  if (!(max_r <= tol)) throw ToleranceMiss("grouped residual " + format_double(max_r) + " exceeds residual tolerance");
  return Ok;
}

int cmd_sylvester(const Manifest& m, const Options& opt, std::ostream& out) {
  const auto cov = manifest_covectors(m);
  struct Row {
    double plus, minus, brute;
  };
  std::vector<Row> rows(cov.size());
  parallel_for(static_cast<int>(cov.size()), opt.jobs, [&](int i) {
    const auto ctx = make_context(build_metric<Complex>(m), build_material<Complex>(m), cov[static_cast<std::size_t>(i)], 1);
    const SylvesterSolver<Complex> solver(ctx);
    const auto E = SymbolMatrix<Complex>::identity(ctx.space, ctx.size(), 1);
    const auto xp = solver.solve(E, +1, false);
    const auto xm = solver.solve(E, -1, false);
    const Eigen::MatrixXcd brute = brute_force_sylvester(solver.lhs().value(), solver.rhs().value(), E.value());
    rows[static_cast<std::size_t>(i)] = {solver.relative_residual(E, xp), solver.relative_residual(E, xm),
                                         (xp.value() - brute).cwiseAbs().maxCoeff()};
  });
  const double tol = m.tolerance("sylvester");
  std::string csv = header(m.tolerances, {"sylvester"}) + "case-id,sign,residual\n";
  double worst = 0.0, brute = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += std::to_string(i) + ",+," + format_double(rows[i].plus) + "\n";
    csv += std::to_string(i) + ",-," + format_double(rows[i].minus) + "\n";
    worst = std::max(worst, rows[i].plus);
    brute = std::max(brute, rows[i].brute);
  }
  write_text_file(opt.out, csv);
  out << "sylvester-check: plus-sign residual " << format_double(worst) << ", distance to Kronecker solve "
      << format_double(brute) << " (tolerance " << format_double(tol) << ")\n";
  if (!(worst <= tol)) throw ToleranceMiss("plus-sign Sylvester residual exceeds tolerance");
  return Ok;
}

int cmd_oracle(const Manifest& m, const Options& opt, std::ostream& out) {
  const int depth = depth_of(m, opt);
  const auto g = build_metric<Complex>(m);
  const auto mat = build_material<Complex>(m);
  if (!metric_flat(g)) throw Error(ErrorCode::ManifestError, "metric: oracle-compare needs the euclidean metric");
  const bool constant = material_constant(mat);
  if (!material_normal_only(mat))
    throw Error(ErrorCode::ManifestError, "material: oracle-compare needs coefficients that depend on x_n only");
  std::vector<double> dir = m.direction;
  if (dir.empty()) dir = manifest_covectors(m).front();
  double norm = 0.0;
  for (double v : dir) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : dir) v /= norm;
  std::vector<double> ladder = opt.ladder;
  if (ladder.empty() && !m.direction.empty())
    for (const auto& xi : m.covectors) {
      double r = 0.0;
      for (double v : xi) r += v * v;
      ladder.push_back(std::sqrt(r));
    }
  if (ladder.size() < 2) throw Error(ErrorCode::ManifestError, "ladder: needs at least two magnitudes");

  struct Result {
    Eigen::MatrixXcd oracle, sum;
  };
  std::vector<Result> res(ladder.size());
  parallel_for(static_cast<int>(ladder.size()), opt.jobs, [&](int i) {
    std::vector<double> xi;
    for (double v : dir) xi.push_back(v * ladder[static_cast<std::size_t>(i)]);
    const DtnSample s = constant ? halfspace_multiplier(mat, xi) : slab_dtn(mat, xi);
    const auto table = build_table(make_context(g, mat, xi, m.xi_order), depth);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(s.lambda.rows(), s.lambda.cols());
    for (const auto& p : table.p) sum += p.value();
    res[static_cast<std::size_t>(i)] = {s.lambda, sum};
  });

  std::string csv = header(m.tolerances, {"slope"});
  csv += "# oracle=" + std::string(constant ? "halfspace" : "slab") + "\n";
  csv += "# expected_slope=" + format_double(-depth) + "\n";
  // least-squares slope of log |error| against log t
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ladder.size());
  std::string body = "magnitude,entry,oracle_re,oracle_im,symbolsum_re,symbolsum_im,abs_err\n";
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    const auto& r = res[i];
    for (Eigen::Index a = 0; a < r.oracle.rows(); ++a)
      for (Eigen::Index b = 0; b < r.oracle.cols(); ++b)
        body += format_double(ladder[i]) + "," + std::to_string(a + 1) + ":" + std::to_string(b + 1) + "," +
                format_double(r.oracle(a, b).real()) + "," + format_double(r.oracle(a, b).imag()) + "," +
                format_double(r.sum(a, b).real()) + "," + format_double(r.sum(a, b).imag()) + "," +
                format_double(std::abs(r.oracle(a, b) - r.sum(a, b))) + "\n";
    const double x = std::log(ladder[i]), y = std::log((r.oracle - r.sum).norm());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  csv += "# measured_slope=" + format_double(slope) + "\n" + body;
  write_text_file(opt.out, csv);
  const double tol = m.tolerance("slope");
  out << "oracle-compare: log-log slope " << format_double(slope) << ", expected " << -depth << " +- "
      << format_double(tol) << "\n";
  if (!(std::abs(slope + depth) <= tol)) throw ToleranceMiss("error slope outside tolerance");
  return Ok;
}

ReconstructionProblem problem_from_manifest(const Manifest& m) {
  const auto mat = build_material<Complex>(m);
  return {build_metric<Complex>(m), mat.rho, mat.omega, mat.theta0, mat.c_heat, {}};
}

json jet_json(const RecoveredJet& jet) {
  json j;
  j["lambda"] = jet.lambda;
  j["mu"] = jet.mu;
  j["alpha"] = jet.alpha;
  j["beta"] = jet.beta;
  json layers = json::array();
  for (const auto& l : jet.layers) {
    json u = json::array();
    for (const auto& x : l.unknowns) u.push_back(std::string(coefficient_name(x.coefficient)) + "^(" + std::to_string(x.order) + ")");
    layers.push_back({{"stage", l.stage}, {"unknowns", u}, {"rows", l.rows}, {"condition", l.condition},
                      {"residual", l.residual}});
  }
  j["layers"] = layers;
  return j;
}

/// Cross-check of the affine first derivatives against the thermal closed form.
/// Returns the discrepancy, or a negative value when the closed form does not apply.
double thermal_check(const ReconstructionProblem& pr, const RecoveredJet& jet, json& doc) {
  if (jet.lambda.size() < 3 || jet.alpha.size() < 2 || jet.beta.size() < 2) return -1.0;
  if (std::abs(pr.omega) == 0.0 || jet.beta[0] == 0.0) return -1.0;
  const auto cf = recover_normal_derivative_thermal(pr, jet);
  doc["thermal_closed_form"] = {{"dalpha", cf.dalpha},
                                {"dbeta", cf.dbeta},
                                {"dalpha_without_i_omega_theta0", complex_json(cf.printed_dalpha)}};
  const double scale_a = std::max(std::abs(jet.alpha[1]), std::abs(jet.alpha[0]));
  const double scale_b = std::max(std::abs(jet.beta[1]), std::abs(jet.beta[0]));
  return std::max(std::abs(cf.dalpha - jet.alpha[1]) / scale_a, std::abs(cf.dbeta - jet.beta[1]) / scale_b);
}

int cmd_reconstruct(const Options& opt, std::ostream& out) {
  if (opt.table.empty()) throw Error(ErrorCode::ManifestError, "--table: missing");
  const json t = read_json_file(opt.table);
  if (!t.contains("manifest") || !t.contains("samples") || !t.contains("depth"))
    throw Error(ErrorCode::ManifestError, "table: needs manifest, depth and samples");
  const Manifest m = parse_manifest(t.at("manifest"));
  int depth = t.at("depth").get<int>();
  if (opt.depth) {
    if (*opt.depth > depth) throw Error(ErrorCode::ManifestError, "--depth: exceeds the table depth");
    depth = *opt.depth;
  }
  ReconstructionProblem pr = problem_from_manifest(m);
  for (const auto& s : t.at("samples")) {
    SymbolObservation o;
    o.xi = s.at("xi").get<std::vector<double>>();
    for (const auto& p : s.at("p")) o.p.push_back(matrix_from_json(p.at("value")));
    pr.samples.push_back(o);
  }
  LayerOptions lo;
  lo.residual_tolerance = m.tolerance("layer_residual");
  lo.jobs = opt.jobs;
  const RecoveredJet jet = layer_strip(pr, depth, lo);
  json doc = jet_json(jet);
  doc["depth"] = depth;
  const double d = thermal_check(pr, jet, doc);
  write_text_file(opt.out, dump_json(doc));
  out << "reconstruct: lambda, mu to order " << jet.lambda.size() - 1 << ", alpha, beta to order "
      << jet.beta.size() - 1;
  if (d >= 0.0) out << "; closed-form discrepancy " << format_double(d);
  out << " -> " << opt.out << "\n";
  if (d >= 0.0 && !(d <= m.tolerance("closed_form")))
    throw ToleranceMiss("thermal closed form disagrees with the affine solve");
  return Ok;
}

int cmd_round_trip(const Manifest& m, const Options& opt, std::ostream& out) {
  const int depth = depth_of(m, opt);
  const auto g = build_metric<Complex>(m);
  const auto mat = build_material<Complex>(m);
  if (!material_normal_only(mat))
    throw Error(ErrorCode::ManifestError, "material: round-trip needs coefficients that depend on x_n only");
  const auto cov = manifest_covectors(m);
  ReconstructionProblem pr = problem_from_manifest(m);
  pr.samples.resize(cov.size());
  parallel_for(static_cast<int>(cov.size()), opt.jobs, [&](int i) {
    const auto& xi = cov[static_cast<std::size_t>(i)];
    pr.samples[static_cast<std::size_t>(i)] = {xi, forward_symbols(g, mat, xi, depth)};
  });
  LayerOptions lo;
  lo.residual_tolerance = m.tolerance("layer_residual");
  lo.jobs = opt.jobs;
  const RecoveredJet jet = layer_strip(pr, depth, lo);
  const auto errors = compare_jets(jet, jet_from_material(mat, depth));
  json doc;
  const double d = thermal_check(pr, jet, doc);

  const double tol = m.tolerance("round_trip");
  std::string csv = header(m.tolerances, {"round_trip", "closed_form"});
  if (d >= 0.0) csv += "# closed_form_discrepancy=" + format_double(d) + "\n";
  csv += "order,coefficient,abs_err,rel_err\n";
  double worst = 0.0;
  for (const auto& e : errors) {
    csv += std::to_string(e.order) + "," + coefficient_name(e.coefficient) + "," + format_double(e.abs_err) + "," +
           format_double(e.rel_err) + "\n";
    worst = std::max(worst, e.rel_err);
  }
  write_text_file(opt.out, csv);
  out << "round-trip: worst rel_err " << format_double(worst) << " (tolerance " << format_double(tol) << ")\n";
  if (!(worst <= tol)) throw ToleranceMiss("round-trip error exceeds tolerance");
  if (d >= 0.0 && !(d <= m.tolerance("closed_form")))
    throw ToleranceMiss("thermal closed form disagrees with the affine solve");
  return Ok;
}

}  // namespace

int run(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.out.empty()) throw Error(ErrorCode::ManifestError, "--out: missing");
    if (opt.jobs < 1) throw Error(ErrorCode::ManifestError, "--jobs: must be at least 1");
    if (opt.command == "reconstruct") return cmd_reconstruct(opt, out);
    if (opt.manifest.empty()) throw Error(ErrorCode::ManifestError, "--manifest: missing");
    const Manifest m = load_manifest(opt.manifest);
    if (opt.command == "symbols") return cmd_symbols(m, opt, out);
    if (opt.command == "residual") return cmd_residual(m, opt, out);
    if (opt.command == "sylvester-check") return cmd_sylvester(m, opt, out);
    if (opt.command == "oracle-compare") return cmd_oracle(m, opt, out);
    if (opt.command == "round-trip") return cmd_round_trip(m, opt, out);
    throw Error(ErrorCode::ManifestError, "unknown command \"" + opt.command + "\"");
  } catch (const ToleranceMiss& e) {
    err << "tolerance failure: " << e.what() << "\n";
    return ToleranceFailure;
  } catch (const Error& e) {
    err << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::IoError: return IoFailure;
      case ErrorCode::ResidualTooLarge:
      case ErrorCode::ToleranceExceeded:
      case ErrorCode::NotConverged: return ToleranceFailure;
      default: return ValidationFailure;
    }
  }
}

}  // namespace thermodtn::cli
