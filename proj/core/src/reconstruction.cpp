#include "thermodtn/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thermodtn/dtn_assembly.hpp"
#include "thermodtn/parallel.hpp"

namespace thermodtn {

namespace {

Eigen::MatrixXd boundary_metric(const MetricJet<Complex>& g) {
  const int t = g.n - 1;
  Eigen::MatrixXd m(t, t);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) m(a, b) = g(a, b).value().real();
  return m;
}

void check_close(double got, double want, double tol, const std::string& what) {
  if (std::abs(got - want) > tol * std::max(1.0, std::abs(want)))
    throw Error(ErrorCode::InconsistentSymbol, what + " is " + std::to_string(got) + ", expected " +
                                                   std::to_string(want));
}

}  // namespace

Order0 recover_order0(const Eigen::MatrixXcd& p1, const Eigen::MatrixXcd& p0, const std::vector<double>& xi,
                      const Eigen::MatrixXd& g, double tol) {
  const int t = static_cast<int>(xi.size());
  const int n = t + 1, N = n - 1, T = n;
  if (p1.rows() != n + 1 || p1.cols() != n + 1 || p0.rows() != n + 1 || g.rows() != t)
    throw Error(ErrorCode::IncompatibleJets, "symbol sizes do not match the covector");
  const Eigen::VectorXd low = Eigen::Map<const Eigen::VectorXd>(xi.data(), t);
  const Eigen::VectorXd up = g.ldlt().solve(low);
  const double s2 = low.dot(up);
  if (!(s2 > 0.0)) throw Error(ErrorCode::ZeroCovector, "xi' must be nonzero");
  const double s = std::sqrt(s2);

  Order0 r;
  r.alpha = p1(T, T).real() / s;
  const double a = p1(N, N).real() / s;  // 2 mu (lambda + 2 mu) / (lambda + 3 mu)
  Complex off = 0.0;
  for (int k = 0; k < t; ++k) off += p1(N, k) * up(k);
  const double c = off.imag() / s2;  // 2 mu^2 / (lambda + 3 mu)
  if (!(c > 0.0) || !(a > 0.0)) throw Error(ErrorCode::InconsistentSymbol, "elastic block of p1 is not positive");

  if (n == 2) {
    const double ratio = a / c;  // (lambda + 2 mu) / mu
    r.mu = c * (ratio + 1.0) / 2.0;
    r.lambda = r.mu * (ratio - 2.0);
    const double want = r.mu * s + r.mu * (r.lambda + r.mu) / (r.lambda + 3.0 * r.mu) * up(0) * low(0) / s;
    check_close(p1(0, 0).real(), want, tol, "tangential entry of p1");
  } else {
    // eta is g-orthogonal to xi^sharp, built from the coordinate axis that keeps most of its length
    Eigen::VectorXd best;
    double best_len = -1.0;
    for (int k = 0; k < t; ++k) {
      Eigen::VectorXd eta = -low(k) / s2 * up;
      eta(k) += 1.0;
      const double len = eta.dot(g * eta);
      if (len > best_len) {
        best_len = len;
        best = eta;
      }
    }
    const Eigen::VectorXd zeta = g * best;
    Complex num = 0.0;
    for (int i = 0; i < t; ++i)
      for (int j = 0; j < t; ++j) num += zeta(i) * p1(i, j) * best(j);
    r.mu = num.real() / (s * best_len);
    if (!(std::abs(a - 2.0 * r.mu) > 0.0)) throw Error(ErrorCode::InconsistentSymbol, "degenerate normal entry of p1");
    r.lambda = r.mu * (4.0 * r.mu - 3.0 * a) / (a - 2.0 * r.mu);
    check_close(c, 2.0 * r.mu * r.mu / (r.lambda + 3.0 * r.mu), tol, "normal-tangential entry of p1");
  }
  if (!(r.mu > 0.0)) throw Error(ErrorCode::InconsistentSymbol, "recovered mu is not positive");
  r.beta = (r.lambda + 3.0 * r.mu) / r.mu * p0(N, T).real();
  return r;
}

Order0 recover_order0(const ReconstructionProblem& problem, double tol) {
  if (problem.samples.empty()) throw Error(ErrorCode::InconsistentSymbol, "no samples");
  const Eigen::MatrixXd g = boundary_metric(problem.metric);
  std::vector<Order0> all;
  for (const auto& smp : problem.samples) {
    if (smp.p.size() < 2) throw Error(ErrorCode::InsufficientJetOrder, "order zero needs p1 and p0");
    all.push_back(recover_order0(smp.p[0], smp.p[1], smp.xi, g, tol));
  }
  Order0 mean;
  for (const auto& o : all) {
    mean.lambda += o.lambda / static_cast<double>(all.size());
    mean.mu += o.mu / static_cast<double>(all.size());
    mean.alpha += o.alpha / static_cast<double>(all.size());
    mean.beta += o.beta / static_cast<double>(all.size());
  }
  const double scale = std::max({std::abs(mean.lambda), mean.mu, mean.alpha, std::abs(mean.beta)});
  for (const auto& o : all) {
    check_close(o.lambda, mean.lambda, tol * scale, "lambda across samples");
    check_close(o.mu, mean.mu, tol * scale, "mu across samples");
    check_close(o.alpha, mean.alpha, tol * scale, "alpha across samples");
    check_close(o.beta, mean.beta, tol * scale, "beta across samples");
  }
  return mean;
}

const char* coefficient_name(Coefficient c) {
  switch (c) {
    case Coefficient::Lambda: return "lambda";
    case Coefficient::Mu: return "mu";
    case Coefficient::Alpha: return "alpha";
    case Coefficient::Beta: return "beta";
  }
  return "?";
}

std::vector<Unknown> layer_unknowns(int stage) {
  std::vector<Unknown> u;
  if (stage <= 0) return {{Coefficient::Lambda, 0}, {Coefficient::Mu, 0}, {Coefficient::Alpha, 0}};
  u.push_back({Coefficient::Lambda, stage});
  u.push_back({Coefficient::Mu, stage});
  if (stage >= 2) u.push_back({Coefficient::Alpha, stage - 1});
  u.push_back({Coefficient::Beta, stage - 1});
  return u;
}

std::vector<double>& RecoveredJet::of(Coefficient c) {
  switch (c) {
    case Coefficient::Lambda: return lambda;
    case Coefficient::Mu: return mu;
    case Coefficient::Alpha: return alpha;
    default: return beta;
  }
}

const std::vector<double>& RecoveredJet::of(Coefficient c) const {
  return const_cast<RecoveredJet*>(this)->of(c);
}

void RecoveredJet::validate() const {
  if (mu.empty() || lambda.empty() || alpha.empty())
    throw Error(ErrorCode::InadmissibleMaterial, "order-zero values missing");
  if (!(mu[0] > 0.0)) throw Error(ErrorCode::InadmissibleMaterial, "μ > 0 violated");
  if (!(lambda[0] + mu[0] >= 0.0)) throw Error(ErrorCode::InadmissibleMaterial, "λ + μ ≥ 0 violated");
  if (!(alpha[0] > 0.0)) throw Error(ErrorCode::InadmissibleMaterial, "α > 0 violated");
}

namespace {

TaylorJet<Complex> axis_jet(const SpacePtr& sp, const std::vector<double>& d) {
  std::vector<Complex> coeffs;
  double fact = 1.0;
  for (std::size_t k = 1; k < d.size() && static_cast<int>(k) <= sp->max_x_order(); ++k) {
    fact *= static_cast<double>(k);
    coeffs.emplace_back(d[k] / fact);
  }
  return polynomial_in_xn(sp, Complex(d.empty() ? 0.0 : d[0]), coeffs);
}

}  // namespace

MaterialJet<Complex> material_from_jet(const RecoveredJet& jet, const ReconstructionProblem& problem, int order) {
  const SpacePtr sp = make_x_space(problem.metric.n, std::max(order, 0));
  return {axis_jet(sp, jet.lambda), axis_jet(sp, jet.mu), axis_jet(sp, jet.alpha), axis_jet(sp, jet.beta),
          problem.rho, problem.omega, problem.theta0, problem.c_heat};
}

MetricJet<Complex> truncate_metric(const MetricJet<Complex>& g, int order) {
  if (g.order() <= order) return g;
  const SpacePtr sp = make_x_space(g.n, order);
  std::vector<TaylorJet<Complex>> upper;
  for (int a = 0; a < g.n - 1; ++a)
    for (int b = a; b < g.n - 1; ++b) upper.push_back(g(a, b).lift(sp));
  return MetricJet<Complex>::from_components(g.n, sp, upper);
}

std::vector<Eigen::MatrixXcd> forward_symbols(const MetricJet<Complex>& g, const MaterialJet<Complex>& m,
                                              const std::vector<double>& xi, int depth) {
  // p_{1-depth} sees metric derivatives up to order depth + 1
  const auto ctx = make_context(truncate_metric(g, std::max(depth + 1, 2)), m, xi, depth);
  const auto table = build_table(ctx, depth, false);
  std::vector<Eigen::MatrixXcd> out;
  for (const auto& p : table.p) out.push_back(p.value());
  return out;
}

ReconstructionProblem make_problem(const MetricJet<Complex>& g, const MaterialJet<Complex>& m,
                                   const std::vector<std::vector<double>>& covectors, int depth) {
  ReconstructionProblem pr{g, m.rho, m.omega, m.theta0, m.c_heat, {}};
  for (const auto& xi : covectors) pr.samples.push_back({xi, forward_symbols(g, m, xi, depth)});
  return pr;
}

namespace {

void set_value(RecoveredJet& jet, const Unknown& u, double v) {
  auto& d = jet.of(u.coefficient);
  if (static_cast<int>(d.size()) <= u.order) d.resize(static_cast<std::size_t>(u.order) + 1, 0.0);
  d[static_cast<std::size_t>(u.order)] = v;
}

/// Drop everything above the orders that p_{1-s} can see.
RecoveredJet clip_to_stage(const RecoveredJet& jet, int stage) {
  RecoveredJet out;
  auto clip = [](const std::vector<double>& v, int order) {
    std::vector<double> r(static_cast<std::size_t>(std::max(order, -1) + 1), 0.0);
    for (std::size_t k = 0; k < r.size() && k < v.size(); ++k) r[k] = v[k];
    return r;
  };
  out.lambda = clip(jet.lambda, stage);
  out.mu = clip(jet.mu, stage);
  out.alpha = clip(jet.alpha, std::max(stage - 1, 0));
  out.beta = clip(jet.beta, stage - 1);
  return out;
}

const Eigen::MatrixXcd& observed(const SymbolObservation& smp, int stage) {
  if (static_cast<int>(smp.p.size()) <= stage)
    throw Error(ErrorCode::InsufficientJetOrder,
                "sample table stops at p_" + std::to_string(2 - static_cast<int>(smp.p.size())) + ", stage " +
                    std::to_string(stage) + " needs p_" + std::to_string(1 - stage));
  return smp.p[static_cast<std::size_t>(stage)];
}

Eigen::MatrixXcd stage_symbol(const ReconstructionProblem& pr, const RecoveredJet& jet, int stage,
                              const std::vector<double>& xi) {
  const auto m = material_from_jet(jet, pr, stage);
  return forward_symbols(pr.metric, m, xi, stage)[static_cast<std::size_t>(stage)];
}

void append_rows(Eigen::MatrixXd& out, int row, const Eigen::MatrixXcd& m) {
  const Eigen::Index k = m.size();
  for (Eigen::Index i = 0; i < k; ++i) {
    out(row + i, 0) = m(i).real();
    out(row + k + i, 0) = m(i).imag();
  }
}

}  // namespace

LayerReport solve_layer(const ReconstructionProblem& problem, RecoveredJet& jet, int stage, const LayerOptions& opt) {
  if (stage < 1) throw Error(ErrorCode::IndexOutOfOrder, "affine layers start at stage 1");
  const auto unknowns = layer_unknowns(stage);
  const int nu = static_cast<int>(unknowns.size());
  const int ns = static_cast<int>(problem.samples.size());
  if (ns == 0) throw Error(ErrorCode::RankDeficientLayer, "no samples");
  const int size = problem.metric.n + 1;
  const int per = 2 * size * size;

  RecoveredJet base = clip_to_stage(jet, stage);
  for (const auto& u : unknowns) set_value(base, u, 0.0);

  Eigen::MatrixXd A(per * ns, nu), b(per * ns, 1), obs(per * ns, 1);
  parallel_for(ns, opt.jobs, [&](int i) {
    const auto& smp = problem.samples[static_cast<std::size_t>(i)];
    const Eigen::MatrixXcd p0 = stage_symbol(problem, base, stage, smp.xi);
    Eigen::MatrixXd col(per, 1);
    for (int k = 0; k < nu; ++k) {
      RecoveredJet e = base;
      set_value(e, unknowns[static_cast<std::size_t>(k)], 1.0);
      append_rows(col, 0, stage_symbol(problem, e, stage, smp.xi) - p0);
      A.block(i * per, k, per, 1) = col;
    }
    append_rows(col, 0, observed(smp, stage) - p0);
    b.block(i * per, 0, per, 1) = col;
    append_rows(col, 0, observed(smp, stage));
    obs.block(i * per, 0, per, 1) = col;
  });

  Eigen::VectorXd scale(nu);
  for (int k = 0; k < nu; ++k) {
    scale(k) = A.col(k).norm();
    if (scale(k) > 0.0) A.col(k) /= scale(k);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  LayerReport rep;
  rep.stage = stage;
  rep.unknowns = unknowns;
  rep.rows = static_cast<int>(A.rows());
  rep.condition = sv(nu - 1) > 0.0 ? sv(0) / sv(nu - 1) : INFINITY;
  if (!(sv(nu - 1) > opt.rank_tolerance * sv(0))) {
    std::string names;
    const Eigen::VectorXd v = svd.matrixV().col(nu - 1);
    for (int k = 0; k < nu; ++k)
      if (std::abs(v(k)) > 0.1 || scale(k) == 0.0) {
        const auto& u = unknowns[static_cast<std::size_t>(k)];
        names += std::string(names.empty() ? "" : ", ") + "d^" + std::to_string(u.order) + " " +
                 coefficient_name(u.coefficient);
      }
    throw Error(ErrorCode::RankDeficientLayer, "stage " + std::to_string(stage) +
                                                   " cannot separate " + names + " at the given covectors");
  }
  const Eigen::VectorXd x = svd.solve(b);
  const double denom = std::max(obs.norm(), 1e-300);
  rep.residual = (A * x - b).norm() / denom;
  if (!(rep.residual <= opt.residual_tolerance))
    throw Error(ErrorCode::ToleranceExceeded, "stage " + std::to_string(stage) + " residual " +
                                                  std::to_string(rep.residual));
  for (int k = 0; k < nu; ++k) set_value(jet, unknowns[static_cast<std::size_t>(k)], x(k) / scale(k));
  return rep;
}

RecoveredJet layer_strip(const ReconstructionProblem& problem, int depth, const LayerOptions& opt) {
  if (depth < 1) throw Error(ErrorCode::IndexOutOfOrder, "depth must be at least 1");
  for (const auto& smp : problem.samples)
    if (static_cast<int>(smp.p.size()) < depth + 1)
      throw Error(ErrorCode::InsufficientJetOrder, "samples carry " + std::to_string(smp.p.size()) +
                                                       " symbols, depth " + std::to_string(depth) + " needs " +
                                                       std::to_string(depth + 1));
  const Order0 o = recover_order0(problem);
  RecoveredJet jet;
  jet.lambda = {o.lambda};
  jet.mu = {o.mu};
  jet.alpha = {o.alpha};
  jet.validate();
  for (int s = 1; s <= depth; ++s) jet.layers.push_back(solve_layer(problem, jet, s, opt));
  return jet;
}

ThermalClosedForm recover_normal_derivative_thermal(const ReconstructionProblem& problem, const RecoveredJet& known) {
  if (known.lambda.size() < 2 || known.mu.size() < 2 || known.alpha.empty() || known.beta.empty())
    throw Error(ErrorCode::InsufficientJetOrder, "needs lambda and mu to order 1, alpha and beta to order 0");
  const SymbolObservation* smp = nullptr;
  for (const auto& s : problem.samples)
    if (s.p.size() >= 3) {
      smp = &s;
      break;
    }
  if (!smp) throw Error(ErrorCode::InsufficientJetOrder, "needs p_{-1}");
  const int n = problem.metric.n, N = n - 1, T = n;

  RecoveredJet zero;
  zero.lambda = {known.lambda[0], known.lambda[1]};
  zero.mu = {known.mu[0], known.mu[1]};
  zero.alpha = {known.alpha[0], 0.0};
  zero.beta = {known.beta[0], 0.0};
  const auto m = material_from_jet(zero, problem, 2);
  const auto ctx = make_context(problem.metric, m, smp->xi, 2);
  const auto table = build_table(ctx, 2, false);

  const Eigen::MatrixXcd A = table.ops.A.value();
  const Eigen::MatrixXcd q1 = table.q[0].value();
  const Eigen::MatrixXcd M = q1 - table.ops.b1.value();
  const Eigen::MatrixXcd qm1 = A.inverse() * smp->p[2];
  const Eigen::MatrixXcd dE = M * qm1 + qm1 * q1 - table.E[1].value();

  const double lam = known.lambda[0], mu = known.mu[0], al = known.alpha[0], be = known.beta[0];
  const Complex I(0.0, 1.0);
  ThermalClosedForm r;
  r.dbeta = (-(lam + 3.0 * mu) * dE(N, T)).real();
  if (be == 0.0) throw Error(ErrorCode::RankDeficientLayer, "beta = 0 decouples the normal derivative of alpha");
  const Complex iwt = I * problem.omega * problem.theta0;
  if (std::abs(iwt) == 0.0)
    throw Error(ErrorCode::RankDeficientLayer, "omega = 0 removes the normal derivative of alpha from p_{-1}");
  const Complex q = dE(T, N) * (lam + 3.0 * mu) / mu;
  r.dalpha = (al * al / be * (r.dbeta / al - q / iwt)).real();
  r.printed_dalpha = al * al / be * (r.dbeta / al - q);
  return r;
}

double affinity_second_difference(const ReconstructionProblem& problem, const RecoveredJet& jet, int stage,
                                  const Unknown& u, double v0, double h) {
  RecoveredJet base = clip_to_stage(jet, stage);
  double worst = 0.0;
  for (const auto& smp : problem.samples) {
    Eigen::MatrixXcd p[3];
    for (int k = 0; k < 3; ++k) {
      RecoveredJet e = base;
      set_value(e, u, v0 + k * h);
      p[k] = stage_symbol(problem, e, stage, smp.xi);
    }
    worst = std::max(worst, (p[0] - 2.0 * p[1] + p[2]).cwiseAbs().maxCoeff());
  }
  return worst;
}

SymbolFit fit_symbols_from_samples(const std::vector<DtnSample>& samples, const std::vector<double>& xi0, int depth,
                                   double max_condition) {
  const int m = static_cast<int>(samples.size());
  const int k = depth + 1;
  if (m < depth + 3)
    throw Error(ErrorCode::IllConditionedFit, std::to_string(m) + " samples, depth " + std::to_string(depth) +
                                                  " needs " + std::to_string(depth + 3));
  const Eigen::VectorXd d0 = Eigen::Map<const Eigen::VectorXd>(xi0.data(), static_cast<Eigen::Index>(xi0.size()));
  const double n0 = d0.norm();
  if (!(n0 > 0.0)) throw Error(ErrorCode::ZeroCovector, "xi0 must be nonzero");
  SymbolFit fit;
  fit.xi0 = xi0;
  Eigen::MatrixXd V(m, k);
  for (int i = 0; i < m; ++i) {
    const auto& xi = samples[static_cast<std::size_t>(i)].xi;
    if (xi.size() != xi0.size()) throw Error(ErrorCode::IncompatibleJets, "sample covector dimension");
    const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
    const double t = v.dot(d0) / (n0 * n0);
    if (!(t > 0.0) || (v - t * d0).norm() > 1e-12 * v.norm())
      throw Error(ErrorCode::IllConditionedFit, "samples are not on the ray through xi0");
    fit.magnitudes.push_back(t);
    for (int j = 0; j < k; ++j) V(i, j) = std::pow(t, 1 - j);
  }
  Eigen::VectorXd scale(k);
  for (int j = 0; j < k; ++j) {
    scale(j) = V.col(j).norm();
    V.col(j) /= scale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  fit.condition = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : INFINITY;
  if (!(fit.condition <= max_condition))
    throw Error(ErrorCode::IllConditionedFit, "Vandermonde condition " + std::to_string(fit.condition));
  const Eigen::Index s = samples[0].lambda.rows();
  fit.p.assign(static_cast<std::size_t>(k), Eigen::MatrixXcd::Zero(s, s));
  Eigen::VectorXd re(m), im(m);
  for (Eigen::Index r = 0; r < s; ++r)
    for (Eigen::Index c = 0; c < s; ++c) {
      for (int i = 0; i < m; ++i) {
        re(i) = samples[static_cast<std::size_t>(i)].lambda(r, c).real();
        im(i) = samples[static_cast<std::size_t>(i)].lambda(r, c).imag();
      }
      const Eigen::VectorXd xr = svd.solve(re), xi = svd.solve(im);
      const double bn = std::sqrt(re.squaredNorm() + im.squaredNorm());
      if (bn > 0.0) {
        const double res = std::sqrt((V * xr - re).squaredNorm() + (V * xi - im).squaredNorm()) / bn;
        fit.residual = std::max(fit.residual, res);
      }
      for (int j = 0; j < k; ++j) fit.p[static_cast<std::size_t>(j)](r, c) = Complex(xr(j), xi(j)) / scale(j);
    }
  return fit;
}

std::vector<JetError> compare_jets(const RecoveredJet& recovered, const RecoveredJet& truth) {
  std::vector<JetError> out;
  for (Coefficient c : {Coefficient::Lambda, Coefficient::Mu, Coefficient::Alpha, Coefficient::Beta}) {
    const auto& r = recovered.of(c);
    const auto& t = truth.of(c);
    const double base = t.empty() ? 0.0 : std::abs(t[0]);
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double tv = k < t.size() ? t[k] : 0.0;
      const double abs_err = std::abs(r[k] - tv);
      const double denom = std::max(std::abs(tv), base);
      out.push_back({static_cast<int>(k), c, r[k], tv, abs_err, denom > 0.0 ? abs_err / denom : abs_err});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const JetError& a, const JetError& b) { return a.order < b.order; });
  return out;
}

RecoveredJet jet_from_material(const MaterialJet<Complex>& m, int order) {
  RecoveredJet out;
  for (Coefficient c : {Coefficient::Lambda, Coefficient::Mu, Coefficient::Alpha, Coefficient::Beta}) {
    const TaylorJet<Complex>& f = c == Coefficient::Lambda ? m.lambda
                                  : c == Coefficient::Mu   ? m.mu
                                  : c == Coefficient::Alpha ? m.alpha
                                                            : m.beta;
    std::vector<int> J(static_cast<std::size_t>(f.space()->nx()), 0);
    auto& d = out.of(c);
    for (int k = 0; k <= order; ++k) {
      J.back() = k;
      d.push_back(k <= f.x_order() ? f.derivative(J).real() : 0.0);
    }
  }
  return out;
}

}  // namespace thermodtn
