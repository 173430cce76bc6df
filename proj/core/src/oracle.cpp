#include "thermodtn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "thermodtn/symbol_calculus.hpp"

namespace thermodtn {

template <class S>
std::vector<TaylorJet<S>> apply_Tg(const Geometry<S>& geo, const MaterialJet<S>& m,
                                   const std::vector<TaylorJet<S>>& u, const TaylorJet<S>& theta) {
  using J = TaylorJet<S>;
  const int n = geo.n;
  if (static_cast<int>(u.size()) != n) throw Error(ErrorCode::IncompatibleJets, "displacement must have n components");
  for (const auto& f : u)
    if (f.x_order() < 2) throw Error(ErrorCode::InsufficientJetOrder, "apply_Tg needs field jets of order >= 2");
  if (theta.x_order() < 2) throw Error(ErrorCode::InsufficientJetOrder, "apply_Tg needs field jets of order >= 2");
  const SpacePtr& sp = theta.space();
  auto L = [&](const J& f) { return f.lift(sp); };
  auto gi = [&](int j, int k) { return L(geo.inverse(j, k)); };
  auto G = [&](int a, int j, int k) { return L(geo.christoffel(a, j, k)); };
  const J lam = L(m.lambda), mu = L(m.mu), alpha = L(m.alpha), beta = L(m.beta);
  const S I = ScalarOps<S>::imag_unit();

  auto laplace = [&](const J& f) {
    J r(sp);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const J g = gi(j, k);
        if (g.is_zero()) continue;
        J inner = f.dx(j).dx(k);
        for (int l = 0; l < n; ++l) inner -= G(l, j, k) * f.dx(l);
        r += g * inner;
      }
    return r;
  };
  // nabla_k u^j
  auto cov = [&](int k, int j) {
    J r = u[static_cast<std::size_t>(j)].dx(k);
    for (int l = 0; l < n; ++l) r += G(j, k, l) * u[static_cast<std::size_t>(l)];
    return r;
  };
  J div(sp);
  for (int k = 0; k < n; ++k) {
    div += u[static_cast<std::size_t>(k)].dx(k);
    for (int l = 0; l < n; ++l) div += G(k, k, l) * u[static_cast<std::size_t>(l)];
  }

  std::vector<J> out;
  for (int j = 0; j < n; ++j) {
    J r = mu * laplace(u[static_cast<std::size_t>(j)]);
    for (int l = 0; l < n; ++l) {
      const J g = gi(j, l);
      if (g.is_zero()) continue;
      r += (lam + mu) * g * div.dx(l);
      r += g * lam.dx(l) * div;
      r -= beta * g * theta.dx(l);
      for (int mm = 0; mm < n; ++mm) r += g * mu.dx(mm) * cov(l, mm);
    }
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const J g = gi(k, l);
        if (g.is_zero()) continue;
        r += g * mu.dx(l) * cov(k, j);
        J extra(sp);
        for (int mm = 0; mm < n; ++mm) {
          extra += S(2) * G(j, k, mm) * u[static_cast<std::size_t>(mm)].dx(l);
          extra += G(j, k, l).dx(mm) * u[static_cast<std::size_t>(mm)];
        }
        r += mu * g * extra;
      }
    r += (m.rho * m.omega * m.omega) * u[static_cast<std::size_t>(j)];
    out.push_back(r);
  }
  J th = (I * m.omega * m.theta0) * beta * div + alpha * laplace(theta) + (I * m.omega * m.c_heat) * theta;
  out.push_back(th);
  return out;
}

namespace {

/// Apply a polynomial symbol entry as a tangential differential operator.
template <class S>
TaylorJet<S> apply_entry(const BiJet<S>& e, const TaylorJet<S>& v, int max_degree) {
  const SpacePtr& xs = v.space();
  const int t = e.space()->nxi();
  TaylorJet<S> r(xs);
  bool any = false;
  for (int d = 0; d <= max_degree; ++d)
    for (const auto& K : multi_indices(t, d)) {
      const TaylorJet<S> coef = e.x_slice(K, xs);
      if (coef.is_zero()) continue;
      TaylorJet<S> dv = v;
      for (int a = 0; a < t; ++a)
        for (int c = 0; c < K[static_cast<std::size_t>(a)]; ++c) dv = dv.dx(a);
      if (!any) {
        r = r.truncated(dv.x_order(), 0);
        any = true;
      }
      r += coef * dv * composition_weight<S>(K);
    }
  return r;
}

}  // namespace

template <class S>
std::vector<TaylorJet<S>> apply_factored_operator(const SymbolContext<S>& ctx, const std::vector<TaylorJet<S>>& U) {
  const int size = ctx.size();
  const int N = ctx.normal();
  if (static_cast<int>(U.size()) != size) throw Error(ErrorCode::IncompatibleJets, "field must have n + 1 components");
  if (ctx.space->max_xi_order() < 2)
    throw Error(ErrorCode::InsufficientJetOrder, "reading second-order symbols needs xi order >= 2");
  const auto b = symbol_b(ctx);
  const auto c = symbol_c(ctx);
  const SpacePtr& xs = U[0].space();
  std::vector<TaylorJet<S>> dU;
  for (const auto& f : U) dU.push_back(f.dx(N));

  std::vector<TaylorJet<S>> out;
  for (int i = 0; i < size; ++i) {
    TaylorJet<S> r = dU[static_cast<std::size_t>(i)].dx(N);
    for (int j = 0; j < size; ++j) {
      r += apply_entry(b.b1(i, j), dU[static_cast<std::size_t>(j)], 1);
      r += apply_entry(b.b0(i, j), dU[static_cast<std::size_t>(j)], 0);
      r += apply_entry(c.c2(i, j), U[static_cast<std::size_t>(j)], 2);
      r += apply_entry(c.c1(i, j), U[static_cast<std::size_t>(j)], 1);
      r += apply_entry(c.c0(i, j), U[static_cast<std::size_t>(j)], 0);
    }
    const auto& mat = ctx.material;
    const TaylorJet<S> a =
        i < N ? mat.mu.lift(xs) : (i == N ? (mat.lambda + S(2) * mat.mu).lift(xs) : mat.alpha.lift(xs));
    out.push_back(a * r);
  }
  return out;
}

namespace {

/// Coefficients of x_n^k of a jet restricted to the x_n axis.
std::vector<double> axis_polynomial(const TaylorJet<Complex>& f) {
  const int n = f.space()->nx();
  std::vector<double> c;
  std::vector<int> J(static_cast<std::size_t>(n), 0);
  double fact = 1.0;
  for (int k = 0; k <= f.x_order(); ++k) {
    if (k > 0) fact *= k;
    J[static_cast<std::size_t>(n - 1)] = k;
    const Complex v = f.derivative(J);
    if (std::abs(v.imag()) > 1e-14 * (1.0 + std::abs(v.real())))
      throw Error(ErrorCode::InadmissibleMaterial, "oracle coefficients must be real");
    c.push_back(v.real() / fact);
  }
  return c;
}

struct AxisFunction {
  std::vector<double> c;
  double operator()(double x) const {
    double r = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
    return r;
  }
  AxisFunction derivative() const {
    AxisFunction d;
    for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(c[k] * static_cast<double>(k));
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
  }
};

/// Flat x_n-dependent coefficients of A2 U'' + A1 U' + A0 U = 0 and the traction T1 U' + T0 U.
struct FlatSystem {
  int n;
  std::vector<double> xi;
  double xi2 = 0.0;
  AxisFunction lam, mu, alpha, beta, dlam, dmu;
  double rho, omega, theta0, c_heat;

  FlatSystem(const MaterialJet<Complex>& m, const std::vector<double>& xi_)
      : n(static_cast<int>(xi_.size()) + 1), xi(xi_) {
    validate(m);
    for (double v : xi) xi2 += v * v;
    if (xi2 == 0.0) throw Error(ErrorCode::ZeroCovector, "xi' must be nonzero");
    lam.c = axis_polynomial(m.lambda);
    mu.c = axis_polynomial(m.mu);
    alpha.c = axis_polynomial(m.alpha);
    beta.c = axis_polynomial(m.beta);
    dlam = lam.derivative();
    dmu = mu.derivative();
    rho = m.rho.real();
    omega = m.omega.real();
    theta0 = m.theta0.real();
    c_heat = m.c_heat.real();
  }

  void coefficients(double x, Eigen::MatrixXcd& A2, Eigen::MatrixXcd& A1, Eigen::MatrixXcd& A0) const {
    const int s = n + 1, N = n - 1, T = n;
    const Complex I(0.0, 1.0);
    const double l = lam(x), m = mu(x), a = alpha(x), b = beta(x), dl = dlam(x), dm = dmu(x);
    if (!(m > 0.0) || !(a > 0.0) || l + m < 0.0)
      throw Error(ErrorCode::InadmissibleMaterial, "coefficients leave the admissible set inside the slab");
    A2.setZero(s, s);
    A1.setZero(s, s);
    A0.setZero(s, s);
    for (int i = 0; i < N; ++i) A2(i, i) = m;
    A2(N, N) = l + 2.0 * m;
    A2(T, T) = a;
    const double rw2 = rho * omega * omega;
    for (int i = 0; i < N; ++i) {
      const double xa = xi[static_cast<std::size_t>(i)];
      A1(i, N) = I * (l + m) * xa;
      A1(N, i) = I * (l + m) * xa;
      A1(i, i) = dm;
      A0(i, N) = I * dm * xa;
      A0(N, i) = I * dl * xa;
      for (int j = 0; j < N; ++j) A0(i, j) = -(l + m) * xa * xi[static_cast<std::size_t>(j)];
      A0(i, i) += -m * xi2 + rw2;
      A0(i, T) = -I * b * xa;
      A0(T, i) = -omega * theta0 * b * xa;
    }
    A1(N, N) = dl + 2.0 * dm;
    A1(N, T) = -b;
    A1(T, N) = I * omega * theta0 * b;
    A0(N, N) = -m * xi2 + rw2;
    A0(T, T) = -a * xi2 + I * omega * c_heat;
  }

  void traction(Eigen::MatrixXcd& T1, Eigen::MatrixXcd& T0) const {
    const int s = n + 1, N = n - 1, T = n;
    const Complex I(0.0, 1.0);
    const double l = lam(0.0), m = mu(0.0), a = alpha(0.0), b = beta(0.0);
    T1.setZero(s, s);
    T0.setZero(s, s);
    for (int i = 0; i < N; ++i) {
      T1(i, i) = -m;
      T0(i, N) = -I * m * xi[static_cast<std::size_t>(i)];
      T0(N, i) = -I * l * xi[static_cast<std::size_t>(i)];
    }
    T1(N, N) = -(l + 2.0 * m);
    T1(T, T) = -a;
    T0(N, T) = b;
  }
};

/// Swap adjacent diagonal entries k, k+1 of an upper triangular T (T = Q^H K Q).
void swap_schur(Eigen::MatrixXcd& T, Eigen::MatrixXcd& Q, Eigen::Index k) {
  const Complex a = T(k, k), b = T(k + 1, k + 1), c = T(k, k + 1);
  Complex v1 = c, v2 = b - a;
  const double nv = std::sqrt(std::norm(v1) + std::norm(v2));
  if (nv == 0.0) return;
  v1 /= nv;
  v2 /= nv;
  Eigen::Matrix2cd G;
  G << v1, -std::conj(v2), v2, std::conj(v1);
  T.middleRows(k, 2) = G.adjoint() * T.middleRows(k, 2);
  T.middleCols(k, 2) = T.middleCols(k, 2) * G;
  Q.middleCols(k, 2) = Q.middleCols(k, 2) * G;
  T(k + 1, k) = 0.0;
  T(k, k) = b;
  T(k + 1, k + 1) = a;
}

}  // namespace

DtnSample halfspace_multiplier(const MaterialJet<Complex>& m, const std::vector<double>& xi) {
  FlatSystem sys(m, xi);
  for (const auto* j : {&m.lambda, &m.mu, &m.alpha, &m.beta}) {
    const auto c = axis_polynomial(*j);
    for (std::size_t k = 1; k < c.size(); ++k)
      if (c[k] != 0.0) throw Error(ErrorCode::InadmissibleMaterial, "half-space multiplier needs constant coefficients");
  }
  const int s = sys.n + 1;
  const double t = std::sqrt(sys.xi2);
  Eigen::MatrixXcd A2, A1, A0;
  sys.coefficients(0.0, A2, A1, A0);
  const Eigen::MatrixXcd A2inv = A2.inverse();

  // w = (U, U'/t) scales the companion matrix to norm ~ t.
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(2 * s, 2 * s);
  K.topRightCorner(s, s) = t * Eigen::MatrixXcd::Identity(s, s);
  K.bottomLeftCorner(s, s) = -A2inv * A0 / t;
  K.bottomRightCorner(s, s) = -A2inv * A1;

  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(K);
  if (schur.info() != Eigen::Success) throw Error(ErrorCode::SolverSingular, "Schur decomposition failed");
  Eigen::MatrixXcd T = schur.matrixT();
  Eigen::MatrixXcd Q = schur.matrixU();

  const double guard = 1e-9 * t;
  int stable = 0;
  for (Eigen::Index i = 0; i < 2 * s; ++i) {
    const double re = T(i, i).real();
    if (std::abs(re) <= guard) throw Error(ErrorCode::ModeDeficiency, "mode with |Re kappa| below the guard");
    if (re < 0.0) ++stable;
  }
  if (stable != s)
    throw Error(ErrorCode::ModeDeficiency, std::to_string(stable) + " decaying modes, expected " + std::to_string(s));
  // bubble the decaying eigenvalues to the leading block
  for (Eigen::Index target = 0; target < s; ++target) {
    Eigen::Index i = target;
    while (T(i, i).real() >= 0.0) ++i;
    for (Eigen::Index k = i; k > target; --k) swap_schur(T, Q, k - 1);
  }
  const Eigen::MatrixXcd Y1 = Q.topLeftCorner(s, s);
  const Eigen::MatrixXcd Y2 = Q.bottomLeftCorner(s, s) * t;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Y1);
  const auto& sv = svd.singularValues();
  const double cond = sv(0) / sv(sv.size() - 1);
  if (!(cond <= 1e10)) throw Error(ErrorCode::NearDefectiveModes, "Dirichlet trace matrix condition " + std::to_string(cond));

  Eigen::MatrixXcd T1, T0;
  sys.traction(T1, T0);
  DtnSample out;
  out.xi = xi;
  out.lambda = T1 * Y2 * Y1.inverse() + T0;
  return out;
}

namespace {

Eigen::MatrixXcd slab_solve(const FlatSystem& sys, double X, int N) {
  const int s = sys.n + 1;
  const double h = X / N;
  Eigen::MatrixXcd A2, A1, A0;
  std::vector<Eigen::MatrixXcd> C(static_cast<std::size_t>(N)), r(static_cast<std::size_t>(N));
  Eigen::MatrixXcd Cprev = Eigen::MatrixXcd::Zero(s, s);
  Eigen::MatrixXcd rprev = Eigen::MatrixXcd::Zero(s, s);
  const Eigen::MatrixXcd U0 = Eigen::MatrixXcd::Identity(s, s);
  // rows scaled by h^2: L U_{i-1} + D U_i + R U_{i+1} = 0
  for (int i = 1; i < N; ++i) {
    sys.coefficients(i * h, A2, A1, A0);
    const Eigen::MatrixXcd L = A2 - 0.5 * h * A1;
    const Eigen::MatrixXcd D = -2.0 * A2 + h * h * A0;
    const Eigen::MatrixXcd R = A2 + 0.5 * h * A1;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(s, s);
    if (i == 1) rhs = -L * U0;
    Eigen::MatrixXcd Dp = D;
    if (i > 1) {
      Dp -= L * Cprev;
      rhs -= L * rprev;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Dp);
    if (!(std::abs(lu.determinant()) > 0.0)) throw Error(ErrorCode::SolverSingular, "singular block in slab solve");
    Cprev = lu.solve(R);
    rprev = lu.solve(rhs);
    C[static_cast<std::size_t>(i)] = Cprev;
    r[static_cast<std::size_t>(i)] = rprev;
  }
  Eigen::MatrixXcd U = r[static_cast<std::size_t>(N - 1)];
  for (int i = N - 2; i >= 1; --i) U = r[static_cast<std::size_t>(i)] - C[static_cast<std::size_t>(i)] * U;
  // U now holds U_1; centered flux with a ghost node at -h
  sys.coefficients(0.0, A2, A1, A0);
  const Eigen::MatrixXcd M = 2.0 * A2 / h - A1;
  const Eigen::MatrixXcd dU = M.partialPivLu().solve(2.0 * A2 * (U - U0) / (h * h) + A0 * U0);
  Eigen::MatrixXcd T1, T0;
  sys.traction(T1, T0);
  return T1 * dU + T0 * U0;
}

}  // namespace

DtnSample slab_dtn(const MaterialJet<Complex>& m, const std::vector<double>& xi, const SlabOptions& opt) {
  FlatSystem sys(m, xi);
  const double t = std::sqrt(sys.xi2);
  const double X = opt.length > 0.0 ? opt.length : opt.decay_exponent / t;
  const int N = opt.grid > 0 ? opt.grid : std::max(16, static_cast<int>(std::ceil(X * t / opt.h_xi)));
  const Eigen::MatrixXcd L1 = slab_solve(sys, X, N);
  const Eigen::MatrixXcd L2 = slab_solve(sys, X, 2 * N);
  const Eigen::MatrixXcd L4 = slab_solve(sys, X, 4 * N);
  const double d12 = (L1 - L2).norm(), d24 = (L2 - L4).norm();
  DtnSample out;
  out.xi = xi;
  out.slab_length = X;
  out.grid = N;
  out.decay = std::exp(-t * X);
  out.richardson_ratio = d24 > 0.0 ? d12 / d24 : 0.0;
  if (opt.check_convergence && d12 > 1e-13 * L4.norm() && (out.richardson_ratio < 3.0 || out.richardson_ratio > 5.0))
    throw Error(ErrorCode::NotConverged, "grid refinement ratio " + std::to_string(out.richardson_ratio) +
                                             " outside [3, 5]");
  const Eigen::MatrixXcd R1 = (4.0 * L2 - L1) / 3.0;
  const Eigen::MatrixXcd R2 = (4.0 * L4 - L2) / 3.0;
  out.lambda = (16.0 * R2 - R1) / 15.0;
  return out;
}

template std::vector<TaylorJet<Complex>> apply_Tg(const Geometry<Complex>&, const MaterialJet<Complex>&,
                                                  const std::vector<TaylorJet<Complex>>&, const TaylorJet<Complex>&);
template std::vector<TaylorJet<QComplex>> apply_Tg(const Geometry<QComplex>&, const MaterialJet<QComplex>&,
                                                   const std::vector<TaylorJet<QComplex>>&, const TaylorJet<QComplex>&);
template std::vector<TaylorJet<Complex>> apply_factored_operator(const SymbolContext<Complex>&,
                                                                 const std::vector<TaylorJet<Complex>>&);
template std::vector<TaylorJet<QComplex>> apply_factored_operator(const SymbolContext<QComplex>&,
                                                                  const std::vector<TaylorJet<QComplex>>&);

}  // namespace thermodtn
