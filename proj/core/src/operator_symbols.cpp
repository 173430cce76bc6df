#include "thermodtn/operator_symbols.hpp"

#include <algorithm>

namespace thermodtn {

template <class S>
BiJet<S> SymbolContext<S>::trace_gamma(int j) const {
  BiJet<S> r(space);
  for (int a = 0; a < n - 1; ++a) r += christoffel(a, a, j);
  return r;
}

template <class S>
const BiJet<S>& SymbolContext<S>::norm() const {
  if (!xi.norm.valid()) throw Error(ErrorCode::ZeroCovector, "|xi'| is undefined at the zero covector");
  return xi.norm;
}

template <class S>
SymbolContext<S> make_context(const MetricJet<S>& g, const MaterialJet<S>& m, const std::vector<double>& xi,
                              int xi_order, bool allow_zero_covector) {
  validate(m);
  for (const auto* j : {&m.lambda, &m.mu, &m.alpha, &m.beta})
    if (j->space()->nx() != g.n) throw Error(ErrorCode::IncompatibleJets, "material and metric dimensions differ");
  SymbolContext<S> ctx;
  ctx.n = g.n;
  ctx.geo = christoffel(g);
  ctx.material = m;
  const int kx = std::max({g.order(), m.lambda.x_order(), m.mu.x_order(), m.alpha.x_order(), m.beta.x_order()});
  ctx.xi = covector_package(ctx.geo, xi, xi_order, allow_zero_covector, kx);
  ctx.space = ctx.xi.space;
  for (const auto& v : ctx.geo.ginv) ctx.ginv.push_back(v.lift(ctx.space));
  for (const auto& v : ctx.geo.gamma) ctx.gamma.push_back(v.lift(ctx.space));
  ctx.lambda = m.lambda.lift(ctx.space);
  ctx.mu = m.mu.lift(ctx.space);
  ctx.alpha = m.alpha.lift(ctx.space);
  ctx.beta = m.beta.lift(ctx.space);
  ctx.rho = m.rho;
  ctx.omega = m.omega;
  ctx.theta0 = m.theta0;
  ctx.c_heat = m.c_heat;
  return ctx;
}

namespace {

template <class S>
struct Common {
  using J = BiJet<S>;
  const SymbolContext<S>& c;
  int n, t, N, T;
  S I;
  J inv_mu, inv_l2m, inv_alpha, lpm;

  explicit Common(const SymbolContext<S>& ctx)
      : c(ctx), n(ctx.n), t(ctx.n - 1), N(ctx.n - 1), T(ctx.n), I(ScalarOps<S>::imag_unit()) {
    inv_mu = reciprocal(c.mu);
    inv_l2m = reciprocal(c.lambda + S(2) * c.mu);
    inv_alpha = reciprocal(c.alpha);
    lpm = c.lambda + c.mu;
  }
  /// g^{ab} d_b f over tangential b.
  J raise(const J& f, int a) const {
    J r(c.space);
    for (int b = 0; b < t; ++b) {
      const J& gi = c.inverse(a, b);
      if (!gi.is_zero()) r += gi * f.dx(b);
    }
    return r;
  }
  const J& up(int a) const { return c.xi.upper[static_cast<std::size_t>(a)]; }
  const J& low(int a) const { return c.xi.lower[static_cast<std::size_t>(a)]; }
  /// sum over tangential g of xi^g Gamma^m_{g k}
  J xi_gamma(int m, int k) const {
    J r(c.space);
    for (int g = 0; g < t; ++g) {
      const J& G = c.christoffel(m, g, k);
      if (!G.is_zero()) r += up(g) * G;
    }
    return r;
  }
  /// sum over all m, l of g^{ml} d_k Gamma^j_{ml}
  J contracted_dgamma(int j, int k) const {
    J r(c.space);
    for (int m = 0; m < n; ++m)
      for (int l = 0; l < n; ++l) {
        const J& gi = c.inverse(m, l);
        const J& G = c.christoffel(j, m, l);
        if (gi.is_zero() || G.is_zero()) continue;
        r += gi * G.dx(k);
      }
    return r;
  }
};

}  // namespace

template <class S>
SymbolMatrix<S> matrix_A(const SymbolContext<S>& ctx) {
  std::vector<BiJet<S>> d(static_cast<std::size_t>(ctx.size()), ctx.mu);
  d[static_cast<std::size_t>(ctx.normal())] = ctx.lambda + S(2) * ctx.mu;
  d[static_cast<std::size_t>(ctx.thermal())] = ctx.alpha;
  return SymbolMatrix<S>::diagonal(d, 0);
}

template <class S>
DSymbols<S> matrix_D(const SymbolContext<S>& ctx) {
  Common<S> h(ctx);
  DSymbols<S> r{SymbolMatrix<S>(ctx.space, ctx.size(), 1), SymbolMatrix<S>(ctx.space, ctx.size(), 0)};
  const BiJet<S> imu = ctx.mu * h.I, ilam = ctx.lambda * h.I;
  for (int a = 0; a < h.t; ++a) {
    r.d1(a, h.N) = imu * h.up(a);
    r.d1(h.N, a) = ilam * h.low(a);
    r.d0(h.N, a) = ctx.lambda * ctx.trace_gamma(a);
  }
  r.d0(h.N, h.N) = ctx.lambda * ctx.trace_gamma(h.N);
  r.d0(h.N, h.T) = -ctx.beta;
  return r;
}

template <class S>
BSymbols<S> symbol_b(const SymbolContext<S>& ctx) {
  Common<S> h(ctx);
  const int N = h.N, T = h.T, t = h.t;
  BSymbols<S> r{SymbolMatrix<S>(ctx.space, ctx.size(), 1), SymbolMatrix<S>(ctx.space, ctx.size(), 0)};
  const BiJet<S> f_mu = h.lpm * h.inv_mu * h.I;
  const BiJet<S> f_l2m = h.lpm * h.inv_l2m * h.I;
  for (int a = 0; a < t; ++a) {
    r.b1(a, N) = f_mu * h.up(a);
    r.b1(N, a) = f_l2m * h.low(a);
  }

  const BiJet<S> trn = ctx.trace_gamma(N);
  const BiJet<S> dmu_n = ctx.mu.dx(N);
  auto& b0 = r.b0;
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      BiJet<S> v = S(2) * ctx.christoffel(a, N, b);
      if (a == b) v += trn + dmu_n * h.inv_mu;
      b0(a, b) = v;
    }
    b0(a, N) = h.raise(ctx.lambda, a) * h.inv_mu;
    b0(N, a) = (h.lpm * ctx.trace_gamma(a) + ctx.mu.dx(a)) * h.inv_l2m;
  }
  b0(N, N) = trn + (ctx.lambda.dx(N) + S(2) * dmu_n) * h.inv_l2m;
  b0(N, T) = -(ctx.beta * h.inv_l2m);
  b0(T, N) = (h.I * ctx.omega * ctx.theta0) * ctx.beta * h.inv_alpha;
  b0(T, T) = trn;
  return r;
}

template <class S>
CSymbols<S> symbol_c(const SymbolContext<S>& ctx) {
  using J = BiJet<S>;
  Common<S> h(ctx);
  const int N = h.N, T = h.T, t = h.t, n = h.n;
  const S I = h.I;
  CSymbols<S> r{SymbolMatrix<S>(ctx.space, ctx.size(), 2), SymbolMatrix<S>(ctx.space, ctx.size(), 1),
                SymbolMatrix<S>(ctx.space, ctx.size(), 0)};
  const J& nsq = ctx.xi.norm_sq;
  const J mu_l2m = ctx.mu * h.inv_l2m;
  const J lpm_mu = h.lpm * h.inv_mu;

  auto& c2 = r.c2;
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      J v = lpm_mu * h.up(a) * h.low(b);
      if (a == b) v += nsq;
      c2(a, b) = -v;
    }
  c2(N, N) = -(mu_l2m * nsq);
  c2(T, T) = -nsq;

  std::vector<J> tr(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) tr[static_cast<std::size_t>(j)] = ctx.trace_gamma(j);
  auto TR = [&](int j) -> const J& { return tr[static_cast<std::size_t>(j)]; };
  std::vector<J> grad_mu(static_cast<std::size_t>(t)), grad_lam(static_cast<std::size_t>(t));
  for (int a = 0; a < t; ++a) {
    grad_mu[static_cast<std::size_t>(a)] = h.raise(ctx.mu, a);
    grad_lam[static_cast<std::size_t>(a)] = h.raise(ctx.lambda, a);
  }
  const J dmu_n = ctx.mu.dx(N);
  const J dlam_n = ctx.lambda.dx(N);

  // c1
  auto& c1 = r.c1;
  J L1(ctx.space);
  for (int a = 0; a < t; ++a) {
    L1 += h.up(a) * TR(a);
    for (int b = 0; b < t; ++b) {
      const J dg = ctx.inverse(a, b).dx(a);
      if (!dg.is_zero()) L1 += dg * h.low(b);
    }
  }
  J xi_grad_mu(ctx.space);
  for (int a = 0; a < t; ++a) xi_grad_mu += h.low(a) * grad_mu[static_cast<std::size_t>(a)];
  const J iL1 = L1 * I;
  const J i_lpm_mu = lpm_mu * I;
  const J beta_mu = ctx.beta * h.inv_mu;
  const J thermo = ctx.beta * h.inv_alpha * (ctx.omega * ctx.theta0);
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      J v = i_lpm_mu * h.up(a) * TR(b) + S(2) * I * h.xi_gamma(a, b);
      J w = grad_lam[static_cast<std::size_t>(a)] * h.low(b) + h.up(a) * ctx.mu.dx(b);
      if (a == b) {
        v += iL1;
        w += xi_grad_mu;
      }
      v += I * (w * h.inv_mu);
      c1(a, b) = v;
    }
    c1(a, N) = i_lpm_mu * TR(N) * h.up(a) + S(2) * I * h.xi_gamma(a, N) + I * (dmu_n * h.inv_mu) * h.up(a);
    c1(a, T) = -(I * beta_mu * h.up(a));
    c1(N, a) = (S(2) * I) * mu_l2m * h.xi_gamma(N, a) + I * (dlam_n * h.inv_l2m) * h.low(a);
    c1(T, a) = -(thermo * h.low(a));
  }
  c1(N, N) = mu_l2m * iL1 + I * (xi_grad_mu * h.inv_l2m);
  c1(T, T) = iL1;

  // c0
  auto& c0 = r.c0;
  const S rw2 = ctx.rho * ctx.omega * ctx.omega;
  const S iw = I * ctx.omega;
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      J dtr(ctx.space);
      for (int g = 0; g < t; ++g) {
        const J& gi = ctx.inverse(a, g);
        if (!gi.is_zero()) dtr += gi * TR(b).dx(g);
      }
      J v = lpm_mu * dtr + h.contracted_dgamma(a, b);
      J w = grad_lam[static_cast<std::size_t>(a)] * TR(b);
      for (int g = 0; g < t; ++g) {
        const J dg = ctx.inverse(a, g).dx(b);
        if (!dg.is_zero()) w -= ctx.mu.dx(g) * dg;
      }
      v += w * h.inv_mu;
      if (a == b) v += rw2 * h.inv_mu;
      c0(a, b) = v;
    }
    {
      J dtr(ctx.space);
      for (int g = 0; g < t; ++g) {
        const J& gi = ctx.inverse(a, g);
        if (!gi.is_zero()) dtr += gi * TR(N).dx(g);
      }
      J w = grad_lam[static_cast<std::size_t>(a)] * TR(N);
      for (int b = 0; b < t; ++b) {
        const J dg = ctx.inverse(a, b).dx(N);
        if (!dg.is_zero()) w -= ctx.mu.dx(b) * dg;
      }
      c0(a, N) = lpm_mu * dtr + h.contracted_dgamma(a, N) + w * h.inv_mu;
    }
    c0(N, a) = (h.lpm * TR(a).dx(N) + dlam_n * TR(a)) * h.inv_l2m + mu_l2m * h.contracted_dgamma(N, a);
    c0(T, a) = iw * ctx.theta0 * ctx.beta * h.inv_alpha * TR(a);
  }
  c0(N, N) = (h.lpm * TR(N).dx(N) + dlam_n * TR(N) + rw2) * h.inv_l2m + mu_l2m * h.contracted_dgamma(N, N);
  c0(T, N) = iw * ctx.theta0 * ctx.beta * h.inv_alpha * TR(N);
  c0(T, T) = (iw * ctx.c_heat) * h.inv_alpha;
  return r;
}

#define THERMODTN_INSTANTIATE(S)                                                                          \
  template struct SymbolContext<S>;                                                                       \
  template SymbolContext<S> make_context(const MetricJet<S>&, const MaterialJet<S>&, const std::vector<double>&, \
                                         int, bool);                                                      \
  template SymbolMatrix<S> matrix_A(const SymbolContext<S>&);                                             \
  template DSymbols<S> matrix_D(const SymbolContext<S>&);                                                 \
  template BSymbols<S> symbol_b(const SymbolContext<S>&);                                                 \
  template CSymbols<S> symbol_c(const SymbolContext<S>&);

THERMODTN_INSTANTIATE(Complex)
THERMODTN_INSTANTIATE(QComplex)

}  // namespace thermodtn
