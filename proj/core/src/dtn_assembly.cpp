#include "thermodtn/dtn_assembly.hpp"

#include <algorithm>
#include <string>

namespace thermodtn {

template <class S>
OperatorSymbols<S> operator_symbols(const SymbolContext<S>& ctx) {
  OperatorSymbols<S> o;
  o.A = matrix_A(ctx);
  auto d = matrix_D(ctx);
  o.d1 = std::move(d.d1);
  o.d0 = std::move(d.d0);
  auto b = symbol_b(ctx);
  o.b1 = std::move(b.b1);
  o.b0 = std::move(b.b0);
  auto c = symbol_c(ctx);
  o.c2 = std::move(c.c2);
  o.c1 = std::move(c.c1);
  o.c0 = std::move(c.c0);
  return o;
}

std::pair<int, int> required_orders(int depth) { return {std::max(depth, 0), std::max(depth, 0)}; }

namespace {

std::vector<int> unit(int vars, int v) {
  std::vector<int> e(static_cast<std::size_t>(vars), 0);
  e[static_cast<std::size_t>(v)] = 1;
  return e;
}

}  // namespace

template <class S>
SymbolMatrix<S> q1(const SymbolContext<S>& ctx, const OperatorSymbols<S>& ops) {
  const auto f = structure_matrices(ctx);
  SymbolMatrix<S> q = SymbolMatrix<S>::scale(SymbolMatrix<S>::identity(ctx.space, ctx.size(), 1), ctx.norm()) +
                      SymbolMatrix<S>::scale(f.F1, f.kappa);
  q.set_degree(1);
  const SymbolMatrix<S> qq = q * q;
  const SymbolMatrix<S> r = qq - ops.b1 * q + ops.c2;
  const double scale = std::max(qq.max_abs(), ops.c2.max_abs());
  const double rel = scale > 0.0 ? r.max_abs() / scale : r.max_abs();
  if (!(rel <= 1e-11))
    throw Error(ErrorCode::ResidualTooLarge, "q1^2 - b1 q1 + c2 residual " + std::to_string(rel) + " exceeds 1e-11");
  return q;
}

template <class S>
SymbolMatrix<S> rhs_E1(const OperatorSymbols<S>& ops, PartialCache<S>& q1x) {
  const SymbolMatrix<S>& Q1 = q1x.base();
  const int t = Q1.space()->nxi();
  const int N = Q1.size() - 2;
  const S I = ScalarOps<S>::imag_unit();
  const SymbolMatrix<S> m = Q1 - ops.b1;
  SymbolMatrix<S> E = ops.b0 * Q1 + Q1.dx(N) - ops.c1;
  for (int a = 0; a < t; ++a) {
    const SymbolMatrix<S>& dq = q1x.get(unit(t, a));
    if (dq.is_zero()) continue;
    E += (m.dxi(a) * dq) * I;
  }
  E.set_degree(1);
  return E;
}

template <class S>
SymbolMatrix<S> rhs_E0(const OperatorSymbols<S>& ops, std::vector<PartialCache<S>>& qxi,
                       std::vector<PartialCache<S>>& qx) {
  const SymbolMatrix<S>& Q1 = qxi[0].base();
  const SymbolMatrix<S>& Q0 = qxi[1].base();
  const int t = Q1.space()->nxi();
  const int N = Q1.size() - 2;
  const S I = ScalarOps<S>::imag_unit();
  const SymbolMatrix<S> m = Q1 - ops.b1;
  SymbolMatrix<S> E = ops.b0 * Q0 + Q0.dx(N) - ops.c0 - Q0 * Q0;
  for (int a = 0; a < t; ++a) {
    const auto e = unit(t, a);
    const SymbolMatrix<S>& dq0 = qx[1].get(e);
    if (!dq0.is_zero()) E += (m.dxi(a) * dq0) * I;
    const SymbolMatrix<S>& dq1 = qx[0].get(e);
    if (!dq1.is_zero()) E += (qxi[1].get(e) * dq1) * I;
  }
  const S half = ScalarOps<S>::ratio(1, 2);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      std::vector<int> J(static_cast<std::size_t>(t), 0);
      ++J[static_cast<std::size_t>(a)];
      ++J[static_cast<std::size_t>(b)];
      const SymbolMatrix<S>& dx2 = qx[0].get(J);
      if (dx2.is_zero()) continue;
      E += (qxi[0].get(J) * dx2) * half;
    }
  E.set_degree(0);
  return E;
}

template <class S>
SymbolMatrix<S> rhs_Em(const OperatorSymbols<S>& ops, int m, std::vector<PartialCache<S>>& qxi,
                       std::vector<PartialCache<S>>& qx) {
  if (m < 1) throw Error(ErrorCode::IndexOutOfOrder, "rhs_Em needs m >= 1");
  if (static_cast<int>(qxi.size()) < m + 2 || static_cast<int>(qx.size()) < m + 2)
    throw Error(ErrorCode::IndexOutOfOrder, "rhs_Em needs q_1 .. q_{-m}");
  auto at = [](std::vector<PartialCache<S>>& c, int j) -> PartialCache<S>& { return c[static_cast<std::size_t>(1 - j)]; };
  const SymbolMatrix<S>& Qm = at(qxi, -m).base();
  const int t = Qm.space()->nxi();
  const int N = Qm.size() - 2;
  const S I = ScalarOps<S>::imag_unit();
  SymbolMatrix<S> E = ops.b0 * Qm + Qm.dx(N);
  for (int a = 0; a < t; ++a) {
    const SymbolMatrix<S>& dq = at(qx, -m).get(unit(t, a));
    if (dq.is_zero()) continue;
    E -= (ops.b1.dxi(a) * dq) * I;
  }
  for (int j = 1; j >= -m; --j)
    for (int k = 1; k >= -m; --k) {
      if (j + k + m < 0) continue;
      E -= compose_terms(at(qxi, j), at(qx, k), -m);
    }
  E.set_degree(-m);
  return E;
}

template <class S>
SymbolTable<S> build_table(const SymbolContext<S>& ctx, int depth, bool check) {
  if (depth < 0) throw Error(ErrorCode::IndexOutOfOrder, "table depth must be >= 0");
  const auto [kx, kxi] = required_orders(depth);
  const auto& m = ctx.material;
  int have_x = ctx.geo.space->max_x_order();
  for (const auto* j : {&m.lambda, &m.mu, &m.alpha, &m.beta}) have_x = std::min(have_x, j->x_order());
  const int have_xi = ctx.space->max_xi_order();
  if (have_x < kx || have_xi < kxi)
    throw Error(ErrorCode::InsufficientJetOrder,
                "depth " + std::to_string(depth) + " needs x order >= " + std::to_string(kx) + " and xi order >= " +
                    std::to_string(kxi) + "; have x order " + std::to_string(have_x) + " and xi order " +
                    std::to_string(have_xi));

  SymbolTable<S> table;
  table.depth = depth;
  table.ops = operator_symbols(ctx);
  const auto& ops = table.ops;
  SylvesterSolver<S> solver(ctx, q1(ctx, ops), ops.b1);

  std::vector<PartialCache<S>> qxi, qx;
  auto push = [&](SymbolMatrix<S> q) {
    qxi.emplace_back(q, PartialCache<S>::Kind::Xi);
    qx.emplace_back(q, PartialCache<S>::Kind::X);
    table.q.push_back(std::move(q));
  };
  push(solver.rhs());
  table.p.push_back(ops.A * table.q[0] - ops.d1);
  for (int k = 1; k <= depth; ++k) {
    SymbolMatrix<S> E;
    if (k == 1)
      E = rhs_E1(ops, qx[0]);
    else if (k == 2)
      E = rhs_E0(ops, qxi, qx);
    else
      E = rhs_Em(ops, k - 2, qxi, qx);
    SymbolMatrix<S> q = solver.solve(E, +1, check);
    q.set_degree(1 - k);
    table.E.push_back(std::move(E));
    push(q);
    SymbolMatrix<S> p = ops.A * table.q.back();
    if (k == 1) p -= ops.d0;
    p.set_degree(1 - k);
    table.p.push_back(std::move(p));
  }
  return table;
}

template <class S>
double GroupedResidual<S>::relative() const {
  const double r = value.max_abs();
  return scale > 0.0 ? r / scale : r;
}

template <class S>
GroupedResidual<S> grouped_residual(const SymbolTable<S>& table, int d) {
  const int lowest = 1 - table.depth;
  if (d > 2 || d - 1 < lowest)
    throw Error(ErrorCode::IndexOutOfOrder, "degree " + std::to_string(d) + " residual needs q_" +
                                                std::to_string(d - 1) + ", table stops at q_" + std::to_string(lowest));
  const auto& ops = table.ops;
  std::vector<PartialCache<S>> qxi, qx;
  for (const auto& q : table.q) {
    qxi.emplace_back(q, PartialCache<S>::Kind::Xi);
    qx.emplace_back(q, PartialCache<S>::Kind::X);
  }
  auto at = [](std::vector<PartialCache<S>>& c, int j) -> PartialCache<S>& { return c[static_cast<std::size_t>(1 - j)]; };

  GroupedResidual<S> r;
  r.value = SymbolMatrix<S>(table.q[0].space(), table.q[0].size(), d);
  auto add = [&r](const SymbolMatrix<S>& term, bool subtract) {
    r.scale = std::max(r.scale, term.max_abs());
    if (subtract)
      r.value -= term;
    else
      r.value += term;
  };
  for (int j = 1; j >= lowest; --j)
    for (int k = 1; k >= lowest; --k)
      if (j + k - d >= 0) add(compose_terms(at(qxi, j), at(qx, k), d), false);

  PartialCache<S> b1(ops.b1, PartialCache<S>::Kind::Xi), b0(ops.b0, PartialCache<S>::Kind::Xi);
  for (int k = 1; k >= lowest; --k) {
    if (1 + k - d >= 0) add(compose_terms(b1, at(qx, k), d), true);
    if (k - d >= 0) add(compose_terms(b0, at(qx, k), d), true);
  }
  if (d <= 1) add(table.q_at(d).dx(table.q[0].size() - 2), true);
  if (d == 2) add(ops.c2, false);
  if (d == 1) add(ops.c1, false);
  if (d == 0) add(ops.c0, false);
  r.value.set_degree(d);
  return r;
}

template <class S>
SymbolMatrix<S> p1_closed_form(const SymbolContext<S>& ctx) {
  using J = BiJet<S>;
  const S I = ScalarOps<S>::imag_unit();
  const int N = ctx.normal(), T = ctx.thermal(), t = ctx.n - 1;
  const J& s = ctx.norm();
  const J& lam = ctx.lambda;
  const J& mu = ctx.mu;
  const J inv3 = reciprocal(lam + S(3) * mu);
  SymbolMatrix<S> p(ctx.space, ctx.size(), 1);
  const J off = S(2) * I * mu * mu * inv3;
  const J rank1 = mu * (lam + mu) * inv3 / s;
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      J v = rank1 * ctx.xi.upper[static_cast<std::size_t>(a)] * ctx.xi.lower[static_cast<std::size_t>(b)];
      if (a == b) v += mu * s;
      p(a, b) = v;
    }
    p(a, N) = -(off * ctx.xi.upper[static_cast<std::size_t>(a)]);
    p(N, a) = off * ctx.xi.lower[static_cast<std::size_t>(a)];
  }
  p(N, N) = S(2) * mu * (lam + S(2) * mu) * inv3 * s;
  p(T, T) = ctx.alpha * s;
  return p;
}

template <class S>
SymbolMatrix<S> p0_closed_form(const SymbolContext<S>& ctx, const SymbolMatrix<S>& q0) {
  const int N = ctx.normal(), T = ctx.thermal(), size = ctx.size();
  SymbolMatrix<S> p(ctx.space, size, 0);
  for (int i = 0; i < size; ++i) {
    const BiJet<S> row = i < N ? ctx.mu : (i == N ? ctx.lambda + S(2) * ctx.mu : ctx.alpha);
    for (int j = 0; j < size; ++j) p(i, j) = q0(i, j).is_zero() ? q0(i, j) : row * q0(i, j);
  }
  for (int b = 0; b < N; ++b) {
    BiJet<S> tr(ctx.space);
    for (int a = 0; a < N; ++a) tr += ctx.christoffel(a, a, b);
    p(N, b) -= ctx.lambda * tr;
  }
  BiJet<S> trn(ctx.space);
  for (int a = 0; a < N; ++a) trn += ctx.christoffel(a, a, N);
  p(N, N) -= ctx.lambda * trn;
  p(N, T) += ctx.beta;
  return p;
}

template <class S>
Q0Thermal<S> q0_thermal_closed_form(const SymbolContext<S>& ctx) {
  const BiJet<S> inv3 = reciprocal(ctx.lambda + S(3) * ctx.mu);
  Q0Thermal<S> r;
  r.normal_thermal = -(ctx.beta * inv3);
  r.thermal_normal = (ScalarOps<S>::imag_unit() * ctx.omega * ctx.theta0) * ctx.mu * ctx.beta * inv3 / ctx.alpha;
  return r;
}

#define THERMODTN_INSTANTIATE(S)                                                                              \
  template struct OperatorSymbols<S>;                                                                         \
  template struct SymbolTable<S>;                                                                             \
  template struct GroupedResidual<S>;                                                                         \
  template OperatorSymbols<S> operator_symbols(const SymbolContext<S>&);                                      \
  template SymbolMatrix<S> q1(const SymbolContext<S>&, const OperatorSymbols<S>&);                            \
  template SymbolMatrix<S> rhs_E1(const OperatorSymbols<S>&, PartialCache<S>&);                               \
  template SymbolMatrix<S> rhs_E0(const OperatorSymbols<S>&, std::vector<PartialCache<S>>&,                   \
                                  std::vector<PartialCache<S>>&);                                             \
  template SymbolMatrix<S> rhs_Em(const OperatorSymbols<S>&, int, std::vector<PartialCache<S>>&,              \
                                  std::vector<PartialCache<S>>&);                                             \
  template SymbolTable<S> build_table(const SymbolContext<S>&, int, bool);                                    \
  template GroupedResidual<S> grouped_residual(const SymbolTable<S>&, int);                                   \
  template SymbolMatrix<S> p1_closed_form(const SymbolContext<S>&);                                           \
  template SymbolMatrix<S> p0_closed_form(const SymbolContext<S>&, const SymbolMatrix<S>&);                   \
  template Q0Thermal<S> q0_thermal_closed_form(const SymbolContext<S>&);

THERMODTN_INSTANTIATE(Complex)
THERMODTN_INSTANTIATE(QComplex)

}  // namespace thermodtn
