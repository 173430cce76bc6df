#include "thermodtn/symbol_calculus.hpp"

#include <algorithm>
#include <string>

namespace thermodtn {

namespace {

void collect(int vars, int degree, int var, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (var == vars - 1) {
    cur[static_cast<std::size_t>(var)] = degree;
    out.push_back(cur);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    cur[static_cast<std::size_t>(var)] = k;
    collect(vars, degree - k, var + 1, cur, out);
  }
}

}  // namespace

std::vector<std::vector<int>> multi_indices(int vars, int degree) {
  std::vector<std::vector<int>> out;
  if (degree < 0) return out;
  if (vars == 0) {
    if (degree == 0) out.emplace_back();
    return out;
  }
  std::vector<int> cur(static_cast<std::size_t>(vars), 0);
  collect(vars, degree, 0, cur, out);
  return out;
}

template <class S>
S composition_weight(const std::vector<int>& J) {
  using Ops = ScalarOps<S>;
  long fact = 1;
  int total = 0;
  for (int k : J) {
    total += k;
    for (int i = 2; i <= k; ++i) fact *= i;
  }
  // (-i)^total cycles through 1, -i, -1, i
  S w = Ops::ratio(1, fact);
  switch (total % 4) {
    case 1: return w * -Ops::imag_unit();
    case 2: return -w;
    case 3: return w * Ops::imag_unit();
    default: return w;
  }
}

template <class S>
const SymbolMatrix<S>& PartialCache<S>::get(const std::vector<int>& J) {
  const bool zero = std::all_of(J.begin(), J.end(), [](int k) { return k == 0; });
  if (zero) return base();
  auto it = cache_.find(J);
  if (it != cache_.end()) return it->second;
  std::vector<int> prev = J;
  int v = 0;
  while (prev[static_cast<std::size_t>(v)] == 0) ++v;
  --prev[static_cast<std::size_t>(v)];
  const bool prev_zero = std::all_of(prev.begin(), prev.end(), [](int k) { return k == 0; });
  const SymbolMatrix<S>& p = prev_zero ? base() : get(prev);
  SymbolMatrix<S> d = kind_ == Kind::Xi ? p.dxi(v) : p.dx(v);
  return cache_.emplace(J, std::move(d)).first->second;
}

template <class S>
SymbolMatrix<S> compose_terms(PartialCache<S>& a, PartialCache<S>& b, int target_degree) {
  const SymbolMatrix<S>& A = a.base();
  const SymbolMatrix<S>& B = b.base();
  const int order = A.degree() + B.degree() - target_degree;
  if (order < 0)
    throw Error(ErrorCode::IndexOutOfOrder, "composition target degree exceeds deg(a) + deg(b)");
  const int tvars = A.space()->nxi();
  if (A.xi_order() < order || B.x_order() < order)
    throw Error(ErrorCode::InsufficientJetOrder, "composition term of order " + std::to_string(order) +
                                                     " needs xi order " + std::to_string(order) + " (have " +
                                                     std::to_string(A.xi_order()) + ") and x order " +
                                                     std::to_string(order) + " (have " +
                                                     std::to_string(B.x_order()) + ")");
  SymbolMatrix<S> sum(A.space(), A.size(), target_degree);
  bool first = true;
  for (const auto& J : multi_indices(tvars, order)) {
    const SymbolMatrix<S>& bx = b.get(J);
    if (bx.is_zero()) continue;
    const SymbolMatrix<S>& axi = a.get(J);
    SymbolMatrix<S> term = axi * bx;
    term *= composition_weight<S>(J);
    if (first) {
      sum = term;
      first = false;
    } else {
      sum += term;
    }
  }
  if (first) {
    // every term vanished: keep orders consistent with the generic product
    sum = sum.truncated(std::min(A.x_order(), B.x_order() - order), std::min(A.xi_order() - order, B.xi_order()));
  }
  sum.set_degree(target_degree);
  return sum;
}

template <class S>
SymbolMatrix<S> compose_terms(const SymbolMatrix<S>& a, const SymbolMatrix<S>& b, int target_degree) {
  PartialCache<S> ca(a, PartialCache<S>::Kind::Xi);
  PartialCache<S> cb(b, PartialCache<S>::Kind::X);
  return compose_terms(ca, cb, target_degree);
}

template <class S>
StructureMatrices<S> structure_matrices(const SymbolContext<S>& ctx) {
  using J = BiJet<S>;
  const S I = ScalarOps<S>::imag_unit();
  const int N = ctx.normal(), t = ctx.n - 1;
  const J& s = ctx.norm();
  const J inv_s = reciprocal(s);
  const J l2m = ctx.lambda + S(2) * ctx.mu;
  StructureMatrices<S> f{SymbolMatrix<S>(ctx.space, ctx.size(), 1), SymbolMatrix<S>(ctx.space, ctx.size(), 1),
                         (ctx.lambda + ctx.mu) / (ctx.lambda + S(3) * ctx.mu)};
  const J c_up = (l2m / ctx.mu) * (-I);
  const J c_low = (ctx.mu / l2m) * (-I);
  for (int a = 0; a < t; ++a) {
    const J& up = ctx.xi.upper[static_cast<std::size_t>(a)];
    const J& low = ctx.xi.lower[static_cast<std::size_t>(a)];
    for (int b = 0; b < t; ++b) {
      const J v = up * ctx.xi.lower[static_cast<std::size_t>(b)] * inv_s;
      f.F1(a, b) = v;
      f.F2(a, b) = v;
    }
    f.F1(a, N) = up * I;
    f.F1(N, a) = low * I;
    f.F2(a, N) = c_up * up;
    f.F2(N, a) = c_low * low;
  }
  f.F1(N, N) = -s;
  f.F2(N, N) = -s;
  return f;
}

template <class S>
SylvesterSolver<S>::SylvesterSolver(const SymbolContext<S>& ctx) : f_(structure_matrices(ctx)) {
  const BiJet<S>& s = ctx.norm();
  q1_ = SymbolMatrix<S>::scale(SymbolMatrix<S>::identity(ctx.space, ctx.size(), 1), s) +
        SymbolMatrix<S>::scale(f_.F1, f_.kappa);
  m_ = q1_ - symbol_b(ctx).b1;
  const BiJet<S> inv_s = reciprocal(s);
  inv2s_ = inv_s * ScalarOps<S>::ratio(1, 2);
  k_4s2_ = f_.kappa * inv_s * inv_s * ScalarOps<S>::ratio(1, 4);
  k2_4s3_ = k_4s2_ * f_.kappa * inv_s;
}

template <class S>
SylvesterSolver<S>::SylvesterSolver(const SymbolContext<S>& ctx, const SymbolMatrix<S>& q1, const SymbolMatrix<S>& b1)
    : f_(structure_matrices(ctx)), q1_(q1), m_(q1 - b1) {
  const BiJet<S> inv_s = reciprocal(ctx.norm());
  inv2s_ = inv_s * ScalarOps<S>::ratio(1, 2);
  k_4s2_ = f_.kappa * inv_s * inv_s * ScalarOps<S>::ratio(1, 4);
  k2_4s3_ = k_4s2_ * f_.kappa * inv_s;
}

template <class S>
SymbolMatrix<S> SylvesterSolver<S>::solve(const SymbolMatrix<S>& E, int sign, bool check) const {
  const SymbolMatrix<S> F2E = f_.F2 * E;
  SymbolMatrix<S> X = inv2s_ * E;
  X -= k_4s2_ * (F2E + E * f_.F1);
  SymbolMatrix<S> t3 = k2_4s3_ * (F2E * f_.F1);
  if (sign >= 0)
    X += t3;
  else
    X -= t3;
  X.set_degree(E.degree() - 1);
  if (check) {
    const double r = relative_residual(E, X);
    if (!(r <= 1e-10))
      throw Error(ErrorCode::ResidualTooLarge, "Sylvester residual " + std::to_string(r) + " exceeds 1e-10");
  }
  return X;
}

template <class S>
SymbolMatrix<S> SylvesterSolver<S>::residual(const SymbolMatrix<S>& E, const SymbolMatrix<S>& X) const {
  SymbolMatrix<S> r = m_ * X + X * q1_;
  r -= E;
  return r;
}

template <class S>
double SylvesterSolver<S>::relative_residual(const SymbolMatrix<S>& E, const SymbolMatrix<S>& X) const {
  const double e = E.max_abs();
  const double r = residual(E, X).max_abs();
  if (e == 0.0) return r;
  return r / e;
}

Eigen::MatrixXcd brute_force_sylvester(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& N, const Eigen::MatrixXcd& E) {
  const Eigen::Index n = M.rows();
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(n * n, n * n);
  // column-major vec: vec(MX) = (I kron M) vec X, vec(XN) = (N^T kron I) vec X
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) {
        K(j * n + i, j * n + k) += M(i, k);
        K(j * n + i, k * n + i) += N(k, j);
      }
  Eigen::VectorXcd e = Eigen::Map<const Eigen::VectorXcd>(E.data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(K);
  if (lu.rank() < n * n) throw Error(ErrorCode::SolverSingular, "Sylvester operator is singular");
  Eigen::VectorXcd x = lu.solve(e);
  return Eigen::Map<Eigen::MatrixXcd>(x.data(), n, n);
}

#define THERMODTN_INSTANTIATE(S)                                                                  \
  template S composition_weight<S>(const std::vector<int>&);                                      \
  template class PartialCache<S>;                                                                 \
  template SymbolMatrix<S> compose_terms(PartialCache<S>&, PartialCache<S>&, int);                \
  template SymbolMatrix<S> compose_terms(const SymbolMatrix<S>&, const SymbolMatrix<S>&, int);    \
  template StructureMatrices<S> structure_matrices(const SymbolContext<S>&);                      \
  template class SylvesterSolver<S>;

THERMODTN_INSTANTIATE(Complex)
THERMODTN_INSTANTIATE(QComplex)

}  // namespace thermodtn
