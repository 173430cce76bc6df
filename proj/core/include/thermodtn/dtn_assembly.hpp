#pragma once

// Factorization recursion for q = q1 + q0 + q_{-1} + ... and the DtN symbol
// p = A q - d, evaluated over BiJets at one base point and covector.

#include <utility>
#include <vector>

#include "thermodtn/operator_symbols.hpp"
#include "thermodtn/symbol_calculus.hpp"

namespace thermodtn {

template <class S>
struct OperatorSymbols {
  SymbolMatrix<S> A, d1, d0, b1, b0, c2, c1, c0;
};

template <class S>
OperatorSymbols<S> operator_symbols(const SymbolContext<S>& ctx);

/// q_j and p_j for j = 1, 0, ..., 1 - depth.
template <class S>
struct SymbolTable {
  int depth = 0;
  std::vector<SymbolMatrix<S>> q;  // q[k] holds q_{1-k}
  std::vector<SymbolMatrix<S>> p;  // p[k] holds p_{1-k}
  std::vector<SymbolMatrix<S>> E;  // E[k] is the right-hand side that produced q[k+1]
  OperatorSymbols<S> ops;

  const SymbolMatrix<S>& q_at(int j) const { return q[static_cast<std::size_t>(1 - j)]; }
  const SymbolMatrix<S>& p_at(int j) const { return p[static_cast<std::size_t>(1 - j)]; }
};

/// Jet orders (x, xi) a context must carry for a table of the given depth.
std::pair<int, int> required_orders(int depth);

/// q1 = |xi'| I + kappa F1, checked against q1^2 - b1 q1 + c2 = 0.
template <class S>
SymbolMatrix<S> q1(const SymbolContext<S>& ctx, const OperatorSymbols<S>& ops);

template <class S>
SymbolMatrix<S> rhs_E1(const OperatorSymbols<S>& ops, PartialCache<S>& q1x);
template <class S>
SymbolMatrix<S> rhs_E0(const OperatorSymbols<S>& ops, std::vector<PartialCache<S>>& qxi,
                       std::vector<PartialCache<S>>& qx);
/// E_{-m}, m >= 1; the caches hold q_1 ... q_{-m}.
template <class S>
SymbolMatrix<S> rhs_Em(const OperatorSymbols<S>& ops, int m, std::vector<PartialCache<S>>& qxi,
                       std::vector<PartialCache<S>>& qx);

template <class S>
SymbolTable<S> build_table(const SymbolContext<S>& ctx, int depth, bool check = true);

/// Grouped degree-d terms of the full symbol equation, enumerated from scratch.
template <class S>
struct GroupedResidual {
  SymbolMatrix<S> value;
  double scale = 0.0;  // largest individual term, for relative norms
  double relative() const;
};
template <class S>
GroupedResidual<S> grouped_residual(const SymbolTable<S>& table, int degree);

/// Closed form of p1 in terms of lambda, mu, alpha and xi'.
template <class S>
SymbolMatrix<S> p1_closed_form(const SymbolContext<S>& ctx);
/// A q0 minus the (lambda Gamma, -beta) matrix, assembled independently of matrix_D.
template <class S>
SymbolMatrix<S> p0_closed_form(const SymbolContext<S>& ctx, const SymbolMatrix<S>& q0);

/// Thermal couplings of q0 that hold for variable coefficients and any metric.
template <class S>
struct Q0Thermal {
  BiJet<S> normal_thermal;  // (q0)_{n, n+1} = -beta/(lambda + 3 mu)
  BiJet<S> thermal_normal;  // (q0)_{n+1, n} = i mu omega beta theta0 / (alpha (lambda + 3 mu))
};
template <class S>
Q0Thermal<S> q0_thermal_closed_form(const SymbolContext<S>& ctx);

}  // namespace thermodtn
