#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "thermodtn/operator_symbols.hpp"
#include "thermodtn/symbol_matrix.hpp"

namespace thermodtn {

/// All multi-indices over `vars` variables with total degree `degree`.
std::vector<std::vector<int>> multi_indices(int vars, int degree);

/// (-i)^{|J|} / J!
template <class S>
S composition_weight(const std::vector<int>& J);

/// Memoized tangential partials d_xi^J m or d_x'^J m of one symbol matrix.
template <class S>
class PartialCache {
 public:
  enum class Kind { Xi, X };
  PartialCache(SymbolMatrix<S> m, Kind kind) : kind_(kind) { cache_.emplace(std::vector<int>{}, std::move(m)); }
  const SymbolMatrix<S>& base() const { return cache_.begin()->second; }
  const SymbolMatrix<S>& get(const std::vector<int>& J);

 private:
  Kind kind_;
  std::map<std::vector<int>, SymbolMatrix<S>> cache_;
};

/// Sum of all composition terms (-i)^{|J|}/J! d_xi^J a d_x'^J b with
/// |J| = deg(a) + deg(b) - target_degree.
template <class S>
SymbolMatrix<S> compose_terms(const SymbolMatrix<S>& a, const SymbolMatrix<S>& b, int target_degree);
template <class S>
SymbolMatrix<S> compose_terms(PartialCache<S>& a, PartialCache<S>& b, int target_degree);

template <class S>
struct StructureMatrices {
  SymbolMatrix<S> F1, F2;
  BiJet<S> kappa;  // (lambda + mu)/(lambda + 3 mu)
};

template <class S>
StructureMatrices<S> structure_matrices(const SymbolContext<S>& ctx);

/// Closed-form solver for (q1 - b1) X + X q1 = E.
template <class S>
class SylvesterSolver {
 public:
  explicit SylvesterSolver(const SymbolContext<S>& ctx);
  SylvesterSolver(const SymbolContext<S>& ctx, const SymbolMatrix<S>& q1, const SymbolMatrix<S>& b1);

  /// sign = +1 is the correct closed form; sign = -1 flips the F2 E F1 term.
  /// With `check`, a relative residual above 1e-10 throws ResidualTooLarge.
  SymbolMatrix<S> solve(const SymbolMatrix<S>& E, int sign = +1, bool check = true) const;
  /// Residual jet (q1 - b1) X + X q1 - E.
  SymbolMatrix<S> residual(const SymbolMatrix<S>& E, const SymbolMatrix<S>& X) const;
  /// max |residual coefficient| / max |E coefficient|.
  double relative_residual(const SymbolMatrix<S>& E, const SymbolMatrix<S>& X) const;

  const SymbolMatrix<S>& lhs() const { return m_; }
  const SymbolMatrix<S>& rhs() const { return q1_; }
  const StructureMatrices<S>& structure() const { return f_; }

 private:
  StructureMatrices<S> f_;
  SymbolMatrix<S> q1_, m_;
  BiJet<S> inv2s_, k_4s2_, k2_4s3_;
};

/// Dense solve of M X + X N = E by vectorization (independent check of the closed form).
Eigen::MatrixXcd brute_force_sylvester(const Eigen::MatrixXcd& M, const Eigen::MatrixXcd& N, const Eigen::MatrixXcd& E);

}  // namespace thermodtn
