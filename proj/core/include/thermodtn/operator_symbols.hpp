#pragma once

// Matrices of the operator in boundary normal coordinates:
//   A^{-1} T_g = d_n^2 + B d_n + C,   Lambda_g = A(-d_n) - D,
// with symbols b = b1 + b0, c = c2 + c1 + c0, D ~ d1 + d0 under d/dx_a -> i xi_a.

#include <vector>

#include "thermodtn/geometry.hpp"
#include "thermodtn/material.hpp"
#include "thermodtn/symbol_matrix.hpp"

namespace thermodtn {

/// Geometry, material and covector lifted into one BiJet space.
template <class S>
struct SymbolContext {
  int n = 0;
  SpacePtr space;
  Geometry<S> geo;
  MaterialJet<S> material;
  Covector<S> xi;

  std::vector<BiJet<S>> ginv;   // n x n, lifted
  std::vector<BiJet<S>> gamma;  // (m*n + j)*n + k, lifted
  BiJet<S> lambda, mu, alpha, beta;
  S rho{}, omega{}, theta0{}, c_heat{};

  int size() const { return n + 1; }
  int normal() const { return n - 1; }
  int thermal() const { return n; }
  const BiJet<S>& inverse(int j, int k) const { return ginv[static_cast<std::size_t>(j * n + k)]; }
  const BiJet<S>& christoffel(int m, int j, int k) const {
    return gamma[static_cast<std::size_t>((m * n + j) * n + k)];
  }
  BiJet<S> trace_gamma(int j) const;
  /// |xi'|; throws ZeroCovector for the zero covector.
  const BiJet<S>& norm() const;
};

/// Validates the material, computes Christoffel symbols and lifts everything.
/// The x order of the space is the larger of the metric and material orders.
template <class S>
SymbolContext<S> make_context(const MetricJet<S>& g, const MaterialJet<S>& m, const std::vector<double>& xi,
                              int xi_order, bool allow_zero_covector = false);

template <class S>
SymbolMatrix<S> matrix_A(const SymbolContext<S>& ctx);

template <class S>
struct DSymbols {
  SymbolMatrix<S> d1, d0;
};
template <class S>
DSymbols<S> matrix_D(const SymbolContext<S>& ctx);

template <class S>
struct BSymbols {
  SymbolMatrix<S> b1, b0;
};
template <class S>
BSymbols<S> symbol_b(const SymbolContext<S>& ctx);

template <class S>
struct CSymbols {
  SymbolMatrix<S> c2, c1, c0;
};
template <class S>
CSymbols<S> symbol_c(const SymbolContext<S>& ctx);

}  // namespace thermodtn
