#pragma once

// Independent ground truth for the symbol engine: the operator applied
// directly in jet arithmetic, the constant-coefficient half-space DtN matrix,
// and a finite-difference slab solver for x_n-dependent coefficients.

#include <vector>

#include <Eigen/Dense>

#include "thermodtn/geometry.hpp"
#include "thermodtn/material.hpp"
#include "thermodtn/operator_symbols.hpp"

namespace thermodtn {

/// T_g(u, theta) for contravariant displacement components u^1..u^n and the
/// temperature, evaluated in jet arithmetic. Output has n + 1 components.
template <class S>
std::vector<TaylorJet<S>> apply_Tg(const Geometry<S>& geo, const MaterialJet<S>& m,
                                   const std::vector<TaylorJet<S>>& u, const TaylorJet<S>& theta);

/// A (d_n^2 U + B d_n U + C U), with B and C applied as tangential differential
/// operators read off their symbols. `ctx` must be built at the zero covector
/// with xi order >= 2.
template <class S>
std::vector<TaylorJet<S>> apply_factored_operator(const SymbolContext<S>& ctx, const std::vector<TaylorJet<S>>& U);

struct DtnSample {
  std::vector<double> xi;
  Eigen::MatrixXcd lambda;  // columns: Neumann data of the Dirichlet basis e_1 .. e_{n+1}
  double slab_length = 0.0;
  int grid = 0;
  double decay = 0.0;             // exp(-|xi| X) for slabs, 0 for the half-space
  double richardson_ratio = 0.0;  // |L_N - L_2N| / |L_2N - L_4N|
};

/// Exact DtN matrix of the flat half-space x_n > 0 with constant coefficients.
DtnSample halfspace_multiplier(const MaterialJet<Complex>& m, const std::vector<double>& xi);

struct SlabOptions {
  double length = 0.0;       // 0 picks decay_exponent / |xi|
  double decay_exponent = 28.0;
  double h_xi = 0.01;        // target |xi| h on the coarsest grid
  int grid = 0;              // 0 derives the coarsest grid from h_xi
  bool check_convergence = true;
};

/// DtN matrix of the flat slab 0 < x_n < X with zero Dirichlet data at x_n = X.
/// Coefficients are the material jets evaluated along the x_n axis.
/// Centered second-order differences on grids N, 2N, 4N with two Richardson steps.
DtnSample slab_dtn(const MaterialJet<Complex>& m, const std::vector<double>& xi, const SlabOptions& opt = {});

}  // namespace thermodtn
