#pragma once

// Metrics in boundary normal coordinates, g = g_ab dx_a dx_b + dx_n^2.
// Indices are zero based: tangential directions 0..n-2, the normal direction n-1.

#include <vector>

#include "thermodtn/jet.hpp"

namespace thermodtn {

template <class S>
struct MetricJet {
  int n = 0;
  SpacePtr space;
  /// Tangential block, (n-1)x(n-1) row major, kept symmetric.
  std::vector<TaylorJet<S>> g;

  int order() const { return space->max_x_order(); }
  const TaylorJet<S>& operator()(int a, int b) const { return g[static_cast<std::size_t>(a * (n - 1) + b)]; }

  static MetricJet euclidean(int n, int order);
  /// g_ab = w(x)^2 delta_ab.
  static MetricJet warped(int n, const TaylorJet<S>& w);
  /// Components given for a <= b; the lower triangle is mirrored.
  static MetricJet from_components(int n, SpacePtr space, const std::vector<TaylorJet<S>>& upper);
};

/// Everything the symbol builders need from the metric, as x-jets.
template <class S>
struct Geometry {
  int n = 0;
  SpacePtr space;
  std::vector<TaylorJet<S>> g;      // full n x n
  std::vector<TaylorJet<S>> ginv;   // full n x n
  std::vector<TaylorJet<S>> gamma;  // Gamma^m_{jk} at (m*n + j)*n + k

  const TaylorJet<S>& metric(int j, int k) const { return g[static_cast<std::size_t>(j * n + k)]; }
  const TaylorJet<S>& inverse(int j, int k) const { return ginv[static_cast<std::size_t>(j * n + k)]; }
  const TaylorJet<S>& christoffel(int m, int j, int k) const {
    return gamma[static_cast<std::size_t>((m * n + j) * n + k)];
  }
  /// sum over tangential a of Gamma^a_{a j}
  TaylorJet<S> trace_gamma(int j) const;
};

/// Inverse of the tangential block; throws SingularMetric unless the base value is SPD.
template <class S>
std::vector<TaylorJet<S>> inverse_metric(const MetricJet<S>& g);

/// Inverse metric and Christoffel symbols with the normal-form zeros filled in.
template <class S>
Geometry<S> christoffel(const MetricJet<S>& g);

/// Covector xi' in the BiJet space centred on it.
template <class S>
struct Covector {
  SpacePtr space;
  std::vector<double> base;
  std::vector<BiJet<S>> lower;  // xi_a
  std::vector<BiJet<S>> upper;  // xi^a = g^{ab} xi_b
  BiJet<S> norm_sq;
  BiJet<S> norm;  // unset when the base covector is zero
};

/// Builds the BiJet space (x order of the geometry, xi order `xi_order`) and
/// the covector quantities. A zero covector is rejected unless `allow_zero`,
/// which is only useful for reading off polynomial symbols at xi' = 0.
/// `x_order` < 0 means the order of the geometry's space.
template <class S>
Covector<S> covector_package(const Geometry<S>& geo, const std::vector<double>& xi, int xi_order,
                             bool allow_zero = false, int x_order = -1);

}  // namespace thermodtn
