#include "thermodtn/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace thermodtn {

template <class S>
MetricJet<S> MetricJet<S>::euclidean(int n, int order) {
  if (n < 2) throw Error(ErrorCode::SingularMetric, "dimension must be at least 2");
  MetricJet m;
  m.n = n;
  m.space = make_x_space(n, order);
  const int t = n - 1;
  m.g.reserve(static_cast<std::size_t>(t * t));
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) m.g.push_back(TaylorJet<S>::constant(m.space, a == b ? S(1) : S(0)));
  return m;
}

template <class S>
MetricJet<S> MetricJet<S>::warped(int n, const TaylorJet<S>& w) {
  if (n < 2) throw Error(ErrorCode::SingularMetric, "dimension must be at least 2");
  MetricJet m;
  m.n = n;
  m.space = w.space();
  const TaylorJet<S> w2 = w * w;
  const int t = n - 1;
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) m.g.push_back(a == b ? w2 : TaylorJet<S>(m.space));
  return m;
}

template <class S>
MetricJet<S> MetricJet<S>::from_components(int n, SpacePtr space, const std::vector<TaylorJet<S>>& upper) {
  const int t = n - 1;
  if (static_cast<int>(upper.size()) != t * (t + 1) / 2)
    throw Error(ErrorCode::SingularMetric, "expected " + std::to_string(t * (t + 1) / 2) + " metric components");
  MetricJet m;
  m.n = n;
  m.space = std::move(space);
  m.g.assign(static_cast<std::size_t>(t * t), TaylorJet<S>(m.space));
  int k = 0;
  for (int a = 0; a < t; ++a)
    for (int b = a; b < t; ++b, ++k) {
      m.g[static_cast<std::size_t>(a * t + b)] = upper[static_cast<std::size_t>(k)];
      m.g[static_cast<std::size_t>(b * t + a)] = upper[static_cast<std::size_t>(k)];
    }
  return m;
}

template <class S>
TaylorJet<S> Geometry<S>::trace_gamma(int j) const {
  TaylorJet<S> r(space);
  for (int a = 0; a < n - 1; ++a) r += christoffel(a, a, j);
  return r;
}

template <class S>
std::vector<TaylorJet<S>> inverse_metric(const MetricJet<S>& g) {
  using Ops = ScalarOps<S>;
  const int t = g.n - 1;
  Eigen::MatrixXd base(t, t);
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      const Complex v = Ops::to_complex(g(a, b).value());
      if (v.imag() != 0.0) throw Error(ErrorCode::SingularMetric, "metric must be real");
      base(a, b) = v.real();
    }
  if (!base.isApprox(base.transpose(), 1e-14)) throw Error(ErrorCode::SingularMetric, "metric is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(base);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularMetric, "metric is not positive definite at the base point");

  // Gauss-Jordan without pivoting; SPD base values keep every pivot invertible.
  std::vector<TaylorJet<S>> a = g.g;
  std::vector<TaylorJet<S>> inv;
  for (int r = 0; r < t; ++r)
    for (int c = 0; c < t; ++c) inv.push_back(TaylorJet<S>::constant(g.space, r == c ? S(1) : S(0)));
  auto at = [t](std::vector<TaylorJet<S>>& m, int r, int c) -> TaylorJet<S>& {
    return m[static_cast<std::size_t>(r * t + c)];
  };
  for (int p = 0; p < t; ++p) {
    const TaylorJet<S> piv = reciprocal(at(a, p, p));
    for (int c = 0; c < t; ++c) {
      at(a, p, c) = at(a, p, c) * piv;
      at(inv, p, c) = at(inv, p, c) * piv;
    }
    for (int r = 0; r < t; ++r) {
      if (r == p || at(a, r, p).is_zero()) continue;
      const TaylorJet<S> f = at(a, r, p);
      for (int c = 0; c < t; ++c) {
        at(a, r, c) -= f * at(a, p, c);
        at(inv, r, c) -= f * at(inv, p, c);
      }
    }
  }
  return inv;
}

template <class S>
Geometry<S> christoffel(const MetricJet<S>& gm) {
  const int n = gm.n;
  const int t = n - 1;
  Geometry<S> geo;
  geo.n = n;
  geo.space = gm.space;
  const auto tinv = inverse_metric(gm);
  geo.g.assign(static_cast<std::size_t>(n * n), TaylorJet<S>(gm.space));
  geo.ginv.assign(static_cast<std::size_t>(n * n), TaylorJet<S>(gm.space));
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      geo.g[static_cast<std::size_t>(a * n + b)] = gm(a, b);
      geo.ginv[static_cast<std::size_t>(a * n + b)] = tinv[static_cast<std::size_t>(a * t + b)];
    }
  geo.g[static_cast<std::size_t>(n * n - 1)] = TaylorJet<S>::constant(gm.space, S(1));
  geo.ginv[static_cast<std::size_t>(n * n - 1)] = TaylorJet<S>::constant(gm.space, S(1));

  if (gm.order() < 1) throw Error(ErrorCode::InsufficientJetOrder, "Christoffel symbols need metric order >= 1");
  std::vector<TaylorJet<S>> dg(static_cast<std::size_t>(n * n * n));  // d_l g_{jk} at (l*n + j)*n + k
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) dg[static_cast<std::size_t>((l * n + j) * n + k)] = geo.metric(j, k).dx(l);
  auto d = [&](int l, int j, int k) -> const TaylorJet<S>& { return dg[static_cast<std::size_t>((l * n + j) * n + k)]; };

  const S half = ScalarOps<S>::ratio(1, 2);
  geo.gamma.assign(static_cast<std::size_t>(n * n * n), TaylorJet<S>(gm.space));
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        TaylorJet<S> sum(gm.space);
        for (int l = 0; l < n; ++l) {
          const auto& gi = geo.inverse(m, l);
          if (gi.is_zero()) continue;
          sum += gi * (d(k, j, l) + d(j, k, l) - d(l, j, k));
        }
        sum *= half;
        geo.gamma[static_cast<std::size_t>((m * n + j) * n + k)] = sum;
        geo.gamma[static_cast<std::size_t>((m * n + k) * n + j)] = sum;
      }
  return geo;
}

template <class S>
Covector<S> covector_package(const Geometry<S>& geo, const std::vector<double>& xi, int xi_order, bool allow_zero,
                             int x_order) {
  const int n = geo.n;
  if (static_cast<int>(xi.size()) != n - 1)
    throw Error(ErrorCode::ZeroCovector, "covector has " + std::to_string(xi.size()) + " components, expected " +
                                             std::to_string(n - 1));
  bool zero = true;
  for (double v : xi) {
    if (!std::isfinite(v)) throw Error(ErrorCode::ZeroCovector, "covector component is not finite");
    if (v != 0.0) zero = false;
  }
  if (zero && !allow_zero) throw Error(ErrorCode::ZeroCovector, "xi' must be nonzero");

  Covector<S> cv;
  cv.base = xi;
  cv.space = make_space(n, x_order < 0 ? geo.space->max_x_order() : x_order, xi, xi_order);
  for (int a = 0; a < n - 1; ++a) cv.lower.push_back(BiJet<S>::xi_coordinate(cv.space, a));
  cv.norm_sq = BiJet<S>(cv.space);
  for (int a = 0; a < n - 1; ++a) {
    BiJet<S> up(cv.space);
    for (int b = 0; b < n - 1; ++b) {
      const auto& gi = geo.inverse(a, b);
      if (gi.is_zero()) continue;
      up += gi.lift(cv.space) * cv.lower[static_cast<std::size_t>(b)];
    }
    cv.norm_sq += up * cv.lower[static_cast<std::size_t>(a)];
    cv.upper.push_back(std::move(up));
  }
  if (!zero) cv.norm = sqrt(cv.norm_sq);
  return cv;
}

template struct MetricJet<Complex>;
template struct MetricJet<QComplex>;
template struct Geometry<Complex>;
template struct Geometry<QComplex>;
template std::vector<TaylorJet<Complex>> inverse_metric(const MetricJet<Complex>&);
template std::vector<TaylorJet<QComplex>> inverse_metric(const MetricJet<QComplex>&);
template Geometry<Complex> christoffel(const MetricJet<Complex>&);
template Geometry<QComplex> christoffel(const MetricJet<QComplex>&);
template Covector<Complex> covector_package(const Geometry<Complex>&, const std::vector<double>&, int, bool, int);
template Covector<QComplex> covector_package(const Geometry<QComplex>&, const std::vector<double>&, int, bool, int);

}  // namespace thermodtn
