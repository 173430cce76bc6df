#include "thermodtn/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace thermodtn {

namespace {

void enumerate_degree(int vars, int degree, std::vector<int>& current, int var, std::vector<int>& out) {
  if (var == vars - 1) {
    current[static_cast<std::size_t>(var)] = degree;
    out.insert(out.end(), current.begin(), current.end());
    return;
  }
  for (int k = degree; k >= 0; --k) {
    current[static_cast<std::size_t>(var)] = k;
    enumerate_degree(vars, degree - k, current, var + 1, out);
  }
}

std::int64_t factorial_of(int k) {
  std::int64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

IndexSet::IndexSet(int vars, int order) : vars_(vars), order_(order) {
  if (vars < 0 || order < 0) throw Error(ErrorCode::IndexOutOfOrder, "negative jet dimension or order");
  std::vector<int> current(static_cast<std::size_t>(vars), 0);
  for (int d = 0; d <= order; ++d) {
    if (vars == 0) {
      if (d == 0) degree_.push_back(0);
    } else {
      const std::size_t before = indices_.size();
      enumerate_degree(vars, d, current, 0, indices_);
      const std::size_t added = (indices_.size() - before) / static_cast<std::size_t>(vars);
      degree_.insert(degree_.end(), added, d);
    }
    count_upto_.push_back(static_cast<int>(degree_.size()));
  }
  const int n = size();

  std::size_t table = 1;
  for (int v = 0; v < vars; ++v) table *= static_cast<std::size_t>(order + 1);
  lookup_.assign(table, -1);
  factorial_.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    std::size_t key = 0, stride = 1;
    std::int64_t fact = 1;
    for (int v = 0; v < vars; ++v) {
      const int k = index(p)[static_cast<std::size_t>(v)];
      key += static_cast<std::size_t>(k) * stride;
      stride *= static_cast<std::size_t>(order + 1);
      fact *= factorial_of(k);
    }
    lookup_[key] = p;
    factorial_[static_cast<std::size_t>(p)] = fact;
  }

  add_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1);
  std::vector<int> sum(static_cast<std::size_t>(vars));
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      if (degree(p) + degree(q) > order) continue;
      for (int v = 0; v < vars; ++v)
        sum[static_cast<std::size_t>(v)] = index(p)[static_cast<std::size_t>(v)] + index(q)[static_cast<std::size_t>(v)];
      add_[static_cast<std::size_t>(p) * static_cast<std::size_t>(n) + static_cast<std::size_t>(q)] = position(sum);
    }
  }
  shift_.assign(static_cast<std::size_t>(n * vars), -1);
  for (int p = 0; p < n; ++p) {
    if (degree(p) >= order) continue;
    for (int v = 0; v < vars; ++v) {
      std::vector<int> mi(index(p).begin(), index(p).end());
      ++mi[static_cast<std::size_t>(v)];
      shift_[static_cast<std::size_t>(p * vars + v)] = position(mi);
    }
  }
}

int IndexSet::position(std::span<const int> mi) const {
  if (static_cast<int>(mi.size()) != vars_)
    throw Error(ErrorCode::IndexOutOfOrder, "multi-index has " + std::to_string(mi.size()) + " entries, expected " +
                                                std::to_string(vars_));
  int deg = 0;
  std::size_t key = 0, stride = 1;
  for (int v = 0; v < vars_; ++v) {
    const int k = mi[static_cast<std::size_t>(v)];
    if (k < 0) throw Error(ErrorCode::IndexOutOfOrder, "negative multi-index entry");
    deg += k;
    if (deg > order_) return -1;
    key += static_cast<std::size_t>(k) * stride;
    stride *= static_cast<std::size_t>(order_ + 1);
  }
  return lookup_[key];
}

namespace {

std::shared_ptr<const JetLayout> cached_layout(int nx, int nxi, int kx, int kxi) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int>, std::shared_ptr<const JetLayout>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(nx, nxi, kx, kxi);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto layout = std::make_shared<const JetLayout>(nx, nxi, kx, kxi);
  cache.emplace(key, layout);
  return layout;
}

}  // namespace

SpacePtr make_space(int nx, int x_order, std::vector<double> base_covector, int xi_order) {
  const int nxi = static_cast<int>(base_covector.size());
  if (nxi == 0) xi_order = 0;
  auto space = std::make_shared<JetSpace>();
  space->layout = cached_layout(nx, nxi, x_order, xi_order);
  space->base_covector = std::move(base_covector);
  return space;
}

SpacePtr make_x_space(int nx, int x_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SpacePtr> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(nx, x_order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto space = make_space(nx, x_order, {}, 0);
  cache.emplace(key, space);
  return space;
}

template <class S>
BiJet<S>::BiJet(SpacePtr space)
    : space_(std::move(space)),
      kx_(space_->max_x_order()),
      kxi_(space_->max_xi_order()),
      nxi_size_(space_->layout->xi.size()) {
  c_.assign(static_cast<std::size_t>(space_->layout->x.size()) * static_cast<std::size_t>(nxi_size_), S{});
}

template <class S>
BiJet<S> BiJet<S>::constant(SpacePtr space, const S& c) {
  BiJet j(std::move(space));
  j.c_[0] = c;
  return j;
}

template <class S>
BiJet<S> BiJet<S>::x_coordinate(SpacePtr space, int i) {
  BiJet j(std::move(space));
  if (i < 0 || i >= j.space_->nx()) throw Error(ErrorCode::IndexOutOfOrder, "x coordinate out of range");
  if (j.kx_ >= 1) j.c_[j.idx(j.xs().shift(0, i), 0)] = S(1);
  return j;
}

template <class S>
BiJet<S> BiJet<S>::xi_coordinate(SpacePtr space, int k) {
  BiJet j(std::move(space));
  if (k < 0 || k >= j.space_->nxi()) throw Error(ErrorCode::IndexOutOfOrder, "xi coordinate out of range");
  j.c_[0] = Ops::from_double(j.space_->base_covector[static_cast<std::size_t>(k)]);
  if (j.kxi_ >= 1) j.c_[j.idx(0, j.xis().shift(0, k))] = S(1);
  return j;
}

template <class S>
S BiJet<S>::derivative(std::span<const int> x_index, std::span<const int> xi_index) const {
  std::vector<int> zero;
  if (xi_index.empty() && space_->nxi() > 0) {
    zero.assign(static_cast<std::size_t>(space_->nxi()), 0);
    xi_index = zero;
  }
  int dx = 0, dxi = 0;
  for (int k : x_index) dx += k;
  for (int k : xi_index) dxi += k;
  if (dx > kx_ || dxi > kxi_)
    throw Error(ErrorCode::IndexOutOfOrder, "requested derivative of order (" + std::to_string(dx) + "," +
                                                std::to_string(dxi) + ") from a jet of order (" + std::to_string(kx_) +
                                                "," + std::to_string(kxi_) + ")");
  const int px = xs().position(x_index);
  const int pxi = xis().position(xi_index);
  S v = c_[idx(px, pxi)];
  v *= Ops::from_int(static_cast<long>(xs().factorial(px) * xis().factorial(pxi)));
  return v;
}

template <class S>
void BiJet<S>::set_derivative(std::span<const int> x_index, std::span<const int> xi_index, const S& v) {
  std::vector<int> zero;
  if (xi_index.empty() && space_->nxi() > 0) {
    zero.assign(static_cast<std::size_t>(space_->nxi()), 0);
    xi_index = zero;
  }
  const int px = xs().position(x_index);
  const int pxi = xis().position(xi_index);
  if (px < 0 || pxi < 0 || xs().degree(px) > kx_ || xis().degree(pxi) > kxi_)
    throw Error(ErrorCode::IndexOutOfOrder, "jet literal index exceeds truncation order");
  c_[idx(px, pxi)] = v / Ops::from_int(static_cast<long>(xs().factorial(px) * xis().factorial(pxi)));
}

template <class S>
void BiJet<S>::check_compatible(const BiJet& o) const {
  if (!space_ || !o.space_) throw Error(ErrorCode::IncompatibleJets, "operation on an empty jet");
  if (space_ == o.space_) return;
  if (space_->layout != o.space_->layout || space_->base_covector != o.space_->base_covector)
    throw Error(ErrorCode::IncompatibleJets, "jets live in different spaces (dimension, order or base covector)");
}

template <class S>
BiJet<S> BiJet<S>::truncated(int x_order, int xi_order) const {
  BiJet r = *this;
  x_order = std::min(x_order, kx_);
  xi_order = std::min(xi_order, kxi_);
  if (x_order < 0 || xi_order < 0) throw Error(ErrorCode::InsufficientJetOrder, "truncation to a negative order");
  for (int px = 0; px < xs().count_upto(kx_); ++px)
    for (int pxi = 0; pxi < xis().count_upto(kxi_); ++pxi)
      if (xs().degree(px) > x_order || xis().degree(pxi) > xi_order) r.c_[idx(px, pxi)] = S{};
  r.kx_ = x_order;
  r.kxi_ = xi_order;
  return r;
}

template <class S>
BiJet<S>& BiJet<S>::operator+=(const BiJet& o) {
  check_compatible(o);
  const int kx = std::min(kx_, o.kx_), kxi = std::min(kxi_, o.kxi_);
  if (kx < kx_ || kxi < kxi_) *this = truncated(kx, kxi);
  const int nx = xs().count_upto(kx), nxi = xis().count_upto(kxi);
  for (int px = 0; px < nx; ++px)
    for (int pxi = 0; pxi < nxi; ++pxi) c_[idx(px, pxi)] += o.c_[idx(px, pxi)];
  return *this;
}

template <class S>
BiJet<S>& BiJet<S>::operator-=(const BiJet& o) {
  check_compatible(o);
  const int kx = std::min(kx_, o.kx_), kxi = std::min(kxi_, o.kxi_);
  if (kx < kx_ || kxi < kxi_) *this = truncated(kx, kxi);
  const int nx = xs().count_upto(kx), nxi = xis().count_upto(kxi);
  for (int px = 0; px < nx; ++px)
    for (int pxi = 0; pxi < nxi; ++pxi) c_[idx(px, pxi)] -= o.c_[idx(px, pxi)];
  return *this;
}

template <class S>
BiJet<S>& BiJet<S>::operator*=(const S& s) {
  if (Ops::is_zero(s)) {
    std::fill(c_.begin(), c_.end(), S{});
    return *this;
  }
  for (auto& v : c_)
    if (!Ops::is_zero(v)) v = Ops::mul(v, s);
  return *this;
}

template <class S>
BiJet<S>& BiJet<S>::operator+=(const S& s) {
  c_[0] += s;
  return *this;
}

template <class S>
BiJet<S>& BiJet<S>::operator*=(const BiJet& o) {
  *this = multiply(*this, o);
  return *this;
}

template <class S>
BiJet<S> BiJet<S>::multiply(const BiJet& a, const BiJet& b) {
  a.check_compatible(b);
  const IndexSet& X = a.xs();
  const IndexSet& XI = a.xis();
  const int kx = std::min(a.kx_, b.kx_), kxi = std::min(a.kxi_, b.kxi_);
  BiJet r(a.space_);
  r.kx_ = kx;
  r.kxi_ = kxi;
  const int nx = X.count_upto(kx), nxi = XI.count_upto(kxi);
  const int stride = a.nxi_size_;

  // Per x-slice nonzero flags let sparse (e.g. tangentially constant) jets skip whole slices.
  std::vector<char> a_nz(static_cast<std::size_t>(nx), 0), b_nz(static_cast<std::size_t>(nx), 0);
  for (int px = 0; px < nx; ++px) {
    for (int pxi = 0; pxi < nxi; ++pxi) {
      if (!Ops::is_zero(a.c_[a.idx(px, pxi)])) a_nz[static_cast<std::size_t>(px)] = 1;
      if (!Ops::is_zero(b.c_[b.idx(px, pxi)])) b_nz[static_cast<std::size_t>(px)] = 1;
    }
  }
  for (int ax = 0; ax < nx; ++ax) {
    if (!a_nz[static_cast<std::size_t>(ax)]) continue;
    const int bx_end = X.count_upto(kx - X.degree(ax));
    for (int bx = 0; bx < bx_end; ++bx) {
      if (!b_nz[static_cast<std::size_t>(bx)]) continue;
      const int rx = X.add(ax, bx);
      const S* as = a.c_.data() + static_cast<std::size_t>(ax) * static_cast<std::size_t>(stride);
      const S* bs = b.c_.data() + static_cast<std::size_t>(bx) * static_cast<std::size_t>(stride);
      S* rs = r.c_.data() + static_cast<std::size_t>(rx) * static_cast<std::size_t>(stride);
      for (int axi = 0; axi < nxi; ++axi) {
        const S& av = as[axi];
        if (Ops::is_zero(av)) continue;
        const int bxi_end = XI.count_upto(kxi - XI.degree(axi));
        for (int bxi = 0; bxi < bxi_end; ++bxi) Ops::mac(rs[XI.add(axi, bxi)], av, bs[bxi]);
      }
    }
  }
  return r;
}

template <class S>
BiJet<S> BiJet<S>::dx(int i) const {
  if (i < 0 || i >= space_->nx()) throw Error(ErrorCode::IndexOutOfOrder, "x derivative direction out of range");
  if (kx_ < 1) throw Error(ErrorCode::InsufficientJetOrder, "x derivative of an order-0 jet");
  BiJet r(space_);
  r.kx_ = kx_ - 1;
  r.kxi_ = kxi_;
  const int nx = xs().count_upto(kx_ - 1), nxi = xis().count_upto(kxi_);
  for (int px = 0; px < nx; ++px) {
    const int src = xs().shift(px, i);
    const long factor = xs().index(src)[static_cast<std::size_t>(i)];
    for (int pxi = 0; pxi < nxi; ++pxi) {
      const S& v = c_[idx(src, pxi)];
      if (!Ops::is_zero(v)) r.c_[idx(px, pxi)] = v * Ops::from_int(factor);
    }
  }
  return r;
}

template <class S>
BiJet<S> BiJet<S>::dxi(int k) const {
  if (k < 0 || k >= space_->nxi()) throw Error(ErrorCode::IndexOutOfOrder, "xi derivative direction out of range");
  if (kxi_ < 1) throw Error(ErrorCode::InsufficientJetOrder, "xi derivative of an xi-order-0 jet");
  BiJet r(space_);
  r.kx_ = kx_;
  r.kxi_ = kxi_ - 1;
  const int nx = xs().count_upto(kx_), nxi = xis().count_upto(kxi_ - 1);
  for (int pxi = 0; pxi < nxi; ++pxi) {
    const int src = xis().shift(pxi, k);
    const S factor = Ops::from_int(xis().index(src)[static_cast<std::size_t>(k)]);
    for (int px = 0; px < nx; ++px) {
      const S& v = c_[idx(px, src)];
      if (!Ops::is_zero(v)) r.c_[idx(px, pxi)] = v * factor;
    }
  }
  return r;
}

template <class S>
bool BiJet<S>::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const S& v) { return Ops::is_zero(v); });
}

template <class S>
double BiJet<S>::max_abs() const {
  double m = 0.0;
  for (const auto& v : c_) m = std::max(m, Ops::abs(v));
  return m;
}

template <class S>
S BiJet<S>::evaluate(std::span<const double> x, std::span<const double> xi_offset) const {
  S total{};
  const int nx = xs().count_upto(kx_), nxi = xis().count_upto(kxi_);
  for (int px = 0; px < nx; ++px) {
    double mx = 1.0;
    for (int v = 0; v < space_->nx(); ++v)
      mx *= std::pow(v < static_cast<int>(x.size()) ? x[static_cast<std::size_t>(v)] : 0.0,
                     xs().index(px)[static_cast<std::size_t>(v)]);
    for (int pxi = 0; pxi < nxi; ++pxi) {
      double mxi = 1.0;
      for (int v = 0; v < space_->nxi(); ++v)
        mxi *= std::pow(v < static_cast<int>(xi_offset.size()) ? xi_offset[static_cast<std::size_t>(v)] : 0.0,
                        xis().index(pxi)[static_cast<std::size_t>(v)]);
      const double m = mx * mxi;
      if (m != 0.0) total += c_[idx(px, pxi)] * Ops::from_double(m);
    }
  }
  return total;
}

template <class S>
BiJet<S> BiJet<S>::x_slice(std::span<const int> xi_index, const SpacePtr& x_space) const {
  if (x_space->nx() != space_->nx() || x_space->nxi() != 0)
    throw Error(ErrorCode::IncompatibleJets, "x_slice target must be a pure x-space of the same dimension");
  const int pxi = xis().position(xi_index);
  if (pxi < 0 || xis().degree(pxi) > kxi_)
    throw Error(ErrorCode::IndexOutOfOrder, "x_slice xi index exceeds truncation order");
  BiJet r(x_space);
  r.kx_ = std::min(kx_, x_space->max_x_order());
  const S fact = Ops::from_int(static_cast<long>(xis().factorial(pxi)));
  for (int px = 0; px < xs().count_upto(r.kx_); ++px) r.c_[static_cast<std::size_t>(px)] = c_[idx(px, pxi)] * fact;
  return r;
}

template <class S>
BiJet<S> BiJet<S>::lift(const SpacePtr& target) const {
  if (space_->nxi() != 0 || target->nx() != space_->nx())
    throw Error(ErrorCode::IncompatibleJets, "lift expects a pure x-jet of matching dimension");
  BiJet r(target);
  r.kx_ = std::min(kx_, target->max_x_order());
  for (int px = 0; px < xs().count_upto(r.kx_); ++px) r.c_[r.idx(px, 0)] = c_[static_cast<std::size_t>(px)];
  return r;
}

template <class S>
BiJet<S> BiJet<S>::compose_series(const BiJet& a, const std::vector<S>& coeffs) {
  BiJet u = a;
  u.c_[0] = S{};
  const int terms = std::min<int>(static_cast<int>(coeffs.size()) - 1, a.kx_ + a.kxi_);
  BiJet r = constant(a.space_, coeffs[static_cast<std::size_t>(terms)]);
  r.kx_ = a.kx_;
  r.kxi_ = a.kxi_;
  for (int k = terms - 1; k >= 0; --k) {
    r = multiply(r, u);
    r.c_[0] += coeffs[static_cast<std::size_t>(k)];
  }
  return r;
}

template <class S>
BiJet<S> reciprocal(const BiJet<S>& a) {
  using Ops = ScalarOps<S>;
  const S a0 = a.value();
  if (Ops::is_zero(a0)) throw Error(ErrorCode::DivisionByZeroJet, "reciprocal of a jet with zero constant term");
  const int terms = a.x_order() + a.xi_order();
  std::vector<S> coeffs(static_cast<std::size_t>(terms + 1));
  const S inv = S(1) / a0;
  S p = inv;
  for (int k = 0; k <= terms; ++k) {
    coeffs[static_cast<std::size_t>(k)] = (k % 2 == 0) ? p : -p;
    p = p * inv;
  }
  return BiJet<S>::compose_series(a, coeffs);
}

template <class S>
BiJet<S> sqrt(const BiJet<S>& a) {
  using Ops = ScalarOps<S>;
  const S a0 = a.value();
  if (Ops::real_sign(a0) <= 0)
    throw Error(ErrorCode::SqrtBranchError, "sqrt of a jet whose constant term has non-positive real part");
  const int terms = a.x_order() + a.xi_order();
  const S root = Ops::sqrt(a0);
  const S inv = S(1) / a0;
  std::vector<S> coeffs(static_cast<std::size_t>(terms + 1));
  // binom(1/2, k) a0^(1/2 - k)
  S binom = S(1);
  S scale = root;
  for (int k = 0; k <= terms; ++k) {
    coeffs[static_cast<std::size_t>(k)] = binom * scale;
    binom = binom * Ops::ratio(1 - 2 * k, 2 * (k + 1));
    scale = scale * inv;
  }
  return BiJet<S>::compose_series(a, coeffs);
}

template <class S>
BiJet<S> jet_arith(const BiJet<S>& a, const BiJet<S>& b, JetOp op) {
  switch (op) {
    case JetOp::Add: return a + b;
    case JetOp::Sub: return a - b;
    case JetOp::Mul: return a * b;
    case JetOp::Div: return a / b;
    case JetOp::Sqrt: return sqrt(a);
    case JetOp::Neg: return -a;
  }
  return a;
}

template class BiJet<Complex>;
template class BiJet<QComplex>;
template BiJet<Complex> reciprocal(const BiJet<Complex>&);
template BiJet<QComplex> reciprocal(const BiJet<QComplex>&);
template BiJet<Complex> sqrt(const BiJet<Complex>&);
template BiJet<QComplex> sqrt(const BiJet<QComplex>&);
template BiJet<Complex> jet_arith(const BiJet<Complex>&, const BiJet<Complex>&, JetOp);
template BiJet<QComplex> jet_arith(const BiJet<QComplex>&, const BiJet<QComplex>&, JetOp);

}  // namespace thermodtn
