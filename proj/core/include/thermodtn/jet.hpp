#pragma once

// Truncated multivariate Taylor jets.
//
// A BiJet is a power series in two groups of variables: the spatial variables
// x = (x_1..x_n) around the base point x = 0, and the covector variables
// xi' = (xi_1..xi_{n-1}) around a base covector xi'_0. Each group is truncated
// at its own total degree. The public accessors use the derivative convention:
// `derivative(J, K)` returns d^J_x d^K_xi f at the base point, so no factorial
// bookkeeping leaks into callers. A TaylorJet is a BiJet with no xi variables.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "thermodtn/errors.hpp"
#include "thermodtn/scalar.hpp"

namespace thermodtn {

/// Graded enumeration of multi-indices of `vars` variables up to total degree `order`.
/// Positions are ordered by degree, so every prefix up to a degree is itself a
/// valid enumeration (positions agree between sets with different orders).
class IndexSet {
 public:
  IndexSet(int vars, int order);

  int vars() const { return vars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(degree_.size()); }
  /// Number of multi-indices of total degree <= d.
  int count_upto(int d) const {
    if (d < 0) return 0;
    return count_upto_[static_cast<std::size_t>(d > order_ ? order_ : d)];
  }
  int degree(int pos) const { return degree_[static_cast<std::size_t>(pos)]; }
  std::span<const int> index(int pos) const {
    return {indices_.data() + static_cast<std::size_t>(pos) * static_cast<std::size_t>(vars_),
            static_cast<std::size_t>(vars_)};
  }
  /// Position of a multi-index; -1 when its degree exceeds the order.
  int position(std::span<const int> mi) const;
  /// Position of index(p) + index(q); -1 when the degree exceeds the order.
  int add(int p, int q) const { return add_[static_cast<std::size_t>(p) * degree_.size() + static_cast<std::size_t>(q)]; }
  /// Position of index(p) + e_var; -1 when the degree exceeds the order.
  int shift(int p, int var) const { return shift_[static_cast<std::size_t>(p * vars_ + var)]; }
  /// J! = prod_i J_i!.
  std::int64_t factorial(int pos) const { return factorial_[static_cast<std::size_t>(pos)]; }
  /// All positions of a given total degree.
  std::pair<int, int> degree_range(int d) const { return {count_upto(d - 1), count_upto(d)}; }

 private:
  int vars_;
  int order_;
  std::vector<int> indices_;
  std::vector<int> degree_;
  std::vector<int> count_upto_;
  std::vector<int> lookup_;
  std::vector<int> add_;
  std::vector<int> shift_;
  std::vector<std::int64_t> factorial_;
};

struct JetLayout {
  IndexSet x;
  IndexSet xi;
  JetLayout(int nx, int nxi, int kx, int kxi) : x(nx, kx), xi(nxi, kxi) {}
};

/// Shared description of where a family of jets lives: index tables plus the
/// base covector that the xi variables are centred on.
struct JetSpace {
  std::shared_ptr<const JetLayout> layout;
  std::vector<double> base_covector;

  int nx() const { return layout->x.vars(); }
  int nxi() const { return layout->xi.vars(); }
  int max_x_order() const { return layout->x.order(); }
  int max_xi_order() const { return layout->xi.order(); }
};

using SpacePtr = std::shared_ptr<const JetSpace>;

/// Space with `nx` spatial and `base.size()` covector variables. Index tables are cached.
SpacePtr make_space(int nx, int x_order, std::vector<double> base_covector, int xi_order);
/// Space of pure x-jets (TaylorJet).
SpacePtr make_x_space(int nx, int x_order);

template <class S>
class BiJet {
 public:
  using Ops = ScalarOps<S>;

  BiJet() = default;
  /// Zero jet at full truncation orders of the space.
  explicit BiJet(SpacePtr space);

  static BiJet constant(SpacePtr space, const S& c);
  /// The coordinate function x_i (zero at the base point).
  static BiJet x_coordinate(SpacePtr space, int i);
  /// The covector coordinate xi_k, equal to base_covector[k] at the base point.
  static BiJet xi_coordinate(SpacePtr space, int k);

  const SpacePtr& space() const { return space_; }
  bool valid() const { return static_cast<bool>(space_); }
  int x_order() const { return kx_; }
  int xi_order() const { return kxi_; }

  S value() const { return c_.empty() ? S{} : c_[0]; }
  /// Mixed partial d^J_x d^K_xi at the base point.
  S derivative(std::span<const int> x_index, std::span<const int> xi_index = {}) const;
  void set_derivative(std::span<const int> x_index, std::span<const int> xi_index, const S& v);
  void set_derivative(std::span<const int> x_index, const S& v) { set_derivative(x_index, {}, v); }

  /// Raw normalized Taylor coefficient (derivative divided by J! K!).
  const S& taylor(int x_pos, int xi_pos) const { return c_[idx(x_pos, xi_pos)]; }
  S& taylor(int x_pos, int xi_pos) { return c_[idx(x_pos, xi_pos)]; }

  BiJet dx(int i) const;
  BiJet dxi(int k) const;
  BiJet truncated(int x_order, int xi_order) const;
  bool is_zero() const;
  double max_abs() const;

  /// Polynomial evaluation of the truncated series at base + offsets.
  S evaluate(std::span<const double> x, std::span<const double> xi_offset = {}) const;

  /// d^K_xi at the base covector, as a pure x-jet in `x_space`.
  BiJet x_slice(std::span<const int> xi_index, const SpacePtr& x_space) const;
  /// Embed a pure x-jet into `target` (constant in xi).
  BiJet lift(const SpacePtr& target) const;

  BiJet& operator+=(const BiJet& o);
  BiJet& operator-=(const BiJet& o);
  BiJet& operator*=(const BiJet& o);
  BiJet& operator*=(const S& s);
  BiJet& operator+=(const S& s);

  friend BiJet operator+(BiJet a, const BiJet& b) { return a += b; }
  friend BiJet operator-(BiJet a, const BiJet& b) { return a -= b; }
  friend BiJet operator*(const BiJet& a, const BiJet& b) { return multiply(a, b); }
  friend BiJet operator*(BiJet a, const S& s) { return a *= s; }
  friend BiJet operator*(const S& s, BiJet a) { return a *= s; }
  friend BiJet operator+(BiJet a, const S& s) { return a += s; }
  friend BiJet operator+(const S& s, BiJet a) { return a += s; }
  friend BiJet operator-(BiJet a, const S& s) { return a += -s; }
  friend BiJet operator-(const S& s, const BiJet& a) { return (-a) + s; }
  friend BiJet operator-(BiJet a) {
    a *= -S(1);
    return a;
  }
  friend BiJet operator/(const BiJet& a, const BiJet& b) { return a * reciprocal(b); }
  friend BiJet operator/(const BiJet& a, const S& s) { return a * (S(1) / s); }
  friend BiJet operator/(const S& s, const BiJet& b) { return reciprocal(b) * s; }

  static BiJet multiply(const BiJet& a, const BiJet& b);
  /// Sum_k coeffs[k] (a - a(0))^k, truncated; the composition used by 1/a and sqrt(a).
  static BiJet compose_series(const BiJet& a, const std::vector<S>& coeffs);

  template <class T>
  friend BiJet<T> reciprocal(const BiJet<T>& a);
  template <class T>
  friend BiJet<T> sqrt(const BiJet<T>& a);

 private:
  std::size_t idx(int x_pos, int xi_pos) const {
    return static_cast<std::size_t>(x_pos) * static_cast<std::size_t>(nxi_size_) + static_cast<std::size_t>(xi_pos);
  }
  void check_compatible(const BiJet& o) const;
  const IndexSet& xs() const { return space_->layout->x; }
  const IndexSet& xis() const { return space_->layout->xi; }

  SpacePtr space_;
  int kx_ = 0;
  int kxi_ = 0;
  int nxi_size_ = 0;
  std::vector<S> c_;
};

template <class S>
using TaylorJet = BiJet<S>;

template <class S>
BiJet<S> reciprocal(const BiJet<S>& a);
template <class S>
BiJet<S> sqrt(const BiJet<S>& a);

/// Dispatch for the `jet_arith` operation set.
enum class JetOp { Add, Sub, Mul, Div, Sqrt, Neg };
template <class S>
BiJet<S> jet_arith(const BiJet<S>& a, const BiJet<S>& b, JetOp op);

extern template class BiJet<Complex>;
extern template class BiJet<QComplex>;

}  // namespace thermodtn
