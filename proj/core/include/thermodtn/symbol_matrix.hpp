#pragma once

// (n+1)x(n+1) matrices of BiJets. Rows and columns 0..n-2 are tangential,
// n-1 is the normal component and n the thermal one.

#include <vector>

#include <Eigen/Dense>

#include "thermodtn/jet.hpp"

namespace thermodtn {

template <class S>
class SymbolMatrix {
 public:
  SymbolMatrix() = default;
  SymbolMatrix(SpacePtr space, int size, int degree);

  static SymbolMatrix identity(SpacePtr space, int size, int degree = 0);
  /// diag(d_0, ..., d_{size-1}).
  static SymbolMatrix diagonal(const std::vector<BiJet<S>>& d, int degree);

  int size() const { return size_; }
  int degree() const { return degree_; }
  void set_degree(int d) { degree_ = d; }
  const SpacePtr& space() const { return space_; }
  bool valid() const { return static_cast<bool>(space_); }

  BiJet<S>& operator()(int i, int j) { return e_[static_cast<std::size_t>(i * size_ + j)]; }
  const BiJet<S>& operator()(int i, int j) const { return e_[static_cast<std::size_t>(i * size_ + j)]; }

  SymbolMatrix& operator+=(const SymbolMatrix& o);
  SymbolMatrix& operator-=(const SymbolMatrix& o);
  SymbolMatrix& operator*=(const S& s);
  friend SymbolMatrix operator+(SymbolMatrix a, const SymbolMatrix& b) { return a += b; }
  friend SymbolMatrix operator-(SymbolMatrix a, const SymbolMatrix& b) { return a -= b; }
  friend SymbolMatrix operator*(SymbolMatrix a, const S& s) { return a *= s; }
  friend SymbolMatrix operator*(const S& s, SymbolMatrix a) { return a *= s; }
  /// Matrix product; degrees add.
  friend SymbolMatrix operator*(const SymbolMatrix& a, const SymbolMatrix& b) { return multiply(a, b); }
  /// Entrywise product with a scalar jet.
  friend SymbolMatrix operator*(const BiJet<S>& f, const SymbolMatrix& a) { return scale(a, f); }

  static SymbolMatrix multiply(const SymbolMatrix& a, const SymbolMatrix& b);
  static SymbolMatrix scale(const SymbolMatrix& a, const BiJet<S>& f);

  SymbolMatrix dx(int i) const;
  SymbolMatrix dxi(int k) const;
  SymbolMatrix truncated(int x_order, int xi_order) const;
  bool is_zero() const;
  /// Minimum truncation orders over all entries.
  int x_order() const;
  int xi_order() const;

  /// Base-point values.
  Eigen::MatrixXcd value() const;
  /// Mixed derivative of every entry at the base point.
  Eigen::MatrixXcd derivative(std::span<const int> x_index, std::span<const int> xi_index = {}) const;
  double max_abs() const;

 private:
  SpacePtr space_;
  int size_ = 0;
  int degree_ = 0;
  std::vector<BiJet<S>> e_;
};

extern template class SymbolMatrix<Complex>;
extern template class SymbolMatrix<QComplex>;

}  // namespace thermodtn
