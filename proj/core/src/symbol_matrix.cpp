#include "thermodtn/symbol_matrix.hpp"

#include <algorithm>
#include <climits>

namespace thermodtn {

template <class S>
SymbolMatrix<S>::SymbolMatrix(SpacePtr space, int size, int degree)
    : space_(std::move(space)), size_(size), degree_(degree) {
  e_.assign(static_cast<std::size_t>(size * size), BiJet<S>(space_));
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::identity(SpacePtr space, int size, int degree) {
  SymbolMatrix m(space, size, degree);
  for (int i = 0; i < size; ++i) m(i, i) = BiJet<S>::constant(space, S(1));
  return m;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::diagonal(const std::vector<BiJet<S>>& d, int degree) {
  SymbolMatrix m(d.front().space(), static_cast<int>(d.size()), degree);
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
  return m;
}

template <class S>
SymbolMatrix<S>& SymbolMatrix<S>::operator+=(const SymbolMatrix& o) {
  if (o.size_ != size_) throw Error(ErrorCode::IncompatibleJets, "symbol matrix sizes differ");
  for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
  return *this;
}

template <class S>
SymbolMatrix<S>& SymbolMatrix<S>::operator-=(const SymbolMatrix& o) {
  if (o.size_ != size_) throw Error(ErrorCode::IncompatibleJets, "symbol matrix sizes differ");
  for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
  return *this;
}

template <class S>
SymbolMatrix<S>& SymbolMatrix<S>::operator*=(const S& s) {
  for (auto& v : e_) v *= s;
  return *this;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::multiply(const SymbolMatrix& a, const SymbolMatrix& b) {
  if (a.size_ != b.size_) throw Error(ErrorCode::IncompatibleJets, "symbol matrix sizes differ");
  const int n = a.size_;
  SymbolMatrix r(a.space_, n, a.degree_ + b.degree_);
  std::vector<char> az(a.e_.size()), bz(b.e_.size());
  for (std::size_t i = 0; i < a.e_.size(); ++i) az[i] = a.e_[i].is_zero();
  for (std::size_t i = 0; i < b.e_.size(); ++i) bz[i] = b.e_[i].is_zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      BiJet<S>& out = r(i, j);
      bool first = true;
      for (int k = 0; k < n; ++k) {
        if (az[static_cast<std::size_t>(i * n + k)] || bz[static_cast<std::size_t>(k * n + j)]) continue;
        if (first) {
          out = a(i, k) * b(k, j);
          first = false;
        } else {
          out += a(i, k) * b(k, j);
        }
      }
      if (first) {
        // Structural zero: keep the truncation that the generic product would have had.
        int kx = INT_MAX, kxi = INT_MAX;
        for (int k = 0; k < n; ++k) {
          kx = std::min({kx, a(i, k).x_order(), b(k, j).x_order()});
          kxi = std::min({kxi, a(i, k).xi_order(), b(k, j).xi_order()});
        }
        out = out.truncated(kx, kxi);
      }
    }
  return r;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::scale(const SymbolMatrix& a, const BiJet<S>& f) {
  SymbolMatrix r = a;
  for (auto& v : r.e_) v = v.is_zero() ? v.truncated(f.x_order(), f.xi_order()) : v * f;
  return r;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::dx(int i) const {
  SymbolMatrix r = *this;
  for (auto& v : r.e_) v = v.dx(i);
  return r;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::dxi(int k) const {
  SymbolMatrix r = *this;
  for (auto& v : r.e_) v = v.dxi(k);
  r.degree_ = degree_ - 1;
  return r;
}

template <class S>
SymbolMatrix<S> SymbolMatrix<S>::truncated(int x_order, int xi_order) const {
  SymbolMatrix r = *this;
  for (auto& v : r.e_) v = v.truncated(x_order, xi_order);
  return r;
}

template <class S>
bool SymbolMatrix<S>::is_zero() const {
  return std::all_of(e_.begin(), e_.end(), [](const BiJet<S>& v) { return v.is_zero(); });
}

template <class S>
int SymbolMatrix<S>::x_order() const {
  int k = INT_MAX;
  for (const auto& v : e_) k = std::min(k, v.x_order());
  return k;
}

template <class S>
int SymbolMatrix<S>::xi_order() const {
  int k = INT_MAX;
  for (const auto& v : e_) k = std::min(k, v.xi_order());
  return k;
}

template <class S>
Eigen::MatrixXcd SymbolMatrix<S>::value() const {
  Eigen::MatrixXcd m(size_, size_);
  for (int i = 0; i < size_; ++i)
    for (int j = 0; j < size_; ++j) m(i, j) = ScalarOps<S>::to_complex((*this)(i, j).value());
  return m;
}

template <class S>
Eigen::MatrixXcd SymbolMatrix<S>::derivative(std::span<const int> x_index, std::span<const int> xi_index) const {
  Eigen::MatrixXcd m(size_, size_);
  for (int i = 0; i < size_; ++i)
    for (int j = 0; j < size_; ++j)
      m(i, j) = ScalarOps<S>::to_complex((*this)(i, j).derivative(x_index, xi_index));
  return m;
}

template <class S>
double SymbolMatrix<S>::max_abs() const {
  double m = 0.0;
  for (const auto& v : e_) m = std::max(m, v.max_abs());
  return m;
}

template class SymbolMatrix<Complex>;
template class SymbolMatrix<QComplex>;

}  // namespace thermodtn
