#pragma once

#include <complex>
#include <string>

#include <gmpxx.h>

#include "thermodtn/errors.hpp"

namespace thermodtn {

using Complex = std::complex<double>;

/// Exact complex rational. Backs the rational evaluation mode, where every
/// quantity (including |xi'|) must stay in Q[i].
struct QComplex {
  mpq_class re;
  mpq_class im;

  QComplex() : re(0), im(0) {}
  QComplex(const mpq_class& r) : re(r), im(0) {}
  QComplex(const mpq_class& r, const mpq_class& i) : re(r), im(i) {}
  QComplex(long v) : re(v), im(0) {}

  QComplex& operator+=(const QComplex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  QComplex& operator-=(const QComplex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  QComplex& operator*=(const QComplex& o) {
    mpq_class r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  QComplex& operator/=(const QComplex& o) {
    mpq_class d = o.re * o.re + o.im * o.im;
    if (sgn(d) == 0) throw Error(ErrorCode::DivisionByZeroJet, "rational division by zero");
    mpq_class r = (re * o.re + im * o.im) / d;
    im = (im * o.re - re * o.im) / d;
    re = r;
    return *this;
  }
  friend QComplex operator+(QComplex a, const QComplex& b) { return a += b; }
  friend QComplex operator-(QComplex a, const QComplex& b) { return a -= b; }
  friend QComplex operator*(QComplex a, const QComplex& b) { return a *= b; }
  friend QComplex operator/(QComplex a, const QComplex& b) { return a /= b; }
  friend QComplex operator-(const QComplex& a) { return QComplex(-a.re, -a.im); }
  friend bool operator==(const QComplex& a, const QComplex& b) { return a.re == b.re && a.im == b.im; }
};

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<Complex> {
  static constexpr bool exact = false;
  static Complex from_double(double re, double im = 0.0) { return {re, im}; }
  static Complex from_int(long v) { return {static_cast<double>(v), 0.0}; }
  static Complex ratio(long num, long den) { return {static_cast<double>(num) / static_cast<double>(den), 0.0}; }
  static Complex imag_unit() { return {0.0, 1.0}; }
  static bool is_zero(const Complex& z) { return z.real() == 0.0 && z.imag() == 0.0; }
  static Complex to_complex(const Complex& z) { return z; }
  static int real_sign(const Complex& z) { return (z.real() > 0) - (z.real() < 0); }
  static bool is_real(const Complex& z) { return z.imag() == 0.0; }
  static Complex sqrt(const Complex& z) { return std::sqrt(z); }
  static double abs(const Complex& z) { return std::abs(z); }

  // Plain multiply-accumulate; std::complex operator* carries NaN recovery
  // branches that dominate the jet convolution loops.
  static void mac(Complex& acc, const Complex& a, const Complex& b) {
    const double ar = a.real(), ai = a.imag(), br = b.real(), bi = b.imag();
    acc = Complex(acc.real() + ar * br - ai * bi, acc.imag() + ar * bi + ai * br);
  }
  static Complex mul(const Complex& a, const Complex& b) {
    Complex r(0.0, 0.0);
    mac(r, a, b);
    return r;
  }
};

template <>
struct ScalarOps<QComplex> {
  static constexpr bool exact = true;
  static QComplex from_double(double re, double im = 0.0) { return QComplex(mpq_class(re), mpq_class(im)); }
  static QComplex from_int(long v) { return QComplex(mpq_class(v)); }
  static QComplex ratio(long num, long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return QComplex(q);
  }
  static QComplex imag_unit() { return QComplex(mpq_class(0), mpq_class(1)); }
  static bool is_zero(const QComplex& z) { return sgn(z.re) == 0 && sgn(z.im) == 0; }
  static Complex to_complex(const QComplex& z) { return {z.re.get_d(), z.im.get_d()}; }
  static int real_sign(const QComplex& z) { return sgn(z.re); }
  static bool is_real(const QComplex& z) { return sgn(z.im) == 0; }
  static double abs(const QComplex& z) { return std::abs(to_complex(z)); }

  /// Exact square root; defined only for non-negative rational squares.
  static QComplex sqrt(const QComplex& z) {
    if (sgn(z.im) != 0 || sgn(z.re) < 0)
      throw Error(ErrorCode::NotRepresentable, "rational sqrt of a non-real or negative value");
    mpz_class num = z.re.get_num(), den = z.re.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
      throw Error(ErrorCode::NotRepresentable,
                  "rational sqrt of a non-square: " + z.re.get_str() + " (use float mode)");
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return QComplex(mpq_class(rn, rd));
  }

  static void mac(QComplex& acc, const QComplex& a, const QComplex& b) {
    acc.re += a.re * b.re - a.im * b.im;
    acc.im += a.re * b.im + a.im * b.re;
  }
  static QComplex mul(const QComplex& a, const QComplex& b) { return a * b; }
};

}  // namespace thermodtn
