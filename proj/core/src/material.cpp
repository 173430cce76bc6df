#include "thermodtn/material.hpp"

#include <string>

namespace thermodtn {

namespace {

template <class S>
void require_real(const TaylorJet<S>& j, const char* name) {
  if (!j.valid()) throw Error(ErrorCode::InadmissibleMaterial, std::string(name) + " is missing");
  if (!ScalarOps<S>::is_real(j.value()))
    throw Error(ErrorCode::InadmissibleMaterial, std::string(name) + " must be real at the base point");
}

}  // namespace

template <class S>
const MaterialJet<S>& validate(const MaterialJet<S>& m) {
  using Ops = ScalarOps<S>;
  require_real(m.lambda, "lambda");
  require_real(m.mu, "mu");
  require_real(m.alpha, "alpha");
  require_real(m.beta, "beta");
  if (Ops::real_sign(m.mu.value()) <= 0)
    throw Error(ErrorCode::InadmissibleMaterial, "μ > 0 violated (mu = " +
                                                     std::to_string(Ops::to_complex(m.mu.value()).real()) + ")");
  if (Ops::real_sign(m.lambda.value() + m.mu.value()) < 0)
    throw Error(ErrorCode::InadmissibleMaterial, "λ + μ ≥ 0 violated (lambda + mu = " +
                                                     std::to_string(Ops::to_complex(m.lambda.value() + m.mu.value()).real()) +
                                                     ")");
  if (Ops::real_sign(m.alpha.value()) <= 0)
    throw Error(ErrorCode::InadmissibleMaterial, "α > 0 violated (alpha = " +
                                                     std::to_string(Ops::to_complex(m.alpha.value()).real()) + ")");
  for (const S* c : {&m.rho, &m.omega, &m.theta0, &m.c_heat})
    if (!Ops::is_real(*c)) throw Error(ErrorCode::InadmissibleMaterial, "physical constants must be real");
  return m;
}

template <class S>
TaylorJet<S> constant_jet(const SpacePtr& space, const S& value) {
  return TaylorJet<S>::constant(space, value);
}

template <class S>
TaylorJet<S> polynomial_in_xn(const SpacePtr& space, const S& value, const std::vector<S>& coeffs) {
  const int n = space->nx();
  TaylorJet<S> xn = TaylorJet<S>::x_coordinate(space, n - 1);
  TaylorJet<S> r = TaylorJet<S>::constant(space, value);
  TaylorJet<S> power = xn;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (static_cast<int>(k) + 1 > space->max_x_order()) break;
    r += power * coeffs[k];
    power = power * xn;
  }
  return r;
}

template const MaterialJet<Complex>& validate(const MaterialJet<Complex>&);
template const MaterialJet<QComplex>& validate(const MaterialJet<QComplex>&);
template TaylorJet<Complex> constant_jet(const SpacePtr&, const Complex&);
template TaylorJet<QComplex> constant_jet(const SpacePtr&, const QComplex&);
template TaylorJet<Complex> polynomial_in_xn(const SpacePtr&, const Complex&, const std::vector<Complex>&);
template TaylorJet<QComplex> polynomial_in_xn(const SpacePtr&, const QComplex&, const std::vector<QComplex>&);

}  // namespace thermodtn
