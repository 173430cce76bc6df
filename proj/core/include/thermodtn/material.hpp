#pragma once

#include <vector>

#include "thermodtn/jet.hpp"

namespace thermodtn {

/// Coefficient jets of the thermoelastic body plus the known physical constants.
template <class S>
struct MaterialJet {
  TaylorJet<S> lambda;
  TaylorJet<S> mu;
  TaylorJet<S> alpha;  // heat conduction
  TaylorJet<S> beta;   // thermo-mechanical coupling
  S rho{};
  S omega{};
  S theta0{};
  S c_heat{};  // specific heat per unit volume
};

/// Returns the input unchanged if mu > 0, lambda + mu >= 0 and alpha > 0 hold at
/// the base point; otherwise throws InadmissibleMaterial naming the violated inequality.
template <class S>
const MaterialJet<S>& validate(const MaterialJet<S>& m);

template <class S>
TaylorJet<S> constant_jet(const SpacePtr& space, const S& value);

/// value + sum_k coeffs[k-1] x_n^k, the "linear-in-xn" preset (monomial coefficients).
template <class S>
TaylorJet<S> polynomial_in_xn(const SpacePtr& space, const S& value, const std::vector<S>& coeffs);

}  // namespace thermodtn
