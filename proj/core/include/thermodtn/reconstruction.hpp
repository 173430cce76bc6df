#pragma once

// Inverse map: symbol values at sample covectors -> boundary jets of lambda, mu,
// alpha, beta along the normal. Coefficients are taken to depend on x_n only
// near the base point; the metric is known.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "thermodtn/geometry.hpp"
#include "thermodtn/material.hpp"
#include "thermodtn/oracle.hpp"

namespace thermodtn {

/// p[k] holds the value of p_{1-k} at xi.
struct SymbolObservation {
  std::vector<double> xi;
  std::vector<Eigen::MatrixXcd> p;
};

struct ReconstructionProblem {
  MetricJet<Complex> metric;
  Complex rho{}, omega{}, theta0{}, c_heat{};
  std::vector<SymbolObservation> samples;
};

struct Order0 {
  double lambda = 0.0, mu = 0.0, alpha = 0.0, beta = 0.0;
};

/// Closed-form boundary values from p1 (and p0 for beta) at one covector.
/// `g` is the tangential metric at the base point.
Order0 recover_order0(const Eigen::MatrixXcd& p1, const Eigen::MatrixXcd& p0, const std::vector<double>& xi,
                      const Eigen::MatrixXd& g, double tol = 1e-6);
/// Same, averaged over all samples; throws InconsistentSymbol if they disagree.
Order0 recover_order0(const ReconstructionProblem& problem, double tol = 1e-6);

enum class Coefficient { Lambda, Mu, Alpha, Beta };
const char* coefficient_name(Coefficient c);

struct Unknown {
  Coefficient coefficient;
  int order;
};
/// Order-k coefficients that enter p_{1-s} first: lambda, mu at order s and
/// beta (s >= 1), alpha (s >= 2) at order s - 1.
std::vector<Unknown> layer_unknowns(int stage);

struct LayerReport {
  int stage = 0;
  std::vector<Unknown> unknowns;
  int rows = 0;
  double condition = 0.0;
  double residual = 0.0;  // |A x - b| / |p_{1-s}|
};

/// Normal derivatives d^k/dx_n^k at the boundary; entry k is order k.
struct RecoveredJet {
  std::vector<double> lambda, mu, alpha, beta;
  std::vector<LayerReport> layers;

  std::vector<double>& of(Coefficient c);
  const std::vector<double>& of(Coefficient c) const;
  /// Admissibility of the order-zero values; throws InadmissibleMaterial.
  void validate() const;
};

/// Material with the given normal derivatives, in an x-space of order `order`.
MaterialJet<Complex> material_from_jet(const RecoveredJet& jet, const ReconstructionProblem& problem, int order);

/// Same metric with its jets cut to `order`.
MetricJet<Complex> truncate_metric(const MetricJet<Complex>& g, int order);

/// p_1 ... p_{1-depth} from the forward engine at one covector.
std::vector<Eigen::MatrixXcd> forward_symbols(const MetricJet<Complex>& g, const MaterialJet<Complex>& m,
                                              const std::vector<double>& xi, int depth);

/// Observations of the forward map at the given covectors.
ReconstructionProblem make_problem(const MetricJet<Complex>& g, const MaterialJet<Complex>& m,
                                   const std::vector<std::vector<double>>& covectors, int depth);

struct LayerOptions {
  double rank_tolerance = 1e-9;      // smallest / largest singular value
  double residual_tolerance = 1e-6;  // relative least-squares residual
  int jobs = 1;
};

/// Solve one stage given all lower layers in `jet` (resized as needed).
LayerReport solve_layer(const ReconstructionProblem& problem, RecoveredJet& jet, int stage,
                        const LayerOptions& opt = {});

/// Order zero from p1 in closed form, then stages 1 .. depth by affine least squares.
RecoveredJet layer_strip(const ReconstructionProblem& problem, int depth, const LayerOptions& opt = {});

/// d alpha/dx_n and d beta/dx_n from the thermal entries of E0 = dq0/dx_n + T_{-1}.
/// `printed_dalpha` drops the i omega theta0 factor of the (n+1, n) entry.
struct ThermalClosedForm {
  double dbeta = 0.0;
  double dalpha = 0.0;
  Complex printed_dalpha{};
};
/// Needs lambda, mu to order 1 and alpha, beta to order 0 in `known`; uses the first sample.
ThermalClosedForm recover_normal_derivative_thermal(const ReconstructionProblem& problem, const RecoveredJet& known);

/// Largest entry of p_{1-s}(v0) - 2 p_{1-s}(v1) + p_{1-s}(v2) over the samples,
/// where the unknown takes v0, v0 + h, v0 + 2h and everything else is fixed.
double affinity_second_difference(const ReconstructionProblem& problem, const RecoveredJet& jet, int stage,
                                  const Unknown& u, double v0, double h);

struct SymbolFit {
  std::vector<double> xi0;
  std::vector<double> magnitudes;
  std::vector<Eigen::MatrixXcd> p;  // p[k] estimates p_{1-k}(xi0)
  double condition = 0.0;
  double residual = 0.0;  // largest relative residual over entries
  SymbolObservation observation() const { return {xi0, p}; }
};

/// Least-squares fit of Lambda(t xi0) ~ sum_{j=1-depth}^{1} t^j P_j; needs depth + 3 samples.
SymbolFit fit_symbols_from_samples(const std::vector<DtnSample>& samples, const std::vector<double>& xi0, int depth,
                                   double max_condition = 1e12);

struct JetError {
  int order;
  Coefficient coefficient;
  double recovered, truth, abs_err, rel_err;
};
/// rel_err divides by max(|truth|, |order-0 truth|).
std::vector<JetError> compare_jets(const RecoveredJet& recovered, const RecoveredJet& truth);

/// Normal derivatives of x_n-only material jets, up to `order` (missing orders are zero).
RecoveredJet jet_from_material(const MaterialJet<Complex>& m, int order);

}  // namespace thermodtn
