#pragma once

// Expectation values of the dimensionless position xi = (a^+ + a)/sqrt(2) and
// momentum mu = i (a^+ - a)/sqrt(2) in superstates. Observables act on each
// component separately; all brakets use unnormalized coherent states
// <alpha|alpha> = exp(|alpha|^2) and normalization happens once, in the
// expectation ratio.

#include <utility>

#include "susycs/kmatrix.hpp"
#include "susycs/states.hpp"

namespace susycs {

enum class MomentKind { Overlap, Xi, Xi2, Mu, Mu2 };

/// <alpha1|alpha2> = exp(conj(alpha1) alpha2).
cplx coherent_overlap(cplx alpha1, cplx alpha2);

/// <alpha1| O |alpha2> for O in {1, xi, xi^2, mu, mu^2}. The exponential is
/// evaluated as exp(conj(alpha1) alpha2 - log_shift) so callers can keep sums
/// of large exponentials in range.
cplx coherent_moment(cplx alpha1, cplx alpha2, MomentKind kind, double log_shift = 0.0);

/// Same as coherent_moment, with either side optionally replaced by the
/// derivative state |alpha'> = a^+|alpha>. Reduced to the coherent kernels by
/// normal ordering the ladder-operator string.
cplx braket_derivative(cplx alpha1, cplx alpha2, bool d1, bool d2, MomentKind kind,
                       double log_shift = 0.0);

/// Unnormalized <Z|O|Z> for all five kinds, scaled by exp(-log_shift).
struct Moments {
  cplx overlap{};
  cplx xi{};
  cplx xi2{};
  cplx mu{};
  cplx mu2{};
  double log_shift = 0.0;
};

/// Pairwise braket sum over the terms of each component, with
/// log_shift = max (|beta|^2 + 2 log|weight|) over the nonzero-weight terms.
Moments braket_sums(const SuperState& s);

/// <O> = <Z|O Z> / <Z|Z>. Throws ZeroNorm for a vanishing state.
double expectation(const SuperState& s, MomentKind kind);

struct UncertaintyReport {
  double mean_xi = 0.0;
  double mean_xi2 = 0.0;
  double mean_mu = 0.0;
  double mean_mu2 = 0.0;
  double var_xi = 0.0;
  double var_mu = 0.0;
  double product = 0.0;
  /// <Z|Z>; overflows to +inf for very large |beta|, see log_norm.
  double norm = 0.0;
  double log_norm = 0.0;
};

UncertaintyReport uncertainty(const SuperState& s);

/// Large-|z| parametrization of the unbounded generic regime, where
/// chi+- = chi_mag exp(i phi+-) and |beta+| = |beta-| = beta0.
struct AsymptoticParams {
  double chi_mag = 0.0;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double beta0 = 0.0;
  double gamma_plus = 0.0;   // |gamma1+|^2 + |gamma2+ z|^2
  double gamma_minus = 0.0;  // |gamma1-|^2 + |gamma2- z|^2
  /// arg(z0). The asymptotic formulas take z0 real; a phase of z0 is the
  /// same as a shift omega t -> omega t - arg(z0).
  double z0_arg = 0.0;
};

/// Parameters for the mixed state cos(eta) Z+ + exp(i lambda) sin(eta) Z-.
/// Throws WrongRegion unless |chi+| = |chi-| within tol * ||K||.
AsymptoticParams asymptotic_params(const KMatrix& k, cplx z0, double eta, double lambda,
                                   double tol = kDefaultClassifyTol);

/// (var_xi, var_mu) from the dominant-exponential limit
///   1/2 + Gp Gm / (Gp + Gm)^2 * 8 beta0^2 sin^2((phi+ - phi-)/2) * {sin^2, cos^2}(psi),
/// psi = omega t - arg(z0) + (phi+ + phi-)/2
std::pair<double, double> asymptotic_variances(const AsymptoticParams& p, double t, double omega);

}  // namespace susycs
