#pragma once

// Supercoherent states: eigenstates A|Z> = z|Z> of the supersymmetric
// annihilation operator, written as finite sums of canonical coherent states
// |beta> = sum_n beta^n / sqrt(n!) |n>  (unnormalized)
// and derivative coherent states |beta'> = a^+ |beta>.
//
// All constructors depend on (z0, t) only through z = z0 exp(-i omega t), so
// time evolution is a rotation of the eigenvalue.

#include <string_view>
#include <utility>
#include <vector>

#include "susycs/kmatrix.hpp"

namespace susycs {

struct CoherentTerm {
  cplx weight{};
  cplx beta{};
  bool derivative = false;  // false: |beta>, true: |beta'> = a^+|beta>
};

enum class StateLabel { ZA, ZC, Zplus, Zminus, ZAd, ZCd, ZMUSd, Zs, Mixed };

std::string_view to_string(StateLabel label) noexcept;

/// Two-component superstate (bosonic upper, fermionic lower). Each component
/// is a linear combination of coherent / derivative-coherent terms.
struct SuperState {
  std::vector<CoherentTerm> upper;
  std::vector<CoherentTerm> lower;
  cplx z0{};
  double t = 0.0;
  KMatrix k{};
  StateLabel label = StateLabel::Mixed;

  double omega() const { return k.omega; }
  /// Eigenvalue at time t: z0 exp(-i omega t).
  cplx z() const;
};

/// a*x + b*y. Both states must share K, z0 and t.
SuperState combine(cplx a, const SuperState& x, cplx b, const SuperState& y, StateLabel label);

/// Generic region: the basis |Z_A>, |Z_C> built from G_A, G_C and
/// beta+- = z / chi+-. Z_A matches the recursion with (a0, c1) = (k1, 0),
/// Z_C with (a0, c1) = (0, k1 z0).
std::pair<SuperState, SuperState> generic_basis(const KMatrix& k, cplx z0, double t,
                                                double tol = kDefaultClassifyTol);

/// Generic region: the two canonical supercoherent states
///   Z+- = (k2 chi+- |beta+->, (chi+- - k1) z |beta+->).
/// When k2 is negligible, the parallel form (chi (chi - k4) |beta>, k3 z |beta>)
/// is used instead.
std::pair<SuperState, SuperState> generic_mus_basis(const KMatrix& k, cplx z0, double t,
                                                    double tol = kDefaultClassifyTol);

/// Degenerate region (chi+ = chi- = chi != 0): limits of the generic basis,
/// each component g'(chi)|beta> - g(chi) beta/chi |beta'>.
std::pair<SuperState, SuperState> degenerate_basis(const KMatrix& k, cplx z0, double t,
                                                   double tol = kDefaultClassifyTol);

/// Degenerate region: the single canonical state
///   (-k1 k2 chi |beta>, k1 (k1^2 - k4^2)/4 beta |beta>),
/// or ((chi - k4)|beta>, k3 beta |beta>) when that form vanishes.
SuperState degenerate_mus(const KMatrix& k, cplx z0, double t, double tol = kDefaultClassifyTol);

/// Singular region: (k2 |beta>, k4 beta |beta>) with beta = z / (k1 + k4),
/// or the proportional (k1 |beta>, k3 beta |beta>) when k2 = k4 = 0.
SuperState singular_state(const KMatrix& k, cplx z0, double t, double tol = kDefaultClassifyTol);

/// cos(eta) Z+ + exp(i lambda) sin(eta) Z-. Upper terms are (gamma1+, gamma1-),
/// lower terms (gamma2+ z, gamma2- z).
SuperState mixed_state(const KMatrix& k, cplx z0, double t, double eta, double lambda,
                       double tol = kDefaultClassifyTol);

}  // namespace susycs
