#pragma once

// Truncated energy-eigenbasis representation of superstates:
//
//   |Z> = ( sum_{n=0..N} a_n |n>,  sum_{n=1..N} c_n |n-1> )
//
// fock_solve builds it straight from the eigenvalue recursion and never
// touches the closed-form constructors, so it serves as their oracle.

#include <optional>
#include <vector>

#include "susycs/kmatrix.hpp"
#include "susycs/states.hpp"

namespace susycs {

inline constexpr int kDefaultMaxFock = 200;

struct FockExpansion {
  std::vector<cplx> a;  // a[n], n = 0..N
  std::vector<cplx> c;  // c[n], n = 0..N; c[0] is always zero
  int N = 0;
  /// Bound (to_fock) or estimate (fock_solve) of the discarded squared norm.
  double trunc_err = 0.0;
  /// Singular K: the one-parameter reduced recursion was used and c1 ignored.
  bool reduced = false;
  /// k1 = 0: a1 is not fixed by the recursion and was taken from the caller.
  bool a1_free = false;

  double norm() const;
};

/// Solves the recursion
///   k1 sqrt(n+1) a_{n+1} + k2 c_{n+1}             = z0 a_n
///   k3 sqrt(n) sqrt(n+1) a_{n+1} + k4 sqrt(n) c_{n+1} = z0 c_n
/// level by level from the free parameters (a0, c1), then applies
/// a_n, c_n -> a_n, c_n exp(-i n omega t).
///
/// `a1` is consulted only when k1 = 0, where the n = 0 row fixes
/// k2 c1 = z0 a0 instead of a1 (default 0).
FockExpansion fock_solve(const KMatrix& k, cplx z0, cplx a0, cplx c1, double t, int N,
                         std::optional<cplx> a1 = std::nullopt,
                         double tol = kDefaultClassifyTol);

/// Expands a superstate with N chosen as the smallest value (>= 2) whose
/// rigorous tail bound is <= tol. Throws TruncationOverflow past n_max.
FockExpansion to_fock(const SuperState& s, double tol, int n_max = kDefaultMaxFock);

/// Expands a superstate at a fixed truncation order.
FockExpansion expand_fock(const SuperState& s, int N);

/// Tail bound sum_{n>N} |a_n|^2 + sum_{n>N} |c_n|^2 obtained from the
/// triangle inequality over the terms of each component.
double fock_tail_bound(const SuperState& s, int N);

/// Applies [[k1 a, k2], [k3 a^2, k4 a]] exactly. Output truncation is N - 2.
FockExpansion apply_sao(const KMatrix& k, const FockExpansion& f);

}  // namespace susycs
