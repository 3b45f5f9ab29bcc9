#pragma once

// Parameter space of the generalized supersymmetric annihilation operator
//
//   A = [[k1 a,   k2  ],
//        [k3 a^2, k4 a]]
//
// together with its 2x2 spectral data and the degenerate / singular / generic
// region classification.

#include <array>
#include <complex>
#include <string_view>

namespace susycs {

using cplx = std::complex<double>;

inline constexpr double kDefaultClassifyTol = 1e-9;

/// The four complex coefficients of the operator and the oscillator frequency.
/// Operations that need a non-null operator validate on entry.
struct KMatrix {
  cplx k1{};
  cplx k2{};
  cplx k3{};
  cplx k4{};
  double omega = 1.0;

  cplx trace() const { return k1 + k4; }
  cplx det() const { return k1 * k4 - k2 * k3; }
  /// (k1 - k4)^2 + 4 k2 k3; zero exactly on the degenerate surface.
  cplx discriminant() const { return (k1 - k4) * (k1 - k4) + 4.0 * k2 * k3; }
  /// Frobenius norm.
  double norm() const;
  bool is_null() const { return k1 == cplx{} && k2 == cplx{} && k3 == cplx{} && k4 == cplx{}; }
  bool is_finite() const;

  KMatrix scaled(cplx s) const { return {k1 * s, k2 * s, k3 * s, k4 * s, omega}; }

  /// Throws Error(NullOperator / InvalidArgument) if the invariants fail.
  void validate() const;

  friend bool operator==(const KMatrix&, const KMatrix&) = default;
};

/// Plain 2x2 complex matrix, row-major.
struct TwoByTwo {
  std::array<cplx, 4> m{};

  cplx& operator()(int r, int c) { return m[static_cast<std::size_t>(2 * r + c)]; }
  cplx operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

  cplx det() const { return m[0] * m[3] - m[1] * m[2]; }
  TwoByTwo inverse() const;
  std::array<cplx, 2> apply(const std::array<cplx, 2>& v) const {
    return {m[0] * v[0] + m[1] * v[1], m[2] * v[0] + m[3] * v[1]};
  }
  friend TwoByTwo operator*(const TwoByTwo& a, const TwoByTwo& b);
};

TwoByTwo as_matrix(const KMatrix& k);

enum class RegionTag { Degenerate, Singular, GenericBounded, GenericUnbounded };

std::string_view to_string(RegionTag tag) noexcept;

struct RegionClass {
  RegionTag tag = RegionTag::GenericBounded;
  cplx discriminant{};
  double classify_tol = kDefaultClassifyTol;
  /// Set alongside Singular when the repeated-root test also passes, i.e. both
  /// eigenvalues vanish (nilpotent K).
  bool degenerate = false;

  bool is_generic() const {
    return tag == RegionTag::GenericBounded || tag == RegionTag::GenericUnbounded;
  }
  bool is_nilpotent() const { return tag == RegionTag::Singular && degenerate; }
};

struct Spectrum {
  cplx chi_plus{};
  cplx chi_minus{};
  /// Columns are eigenvectors of K: [[chi+ - k4, chi- - k4], [k3, k3]].
  /// Invertible only in the generic region with k3 != 0.
  TwoByTwo s_matrix{};
  cplx trace{};
  cplx det{};
  RegionClass region{};
};

/// Eigenvalues on the principal square-root branch, ordered so that
/// Re(chi+) >= Re(chi-) with ties broken by Im(chi+) >= Im(chi-). In the
/// Degenerate region both are set to tr(K)/2.
Spectrum eigen_decompose(const KMatrix& k, double tol = kDefaultClassifyTol);

/// Region assignment. Tolerances are relative to ||K||^2 (det, discriminant)
/// and ||K|| (eigenvalue moduli). Singular takes precedence over Degenerate.
RegionClass classify(const KMatrix& k, double tol = kDefaultClassifyTol);

/// One-parameter family [[1, cos theta], [sin theta, 1]].
KMatrix theta_operator(double theta);

struct GaugeNormalized {
  KMatrix k;
  cplx scale;
};

/// Divides K by its largest-magnitude entry. state(K, z0) and
/// state(K / scale, z0 / scale) describe the same ray.
GaugeNormalized gauge_normalize(const KMatrix& k);

}  // namespace susycs
