#include "susycs/kmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "susycs/error.hpp"

namespace susycs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NullOperator: return "null operator";
    case ErrorKind::WrongRegion: return "wrong region";
    case ErrorKind::NoEigenstate: return "no eigenstate";
    case ErrorKind::Nilpotent: return "nilpotent K";
    case ErrorKind::TruncationOverflow: return "truncation overflow";
    case ErrorKind::ZeroNorm: return "zero norm";
    case ErrorKind::NoDivergence: return "no divergence";
    case ErrorKind::InvalidArgument: return "invalid argument";
  }
  return "unknown";
}

double KMatrix::norm() const {
  return std::sqrt(std::norm(k1) + std::norm(k2) + std::norm(k3) + std::norm(k4));
}

bool KMatrix::is_finite() const {
  auto fin = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  return fin(k1) && fin(k2) && fin(k3) && fin(k4) && std::isfinite(omega);
}

void KMatrix::validate() const {
  if (!is_finite()) throw Error(ErrorKind::InvalidArgument, "K entries and omega must be finite");
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
  if (is_null()) throw Error(ErrorKind::NullOperator, "null operator: all k_i are zero");
}

TwoByTwo TwoByTwo::inverse() const {
  const cplx d = det();
  if (d == cplx{}) throw Error(ErrorKind::InvalidArgument, "singular 2x2 matrix");
  return TwoByTwo{{m[3] / d, -m[1] / d, -m[2] / d, m[0] / d}};
}

TwoByTwo operator*(const TwoByTwo& a, const TwoByTwo& b) {
  TwoByTwo r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
  return r;
}

TwoByTwo as_matrix(const KMatrix& k) { return TwoByTwo{{k.k1, k.k2, k.k3, k.k4}}; }

std::string_view to_string(RegionTag tag) noexcept {
  switch (tag) {
    case RegionTag::Degenerate: return "Degenerate";
    case RegionTag::Singular: return "Singular";
    case RegionTag::GenericBounded: return "GenericBounded";
    case RegionTag::GenericUnbounded: return "GenericUnbounded";
  }
  return "Unknown";
}

namespace {

// Roots of x^2 - tr x + det. The larger root comes from the non-cancelling
// sign; the smaller one from det / larger, which keeps chi+ chi- = det to
// rounding even when det is tiny.
std::pair<cplx, cplx> ordered_roots(cplx tr, cplx det) {
  const cplx half = 0.5 * tr;
  const cplx r = std::sqrt(half * half - det);
  const cplx p = half + r;
  const cplx m = half - r;
  cplx big = std::abs(p) >= std::abs(m) ? p : m;
  cplx small = big == cplx{} ? cplx{} : det / big;

  const double scale = std::max({std::abs(big), std::abs(small), 1e-300});
  const double dre = big.real() - small.real();
  bool swap = false;
  if (std::abs(dre) > 1e-14 * scale) {
    swap = dre < 0.0;
  } else {
    swap = big.imag() < small.imag();
  }
  if (swap) std::swap(big, small);
  return {big, small};
}

}  // namespace

RegionClass classify(const KMatrix& k, double tol) {
  k.validate();
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "classification tolerance must be positive");

  RegionClass rc;
  rc.discriminant = k.discriminant();
  rc.classify_tol = tol;

  const double n = k.norm();
  const double n2 = n * n;
  const bool singular = std::abs(k.det()) <= tol * n2;
  const bool degenerate = std::abs(rc.discriminant) <= tol * n2;

  if (singular) {
    rc.tag = RegionTag::Singular;
    rc.degenerate = degenerate;
  } else if (degenerate) {
    rc.tag = RegionTag::Degenerate;
  } else {
    const auto [cp, cm] = ordered_roots(k.trace(), k.det());
    rc.tag = std::abs(std::abs(cp) - std::abs(cm)) <= tol * n ? RegionTag::GenericUnbounded
                                                              : RegionTag::GenericBounded;
  }
  return rc;
}

Spectrum eigen_decompose(const KMatrix& k, double tol) {
  Spectrum s;
  s.trace = k.trace();
  s.det = k.det();
  s.region = classify(k, tol);
  if (s.region.tag == RegionTag::Degenerate) {
    // The split sqrt(discriminant) of a repeated root is pure rounding noise.
    s.chi_plus = s.chi_minus = 0.5 * s.trace;
  } else {
    std::tie(s.chi_plus, s.chi_minus) = ordered_roots(s.trace, s.det);
  }
  s.s_matrix = TwoByTwo{{s.chi_plus - k.k4, s.chi_minus - k.k4, k.k3, k.k3}};
  return s;
}

KMatrix theta_operator(double theta) {
  return KMatrix{1.0, std::cos(theta), std::sin(theta), 1.0, 1.0};
}

GaugeNormalized gauge_normalize(const KMatrix& k) {
  k.validate();
  const std::array<cplx, 4> entries{k.k1, k.k2, k.k3, k.k4};
  const auto it = std::max_element(entries.begin(), entries.end(),
                                   [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  const cplx scale = *it;
  return {KMatrix{k.k1 / scale, k.k2 / scale, k.k3 / scale, k.k4 / scale, k.omega}, scale};
}

}  // namespace susycs
