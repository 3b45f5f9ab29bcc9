#include "susycs/states.hpp"

#include <cmath>
#include <string>

#include "susycs/error.hpp"

namespace susycs {

std::string_view to_string(StateLabel label) noexcept {
  switch (label) {
    case StateLabel::ZA: return "ZA";
    case StateLabel::ZC: return "ZC";
    case StateLabel::Zplus: return "Zplus";
    case StateLabel::Zminus: return "Zminus";
    case StateLabel::ZAd: return "ZAd";
    case StateLabel::ZCd: return "ZCd";
    case StateLabel::ZMUSd: return "ZMUSd";
    case StateLabel::Zs: return "Zs";
    case StateLabel::Mixed: return "Mixed";
  }
  return "Unknown";
}

cplx SuperState::z() const { return z0 * std::polar(1.0, -k.omega * t); }

SuperState combine(cplx a, const SuperState& x, cplx b, const SuperState& y, StateLabel label) {
  if (!(x.k == y.k) || x.z0 != y.z0 || x.t != y.t)
    throw Error(ErrorKind::InvalidArgument, "combine: states belong to different eigenproblems");
  SuperState out;
  out.z0 = x.z0;
  out.t = x.t;
  out.k = x.k;
  out.label = label;
  auto append = [](std::vector<CoherentTerm>& dst, const std::vector<CoherentTerm>& src, cplx f) {
    for (const auto& term : src) dst.push_back({f * term.weight, term.beta, term.derivative});
  };
  append(out.upper, x.upper, a);
  append(out.upper, y.upper, b);
  append(out.lower, x.lower, a);
  append(out.lower, y.lower, b);
  return out;
}

namespace {

SuperState blank(const KMatrix& k, cplx z0, double t, StateLabel label) {
  SuperState s;
  s.z0 = z0;
  s.t = t;
  s.k = k;
  s.label = label;
  return s;
}

std::string region_message(std::string_view op, const RegionClass& rc) {
  return "wrong region: " + std::string(op) + " called for " + std::string(to_string(rc.tag)) +
         " K";
}

Spectrum require_generic(const KMatrix& k, double tol, std::string_view op) {
  Spectrum sp = eigen_decompose(k, tol);
  if (!sp.region.is_generic()) throw Error(ErrorKind::WrongRegion, region_message(op, sp.region));
  return sp;
}

// Degenerate region check; the nilpotent corner (det = 0 with a repeated
// root) reports as Singular+degenerate and has no coherent-form states.
cplx require_degenerate(const KMatrix& k, double tol, std::string_view op) {
  const RegionClass rc = classify(k, tol);
  if (rc.is_nilpotent())
    throw Error(ErrorKind::Nilpotent,
                "nilpotent K: only finite Fock solutions; use fock_solve");
  if (rc.tag != RegionTag::Degenerate) throw Error(ErrorKind::WrongRegion, region_message(op, rc));
  return 0.5 * k.trace();
}

// One canonical supercoherent state for eigenvalue chi of K, as the pair
// (upper weight, lower weight / z). The primary form uses the first row of
// K - chi; the parallel form from the second row takes over when k2 ~ 0.
std::pair<cplx, cplx> canonical_weights(const KMatrix& k, cplx chi, double tol) {
  const std::pair<cplx, cplx> first{k.k2 * chi, chi - k.k1};
  if (std::abs(k.k2) > tol * k.norm()) return first;
  const std::pair<cplx, cplx> second{chi * (chi - k.k4), k.k3};
  const auto mag = [](const std::pair<cplx, cplx>& p) { return std::abs(p.first) + std::abs(p.second); };
  return mag(second) > mag(first) ? second : first;
}

}  // namespace

std::pair<SuperState, SuperState> generic_basis(const KMatrix& k, cplx z0, double t, double tol) {
  const Spectrum sp = require_generic(k, tol, "generic_basis");
  const cplx cp = sp.chi_plus;
  const cplx cm = sp.chi_minus;
  const cplx gap = cp - cm;

  SuperState za = blank(k, z0, t, StateLabel::ZA);
  SuperState zc = blank(k, z0, t, StateLabel::ZC);
  const cplx z = za.z();
  const cplx bp = z / cp;
  const cplx bm = z / cm;

  // Z_A = G_A B / (chi+ - chi-)
  za.upper = {{cp * (cp - k.k4) / gap, bp}, {-cm * (cm - k.k4) / gap, bm}};
  za.lower = {{k.k3 * z / gap, bp}, {-k.k3 * z / gap, bm}};

  // Z_C = G_C B / (chi+ - chi-)
  const cplx q = k.k1 * k.k1 + k.k2 * k.k3;
  zc.upper = {{cp * cm * k.k2 / gap, bp}, {-cp * cm * k.k2 / gap, bm}};
  zc.lower = {{z * (cp * k.k1 - q) / gap, bp}, {-z * (cm * k.k1 - q) / gap, bm}};
  return {za, zc};
}

std::pair<SuperState, SuperState> generic_mus_basis(const KMatrix& k, cplx z0, double t,
                                                    double tol) {
  const Spectrum sp = require_generic(k, tol, "generic_mus_basis");
  auto make = [&](cplx chi, StateLabel label) {
    SuperState s = blank(k, z0, t, label);
    const cplx z = s.z();
    const auto [u, l] = canonical_weights(k, chi, tol);
    s.upper = {{u, z / chi}};
    s.lower = {{l * z, z / chi}};
    return s;
  };
  return {make(sp.chi_plus, StateLabel::Zplus), make(sp.chi_minus, StateLabel::Zminus)};
}

std::pair<SuperState, SuperState> degenerate_basis(const KMatrix& k, cplx z0, double t,
                                                   double tol) {
  const cplx chi = require_degenerate(k, tol, "degenerate_basis");
  SuperState za = blank(k, z0, t, StateLabel::ZAd);
  SuperState zc = blank(k, z0, t, StateLabel::ZCd);
  const cplx z = za.z();
  const cplx beta = z / chi;

  // d/dx [g(x) x^-n] at x = chi  ->  g'(chi)|beta> - g(chi) beta / chi |beta'>
  auto limit = [&](cplx g, cplx g_prime) {
    return std::vector<CoherentTerm>{{g_prime, beta, false}, {-g * beta / chi, beta, true}};
  };
  const cplx q = k.k1 * k.k1 + k.k2 * k.k3;
  za.upper = limit(chi * chi - k.k4 * chi, 2.0 * chi - k.k4);
  za.lower = limit(k.k3 * z, 0.0);
  zc.upper = limit(chi * chi * k.k2, 0.0);
  zc.lower = limit(z * (chi * k.k1 - q), z * k.k1);
  return {za, zc};
}

SuperState degenerate_mus(const KMatrix& k, cplx z0, double t, double tol) {
  const cplx chi = require_degenerate(k, tol, "degenerate_mus");
  SuperState s = blank(k, z0, t, StateLabel::ZMUSd);
  const cplx beta = s.z() / chi;

  cplx up = -k.k1 * k.k2 * chi;
  cplx lo = k.k1 * (k.k1 * k.k1 - k.k4 * k.k4) / 4.0;
  const double n = k.norm();
  if (std::abs(up) + std::abs(lo) <= tol * n * n * n) {
    up = chi - k.k4;
    lo = k.k3;
  }
  s.upper = {{up, beta}};
  s.lower = {{lo * beta, beta}};
  return s;
}

SuperState singular_state(const KMatrix& k, cplx z0, double t, double tol) {
  const RegionClass rc = classify(k, tol);
  if (rc.tag != RegionTag::Singular) throw Error(ErrorKind::WrongRegion, region_message("singular_state", rc));
  if (rc.degenerate || std::abs(k.trace()) <= tol * k.norm())
    throw Error(ErrorKind::Nilpotent, "nilpotent K: chi+ = chi- = 0, no coherent-form eigenstate");

  SuperState s = blank(k, z0, t, StateLabel::Zs);
  const cplx beta = s.z() / k.trace();
  const bool first_row = std::hypot(std::abs(k.k2), std::abs(k.k4)) > tol * k.norm();
  const cplx up = first_row ? k.k2 : k.k1;
  const cplx lo = first_row ? k.k4 : k.k3;
  s.upper = {{up, beta}};
  s.lower = {{lo * beta, beta}};
  return s;
}

SuperState mixed_state(const KMatrix& k, cplx z0, double t, double eta, double lambda, double tol) {
  const auto [zp, zm] = generic_mus_basis(k, z0, t, tol);
  return combine(std::cos(eta), zp, std::polar(std::sin(eta), lambda), zm, StateLabel::Mixed);
}

}  // namespace susycs
