#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

using susycs::KMatrix;

cplx series_overlap(cplx a1, cplx a2, int terms) {
  const cplx x = std::conj(a1) * a2;
  cplx term = 1.0;
  cplx sum = 0.0;
  for (int n = 0; n < terms; ++n) {
    sum += term;
    term *= x / static_cast<double>(n + 1);
  }
  return sum;
}

std::pair<cplx, cplx> quadratic_roots(const KMatrix& k) {
  using lc = std::complex<long double>;
  const lc k1(k.k1), k2(k.k2), k3(k.k3), k4(k.k4);
  const lc b = -(k1 + k4);
  const lc c = k1 * k4 - k2 * k3;
  const lc disc = std::sqrt(b * b - 4.0L * c);
  // pick the sign that avoids cancellation for the large root
  const lc q = std::real(std::conj(b) * disc) >= 0 ? -0.5L * (b + disc) : -0.5L * (b - disc);
  if (std::abs(q) == 0.0L) return {0.0, 0.0};
  const lc r1 = q;
  const lc r2 = c / q;
  return {cplx(r1), cplx(r2)};
}

std::vector<cplx> coherent_coeffs(cplx beta, bool derivative, int N) {
  std::vector<cplx> out(static_cast<std::size_t>(N) + 1, 0.0);
  if (beta == cplx{}) {
    if (derivative) {
      if (N >= 1) out[1] = 1.0;
    } else {
      out[0] = 1.0;
    }
    return out;
  }
  const cplx lb = std::log(beta);
  for (int n = 0; n <= N; ++n) {
    const double lf = 0.5 * std::lgamma(n + 1.0);
    if (!derivative)
      out[static_cast<std::size_t>(n)] = std::exp(static_cast<double>(n) * lb - lf);
    else if (n >= 1)
      out[static_cast<std::size_t>(n)] =
          static_cast<double>(n) * std::exp(static_cast<double>(n - 1) * lb - lf);
  }
  return out;
}

FockVec expand(const susycs::SuperState& s, int N) {
  FockVec v{std::vector<cplx>(static_cast<std::size_t>(N) + 1, 0.0),
            std::vector<cplx>(static_cast<std::size_t>(N) + 1, 0.0)};
  auto add = [N](std::vector<cplx>& dst, const std::vector<susycs::CoherentTerm>& terms) {
    for (const auto& t : terms) {
      const auto c = coherent_coeffs(t.beta, t.derivative, N);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += t.weight * c[i];
    }
  };
  add(v.upper, s.upper);
  add(v.lower, s.lower);
  return v;
}

std::vector<cplx> lower_op(const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size(), 0.0);
  for (std::size_t n = 1; n < v.size(); ++n) out[n - 1] = std::sqrt(static_cast<double>(n)) * v[n];
  return out;
}

std::vector<cplx> raise_op(const std::vector<cplx>& v) {
  std::vector<cplx> out(v.size() + 1, 0.0);
  for (std::size_t n = 0; n < v.size(); ++n) out[n + 1] = std::sqrt(static_cast<double>(n + 1)) * v[n];
  return out;
}

FockVec apply_operator(const KMatrix& k, const FockVec& v) {
  const auto au = lower_op(v.upper);
  const auto aau = lower_op(au);
  const auto al = lower_op(v.lower);
  FockVec out{std::vector<cplx>(v.upper.size()), std::vector<cplx>(v.lower.size())};
  for (std::size_t n = 0; n < v.upper.size(); ++n) {
    out.upper[n] = k.k1 * au[n] + k.k2 * v.lower[n];
    out.lower[n] = k.k3 * aau[n] + k.k4 * al[n];
  }
  return out;
}

namespace {

double dot_re(const std::vector<cplx>& x, const std::vector<cplx>& y) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) s += std::conj(x[i]) * y[i];
  return s.real();
}

double sq(const std::vector<cplx>& x) {
  double s = 0.0;
  for (const auto& v : x) s += std::norm(v);
  return s;
}

}  // namespace

double norm2(const FockVec& v) { return sq(v.upper) + sq(v.lower); }

DenseMoments dense_moments(const FockVec& v) {
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  const cplx I(0.0, 1.0);
  DenseMoments m;
  const double n = norm2(v);
  for (const auto* comp : {&v.upper, &v.lower}) {
    auto ad = raise_op(*comp);
    auto a = lower_op(*comp);
    a.push_back(0.0);
    std::vector<cplx> xi(ad.size()), mu(ad.size());
    for (std::size_t i = 0; i < ad.size(); ++i) {
      xi[i] = inv_sqrt2 * (ad[i] + a[i]);
      mu[i] = I * inv_sqrt2 * (ad[i] - a[i]);
    }
    m.xi += dot_re(*comp, xi);
    m.mu += dot_re(*comp, mu);
    m.xi2 += sq(xi);
    m.mu2 += sq(mu);
  }
  m.xi /= n;
  m.mu /= n;
  m.xi2 /= n;
  m.mu2 /= n;
  return m;
}

// --- random draws -----------------------------------------------------------

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

cplx random_disk(Rng& rng, double rmax) {
  const double r = rmax * std::sqrt(uniform(rng, 0.0, 1.0));
  return std::polar(r, uniform(rng, -std::numbers::pi, std::numbers::pi));
}

namespace {

cplx entry(Rng& rng, bool real) {
  return real ? cplx(uniform(rng, -1.0, 1.0), 0.0) : cplx(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
}

KMatrix normalized(const KMatrix& k) { return susycs::gauge_normalize(k).k; }

bool acceptable(const KMatrix& k, Draw region) {
  using susycs::RegionTag;
  const auto sp = susycs::eigen_decompose(k);
  const double p = std::abs(sp.chi_plus);
  const double m = std::abs(sp.chi_minus);
  switch (region) {
    case Draw::Degenerate:
      return sp.region.tag == RegionTag::Degenerate && p >= kMinChi;
    case Draw::Singular:
      return sp.region.tag == RegionTag::Singular && !sp.region.is_nilpotent() && std::abs(k.trace()) >= kMinChi;
    case Draw::GenericBounded:
      return sp.region.tag == RegionTag::GenericBounded && std::min(p, m) >= kMinChi &&
             std::abs(sp.chi_plus - sp.chi_minus) >= 0.25 && std::abs(p - m) >= 0.05;
    case Draw::GenericUnbounded:
      return sp.region.tag == RegionTag::GenericUnbounded && std::min(p, m) >= kMinChi &&
             std::abs(sp.chi_plus - sp.chi_minus) >= 0.25;
  }
  return false;
}

KMatrix candidate(Draw region, Rng& rng, bool real) {
  KMatrix k;
  switch (region) {
    case Draw::Degenerate:
      k.k1 = entry(rng, real);
      k.k2 = entry(rng, real);
      k.k4 = entry(rng, real);
      if (std::abs(k.k2) < 0.3) k.k2 = 0.3;
      k.k3 = -(k.k1 - k.k4) * (k.k1 - k.k4) / (4.0 * k.k2);
      return k;
    case Draw::Singular:
      k.k1 = entry(rng, real);
      k.k2 = entry(rng, real);
      k.k3 = entry(rng, real);
      if (std::abs(k.k1) < 0.3) k.k1 = 0.3;
      k.k4 = k.k2 * k.k3 / k.k1;
      return k;
    case Draw::GenericBounded:
      k.k1 = entry(rng, real);
      k.k2 = entry(rng, real);
      k.k3 = entry(rng, real);
      k.k4 = entry(rng, real);
      return k;
    case Draw::GenericUnbounded: {
      if (real) {
        // conjugate eigenvalues: (k1 - k4)^2 + 4 k2 k3 < 0
        k.k1 = entry(rng, true);
        k.k4 = entry(rng, true);
        k.k2 = entry(rng, true);
        const double d = std::norm(k.k1 - k.k4);
        const double k3 = -(d + uniform(rng, 0.3, 2.0)) / (4.0 * k.k2.real());
        k.k3 = k3;
        return k;
      }
      // K = S diag(chi+, chi-) S^-1 with |chi+| = |chi-|
      const double r = uniform(rng, 0.5, 1.0);
      const double a = uniform(rng, -std::numbers::pi, std::numbers::pi);
      const double b = a + uniform(rng, 0.6, 2.0 * std::numbers::pi - 0.6);
      const cplx cp = std::polar(r, a);
      const cplx cm = std::polar(r, b);
      susycs::TwoByTwo s;
      for (auto& e : s.m) e = entry(rng, false);
      if (std::abs(s.det()) < 0.2) s.m = {1.0, 0.5, 0.3, 1.0};
      susycs::TwoByTwo d;
      d.m = {cp, 0.0, 0.0, cm};
      const auto kk = s * d * s.inverse();
      return {kk.m[0], kk.m[1], kk.m[2], kk.m[3]};
    }
  }
  return k;
}

}  // namespace

KMatrix random_k(Draw region, Rng& rng) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const bool real = uniform(rng, 0.0, 1.0) < 0.5;
    KMatrix k = candidate(region, rng, real);
    if (k.is_null()) continue;
    k = normalized(k);
    if (acceptable(k, region)) return k;
  }
  throw std::runtime_error("random_k: no acceptable draw");
}

const char* name(Draw d) {
  switch (d) {
    case Draw::Degenerate: return "degenerate";
    case Draw::Singular: return "singular";
    case Draw::GenericBounded: return "generic-bounded";
    case Draw::GenericUnbounded: return "generic-unbounded";
  }
  return "?";
}

std::vector<susycs::SuperState> region_states(const KMatrix& k, cplx z0, double t, Rng& rng) {
  using susycs::RegionTag;
  const auto tag = susycs::classify(k).tag;
  if (tag == RegionTag::Singular) return {susycs::singular_state(k, z0, t)};
  if (tag == RegionTag::Degenerate) {
    auto [a, c] = susycs::degenerate_basis(k, z0, t);
    return {a, c, susycs::degenerate_mus(k, z0, t)};
  }
  auto [a, c] = susycs::generic_basis(k, z0, t);
  auto [p, m] = susycs::generic_mus_basis(k, z0, t);
  const double eta = uniform(rng, 0.0, std::numbers::pi / 2);
  const double lambda = uniform(rng, -std::numbers::pi, std::numbers::pi);
  return {a, c, p, m, susycs::mixed_state(k, z0, t, eta, lambda)};
}

std::vector<susycs::SuperState> canonical_states(const KMatrix& k, cplx z0, double t) {
  using susycs::RegionTag;
  const auto tag = susycs::classify(k).tag;
  if (tag == RegionTag::Singular) return {susycs::singular_state(k, z0, t)};
  if (tag == RegionTag::Degenerate) return {susycs::degenerate_mus(k, z0, t)};
  auto [p, m] = susycs::generic_mus_basis(k, z0, t);
  return {p, m};
}

double max_rel_diff(const susycs::FockExpansion& f, const susycs::FockExpansion& g, int nmax) {
  double scale = 0.0;
  double diff = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    const auto i = static_cast<std::size_t>(n);
    scale = std::max({scale, std::abs(f.a[i]), std::abs(f.c[i])});
    diff = std::max({diff, std::abs(f.a[i] - g.a[i]), std::abs(f.c[i] - g.c[i])});
  }
  return scale > 0.0 ? diff / scale : diff;
}

double proportionality_residual(const susycs::FockExpansion& f, const susycs::FockExpansion& g, int nmax) {
  cplx fg = 0.0;
  double gg = 0.0;
  double ff = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    const auto i = static_cast<std::size_t>(n);
    fg += std::conj(g.a[i]) * f.a[i] + std::conj(g.c[i]) * f.c[i];
    gg += std::norm(g.a[i]) + std::norm(g.c[i]);
    ff += std::norm(f.a[i]) + std::norm(f.c[i]);
  }
  if (gg == 0.0) return ff == 0.0 ? 0.0 : 1.0;
  const cplx lambda = fg / gg;
  double r = 0.0;
  for (int n = 0; n <= nmax; ++n) {
    const auto i = static_cast<std::size_t>(n);
    r += std::norm(f.a[i] - lambda * g.a[i]) + std::norm(f.c[i] - lambda * g.c[i]);
  }
  return std::sqrt(r / ff);
}

}  // namespace oracle
