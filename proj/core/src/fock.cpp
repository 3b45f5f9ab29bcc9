#include "susycs/fock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "susycs/error.hpp"

namespace susycs {

double FockExpansion::norm() const {
  double s = 0.0;
  for (const auto& v : a) s += std::norm(v);
  for (const auto& v : c) s += std::norm(v);
  return std::sqrt(s);
}

namespace {

void apply_time(FockExpansion& f, double omega, double t) {
  if (t == 0.0) return;
  for (int n = 0; n <= f.N; ++n) {
    const cplx phase = std::polar(1.0, -static_cast<double>(n) * omega * t);
    f.a[static_cast<std::size_t>(n)] *= phase;
    f.c[static_cast<std::size_t>(n)] *= phase;
  }
}

// Geometric tail estimate from the last retained level, assuming the
// coherent decay |x_{n+1}/x_n|^2 ~ beta^2 / (n + 1).
double tail_estimate(const FockExpansion& f, double beta_max) {
  const auto last = static_cast<std::size_t>(f.N);
  const double r2 = std::norm(f.a[last]) + std::norm(f.c[last]);
  if (r2 == 0.0) return 0.0;
  const double n = static_cast<double>(f.N);
  const double q = beta_max * beta_max * (1.0 + 1.0 / std::max(n, 1.0)) / (n + 1.0);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return r2 * q / (1.0 - q);
}

}  // namespace

FockExpansion fock_solve(const KMatrix& k, cplx z0, cplx a0, cplx c1, double t, int N,
                         std::optional<cplx> a1, double tol) {
  if (N < 2) throw Error(ErrorKind::InvalidArgument, "fock_solve: N must be >= 2");
  const RegionClass rc = classify(k, tol);
  const double kn = k.norm();

  FockExpansion f;
  f.N = N;
  f.a.assign(static_cast<std::size_t>(N) + 1, cplx{});
  f.c.assign(static_cast<std::size_t>(N) + 1, cplx{});
  f.a[0] = a0;
  double beta_max = 0.0;

  if (rc.tag == RegionTag::Singular) {
    // K = u v^T has rank one. Solvability at the next level forces
    // y_{n+1} = (sqrt(n+1) a_{n+1}, c_{n+1}) to be parallel to u, and then
    // K y_{n+1} = s tr(K) u = z0 (a_n, c_n / sqrt(n)) fixes s.
    f.reduced = true;
    const bool col1 = std::hypot(std::abs(k.k1), std::abs(k.k3)) >= std::hypot(std::abs(k.k2), std::abs(k.k4));
    const cplx u1 = col1 ? k.k1 : k.k2;
    const cplx u2 = col1 ? k.k3 : k.k4;
    const double u_norm2 = std::norm(u1) + std::norm(u2);
    const cplx tr = k.trace();
    const bool nilpotent = rc.degenerate || std::abs(tr) <= tol * kn;
    if (nilpotent && z0 != cplx{})
      throw Error(ErrorKind::Nilpotent, "nilpotent K: no eigenstate with nonzero eigenvalue");
    if (!nilpotent) beta_max = std::abs(z0 / tr);

    const bool upper_free = std::abs(u1) > tol * std::sqrt(u_norm2);
    cplx s{};
    if (z0 != cplx{}) {
      if (upper_free) {
        s = z0 * a0 / (u1 * tr);
      } else {
        if (std::abs(a0) > 0.0)
          throw Error(ErrorKind::NoEigenstate,
                      "no eigenstate with these free parameters: upper row of K vanishes, a0 must be 0");
        s = c1 / u2;
      }
    }
    f.a[1] = s * u1;
    f.c[1] = s * u2;
    for (int n = 1; n < N; ++n) {
      const auto un = static_cast<std::size_t>(n);
      const double sn = std::sqrt(static_cast<double>(n));
      const double sn1 = std::sqrt(static_cast<double>(n + 1));
      const cplx w1 = f.a[un];
      const cplx w2 = f.c[un] / sn;
      cplx sn_next{};
      if (z0 != cplx{}) sn_next = z0 * (std::conj(u1) * w1 + std::conj(u2) * w2) / (tr * u_norm2);
      f.a[un + 1] = sn_next * u1 / sn1;
      f.c[un + 1] = sn_next * u2;
    }
  } else {
    const cplx det = k.det();
    // Step system K y = z0 (a_n, c_n / sqrt(n)), y = (sqrt(n+1) a_{n+1}, c_{n+1}).
    const TwoByTwo kinv{{k.k4 / det, -k.k2 / det, -k.k3 / det, k.k1 / det}};

    // n = 0: only the first row exists.
    f.c[1] = c1;
    if (std::abs(k.k1) > tol * kn) {
      f.a[1] = (z0 * a0 - k.k2 * c1) / k.k1;
    } else {
      const cplx lhs = k.k2 * c1;
      const cplx rhs = z0 * a0;
      if (std::abs(lhs - rhs) > 1e-12 * (std::abs(lhs) + std::abs(rhs)) + 1e-300)
        throw Error(ErrorKind::NoEigenstate,
                    "no eigenstate with these free parameters: k1 = 0 requires k2 c1 = z0 a0");
      f.a[1] = a1.value_or(cplx{});
      f.a1_free = true;
    }
    for (int n = 1; n < N; ++n) {
      const auto un = static_cast<std::size_t>(n);
      const double sn = std::sqrt(static_cast<double>(n));
      const double sn1 = std::sqrt(static_cast<double>(n + 1));
      const auto y = kinv.apply({z0 * f.a[un], z0 * f.c[un] / sn});
      f.a[un + 1] = y[0] / sn1;
      f.c[un + 1] = y[1];
    }
    const Spectrum sp = eigen_decompose(k, tol);
    beta_max = std::abs(z0) / std::min(std::abs(sp.chi_plus), std::abs(sp.chi_minus));
  }

  f.trunc_err = tail_estimate(f, beta_max);
  apply_time(f, k.omega, t);
  return f;
}

FockExpansion expand_fock(const SuperState& s, int N) {
  if (N < 0) throw Error(ErrorKind::InvalidArgument, "expand_fock: N must be >= 0");
  FockExpansion f;
  f.N = N;
  f.a.assign(static_cast<std::size_t>(N) + 1, cplx{});
  f.c.assign(static_cast<std::size_t>(N) + 1, cplx{});

  // Accumulates weight * <n|term> for n = 0..count-1 into dst[offset + n].
  auto accumulate = [](std::vector<cplx>& dst, std::size_t offset, std::size_t count,
                       const CoherentTerm& term) {
    cplx p = 1.0;  // beta^n / sqrt(n!)
    cplx p_prev{};
    for (std::size_t n = 0; n < count; ++n) {
      if (n > 0) {
        p_prev = p;
        p *= term.beta / std::sqrt(static_cast<double>(n));
      }
      // n beta^{n-1} / sqrt(n!) = sqrt(n) * beta^{n-1} / sqrt((n-1)!)
      const cplx coef = term.derivative ? std::sqrt(static_cast<double>(n)) * p_prev : p;
      dst[offset + n] += term.weight * coef;
    }
  };
  const auto count = static_cast<std::size_t>(N) + 1;
  for (const auto& term : s.upper) accumulate(f.a, 0, count, term);
  for (const auto& term : s.lower) accumulate(f.c, 1, count - 1, term);
  f.trunc_err = fock_tail_bound(s, N);
  return f;
}

double fock_tail_bound(const SuperState& s, int N) {
  double beta_max = 0.0;
  for (const auto* comp : {&s.upper, &s.lower})
    for (const auto& term : *comp) beta_max = std::max(beta_max, std::abs(term.beta));

  // Beyond 2 beta^2 + 60 the coherent magnitudes shrink by more than 1/2 per
  // level and are far below double resolution relative to the peak.
  const double b2 = beta_max * beta_max;
  const double horizon = std::max(static_cast<double>(N) + 60.0, 2.0 * b2 + 60.0);
  if (horizon > 1e6) return std::numeric_limits<double>::infinity();
  const int last = static_cast<int>(horizon);

  // |<n|term>| for basis level n, computed in log space.
  auto magnitude = [](const CoherentTerm& term, int n) -> double {
    const double b = std::abs(term.beta);
    if (!term.derivative) {
      if (b == 0.0) return n == 0 ? 1.0 : 0.0;
      return std::exp(n * std::log(b) - 0.5 * std::lgamma(n + 1.0));
    }
    if (n == 0) return 0.0;
    if (b == 0.0) return n == 1 ? 1.0 : 0.0;
    return std::exp(std::log(static_cast<double>(n)) + (n - 1) * std::log(b) - 0.5 * std::lgamma(n + 1.0));
  };
  auto component = [&](const std::vector<CoherentTerm>& terms, int n) {
    double m = 0.0;
    for (const auto& term : terms) m += std::abs(term.weight) * magnitude(term, n);
    return m * m;
  };

  double tail = 0.0;
  for (int n = last; n > N; --n) tail += component(s.upper, n);
  // lower coefficient c_n sits on |n-1>; c_{N+1} and beyond are discarded
  for (int m = last; m >= N; --m) tail += component(s.lower, m);
  return tail;
}

FockExpansion to_fock(const SuperState& s, double tol, int n_max) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "to_fock: tol must be positive");
  if (n_max < 2) throw Error(ErrorKind::InvalidArgument, "to_fock: n_max must be >= 2");
  if (fock_tail_bound(s, n_max) > tol)
    throw Error(ErrorKind::TruncationOverflow,
                "truncation overflow; reduce |z0| (cap N_max = " + std::to_string(n_max) + ")");
  int lo = 2;
  int hi = n_max;
  // tail bound is non-increasing in N
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (fock_tail_bound(s, mid) <= tol)
      hi = mid;
    else
      lo = mid + 1;
  }
  return expand_fock(s, lo);
}

FockExpansion apply_sao(const KMatrix& k, const FockExpansion& f) {
  if (f.N < 2) throw Error(ErrorKind::InvalidArgument, "apply_sao: truncation N must be >= 2");
  FockExpansion out;
  out.N = f.N - 2;
  out.trunc_err = f.trunc_err;
  out.a.assign(static_cast<std::size_t>(out.N) + 1, cplx{});
  out.c.assign(static_cast<std::size_t>(out.N) + 1, cplx{});
  for (int n = 0; n <= out.N; ++n) {
    const auto un = static_cast<std::size_t>(n);
    const double sn = std::sqrt(static_cast<double>(n));
    const double sn1 = std::sqrt(static_cast<double>(n + 1));
    out.a[un] = k.k1 * sn1 * f.a[un + 1] + k.k2 * f.c[un + 1];
    if (n >= 1) out.c[un] = k.k3 * sn * sn1 * f.a[un + 1] + k.k4 * sn * f.c[un + 1];
  }
  return out;
}

}  // namespace susycs
