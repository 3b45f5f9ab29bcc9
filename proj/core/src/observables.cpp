#include "susycs/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "susycs/error.hpp"

namespace susycs {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr cplx kI{0.0, 1.0};

// A product of ladder operators, read left to right; true = a^+, false = a.
using Word = std::vector<bool>;

struct WeightedWord {
  cplx coef;
  Word word;
};

std::vector<WeightedWord> observable_words(MomentKind kind) {
  const bool A = false;
  const bool Ad = true;
  switch (kind) {
    case MomentKind::Overlap: return {{1.0, {}}};
    case MomentKind::Xi: return {{kInvSqrt2, {A}}, {kInvSqrt2, {Ad}}};
    case MomentKind::Xi2: return {{0.5, {A, A}}, {0.5, {A, Ad}}, {0.5, {Ad, A}}, {0.5, {Ad, Ad}}};
    case MomentKind::Mu: return {{kI * kInvSqrt2, {Ad}}, {-kI * kInvSqrt2, {A}}};
    case MomentKind::Mu2: return {{-0.5, {Ad, Ad}}, {0.5, {Ad, A}}, {0.5, {A, Ad}}, {-0.5, {A, A}}};
  }
  return {};
}

// <alpha1| word |alpha2> / exp(conj(alpha1) alpha2), using a a^+ = a^+ a + 1
// until the word is normal ordered, then a^+ -> conj(alpha1), a -> alpha2.
cplx normal_ordered_value(const Word& word, cplx bra_alpha_conj, cplx ket_alpha) {
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!word[i] && word[i + 1]) {
      Word swapped = word;
      swapped[i] = true;
      swapped[i + 1] = false;
      Word contracted;
      contracted.reserve(word.size() - 2);
      for (std::size_t j = 0; j < word.size(); ++j)
        if (j != i && j != i + 1) contracted.push_back(word[j]);
      return normal_ordered_value(swapped, bra_alpha_conj, ket_alpha) +
             normal_ordered_value(contracted, bra_alpha_conj, ket_alpha);
    }
  }
  cplx v = 1.0;
  for (bool creation : word) v *= creation ? bra_alpha_conj : ket_alpha;
  return v;
}

}  // namespace

cplx coherent_overlap(cplx alpha1, cplx alpha2) { return std::exp(std::conj(alpha1) * alpha2); }

cplx coherent_moment(cplx alpha1, cplx alpha2, MomentKind kind, double log_shift) {
  const cplx eps = std::exp(std::conj(alpha1) * alpha2 - log_shift);
  const cplx sum = alpha2 + std::conj(alpha1);
  const cplx diff = alpha2 - std::conj(alpha1);
  switch (kind) {
    case MomentKind::Overlap: return eps;
    case MomentKind::Xi: return kInvSqrt2 * sum * eps;
    case MomentKind::Xi2: return 0.5 * (sum * sum + 1.0) * eps;
    case MomentKind::Mu: return -kI * kInvSqrt2 * diff * eps;
    case MomentKind::Mu2: return 0.5 * (1.0 - diff * diff) * eps;
  }
  return {};
}

cplx braket_derivative(cplx alpha1, cplx alpha2, bool d1, bool d2, MomentKind kind,
                       double log_shift) {
  if (!d1 && !d2) return coherent_moment(alpha1, alpha2, kind, log_shift);
  cplx total{};
  for (auto& [coef, word] : observable_words(kind)) {
    Word full;
    if (d1) full.push_back(false);  // <alpha1'| = <alpha1| a
    full.insert(full.end(), word.begin(), word.end());
    if (d2) full.push_back(true);  // |alpha2'> = a^+ |alpha2>
    total += coef * normal_ordered_value(full, std::conj(alpha1), alpha2);
  }
  return total * std::exp(std::conj(alpha1) * alpha2 - log_shift);
}

Moments braket_sums(const SuperState& s) {
  // Largest diagonal term |w|^2 exp(|beta|^2). Zero weights are skipped, so an
  // absent partner with a much larger |beta| cannot underflow the sum.
  Moments m;
  bool first = true;
  for (const auto* comp : {&s.upper, &s.lower})
    for (const auto& term : *comp) {
      if (term.weight == cplx{}) continue;
      const double e = std::norm(term.beta) + 2.0 * std::log(std::abs(term.weight));
      m.log_shift = first ? e : std::max(m.log_shift, e);
      first = false;
    }

  constexpr std::array<MomentKind, 5> kinds{MomentKind::Overlap, MomentKind::Xi, MomentKind::Xi2,
                                            MomentKind::Mu, MomentKind::Mu2};
  std::array<cplx, 5> acc{};
  for (const auto* comp : {&s.upper, &s.lower}) {
    for (const auto& bra : *comp) {
      for (const auto& ket : *comp) {
        const cplx w = std::conj(bra.weight) * ket.weight;
        if (w == cplx{}) continue;
        for (std::size_t i = 0; i < kinds.size(); ++i)
          acc[i] += w * braket_derivative(bra.beta, ket.beta, bra.derivative, ket.derivative,
                                          kinds[i], m.log_shift);
      }
    }
  }
  m.overlap = acc[0];
  m.xi = acc[1];
  m.xi2 = acc[2];
  m.mu = acc[3];
  m.mu2 = acc[4];
  return m;
}

namespace {

// Norm of the state relative to the sum of its diagonal term norms; a
// cancellation below this ratio is treated as the zero vector.
void require_nonzero(const SuperState& s, const Moments& m) {
  double scale = 0.0;
  for (const auto* comp : {&s.upper, &s.lower})
    for (const auto& term : *comp)
      if (term.weight != cplx{})
        scale += std::norm(term.weight) *
                 std::abs(braket_derivative(term.beta, term.beta, term.derivative, term.derivative,
                                            MomentKind::Overlap, m.log_shift));
  if (!(m.overlap.real() > 1e-13 * scale) || !(scale > 0.0))
    throw Error(ErrorKind::ZeroNorm, "zero norm: <Z|Z> vanishes");
}

double moment_of(const Moments& m, MomentKind kind) {
  switch (kind) {
    case MomentKind::Overlap: return 1.0;
    case MomentKind::Xi: return (m.xi / m.overlap).real();
    case MomentKind::Xi2: return (m.xi2 / m.overlap).real();
    case MomentKind::Mu: return (m.mu / m.overlap).real();
    case MomentKind::Mu2: return (m.mu2 / m.overlap).real();
  }
  return 0.0;
}

// <alpha1| O_c |alpha2> for O in {xi^2, mu^2} with a replaced by b = a - c
// inside O, i.e. the second moment about the point (xi, mu) = sqrt(2) (Re c, Im c).
// Derivative sides keep the unshifted a = b + c, a^+ = b^+ + conj(c).
cplx central_braket(cplx alpha1, cplx alpha2, bool d1, bool d2, MomentKind kind, cplx c,
                    double log_shift) {
  struct Piece {
    cplx coef;
    Word word;
  };
  const std::vector<Piece> prefix = d1 ? std::vector<Piece>{{1.0, {false}}, {c, {}}} : std::vector<Piece>{{1.0, {}}};
  const std::vector<Piece> suffix =
      d2 ? std::vector<Piece>{{1.0, {true}}, {std::conj(c), {}}} : std::vector<Piece>{{1.0, {}}};
  const cplx bra = std::conj(alpha1 - c);
  const cplx ket = alpha2 - c;
  cplx total{};
  for (auto& [coef, word] : observable_words(kind)) {
    for (const auto& p : prefix) {
      for (const auto& q : suffix) {
        Word full = p.word;
        full.insert(full.end(), word.begin(), word.end());
        full.insert(full.end(), q.word.begin(), q.word.end());
        total += coef * p.coef * q.coef * normal_ordered_value(full, bra, ket);
      }
    }
  }
  return total * std::exp(std::conj(alpha1) * alpha2 - log_shift);
}

}  // namespace

double expectation(const SuperState& s, MomentKind kind) {
  const Moments m = braket_sums(s);
  require_nonzero(s, m);
  return moment_of(m, kind);
}

UncertaintyReport uncertainty(const SuperState& s) {
  const Moments m = braket_sums(s);
  require_nonzero(s, m);
  UncertaintyReport r;
  r.mean_xi = moment_of(m, MomentKind::Xi);
  r.mean_xi2 = moment_of(m, MomentKind::Xi2);
  r.mean_mu = moment_of(m, MomentKind::Mu);
  r.mean_mu2 = moment_of(m, MomentKind::Mu2);
  // Second moments about the mean avoid the cancellation in <xi^2> - <xi>^2,
  // which loses all digits of the variance once |beta| is large.
  const cplx c = kInvSqrt2 * cplx(r.mean_xi, r.mean_mu);
  cplx cxi2{};
  cplx cmu2{};
  for (const auto* comp : {&s.upper, &s.lower}) {
    for (const auto& bra : *comp) {
      for (const auto& ket : *comp) {
        const cplx w = std::conj(bra.weight) * ket.weight;
        if (w == cplx{}) continue;
        cxi2 += w * central_braket(bra.beta, ket.beta, bra.derivative, ket.derivative, MomentKind::Xi2, c,
                                   m.log_shift);
        cmu2 += w * central_braket(bra.beta, ket.beta, bra.derivative, ket.derivative, MomentKind::Mu2, c,
                                   m.log_shift);
      }
    }
  }
  r.var_xi = (cxi2 / m.overlap).real();
  r.var_mu = (cmu2 / m.overlap).real();
  r.product = r.var_xi * r.var_mu;
  r.log_norm = std::log(m.overlap.real()) + m.log_shift;
  r.norm = std::exp(r.log_norm);
  return r;
}

AsymptoticParams asymptotic_params(const KMatrix& k, cplx z0, double eta, double lambda,
                                   double tol) {
  const Spectrum sp = eigen_decompose(k, tol);
  if (sp.region.tag != RegionTag::GenericUnbounded)
    throw Error(ErrorKind::WrongRegion,
                "wrong region: asymptotic variances need |chi+| = |chi-| with chi+ != chi-");
  const SuperState mixed = mixed_state(k, z0, 0.0, eta, lambda, tol);

  AsymptoticParams p;
  p.chi_mag = 0.5 * (std::abs(sp.chi_plus) + std::abs(sp.chi_minus));
  p.phi_plus = std::arg(sp.chi_plus);
  p.phi_minus = std::arg(sp.chi_minus);
  p.beta0 = std::abs(z0) / p.chi_mag;
  p.gamma_plus = std::norm(mixed.upper[0].weight) + std::norm(mixed.lower[0].weight);
  p.gamma_minus = std::norm(mixed.upper[1].weight) + std::norm(mixed.lower[1].weight);
  p.z0_arg = std::arg(z0);
  return p;
}

std::pair<double, double> asymptotic_variances(const AsymptoticParams& p, double t, double omega) {
  const double total = p.gamma_plus + p.gamma_minus;
  if (!(total > 0.0) || p.gamma_plus < 0.0 || p.gamma_minus < 0.0 || p.beta0 < 0.0 || !(p.chi_mag > 0.0))
    throw Error(ErrorKind::InvalidArgument, "asymptotic_variances: invalid parameters");
  const double weight = p.gamma_plus * p.gamma_minus / (total * total);
  const double split = std::sin(0.5 * (p.phi_plus - p.phi_minus));
  const double amplitude = weight * 8.0 * p.beta0 * p.beta0 * split * split;
  const double phase = omega * t - p.z0_arg + 0.5 * (p.phi_plus + p.phi_minus);
  const double s = std::sin(phase);
  const double c = std::cos(phase);
  return {0.5 + amplitude * s * s, 0.5 + amplitude * c * c};
}

}  // namespace susycs
