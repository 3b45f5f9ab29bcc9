#include "susycs/analysis.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <thread>

#include "susycs/error.hpp"
#include "susycs/fock.hpp"
#include "susycs/observables.hpp"

namespace susycs {

double Range::at(int i) const {
  if (count <= 1) return start;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void Range::validate(const char* name, int min_count) const {
  if (count < min_count)
    throw Error(ErrorKind::InvalidArgument,
                std::string(name) + ": count must be >= " + std::to_string(min_count));
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw Error(ErrorKind::InvalidArgument, std::string(name) + ": range must be finite");
}

double sweep_theta(const Range& theta, int i) {
  const double value = theta.at(i);
  const double quarter = 0.5 * std::numbers::pi;
  const double nearest = std::round(value / quarter) * quarter;
  if (std::abs(value - nearest) > 1e-9 || theta.count < 2) return value;
  const double step = (theta.stop - theta.start) / static_cast<double>(theta.count - 1);
  return i == theta.count - 1 ? value - 0.5 * step : value + 0.5 * step;
}

double theta_product(double theta, double zmag, double zarg, double eta, double lambda, double t) {
  const SuperState s = mixed_state(theta_operator(theta), std::polar(zmag, zarg), t, eta, lambda);
  return uncertainty(s).product;
}

std::vector<SweepRow> sweep(const SweepSpec& spec) {
  spec.theta.validate("theta");
  spec.zmag.validate("zmag");
  const int nz = spec.zmag.count;
  const std::size_t total = static_cast<std::size_t>(spec.theta.count) * static_cast<std::size_t>(nz);
  std::vector<SweepRow> rows(total);

  auto evaluate = [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.theta = sweep_theta(spec.theta, static_cast<int>(idx / static_cast<std::size_t>(nz)));
    row.zmag = spec.zmag.at(static_cast<int>(idx % static_cast<std::size_t>(nz)));
    row.zarg = spec.zarg;
    try {
      const SuperState s = mixed_state(theta_operator(row.theta), std::polar(row.zmag, row.zarg),
                                       spec.t, spec.eta, spec.lambda);
      const UncertaintyReport r = uncertainty(s);
      row.var_xi = r.var_xi;
      row.var_mu = r.var_mu;
      row.product = r.product;
      if (!std::isfinite(r.product)) row.flag = "non-finite uncertainty";
    } catch (const Error& e) {
      row.var_xi = row.var_mu = row.product = std::numeric_limits<double>::quiet_NaN();
      row.flag = e.what();
    }
  };

  unsigned threads = spec.threads != 0 ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) evaluate(i);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < total; i = next++) evaluate(i);
    });
  for (auto& th : pool) th.join();
  return rows;
}

DivergenceFit fit_divergence(double theta, double zarg, std::pair<double, double> zmag_window,
                             int points, double eta, double lambda) {
  if (points < 5) throw Error(ErrorKind::InvalidArgument, "fit_divergence: need at least 5 points");
  const auto [zmin, zmax] = zmag_window;
  if (!(zmin > 0.0) || !(zmax > zmin))
    throw Error(ErrorKind::InvalidArgument, "fit_divergence: window must satisfy 0 < zmin < zmax");
  const RegionClass rc = classify(theta_operator(theta));
  if (rc.tag != RegionTag::GenericUnbounded)
    throw Error(ErrorKind::NoDivergence,
                "no divergence to fit: theta operator is " + std::string(to_string(rc.tag)));

  std::vector<double> xs;
  std::vector<double> ys;
  const double lmin = std::log(zmin);
  const double lmax = std::log(zmax);
  for (int i = 0; i < points; ++i) {
    const double lx = lmin + (lmax - lmin) * i / (points - 1);
    const double p = theta_product(theta, std::exp(lx), zarg, eta, lambda);
    if (!(p > 0.0) || !std::isfinite(p))
      throw Error(ErrorKind::InvalidArgument, "fit_divergence: non-positive uncertainty product");
    xs.push_back(lx);
    ys.push_back(std::log(p));
  }

  const double n = static_cast<double>(points);
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < points; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < points; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }

  DivergenceFit fit;
  fit.theta = theta;
  fit.zarg = zarg;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < points; ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.zmag_window = zmag_window;
  fit.points = points;
  return fit;
}

MaxUncertainty find_max_uncertainty(std::pair<double, double> theta_window, double zmag_max,
                                    double zarg, double eta, double lambda, MaxSearchGrid grid) {
  auto [tlo, thi] = theta_window;
  if (tlo > thi) std::swap(tlo, thi);
  if (!(zmag_max >= 0.0))
    throw Error(ErrorKind::InvalidArgument, "find_max_uncertainty: zmag_max must be >= 0");
  const Range theta{tlo, thi, tlo == thi ? 1 : std::max(grid.theta_points, 2)};
  const Range zmag{0.0, zmag_max, zmag_max == 0.0 ? 1 : std::max(grid.zmag_points, 2)};

  auto objective = [&](double th, double zm) {
    try {
      const double p = theta_product(th, zm, zarg, eta, lambda);
      return std::isfinite(p) ? p : -std::numeric_limits<double>::infinity();
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  MaxUncertainty best;
  best.product = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < theta.count; ++i) {
    const double th = sweep_theta(theta, i);
    if (classify(theta_operator(th)).tag == RegionTag::GenericUnbounded) best.touches_unbounded = true;
    for (int j = 0; j < zmag.count; ++j) {
      const double zm = zmag.at(j);
      const double p = objective(th, zm);
      if (p > best.product) {
        best.product = p;
        best.theta = th;
        best.zmag = zm;
      }
    }
  }
  if (!std::isfinite(best.product))
    throw Error(ErrorKind::WrongRegion, "find_max_uncertainty: no evaluable point in window");
  best.coarse_product = best.product;

  // Compass search, clamped to the window.
  double ht = theta.count > 1 ? (thi - tlo) / (theta.count - 1) : 0.0;
  double hz = zmag.count > 1 ? zmag_max / (zmag.count - 1) : 0.0;
  const double stop_t = 1e-9 * std::max(1.0, std::abs(thi));
  const double stop_z = 1e-9 * std::max(1.0, zmag_max);
  for (int iter = 0; iter < 400 && (ht > stop_t || hz > stop_z); ++iter) {
    bool improved = false;
    const std::array<std::pair<double, double>, 4> moves{{{ht, 0.0}, {-ht, 0.0}, {0.0, hz}, {0.0, -hz}}};
    for (const auto& [dt, dz] : moves) {
      if (dt == 0.0 && dz == 0.0) continue;
      const double th = std::clamp(best.theta + dt, tlo, thi);
      const double zm = std::clamp(best.zmag + dz, 0.0, zmag_max);
      const double p = objective(th, zm);
      if (p > best.product) {
        best.product = p;
        best.theta = th;
        best.zmag = zm;
        improved = true;
      }
    }
    if (!improved) {
      ht *= 0.5;
      hz *= 0.5;
    }
  }
  best.z = std::polar(best.zmag, zarg);
  return best;
}

bool canonical_scs_check(const SuperState& s, double tol) {
  double beta_max = 0.0;
  for (const auto* comp : {&s.upper, &s.lower})
    for (const auto& term : *comp) beta_max = std::max(beta_max, std::abs(term.beta));
  const int N = std::clamp(static_cast<int>(std::ceil(3.0 * beta_max * beta_max)) + 30, 20, kDefaultMaxFock);
  const FockExpansion f = expand_fock(s, N);

  const std::vector<cplx> upper(f.a.begin(), f.a.end());
  const std::vector<cplx> lower(f.c.begin() + 1, f.c.end());  // coefficient of |m> is c_{m+1}
  auto norm2 = [](const std::vector<cplx>& v) {
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return acc;
  };
  const double total = norm2(upper) + norm2(lower);
  if (total == 0.0) return false;

  // Shared alpha from the ratio relation sqrt(m+1) x_{m+1} = alpha x_m.
  cplx num{};
  double den = 0.0;
  for (const auto* v : {&upper, &lower}) {
    for (std::size_t m = 0; m + 1 < v->size(); ++m) {
      num += std::conj((*v)[m]) * std::sqrt(static_cast<double>(m + 1)) * (*v)[m + 1];
      den += std::norm((*v)[m]);
    }
  }
  const cplx alpha = den > 0.0 ? num / den : cplx{};

  for (const auto* v : {&upper, &lower}) {
    const double n2 = norm2(*v);
    if (n2 <= 1e-28 * total) continue;
    std::vector<cplx> coh(v->size());
    cplx p = 1.0;
    for (std::size_t m = 0; m < v->size(); ++m) {
      if (m > 0) p *= alpha / std::sqrt(static_cast<double>(m));
      coh[m] = p;
    }
    cplx proj{};
    for (std::size_t m = 0; m < v->size(); ++m) proj += std::conj(coh[m]) * (*v)[m];
    const cplx amp = proj / norm2(coh);
    double res = 0.0;
    for (std::size_t m = 0; m < v->size(); ++m) res += std::norm((*v)[m] - amp * coh[m]);
    if (std::sqrt(res) > tol * std::sqrt(n2)) return false;
  }
  return true;
}

std::vector<GridCell> param_grid_classify(const Range& k2, const Range& k3, const Range& k4, double tol) {
  k2.validate("k2", 1);
  k3.validate("k3", 1);
  k4.validate("k4", 1);
  std::vector<GridCell> cells;
  cells.reserve(static_cast<std::size_t>(k2.count) * static_cast<std::size_t>(k3.count) *
                static_cast<std::size_t>(k4.count));
  for (int i = 0; i < k2.count; ++i)
    for (int j = 0; j < k3.count; ++j)
      for (int l = 0; l < k4.count; ++l) {
        GridCell cell;
        cell.k2 = k2.at(i);
        cell.k3 = k3.at(j);
        cell.k4 = k4.at(l);
        const KMatrix k{1.0, cell.k2, cell.k3, cell.k4, 1.0};
        cell.region = classify(k, tol).tag;
        cell.discriminant = (1.0 - cell.k4) * (1.0 - cell.k4) + 4.0 * cell.k2 * cell.k3;
        cell.det = cell.k4 - cell.k2 * cell.k3;
        cells.push_back(cell);
      }
  return cells;
}

std::vector<SurfacePoint> surface_samples(const Range& k2, const Range& k4) {
  k2.validate("k2", 1);
  k4.validate("k4", 1);
  std::vector<SurfacePoint> out;
  for (int i = 0; i < k2.count; ++i)
    for (int l = 0; l < k4.count; ++l) {
      const double b = k2.at(i);
      const double d = k4.at(l);
      if (std::abs(b) < 1e-12) continue;
      out.push_back({Surface::Degenerate, b, -(1.0 - d) * (1.0 - d) / (4.0 * b), d});
      out.push_back({Surface::Singular, b, d / b, d});
    }
  return out;
}

}  // namespace susycs
