#include <catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

#include "oracles.hpp"
#include "susycs/analysis.hpp"
#include "susycs/error.hpp"
#include "susycs/observables.hpp"

using namespace susycs;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

SuperState one_term(CoherentTerm up, std::optional<CoherentTerm> low) {
  SuperState s;
  s.k = {1.0, 0.0, 0.0, 1.0};
  s.upper = {up};
  if (low) s.lower = {*low};
  return s;
}

}  // namespace

// --- ranges and sweeps ---------------------------------------------------------

TEST_CASE("Range grid and validation") {
  const Range r{1.0, 2.0, 5};
  CHECK(r.at(0) == 1.0);
  CHECK(r.at(2) == 1.5);
  CHECK(r.at(4) == 2.0);
  CHECK(Range{3.0, 7.0, 1}.at(0) == 3.0);
  CHECK(kind_of([] { Range{0.0, 1.0, 1}.validate("x"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Range{0.0, INFINITY, 3}.validate("x"); }) == ErrorKind::InvalidArgument);
  CHECK_NOTHROW(Range{0.0, 1.0, 1}.validate("x", 1));
}

TEST_CASE("sweep_theta steps off degenerate angles") {
  const Range th{0.0, kPi / 2, 3};
  const double step = kPi / 4;
  CHECK(sweep_theta(th, 0) == 0.5 * step);
  CHECK(sweep_theta(th, 1) == th.at(1));
  CHECK_THAT(sweep_theta(th, 2), WithinAbs(kPi / 2 - 0.5 * step, 1e-15));
  CHECK(sweep_theta(Range{0.1, 0.3, 3}, 1) == Range{0.1, 0.3, 3}.at(1));
}

TEST_CASE("sweep rows are theta-major and match theta_product") {
  SweepSpec spec;
  spec.theta = {0.2, 2.8, 4};
  spec.zmag = {0.0, 3.0, 5};
  spec.zarg = 0.3;
  spec.eta = kPi / 4;
  spec.lambda = kPi / 4;
  spec.threads = 1;
  const auto rows = sweep(spec);
  REQUIRE(rows.size() == 20);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) {
      const SweepRow& r = rows[static_cast<std::size_t>(i * 5 + j)];
      CHECK(r.theta == spec.theta.at(i));
      CHECK(r.zmag == spec.zmag.at(j));
      CHECK(r.zarg == 0.3);
      CHECK(r.ok());
      CHECK(r.product == theta_product(r.theta, r.zmag, 0.3, kPi / 4, kPi / 4));
      CHECK(r.product == r.var_xi * r.var_mu);
    }
}

TEST_CASE("sweep output does not depend on the thread count") {
  SweepSpec spec;
  spec.theta = {0.0, kPi, 9};
  spec.zmag = {0.0, 6.0, 13};
  spec.eta = 0.4;
  spec.lambda = -1.1;
  spec.t = 0.7;
  spec.threads = 1;
  const auto serial = sweep(spec);
  for (unsigned n : {2u, 5u, 0u}) {
    spec.threads = n;
    const auto parallel = sweep(spec);
    REQUIRE(parallel.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(parallel[i].theta == serial[i].theta);
      CHECK(parallel[i].zmag == serial[i].zmag);
      CHECK((parallel[i].product == serial[i].product || (std::isnan(parallel[i].product) && std::isnan(serial[i].product))));
      CHECK(parallel[i].flag == serial[i].flag);
    }
  }
}

TEST_CASE("sweep flags rows that cannot be evaluated") {
  SweepSpec spec;
  spec.theta = {kPi / 4, kPi / 3, 2};
  spec.zmag = {1.0, 60.0, 2};
  spec.eta = 0.0;  // pure Z+ at |z| = 60 evaluates in closed form
  for (const auto& r : sweep(spec)) CHECK(r.ok());
  spec.theta = {kPi / 4, kPi / 4, 2};
  spec.zmag = {1.0, 2.0, 2};
  spec.eta = kPi / 2;
  spec.lambda = 0.0;
  // a degenerate-angle grid is moved off kPi / 2 only when it lands on it
  for (const auto& r : sweep(spec)) CHECK(r.ok());
  spec.theta = {0.0, 1.0, 1};
  CHECK(kind_of([&] { sweep(spec); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("theta_product is pi-periodic and bounded in the bounded quadrants") {
  oracle::Rng rng(401);
  for (int i = 0; i < 300; ++i) {
    const double theta = oracle::uniform(rng, 0.01, kPi / 2 - 0.01);
    const double zmag = oracle::uniform(rng, 0.0, 50.0);
    const double zarg = oracle::uniform(rng, -kPi, kPi);
    const double p = theta_product(theta, zmag, zarg, kPi / 4, kPi / 4);
    CHECK(p >= 0.25 - 1e-12);
    CHECK(p <= 1.0);
    const double q = theta_product(theta + kPi, zmag, zarg, kPi / 4, kPi / 4);
    CHECK(std::abs(p - q) <= 1e-9 * p);
  }
}

// --- divergence fit ---------------------------------------------------------------

TEST_CASE("fit_divergence recovers the quadratic and quartic growth") {
  const DivergenceFit a = fit_divergence(3 * kPi / 4, 0.0, {10.0, 100.0}, 20, kPi / 4, kPi / 4);
  CHECK_THAT(a.slope, WithinAbs(2.0, 0.05));
  CHECK(a.r_squared > 0.999);
  CHECK(a.points == 20);
  CHECK(a.zmag_window == std::pair<double, double>{10.0, 100.0});
  const DivergenceFit b = fit_divergence(3 * kPi / 4, kPi / 4, {10.0, 100.0}, 20, kPi / 4, kPi / 4);
  CHECK_THAT(b.slope, WithinAbs(4.0, 0.05));
  CHECK(b.r_squared > 0.999);
}

TEST_CASE("fit_divergence: argument and region errors") {
  CHECK(kind_of([] { fit_divergence(kPi / 4, 0.0, {10.0, 100.0}, 20, 0.5, 0.5); }) == ErrorKind::NoDivergence);
  CHECK(kind_of([] { fit_divergence(0.0, 0.0, {10.0, 100.0}, 20, 0.5, 0.5); }) == ErrorKind::NoDivergence);
  CHECK(kind_of([] { fit_divergence(3 * kPi / 4, 0.0, {10.0, 100.0}, 4, 0.5, 0.5); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { fit_divergence(3 * kPi / 4, 0.0, {100.0, 10.0}, 20, 0.5, 0.5); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { fit_divergence(3 * kPi / 4, 0.0, {0.0, 10.0}, 20, 0.5, 0.5); }) == ErrorKind::InvalidArgument);
}

// --- maximum search -------------------------------------------------------------------

TEST_CASE("find_max_uncertainty: collapsed window stays at the vacuum") {
  const MaxUncertainty m = find_max_uncertainty({0.5, 0.5}, 0.0, 0.0, kPi / 4, kPi / 4);
  CHECK_THAT(m.product, WithinAbs(0.25, 1e-14));
  CHECK(m.zmag == 0.0);
  CHECK(m.theta == 0.5);
}

TEST_CASE("find_max_uncertainty refines the coarse grid") {
  const MaxUncertainty m = find_max_uncertainty({0.0, kPi / 2}, 3.0, kPi / 4, kPi / 4, kPi / 4, {11, 16});
  CHECK(m.product >= m.coarse_product);
  CHECK_FALSE(m.touches_unbounded);
  CHECK(m.theta >= 0.0);
  CHECK(m.theta <= kPi / 2);
  CHECK(m.zmag <= 3.0);
  CHECK(std::abs(m.z - std::polar(m.zmag, kPi / 4)) < 1e-15);
  CHECK(m.product == theta_product(m.theta, m.zmag, kPi / 4, kPi / 4, kPi / 4));
  CHECK(find_max_uncertainty({0.2, 2.0}, 1.0, 0.0, 0.3, 0.3, {5, 5}).touches_unbounded);
  CHECK(kind_of([] { find_max_uncertainty({0.0, 1.0}, -1.0, 0.0, 0.3, 0.3); }) == ErrorKind::InvalidArgument);
}

// --- canonical detection -----------------------------------------------------------------

TEST_CASE("canonical_scs_check truth table") {
  const cplx a(0.7, -0.4);
  CHECK(canonical_scs_check(one_term({1.0, a, false}, std::nullopt), 1e-10));
  CHECK(canonical_scs_check(one_term({1.0, a, false}, CoherentTerm{cplx(0.0, 3.0), a, false}), 1e-10));
  CHECK(canonical_scs_check(one_term({0.0, a, false}, CoherentTerm{2.0, a, false}), 1e-10));
  CHECK_FALSE(canonical_scs_check(one_term({1.0, a, false}, CoherentTerm{1.0, -a, false}), 1e-8));
  CHECK_FALSE(canonical_scs_check(one_term({1.0, a, true}, std::nullopt), 1e-8));
  CHECK_FALSE(canonical_scs_check(one_term({0.0, a, false}, std::nullopt), 1e-8));
  SuperState two = one_term({1.0, a, false}, std::nullopt);
  two.upper.push_back({1.0, 2.0 * a, false});
  CHECK_FALSE(canonical_scs_check(two, 1e-8));
}

TEST_CASE("canonical_scs_check on constructed states") {
  const KMatrix k = theta_operator(kPi / 4);
  const auto [zp, zm] = generic_mus_basis(k, 1.0, 0.0);
  CHECK(canonical_scs_check(zp, 1e-10));
  CHECK(canonical_scs_check(zm, 1e-10));
  CHECK_FALSE(canonical_scs_check(mixed_state(k, 1.0, 0.0, kPi / 4, 0.0), 1e-8));
  const auto [za, zc] = generic_basis(k, 1.0, 0.0);
  CHECK_FALSE(canonical_scs_check(za, 1e-8));
  CHECK(canonical_scs_check(degenerate_mus({1.0, 1.0, 0.0, 1.0}, 1.0, 0.0), 1e-10));
  // Aragone Z_A has no derivative part; a degenerate K with k3 != 0 does
  CHECK(canonical_scs_check(degenerate_basis({1.0, 1.0, 0.0, 1.0}, 1.0, 0.0).first, 1e-10));
  CHECK_FALSE(canonical_scs_check(degenerate_basis({2.0, 1.0, -0.25, 1.0}, 1.0, 0.0).first, 1e-8));
  CHECK(canonical_scs_check(singular_state({1.0, 1.0, 1.0, 1.0}, 2.0, 0.0), 1e-10));
}

// --- parameter space -------------------------------------------------------------------------

TEST_CASE("param_grid_classify: reference cells") {
  const auto one = [](double k2, double k3, double k4) {
    return param_grid_classify({k2, k2, 1}, {k3, k3, 1}, {k4, k4, 1}).front();
  };
  CHECK(one(1.0, 0.0, 1.0).region == RegionTag::Degenerate);
  CHECK(one(1.0, 1.0, 1.0).region == RegionTag::Singular);
  CHECK(one(std::cos(3 * kPi / 4), std::sin(3 * kPi / 4), 1.0).region == RegionTag::GenericUnbounded);
  CHECK(one(std::cos(kPi / 4), std::sin(kPi / 4), 1.0).region == RegionTag::GenericBounded);
  const GridCell c = one(0.5, -2.0, 3.0);
  CHECK(c.discriminant == 4.0 - 4.0);
  CHECK(c.det == 4.0);
  CHECK(c.region == RegionTag::Degenerate);
}

TEST_CASE("param_grid_classify ordering and agreement with classify") {
  const Range k2{-1.0, 1.0, 3}, k3{-2.0, 2.0, 4}, k4{0.0, 2.0, 5};
  const auto cells = param_grid_classify(k2, k3, k4);
  REQUIRE(cells.size() == 60);
  std::size_t idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      for (int l = 0; l < 5; ++l, ++idx) {
        const GridCell& c = cells[idx];
        CHECK(c.k2 == k2.at(i));
        CHECK(c.k3 == k3.at(j));
        CHECK(c.k4 == k4.at(l));
        CHECK(c.region == classify({1.0, c.k2, c.k3, c.k4}).tag);
      }
  CHECK(kind_of([] { param_grid_classify({0, 1, 0}, {0, 1, 1}, {0, 1, 1}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("surface_samples lie on their level sets") {
  const auto pts = surface_samples({-1.0, 1.0, 5}, {0.0, 2.0, 3});
  CHECK(pts.size() == 2 * 4 * 3);  // k2 = 0 skipped
  for (const auto& p : pts) {
    CHECK(p.k2 != 0.0);
    if (p.surface == Surface::Degenerate) {
      CHECK_THAT((1 - p.k4) * (1 - p.k4) + 4 * p.k2 * p.k3, WithinAbs(0.0, 1e-14));
    } else {
      CHECK_THAT(p.k4 - p.k2 * p.k3, WithinAbs(0.0, 1e-14));
      CHECK(classify({1.0, p.k2, p.k3, p.k4}).tag == RegionTag::Singular);
    }
  }
}
