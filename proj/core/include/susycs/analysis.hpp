#pragma once

// Parameter studies over the theta family [[1, cos theta], [sin theta, 1]]:
// uncertainty sweeps, power-law fits of the divergence in the unbounded
// region, the maximum-uncertainty search in the bounded region, detection of
// canonical supercoherent states, and region classification of the
// k1-normalized parameter space.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "susycs/kmatrix.hpp"
#include "susycs/states.hpp"

namespace susycs {

/// Inclusive linear grid of `count` points.
struct Range {
  double start = 0.0;
  double stop = 0.0;
  int count = 2;

  double at(int i) const;
  void validate(const char* name, int min_count = 2) const;
};

struct SweepSpec {
  Range theta{};
  Range zmag{};
  double zarg = 0.0;
  double eta = 0.0;
  double lambda = 0.0;
  double t = 0.0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SweepRow {
  double theta = 0.0;
  double zmag = 0.0;
  double zarg = 0.0;
  double var_xi = 0.0;
  double var_mu = 0.0;
  double product = 0.0;
  /// Empty when the row evaluated cleanly, otherwise the error message.
  std::string flag;

  bool ok() const { return flag.empty(); }
};

/// Theta grid value i, moved half a grid step off any degenerate angle
/// n pi / 2 it would otherwise land on.
double sweep_theta(const Range& theta, int i);

/// One row per (theta, zmag) grid point, theta-major. Rows are evaluated
/// independently (optionally on several threads); output order is fixed.
std::vector<SweepRow> sweep(const SweepSpec& spec);

/// Uncertainty product of cos(eta) Z+ + e^{i lambda} sin(eta) Z- for
/// theta_operator(theta) at z0 = zmag e^{i zarg}.
double theta_product(double theta, double zmag, double zarg, double eta, double lambda,
                     double t = 0.0);

struct DivergenceFit {
  double theta = 0.0;
  double zarg = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> zmag_window{};
  int points = 0;
};

/// Least-squares slope of log(product) against log(zmag) over `points`
/// log-spaced magnitudes. Throws NoDivergence unless theta_operator(theta) is
/// GenericUnbounded.
DivergenceFit fit_divergence(double theta, double zarg, std::pair<double, double> zmag_window,
                             int points, double eta, double lambda);

struct MaxUncertainty {
  double theta = 0.0;
  double zmag = 0.0;
  cplx z{};
  double product = 0.0;
  double coarse_product = 0.0;
  /// The theta window contains GenericUnbounded operators.
  bool touches_unbounded = false;
};

struct MaxSearchGrid {
  int theta_points = 41;
  int zmag_points = 61;
};

/// Coarse grid scan over (theta, |z|) followed by a bounded pattern search
/// started from the best grid point. Refinement only accepts improvements.
MaxUncertainty find_max_uncertainty(std::pair<double, double> theta_window, double zmag_max,
                                    double zarg, double eta, double lambda,
                                    MaxSearchGrid grid = {});

/// True iff both components are multiples of one common coherent sequence
/// alpha^n / sqrt(n!) (either component may vanish), within relative tol.
bool canonical_scs_check(const SuperState& s, double tol);

struct GridCell {
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  RegionTag region = RegionTag::GenericBounded;
  /// Level-set values: (1 - k4)^2 + 4 k2 k3 and k4 - k2 k3.
  double discriminant = 0.0;
  double det = 0.0;
};

/// Region tag per voxel of the (k2, k3, k4) box with k1 = 1. Ordering is
/// k2-major, then k3, then k4.
std::vector<GridCell> param_grid_classify(const Range& k2, const Range& k3, const Range& k4,
                                          double tol = kDefaultClassifyTol);

enum class Surface { Degenerate, Singular };

struct SurfacePoint {
  Surface surface = Surface::Degenerate;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
};

/// Samples of the degenerate surface (1 - k4)^2 + 4 k2 k3 = 0 and the
/// singular surface k4 = k2 k3 over a (k2, k4) grid, solved for k3. Points
/// with k2 = 0 are skipped.
std::vector<SurfacePoint> surface_samples(const Range& k2, const Range& k4);

}  // namespace susycs
