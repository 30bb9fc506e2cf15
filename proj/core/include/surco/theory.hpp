#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace surco {

/// Axis-aligned box in R^d.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  double volume() const;
  bool contains(std::span<const double> point, double tol = 0.0) const;
  void validate() const;
};

/// Volume of the Euclidean unit ball in d dimensions.
double unit_ball_volume(int d);

struct LabeledDataset {
  std::vector<std::vector<double>> points;
  std::vector<std::vector<double>> labels;
  Box domain;

  std::size_t size() const { return points.size(); }
  /// Shapes agree and every point lies inside the domain.
  void validate() const;
};

/// Label of the Euclidean-nearest point; the lowest index wins ties.
const std::vector<double>& nn1_predict(const LabeledDataset& data, std::span<const double> query);

/// Dataset size needed for an (eps/L)-cover: vol(Y) / vol_0 * (L / eps)^d.
double cover_size_bound(double domain_volume, double unit_ball_vol, double lipschitz, double eps,
                        int dim);

struct CoverAnalysis {
  double delta = 0.0;
  bool covered = false;
  std::vector<double> witness;  ///< farthest probe when not covered
  double max_distance = 0.0;    ///< largest probe-to-dataset distance seen
  std::size_t probes = 0;
  double n0 = std::numeric_limits<double>::quiet_NaN();
};

/// Checks whether every probe of a regular grid over `domain` (pitch at most
/// delta / 10 per axis) lies within delta of some point. When `lipschitz` and
/// `eps` are positive the size bound is reported alongside.
CoverAnalysis check_cover(std::span<const std::vector<double>> points, const Box& domain,
                          double delta, double lipschitz = 0.0, double eps = 0.0);

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

struct LipschitzReport {
  std::string label;
  double spacing = 0.0;
  double max_ratio = 0.0;  ///< max ||phi(y) - phi(y')|| / ||y - y'|| over grid neighbours
  std::size_t clusters = 0;
  /// Smallest distance between image points in different clusters (inf for one cluster).
  double d_min = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
};

struct LipschitzScanOptions {
  std::string label;
  /// Image points closer than this are linked into one cluster.
  double link_radius = 0.25;
};

/// Evaluates `map` on a grid of pitch h over `domain` for each spacing and
/// reports the largest ratio over axis-adjacent grid points plus the number of
/// single-linkage clusters in the sampled image.
std::vector<LipschitzReport> lipschitz_scan(const VectorMap& map, const Box& domain,
                                            std::span<const double> spacings,
                                            const LipschitzScanOptions& opts = {});

/// Cell centres of the coarsest regular grid whose cells have half-diagonal at
/// most delta; the result delta-covers the box.
std::vector<std::vector<double>> grid_cover_points(const Box& domain, double delta);

/// The toy problem's optimal vertex as a function of the angle (maximization).
std::vector<double> toy_direct_map(double y);
/// The surrogate cost (cos y, sin y) that reproduces it through a linear solver.
std::vector<double> toy_surrogate_map(double y);

}  // namespace surco
