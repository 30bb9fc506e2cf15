#include "surco/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "surco/errors.hpp"
#include "surco/instances.hpp"
#include "surco/objectives.hpp"

namespace surco {

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Grid coordinates per axis: lo + k * pitch, always including hi.
std::vector<std::vector<double>> probe_axes(const Box& box, double max_pitch) {
  std::vector<std::vector<double>> axes(box.dim());
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const double width = box.hi[a] - box.lo[a];
    const auto intervals =
        width > 0.0 ? static_cast<std::size_t>(std::ceil(width / max_pitch - 1e-12)) : 0;
    for (std::size_t k = 0; k <= intervals; ++k) {
      axes[a].push_back(intervals == 0 ? box.lo[a]
                                       : box.lo[a] + width * static_cast<double>(k) /
                                                         static_cast<double>(intervals));
    }
  }
  return axes;
}

// Grid with exact pitch h from lo (the upper end is not forced onto the grid).
std::vector<std::vector<double>> spaced_axes(const Box& box, double h) {
  std::vector<std::vector<double>> axes(box.dim());
  for (std::size_t a = 0; a < box.dim(); ++a) {
    const auto steps = static_cast<std::size_t>(std::floor((box.hi[a] - box.lo[a]) / h + 1e-9));
    for (std::size_t k = 0; k <= steps; ++k) {
      axes[a].push_back(box.lo[a] + static_cast<double>(k) * h);
    }
  }
  return axes;
}

std::size_t grid_size(const std::vector<std::vector<double>>& axes) {
  std::size_t n = 1;
  for (const auto& axis : axes) n *= axis.size();
  return n;
}

// Index -> point for a row-major grid (last axis fastest).
std::vector<double> grid_point(const std::vector<std::vector<double>>& axes, std::size_t index) {
  std::vector<double> p(axes.size());
  for (std::size_t a = axes.size(); a-- > 0;) {
    p[a] = axes[a][index % axes[a].size()];
    index /= axes[a].size();
  }
  return p;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

constexpr std::size_t kMaxProbes = 20'000'000;

}  // namespace

double Box::volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
  return v;
}

bool Box::contains(std::span<const double> point, double tol) const {
  if (point.size() != dim()) return false;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (point[a] < lo[a] - tol || point[a] > hi[a] + tol) return false;
  }
  return true;
}

void Box::validate() const {
  if (lo.empty() || lo.size() != hi.size()) throw ParameterError("box bounds must match in size");
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(lo[a] <= hi[a])) throw ParameterError("box lower bound exceeds upper bound");
  }
}

double unit_ball_volume(int d) {
  if (d < 1) throw ParameterError("dimension must be positive");
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

void LabeledDataset::validate() const {
  domain.validate();
  if (points.size() != labels.size()) throw ParameterError("points and labels differ in count");
  for (const auto& p : points) {
    if (!domain.contains(p, 1e-12)) throw ParameterError("dataset point outside the domain");
  }
}

const std::vector<double>& nn1_predict(const LabeledDataset& data, std::span<const double> query) {
  if (data.points.empty()) throw ParameterError("1-NN prediction on an empty dataset");
  if (data.points.size() != data.labels.size()) {
    throw ParameterError("points and labels differ in count");
  }
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.points.size(); ++i) {
    if (data.points[i].size() != query.size()) throw ParameterError("query dimension mismatch");
    const double d = squared_distance(data.points[i], query);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return data.labels[best];
}

double cover_size_bound(double domain_volume, double unit_ball_vol, double lipschitz, double eps,
                        int dim) {
  if (!(eps > 0.0) || !(unit_ball_vol > 0.0)) throw ParameterError("eps and vol_0 must be positive");
  return domain_volume / unit_ball_vol * std::pow(lipschitz / eps, dim);
}

CoverAnalysis check_cover(std::span<const std::vector<double>> points, const Box& domain,
                          double delta, double lipschitz, double eps) {
  domain.validate();
  if (!(delta > 0.0)) throw ParameterError("cover radius must be positive");

  CoverAnalysis out;
  out.delta = delta;
  if (lipschitz > 0.0 && eps > 0.0) {
    const int d = static_cast<int>(domain.dim());
    out.n0 = cover_size_bound(domain.volume(), unit_ball_volume(d), lipschitz, eps, d);
  }

  const auto axes = probe_axes(domain, delta / 10.0);
  out.probes = grid_size(axes);
  if (out.probes > kMaxProbes) throw GuardError("cover probe grid too large");

  const double delta2 = delta * delta;
  double worst = -1.0;
  for (std::size_t k = 0; k < out.probes; ++k) {
    const std::vector<double> probe = grid_point(axes, k);
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& p : points) {
      if (p.size() != probe.size()) throw ParameterError("dataset point dimension mismatch");
      nearest = std::min(nearest, squared_distance(p, probe));
      if (nearest <= delta2 && worst > delta2) break;
    }
    if (nearest > worst) {
      worst = nearest;
      out.witness = probe;
    }
  }
  out.max_distance = std::sqrt(worst);
  out.covered = worst <= delta2;
  if (out.covered) out.witness.clear();
  return out;
}

std::vector<LipschitzReport> lipschitz_scan(const VectorMap& map, const Box& domain,
                                            std::span<const double> spacings,
                                            const LipschitzScanOptions& opts) {
  domain.validate();
  std::vector<LipschitzReport> reports;
  for (double h : spacings) {
    if (!(h > 0.0)) throw ParameterError("grid spacing must be positive");
    const auto axes = spaced_axes(domain, h);
    const std::size_t n = grid_size(axes);
    if (n > kMaxProbes) throw GuardError("lipschitz grid too large");

    std::vector<std::vector<double>> points(n);
    std::vector<std::vector<double>> images(n);
    for (std::size_t k = 0; k < n; ++k) {
      points[k] = grid_point(axes, k);
      images[k] = map(points[k]);
    }

    LipschitzReport report;
    report.label = opts.label;
    report.spacing = h;
    report.samples = n;

    // Axis neighbours: stride of axis a in the row-major index.
    std::size_t stride = 1;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const std::size_t len = axes[a].size();
      for (std::size_t k = 0; k < n; ++k) {
        if ((k / stride) % len + 1 >= len) continue;
        const std::size_t j = k + stride;
        const double dy = std::sqrt(squared_distance(points[k], points[j]));
        const double dphi = std::sqrt(squared_distance(images[k], images[j]));
        if (dy > 0.0) report.max_ratio = std::max(report.max_ratio, dphi / dy);
      }
      stride *= len;
    }

    // Single-linkage clusters over the distinct image points.
    std::vector<std::vector<double>> distinct;
    for (const auto& img : images) {
      if (std::find(distinct.begin(), distinct.end(), img) == distinct.end()) {
        distinct.push_back(img);
      }
    }
    DisjointSets sets(distinct.size());
    const double link2 = opts.link_radius * opts.link_radius;
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      for (std::size_t b = a + 1; b < distinct.size(); ++b) {
        if (squared_distance(distinct[a], distinct[b]) <= link2) sets.unite(a, b);
      }
    }
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      if (sets.find(a) == a) ++report.clusters;
    }
    double gap2 = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < distinct.size(); ++a) {
      for (std::size_t b = a + 1; b < distinct.size(); ++b) {
        if (sets.find(a) != sets.find(b)) {
          gap2 = std::min(gap2, squared_distance(distinct[a], distinct[b]));
        }
      }
    }
    report.d_min = std::sqrt(gap2);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<std::vector<double>> grid_cover_points(const Box& domain, double delta) {
  domain.validate();
  if (!(delta > 0.0)) throw ParameterError("cover radius must be positive");
  const std::size_t d = domain.dim();
  const double per_axis = 2.0 * delta / std::sqrt(static_cast<double>(d));
  std::vector<std::vector<double>> axes(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double width = domain.hi[a] - domain.lo[a];
    const auto cells = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(width / per_axis - 1e-12)));
    const double h = width / static_cast<double>(cells);
    for (std::size_t k = 0; k < cells; ++k) {
      axes[a].push_back(domain.lo[a] + (static_cast<double>(k) + 0.5) * h);
    }
  }
  const std::size_t n = grid_size(axes);
  if (n > kMaxProbes) throw GuardError("cover grid too large");
  std::vector<std::vector<double>> points(n);
  for (std::size_t k = 0; k < n; ++k) points[k] = grid_point(axes, k);
  return points;
}

std::vector<double> toy_direct_map(double y) {
  const ToyInstance inst(y);
  std::size_t best = 0;
  double best_value = -1.0;
  for (std::size_t i = 0; i < ToyInstance::kVertices.size(); ++i) {
    const auto& v = ToyInstance::kVertices[i];
    const double value = toy_objective(std::span<const double>(v.data(), 2), inst).value;
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return {ToyInstance::kVertices[best][0], ToyInstance::kVertices[best][1]};
}

std::vector<double> toy_surrogate_map(double y) { return {std::cos(y), std::sin(y)}; }

}  // namespace surco
