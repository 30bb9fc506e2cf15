#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "surco/instances.hpp"
#include "surco/solvers.hpp"

namespace surco {

/// f(x; y) together with its partial derivatives with respect to x.
struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> grad;
};

double normal_cdf(double z);
double normal_pdf(double z);

/// Probability that a path with indicator x arrives by the deadline:
/// Phi((T - sum mu x) / sqrt(sum sigma2 x)). Throws DegenerateError when the
/// path variance is zero. Larger is better.
ObjectiveValue ontime_objective(std::span<const double> x, const RouteInstance& inst);

/// (x1 cos y + x2 sin y)^2. Larger is better.
ObjectiveValue toy_objective(std::span<const double> x, const ToyInstance& inst);

enum class RowCheck { kEnforce, kSkip };

/// Smooth maximum device load. Device d carries
///   L_d = sum_t weights_t x[t,d] + 0.3 sqrt(sum_t x[t,d] + 1e-9)
/// and the value is the softmax-weighted mean of L with temperature 10.
/// Smaller is better. Rows of x must sum to one (within 1e-6) unless the check
/// is skipped, which gradient checks need.
ObjectiveValue assignment_objective(std::span<const double> x, const AssignmentInstance& inst,
                                    RowCheck rows = RowCheck::kEnforce);

/// A type-erased objective with a direction and an evaluation counter.
class Objective {
 public:
  using Fn = std::function<ObjectiveValue(std::span<const double>)>;

  Objective(Fn fn, Sense sense, std::size_t dimension)
      : fn_(std::move(fn)), sense_(sense), dimension_(dimension) {}

  Objective(const Objective& other)
      : fn_(other.fn_), sense_(other.sense_), dimension_(other.dimension_) {}
  Objective& operator=(const Objective&) = delete;

  ObjectiveValue operator()(std::span<const double> x) const;

  /// Loss to minimize (negated value for maximization) and its gradient.
  ObjectiveValue loss(std::span<const double> x) const;

  Sense sense() const { return sense_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void reset_calls() const { calls_.store(0, std::memory_order_relaxed); }

 private:
  Fn fn_;
  Sense sense_;
  std::size_t dimension_;
  mutable std::atomic<std::size_t> calls_{0};
};

Objective make_ontime_objective(const RouteInstance& inst);
Objective make_toy_objective(const ToyInstance& inst);
Objective make_assignment_objective(const AssignmentInstance& inst);

}  // namespace surco
