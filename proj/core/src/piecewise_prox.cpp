#include "mgdispatch/piecewise_prox.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mgdispatch {

namespace {

// Walks segments left to right and returns the first point whose
// right-derivative is nonnegative (the smallest minimizer of a convex
// function). `weight_at(i)` must be >= 0 and `sorted_b` ascending.
template <class WeightAt>
double scan_sorted(const double* sorted_b, std::size_t k, WeightAt weight_at, double w_total,
                   double lin, double quad, double center, double lower, double upper) {
  std::size_t idx = 0;
  double w_le = 0.0;
  while (idx < k && sorted_b[idx] <= lower) w_le += weight_at(idx++);
  double slope_shift = 2.0 * w_le - w_total;

  if (quad * (lower - center) + lin + slope_shift >= 0.0) return lower;

  while (idx < k && sorted_b[idx] < upper) {
    const double anchor = sorted_b[idx];
    if (quad > 0.0) {
      const double stationary = center - (lin + slope_shift) / quad;
      if (stationary <= anchor) return stationary;
    }
    slope_shift += 2.0 * weight_at(idx);
    if (quad * (anchor - center) + lin + slope_shift >= 0.0) return anchor;
    ++idx;
  }
  if (quad > 0.0) {
    const double stationary = center - (lin + slope_shift) / quad;
    if (stationary <= upper) return stationary;
  }
  return upper;
}

}  // namespace

double piecewise_prox_1d(std::span<const double> weights, std::span<const double> breakpoints,
                         double lin, double quad, double center, double lower, double upper) {
  if (weights.size() != breakpoints.size())
    throw std::invalid_argument("piecewise_prox_1d: weights/breakpoints size mismatch");
  if (!(upper >= lower)) throw std::invalid_argument("piecewise_prox_1d: upper < lower");
  if (!(quad >= 0.0)) throw std::invalid_argument("piecewise_prox_1d: quad must be >= 0");
  for (double w : weights)
    if (!(w >= 0.0)) throw std::invalid_argument("piecewise_prox_1d: weights must be >= 0");

  const std::size_t k = breakpoints.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return breakpoints[a] < breakpoints[b]; });
  std::vector<double> b_sorted(k), w_sorted(k);
  for (std::size_t i = 0; i < k; ++i) {
    b_sorted[i] = breakpoints[order[i]];
    w_sorted[i] = weights[order[i]];
  }
  const double w_total = std::accumulate(w_sorted.begin(), w_sorted.end(), 0.0);
  return scan_sorted(b_sorted.data(), k, [&](std::size_t i) { return w_sorted[i]; }, w_total, lin,
                     quad, center, lower, upper);
}

double piecewise_prox_1d_sorted_uniform(std::span<const double> sorted_breakpoints, double weight,
                                        double lin, double quad, double center, double lower,
                                        double upper) {
  if (!(upper >= lower)) throw std::invalid_argument("piecewise_prox_1d: upper < lower");
  if (!(quad >= 0.0)) throw std::invalid_argument("piecewise_prox_1d: quad must be >= 0");
  if (!(weight >= 0.0)) throw std::invalid_argument("piecewise_prox_1d: weight must be >= 0");
  const double w_total = weight * static_cast<double>(sorted_breakpoints.size());
  return scan_sorted(sorted_breakpoints.data(), sorted_breakpoints.size(),
                     [weight](std::size_t) { return weight; }, w_total, lin, quad, center, lower,
                     upper);
}

}  // namespace mgdispatch
