#pragma once

#include <span>

namespace mgdispatch {

// Exact global minimizer over [lower, upper] of the convex scalar function
//   f(x) = sum_s w_s * |x - b_s| + lin * x + (quad/2) * (x - center)^2
// with w_s >= 0 and quad >= 0. The objective is piecewise quadratic; the
// minimizer is found by a derivative scan over the sorted breakpoints, so no
// iteration or tolerance is involved. Ties (flat segments) resolve to the
// smallest minimizer.
double piecewise_prox_1d(std::span<const double> weights, std::span<const double> breakpoints,
                         double lin, double quad, double center, double lower, double upper);

// Fast path for equal weights and pre-sorted breakpoints (ascending).
double piecewise_prox_1d_sorted_uniform(std::span<const double> sorted_breakpoints,
                                        double weight, double lin, double quad, double center,
                                        double lower, double upper);

}  // namespace mgdispatch
