#pragma once

// Derivative-free Nelder-Mead simplex minimizer, used for maximum likelihood.

#include <functional>
#include <span>
#include <vector>

namespace centqre {

struct SimplexOptions {
  double initial_step = 0.5;
  std::vector<double> steps;  // per-coordinate override when non-empty
  double diameter_tol = 1e-8;
  int max_iterations = 5000;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options = {});

}  // namespace centqre
