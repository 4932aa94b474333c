#include "centqre/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace centqre {

namespace {

double simplex_diameter(const std::vector<std::vector<double>>& verts) {
  double d = 0.0;
  for (std::size_t i = 1; i < verts.size(); ++i)
    for (std::size_t k = 0; k < verts[0].size(); ++k)
      d = std::max(d, std::fabs(verts[i][k] - verts[0][k]));
  return d;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
  const std::size_t n = start.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start vector");

  std::vector<std::vector<double>> verts(n + 1, start);
  for (std::size_t k = 0; k < n; ++k) {
    const double step =
        options.steps.empty() ? options.initial_step : options.steps.at(k);
    verts[k + 1][k] += step;
  }
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = objective(verts[i]);

  std::vector<std::size_t> order(n + 1);
  SimplexResult result;

  for (result.iterations = 0; result.iterations < options.max_iterations; ++result.iterations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<std::vector<double>> vs(n + 1);
      std::vector<double> fs(n + 1);
      for (std::size_t i = 0; i <= n; ++i) {
        vs[i] = verts[order[i]];
        fs[i] = values[order[i]];
      }
      verts.swap(vs);
      values.swap(fs);
    }

    if (simplex_diameter(verts) < options.diameter_tol) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) centroid[k] += verts[i][k] / static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k)
        x[k] = centroid[k] + coef * (centroid[k] - verts[n][k]);
      return x;
    };

    const auto reflected = blend(1.0);
    const double f_reflected = objective(reflected);

    if (f_reflected < values[0]) {
      const auto expanded = blend(2.0);
      const double f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        verts[n] = expanded;
        values[n] = f_expanded;
      } else {
        verts[n] = reflected;
        values[n] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[n - 1]) {
      verts[n] = reflected;
      values[n] = f_reflected;
      continue;
    }

    if (f_reflected < values[n]) {
      const auto outside = blend(0.5);
      const double f_outside = objective(outside);
      if (f_outside <= f_reflected) {
        verts[n] = outside;
        values[n] = f_outside;
        continue;
      }
    } else {
      const auto inside = blend(-0.5);
      const double f_inside = objective(inside);
      if (f_inside < values[n]) {
        verts[n] = inside;
        values[n] = f_inside;
        continue;
      }
    }

    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k)
        verts[i][k] = verts[0][k] + 0.5 * (verts[i][k] - verts[0][k]);
      values[i] = objective(verts[i]);
    }
  }

  result.x = verts[0];
  result.value = values[0];
  return result;
}

}  // namespace centqre
