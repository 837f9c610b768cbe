#include "fibrephase/numerics.hpp"

#include <cmath>

#include "fibrephase/errors.hpp"

namespace fibrephase::numerics {

namespace {

void require_grid(std::span<const double> t, std::size_t n_f, std::size_t min_points) {
  if (t.size() != n_f) throw ValidationError("grid and sample counts differ");
  if (t.size() < min_points) {
    throw ValidationError("grid needs at least " + std::to_string(min_points) + " points");
  }
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1])) throw ValidationError("grid must be strictly increasing");
  }
}

// Integral over [x0, x1] and [x1, x2] of the quadratic through three nodes.
double first_panel(double h0, double h1, double f0, double f1, double f2) {
  return h0 / (6.0 * h1 * (h0 + h1)) *
         (f0 * (2.0 * h0 * h1 + 3.0 * h1 * h1) + f1 * (h0 * h0 + 4.0 * h0 * h1 + 3.0 * h1 * h1) -
          f2 * h0 * h0);
}

double second_panel(double h0, double h1, double f0, double f1, double f2) {
  return h1 / (6.0 * h0 * (h0 + h1)) *
         (-f0 * h1 * h1 + f1 * (3.0 * h0 * h0 + 4.0 * h0 * h1 + h1 * h1) +
          f2 * (3.0 * h0 * h0 + 2.0 * h0 * h1));
}

template <typename T>
std::vector<T> derivative_impl(std::span<const double> t, std::span<const T> f, T zero) {
  require_grid(t, f.size(), 3);
  const std::size_t n = t.size();
  std::vector<T> out(n, zero);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    out[i] = (-h2 / (h1 * (h1 + h2))) * f[i - 1] + ((h2 - h1) / (h1 * h2)) * f[i] +
             (h1 / (h2 * (h1 + h2))) * f[i + 1];
  }
  {
    const double h1 = t[1] - t[0];
    const double h2 = t[2] - t[1];
    out[0] = (-(2.0 * h1 + h2) / (h1 * (h1 + h2))) * f[0] + ((h1 + h2) / (h1 * h2)) * f[1] -
             (h1 / (h2 * (h1 + h2))) * f[2];
  }
  {
    const double h1 = t[n - 2] - t[n - 3];
    const double h2 = t[n - 1] - t[n - 2];
    out[n - 1] = (h2 / (h1 * (h1 + h2))) * f[n - 3] - ((h1 + h2) / (h1 * h2)) * f[n - 2] +
                 ((2.0 * h2 + h1) / (h2 * (h1 + h2))) * f[n - 1];
  }
  return out;
}

}  // namespace

double wrap_angle(double angle) {
  double w = std::remainder(angle, 2.0 * M_PI);  // [-pi, pi]
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

std::vector<double> derivative(std::span<const double> t, std::span<const double> f) {
  return derivative_impl<double>(t, f, 0.0);
}

std::vector<Eigen::Vector3d> derivative(std::span<const double> t, std::span<const Eigen::Vector3d> f) {
  return derivative_impl<Eigen::Vector3d>(t, f, Eigen::Vector3d::Zero());
}

std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f) {
  require_grid(t, f.size(), 1);
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  if (n == 2) {
    out[1] = 0.5 * (t[1] - t[0]) * (f[0] + f[1]);
    return out;
  }
  std::size_t i = 0;
  for (; i + 2 < n; i += 2) {
    const double h0 = t[i + 1] - t[i];
    const double h1 = t[i + 2] - t[i + 1];
    const double a = first_panel(h0, h1, f[i], f[i + 1], f[i + 2]);
    const double b = second_panel(h0, h1, f[i], f[i + 1], f[i + 2]);
    out[i + 1] = out[i] + a;
    out[i + 2] = out[i] + (a + b);
  }
  if (i + 1 < n) {
    // odd number of intervals: close with the quadratic through the last three nodes
    const double h0 = t[n - 2] - t[n - 3];
    const double h1 = t[n - 1] - t[n - 2];
    out[n - 1] = out[n - 2] + second_panel(h0, h1, f[n - 3], f[n - 2], f[n - 1]);
  }
  return out;
}

double simpson(std::span<const double> t, std::span<const double> f) {
  const auto c = cumulative_simpson(t, f);
  return c.empty() ? 0.0 : c.back();
}

}  // namespace fibrephase::numerics
