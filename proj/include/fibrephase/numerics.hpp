#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fibrephase::numerics {

/// Wrap an angle into (-pi, pi]; an exact -pi maps to +pi.
double wrap_angle(double angle);

/// Second-order finite-difference derivative on a (possibly nonuniform) grid:
/// centered in the interior, one-sided three-point at the ends. Needs >= 3 points.
std::vector<double> derivative(std::span<const double> t, std::span<const double> f);
std::vector<Eigen::Vector3d> derivative(std::span<const double> t, std::span<const Eigen::Vector3d> f);

/// Running integral of f over the grid, value at every node.
///
/// Each interval is integrated with the quadratic through a neighbouring
/// triple of nodes, so the value at every even node equals composite Simpson
/// and an odd tail gets a third-order closing panel. Two points fall back to
/// the trapezoid rule.
std::vector<double> cumulative_simpson(std::span<const double> t, std::span<const double> f);

/// Composite Simpson integral over the whole grid.
double simpson(std::span<const double> t, std::span<const double> f);

}  // namespace fibrephase::numerics
