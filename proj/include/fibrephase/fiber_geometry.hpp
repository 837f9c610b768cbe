#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "fibrephase/fock_algebra.hpp"

namespace fibrephase {

enum class PathKind { helix, sampled };

/// Helix wound about the z axis: p(s) = (r cos 2 pi s, r sin 2 pi s, pitch s), s in [0, turns].
struct HelixParams {
  double radius = 1.0;
  double pitch_per_turn = 0.0;
  double turns = 1.0;
  int samples = 64;

  /// Polar angle of the tangent from the helix axis, atan2(2 pi r, pitch).
  double tilt() const;
};

/// A fibre centreline, either an analytic helix or sampled 3-D points.
///
/// Sampled paths carry a strictly increasing parameter per point that plays
/// the role of evolution time.
class FiberPath {
 public:
  static FiberPath helix(const HelixParams& params);
  static FiberPath sampled(std::vector<double> parameters, std::vector<Vec3> points);

  PathKind kind() const { return kind_; }
  const HelixParams& helix_params() const;
  const std::vector<double>& parameters() const { return parameters_; }
  const std::vector<Vec3>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  FiberPath() = default;

  PathKind kind_ = PathKind::sampled;
  HelixParams helix_{};
  std::vector<double> parameters_;
  std::vector<Vec3> points_;
};

FiberPath make_helix(double radius, double pitch_per_turn, double turns, int samples);

/// Helix of unit tangent speed with the given tilt from its axis. A zero tilt
/// degenerates to a straight sampled segment along z.
FiberPath make_tilted_helix(double tilt, double turns, int samples);

/// Sampled path from CSV with columns t,x,y,z (a header row is optional).
FiberPath read_path_csv(const std::filesystem::path& file);
FiberPath read_path_csv(std::istream& in);

enum class TangentMethod {
  automatic,          ///< analytic for helices, finite differences otherwise
  finite_difference,  ///< always differentiate the sampled points
};

/// Time-sampled unit tangent k_hat(t) and its rate. The physical wave vector
/// is k_scale * k_hat; every phase quantity is homogeneous of degree zero in it.
struct TangentTrajectory {
  std::vector<double> times;
  std::vector<Vec3> tangents;
  std::vector<Vec3> derivatives;
  double k_scale = 1.0;

  std::size_t size() const { return times.size(); }
  Vec3 wave_vector(std::size_t i) const { return k_scale * tangents[i]; }
  Vec3 wave_vector_rate(std::size_t i) const { return k_scale * derivatives[i]; }

  /// Copy with the wave-vector magnitude multiplied by `factor` (> 0).
  TangentTrajectory scaled(double factor) const;

  /// Grid index of time t; throws ValidationError when t is not a grid node.
  std::size_t index_of(double t) const;
};

/// Trajectory from explicit unit tangents; derivatives by finite differences.
TangentTrajectory make_trajectory(std::vector<double> times, std::vector<Vec3> tangents);

/// Minimal rotation taking k0 to z (about k0 x z); pi about x when k0 = -z.
Eigen::Matrix3d frame_alignment_rotation(const Vec3& k0);

TangentTrajectory tangent_trajectory(const FiberPath& path, bool frame_align,
                                     TangentMethod method = TangentMethod::automatic);

/// Spherical angles of the tangent: k_hat = (sin l cos g, sin l sin g, cos l).
/// gamma is unwrapped and frozen where sin(lambda) < 1e-9; gamma_dot comes
/// from the tangent rate, (x y' - y x') / (x^2 + y^2), and is zero at the pole.
struct AngleTrajectory {
  std::vector<double> times;
  std::vector<double> lambda;
  std::vector<double> gamma;
  std::vector<double> gamma_dot;

  std::size_t size() const { return times.size(); }
  Vec3 direction(std::size_t i) const;
};

AngleTrajectory spherical_angles(const TangentTrajectory& traj);

/// max_t |k_dot + k x (k x k_dot) / |k|^2|; vanishes iff |k| is constant.
double motion_identity_residual(std::span<const Vec3> k, std::span<const Vec3> k_dot);
double motion_identity_residual(const TangentTrajectory& traj);

/// Solid angle of a closed tangent trace, integral of gamma_dot (1 - cos lambda).
/// Throws ValidationError with the closure gap when the trace is open.
double solid_angle(const AngleTrajectory& angles, double closure_tol = 1e-6);

void write_angles_csv(std::ostream& out, const AngleTrajectory& angles);

}  // namespace fibrephase
