#include "fibrephase/fiber_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fibrephase/errors.hpp"
#include "fibrephase/io.hpp"
#include "fibrephase/numerics.hpp"

namespace fibrephase {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kPoleSin = 1e-9;

Eigen::Matrix3d cross_matrix(const Vec3& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

std::vector<double> uniform_grid(double t_end, int samples) {
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    t[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return t;
}

void require_unit_tangents(std::span<const Vec3> tangents) {
  for (std::size_t i = 0; i < tangents.size(); ++i) {
    if (!tangents[i].allFinite() || std::abs(tangents[i].norm() - 1.0) > 1e-10) {
      throw ValidationError("tangent at sample " + std::to_string(i) + " is not a unit vector");
    }
  }
}

}  // namespace

double HelixParams::tilt() const { return std::atan2(kTwoPi * radius, pitch_per_turn); }

FiberPath FiberPath::helix(const HelixParams& params) {
  if (!(params.radius > 0.0) || !std::isfinite(params.radius)) {
    throw ValidationError("helix radius must be positive");
  }
  if (!(params.pitch_per_turn >= 0.0) || !std::isfinite(params.pitch_per_turn)) {
    throw ValidationError("helix pitch_per_turn must be non-negative");
  }
  if (!(params.turns > 0.0) || !std::isfinite(params.turns)) {
    throw ValidationError("helix turns must be positive");
  }
  if (params.samples < 64) throw ValidationError("helix needs at least 64 samples");
  FiberPath path;
  path.kind_ = PathKind::helix;
  path.helix_ = params;
  path.parameters_ = uniform_grid(params.turns, params.samples);
  path.points_.reserve(path.parameters_.size());
  for (double s : path.parameters_) {
    const double phi = kTwoPi * s;
    path.points_.emplace_back(params.radius * std::cos(phi), params.radius * std::sin(phi),
                              params.pitch_per_turn * s);
  }
  return path;
}

FiberPath FiberPath::sampled(std::vector<double> parameters, std::vector<Vec3> points) {
  if (parameters.size() != points.size()) throw ValidationError("parameter and point counts differ");
  if (points.size() < 8) throw ValidationError("sampled path needs at least 8 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(parameters[i]) || !points[i].allFinite()) {
      throw ValidationError("non-finite path sample at row " + std::to_string(i));
    }
    if (i > 0) {
      if (!(parameters[i] > parameters[i - 1])) {
        throw ValidationError("path parameter must increase strictly (row " + std::to_string(i) + ")");
      }
      if (points[i] == points[i - 1]) {
        throw ValidationError("repeated path point at row " + std::to_string(i));
      }
    }
  }
  FiberPath path;
  path.kind_ = PathKind::sampled;
  path.parameters_ = std::move(parameters);
  path.points_ = std::move(points);
  return path;
}

const HelixParams& FiberPath::helix_params() const {
  if (kind_ != PathKind::helix) throw ValidationError("path is not a helix");
  return helix_;
}

FiberPath make_helix(double radius, double pitch_per_turn, double turns, int samples) {
  return FiberPath::helix({radius, pitch_per_turn, turns, samples});
}

FiberPath make_tilted_helix(double tilt, double turns, int samples) {
  if (!(tilt >= 0.0 && tilt <= M_PI / 2.0)) throw ValidationError("helix tilt must lie in [0, pi/2]");
  if (tilt == 0.0) {
    if (!(turns > 0.0)) throw ValidationError("helix turns must be positive");
    if (samples < 64) throw ValidationError("helix needs at least 64 samples");
    auto t = uniform_grid(turns, samples);
    std::vector<Vec3> points;
    points.reserve(t.size());
    for (double s : t) points.emplace_back(0.0, 0.0, kTwoPi * s);
    return FiberPath::sampled(std::move(t), std::move(points));
  }
  const double pitch = tilt == M_PI / 2.0 ? 0.0 : kTwoPi * std::cos(tilt);
  return make_helix(std::sin(tilt), pitch, turns, samples);
}

FiberPath read_path_csv(std::istream& in) {
  std::vector<double> t;
  std::vector<Vec3> points;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> values;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (t.empty() && row == 1) continue;  // header
      throw ValidationError("path CSV row " + std::to_string(row) + " is not numeric");
    }
    if (values.size() != 4) {
      throw ValidationError("path CSV row " + std::to_string(row) + " needs 4 columns t,x,y,z");
    }
    t.push_back(values[0]);
    points.emplace_back(values[1], values[2], values[3]);
  }
  return FiberPath::sampled(std::move(t), std::move(points));
}

FiberPath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open path file " + file.string());
  return read_path_csv(in);
}

// ---------------------------------------------------------------------------

TangentTrajectory TangentTrajectory::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw ValidationError("scale factor must be positive");
  TangentTrajectory out = *this;
  out.k_scale *= factor;
  return out;
}

std::size_t TangentTrajectory::index_of(double t) const {
  if (times.empty()) throw ValidationError("empty trajectory");
  const double span = times.back() - times.front();
  const double tol = 1e-12 * std::max(1.0, std::abs(span));
  auto it = std::lower_bound(times.begin(), times.end(), t - tol);
  if (it == times.end() || std::abs(*it - t) > tol) {
    throw ValidationError("time " + io::format_double(t) + " is not on the trajectory grid");
  }
  return static_cast<std::size_t>(it - times.begin());
}

TangentTrajectory make_trajectory(std::vector<double> times, std::vector<Vec3> tangents) {
  if (times.size() != tangents.size()) throw ValidationError("time and tangent counts differ");
  require_unit_tangents(tangents);
  TangentTrajectory traj;
  traj.derivatives = numerics::derivative(times, tangents);
  traj.times = std::move(times);
  traj.tangents = std::move(tangents);
  return traj;
}

Eigen::Matrix3d frame_alignment_rotation(const Vec3& k0) {
  require_unit(k0, 1e-10, "initial tangent");
  const Vec3 z = Vec3::UnitZ();
  const double c = k0.dot(z);
  if (1.0 + c <= 1e-12) {
    return Eigen::AngleAxisd(M_PI, Vec3::UnitX()).toRotationMatrix();
  }
  const Eigen::Matrix3d vx = cross_matrix(k0.cross(z));
  return Eigen::Matrix3d::Identity() + vx + vx * vx / (1.0 + c);
}

TangentTrajectory tangent_trajectory(const FiberPath& path, bool frame_align, TangentMethod method) {
  TangentTrajectory traj;
  traj.times = path.parameters();
  const std::size_t n = path.size();
  if (path.kind() == PathKind::helix && method == TangentMethod::automatic) {
    const auto& h = path.helix_params();
    const double tilt = h.tilt();
    const double sl = std::sin(tilt);
    const double cl = std::cos(tilt);
    traj.tangents.reserve(n);
    traj.derivatives.reserve(n);
    for (double s : traj.times) {
      const double phi = kTwoPi * s;
      traj.tangents.emplace_back(-sl * std::sin(phi), sl * std::cos(phi), cl);
      traj.derivatives.emplace_back(-kTwoPi * sl * std::cos(phi), -kTwoPi * sl * std::sin(phi), 0.0);
    }
  } else {
    const auto velocity = numerics::derivative(path.parameters(), path.points());
    traj.tangents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double speed = velocity[i].norm();
      if (!(speed > 0.0)) {
        throw ValidationError("degenerate path: zero tangent at sample " + std::to_string(i));
      }
      traj.tangents.push_back(velocity[i] / speed);
    }
    traj.derivatives = numerics::derivative(traj.times, traj.tangents);
  }
  if (frame_align) {
    const Eigen::Matrix3d rot = frame_alignment_rotation(traj.tangents.front());
    for (std::size_t i = 0; i < n; ++i) {
      traj.tangents[i] = rot * traj.tangents[i];
      traj.derivatives[i] = rot * traj.derivatives[i];
    }
    traj.tangents.front() = Vec3::UnitZ();
  }
  return traj;
}

// ---------------------------------------------------------------------------

Vec3 AngleTrajectory::direction(std::size_t i) const {
  const double l = lambda[i];
  const double g = gamma[i];
  return {std::sin(l) * std::cos(g), std::sin(l) * std::sin(g), std::cos(l)};
}

AngleTrajectory spherical_angles(const TangentTrajectory& traj) {
  const std::size_t n = traj.size();
  if (n < 3) throw ValidationError("angle trajectory needs at least 3 samples");
  AngleTrajectory out;
  out.times = traj.times;
  out.lambda.resize(n);
  out.gamma.resize(n);
  std::vector<bool> at_pole(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 k = traj.wave_vector(i).normalized();
    const double rho = std::hypot(k.x(), k.y());
    out.lambda[i] = std::atan2(rho, k.z());
    const double previous = i == 0 ? 0.0 : out.gamma[i - 1];
    if (std::sin(out.lambda[i]) < kPoleSin) {
      at_pole[i] = true;
      out.gamma[i] = previous;
    } else {
      const double raw = std::atan2(k.y(), k.x());
      out.gamma[i] = i == 0 ? raw : previous + numerics::wrap_angle(raw - previous);
    }
  }
  // Leading pole samples take the first defined azimuth.
  const auto first_defined = std::find(at_pole.begin(), at_pole.end(), false);
  const auto lead = static_cast<std::size_t>(first_defined - at_pole.begin());
  const double gamma0 = lead < n ? out.gamma[lead] : 0.0;
  for (std::size_t i = 0; i < lead; ++i) out.gamma[i] = gamma0;
  for (std::size_t i = lead + 1; i < n; ++i) {
    if (at_pole[i]) out.gamma[i] = out.gamma[i - 1];
  }

  out.gamma_dot.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (at_pole[i]) continue;
    const Vec3 k = traj.wave_vector(i);
    const Vec3 k_dot = traj.wave_vector_rate(i);
    out.gamma_dot[i] = (k.x() * k_dot.y() - k.y() * k_dot.x()) / (k.x() * k.x() + k.y() * k.y());
  }
  return out;
}

double motion_identity_residual(std::span<const Vec3> k, std::span<const Vec3> k_dot) {
  if (k.size() != k_dot.size()) throw ValidationError("wave vector and rate counts differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) {
    const Vec3 residual = k_dot[i] + k[i].cross(k[i].cross(k_dot[i]) / k[i].squaredNorm());
    worst = std::max(worst, residual.norm());
  }
  return worst;
}

double motion_identity_residual(const TangentTrajectory& traj) {
  std::vector<Vec3> k(traj.size());
  std::vector<Vec3> k_dot(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    k[i] = traj.wave_vector(i);
    k_dot[i] = traj.wave_vector_rate(i);
  }
  return motion_identity_residual(k, k_dot);
}

double solid_angle(const AngleTrajectory& angles, double closure_tol) {
  const double gap = (angles.direction(angles.size() - 1) - angles.direction(0)).norm();
  if (gap >= closure_tol) {
    throw ValidationError("tangent trace is not closed: gap " + io::format_double(gap));
  }
  std::vector<double> integrand(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    integrand[i] = angles.gamma_dot[i] * (1.0 - std::cos(angles.lambda[i]));
  }
  return numerics::simpson(angles.times, integrand);
}

void write_angles_csv(std::ostream& out, const AngleTrajectory& angles) {
  out << "t,lambda,gamma,gamma_dot\n";
  for (std::size_t i = 0; i < angles.size(); ++i) {
    out << io::format_double(angles.times[i]) << ',' << io::format_double(angles.lambda[i]) << ','
        << io::format_double(angles.gamma[i]) << ',' << io::format_double(angles.gamma_dot[i]) << '\n';
  }
}

}  // namespace fibrephase
