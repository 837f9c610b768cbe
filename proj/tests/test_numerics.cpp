#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fibrephase/errors.hpp"
#include "fibrephase/io.hpp"
#include "fibrephase/numerics.hpp"

using namespace fibrephase;

namespace {

std::vector<double> uniform_grid(double a, double b, int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return t;
}

std::vector<double> jittered_grid(double a, double b, int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  auto t = uniform_grid(a, b, n);
  const double h = (b - a) / (n - 1);
  for (int i = 1; i + 1 < n; ++i) t[static_cast<std::size_t>(i)] += u(rng) * h;
  return t;
}

template <class F>
std::vector<double> sample(const std::vector<double>& t, F f) {
  std::vector<double> out;
  for (double x : t) out.push_back(f(x));
  return out;
}

}  // namespace

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(numerics::wrap_angle(0.0) == 0.0);
  CHECK(numerics::wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(numerics::wrap_angle(-M_PI) == doctest::Approx(M_PI));
  CHECK(numerics::wrap_angle(3.0 * M_PI / 2.0) == doctest::Approx(-M_PI / 2.0));
  CHECK(numerics::wrap_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * M_PI));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double a = u(rng);
    const double w = numerics::wrap_angle(a);
    CHECK(w > -M_PI);
    CHECK(w <= M_PI);
    const double turns = (a - w) / (2.0 * M_PI);
    CHECK(std::abs(turns - std::round(turns)) < 1e-12);
  }
}

TEST_CASE("derivative is exact for quadratics on nonuniform grids") {
  const auto t = jittered_grid(0.0, 2.0, 17, 11);
  const auto f = sample(t, [](double x) { return 3.0 * x * x - 2.0 * x + 1.0; });
  const auto d = numerics::derivative(t, f);
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(d[i] == doctest::Approx(6.0 * t[i] - 2.0).epsilon(1e-11));
}

TEST_CASE("derivative converges at second order") {
  double previous = 0.0;
  for (int n : {33, 65, 129, 257}) {
    const auto t = uniform_grid(0.0, 1.0, n);
    const auto f = sample(t, [](double x) { return std::sin(3.0 * x); });
    const auto d = numerics::derivative(t, f);
    double err = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) err = std::max(err, std::abs(d[i] - 3.0 * std::cos(3.0 * t[i])));
    if (previous > 0.0) CHECK(previous / err > 3.5);
    previous = err;
  }
}

TEST_CASE("derivative of vectors matches componentwise") {
  const auto t = uniform_grid(0.0, 1.0, 9);
  std::vector<Eigen::Vector3d> v;
  for (double x : t) v.emplace_back(x, x * x, 1.0);
  const auto d = numerics::derivative(t, v);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK((d[i] - Eigen::Vector3d(1.0, 2.0 * t[i], 0.0)).norm() < 1e-12);
  }
}

TEST_CASE("derivative rejects bad grids") {
  const std::vector<double> two{0.0, 1.0};
  CHECK_THROWS_AS(numerics::derivative(two, two), ValidationError);
  const std::vector<double> t{0.0, 1.0, 1.0};
  const std::vector<double> f{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(numerics::derivative(t, f), ValidationError);
  const std::vector<double> shorter{0.0, 1.0};
  const std::vector<double> grid{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(numerics::derivative(grid, shorter), ValidationError);
}

TEST_CASE("cumulative Simpson is exact for cubics at even nodes of a uniform grid") {
  for (int n : {3, 9, 21}) {
    const auto t = uniform_grid(-1.0, 2.0, n);
    const auto f = sample(t, [](double x) { return x * x * x - x + 0.5; });
    const auto c = numerics::cumulative_simpson(t, f);
    const auto antiderivative = [](double x) { return x * x * x * x / 4.0 - x * x / 2.0 + 0.5 * x; };
    CHECK(c.front() == 0.0);
    for (std::size_t i = 0; i < t.size(); i += 2) {
      CHECK(c[i] == doctest::Approx(antiderivative(t[i]) - antiderivative(t[0])).epsilon(1e-12));
    }
  }
}

TEST_CASE("cumulative Simpson is exact for quadratics at every node") {
  const auto t = jittered_grid(0.0, 1.0, 12, 5);
  const auto f = sample(t, [](double x) { return 1.0 + 2.0 * x + 3.0 * x * x; });
  const auto c = numerics::cumulative_simpson(t, f);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(c[i] == doctest::Approx(t[i] + t[i] * t[i] + t[i] * t[i] * t[i]).epsilon(1e-12));
  }
  CHECK(numerics::simpson(t, f) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("Simpson converges at fourth order") {
  double previous = 0.0;
  for (int n : {17, 33, 65, 129}) {
    const auto t = uniform_grid(0.0, M_PI, n);
    const auto f = sample(t, [](double x) { return std::sin(x); });
    const double err = std::abs(numerics::simpson(t, f) - 2.0);
    if (previous > 0.0) CHECK(previous / err > 14.0);
    previous = err;
  }
}

TEST_CASE("two-point integration falls back to the trapezoid rule") {
  const std::vector<double> t{0.0, 2.0};
  const std::vector<double> f{1.0, 3.0};
  CHECK(numerics::simpson(t, f) == doctest::Approx(4.0));
}

TEST_CASE("float formatting is fixed and round-trips") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(-0.0) == "0");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(std::nan("")) == "nan");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 500; ++i) {
    const double x = u(rng);
    CHECK(std::stod(io::format_double(x)) == x);
  }
}
