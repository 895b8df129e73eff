#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "irl/errors.hpp"
#include "irl/sde.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using irl::RngStream;
namespace sde = irl::sde;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

sde::DiffusionSpec constant_spec(const VectorXd& f, const MatrixXd& g) {
  sde::DiffusionSpec s;
  s.dim = static_cast<int>(f.size());
  s.drift = [f](const VectorXd&) { return f; };
  s.diffusion = [g](const VectorXd&) { return g; };
  return s;
}

// State-dependent 2-D spec for the affinity property.
sde::DiffusionSpec nonlinear_spec() {
  sde::DiffusionSpec s;
  s.dim = 2;
  s.drift = [](const VectorXd& y) { return vec({std::sin(y[0]), y[0] * y[1]}); };
  s.diffusion = [](const VectorXd& y) {
    MatrixXd g = MatrixXd::Zero(2, 2);
    g(0, 0) = 1.0 + y[0] * y[0];
    g(1, 1) = std::exp(-y[1]);
    return g;
  };
  return s;
}

}  // namespace

TEST_CASE("brownian increments have variance dt") {
  RngStream rng(17);
  const int n = 100000;
  VectorXd sum = VectorXd::Zero(2), sq = VectorXd::Zero(2);
  for (int i = 0; i < n; ++i) {
    const VectorXd d = sde::brownian_increment(rng, 2, 0.05);
    sum += d;
    sq += d.cwiseProduct(d);
  }
  for (int c = 0; c < 2; ++c) {
    const double mean = sum[c] / n;
    const double var = sq[c] / n - mean * mean;
    CHECK(var >= 0.048);
    CHECK(var <= 0.052);
    CHECK(std::abs(mean) < 4.0 * std::sqrt(0.05 / n));
  }
}

TEST_CASE("brownian increment length, determinism and errors") {
  RngStream a(3), b(3);
  const VectorXd x = sde::brownian_increment(a, 3, 0.1);
  CHECK(x.size() == 3);
  CHECK(x == sde::brownian_increment(b, 3, 0.1));
  CHECK_THROWS_AS(sde::brownian_increment(a, 3, 0.0), irl::DomainError);
  CHECK_THROWS_AS(sde::brownian_increment(a, 3, -0.1), irl::DomainError);
}

TEST_CASE("euler step with zero coefficients leaves the state unchanged") {
  const auto spec = constant_spec(VectorXd::Zero(2), MatrixXd::Zero(2, 2));
  const VectorXd y = vec({0.3, -1.2});
  CHECK(sde::euler_step(spec, y, 0.05, vec({0.7, 0.1})) == y);
}

TEST_CASE("euler step with constant drift moves by c dt") {
  const auto spec = constant_spec(vec({2.0, -4.0}), MatrixXd::Zero(2, 2));
  const VectorXd y = vec({1.0, 1.0});
  const VectorXd next = sde::euler_step(spec, y, 0.05, vec({0.3, 0.3}));
  CHECK(next[0] == doctest::Approx(1.1).epsilon(1e-15));
  CHECK(next[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("euler step rejects shape mismatch and non-finite states") {
  const auto spec = constant_spec(vec({1.0}), MatrixXd::Identity(1, 1));
  CHECK_THROWS_AS(sde::euler_step(spec, vec({1.0, 2.0}), 0.1, vec({0.0})), irl::ShapeError);
  CHECK_THROWS_AS(sde::euler_step(spec, vec({1.0}), 0.1, vec({0.0, 1.0})), irl::ShapeError);
  const auto blowup = constant_spec(vec({INFINITY}), MatrixXd::Identity(1, 1));
  CHECK_THROWS_AS(sde::euler_step(blowup, vec({1.0}), 0.1, vec({0.0})), irl::NonFiniteError);
}

TEST_CASE("euler step is affine in the increment") {
  const auto spec = nonlinear_spec();
  RngStream rng(5);
  for (int k = 0; k < 50; ++k) {
    const VectorXd y = rng.normal_vector(2);
    const VectorXd d1 = rng.normal_vector(2), d2 = rng.normal_vector(2);
    const double alpha = rng.uniform(-2.0, 2.0);
    const VectorXd lhs = sde::euler_step(spec, y, 0.05, alpha * d1 + (1 - alpha) * d2);
    const VectorXd rhs = alpha * sde::euler_step(spec, y, 0.05, d1) +
                         (1 - alpha) * sde::euler_step(spec, y, 0.05, d2);
    CHECK((lhs - rhs).norm() < 1e-12);
  }
}

TEST_CASE("generator examples") {
  CHECK(sde::apply_generator(vec({1.0, 2.0}), MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                             MatrixXd::Zero(2, 2)) == 0.0);
  CHECK(sde::apply_generator(vec({1.0, 2.0}), MatrixXd::Identity(2, 2), vec({3.0, 4.0}),
                             MatrixXd::Zero(2, 2)) == 11.0);
  // x^2 under dx = b dt + sigma dB: 2 b x + sigma^2
  const double x = 0.7, b = -0.3, s = 0.5;
  const double v = sde::apply_generator(vec({b}), MatrixXd::Constant(1, 1, s * s),
                                        vec({2 * x}), MatrixXd::Constant(1, 1, 2.0));
  CHECK(v == doctest::Approx(2 * b * x + s * s).epsilon(1e-15));
  CHECK(v == doctest::Approx(-0.17).epsilon(1e-14));
  CHECK_THROWS_AS(sde::apply_generator(vec({1.0}), MatrixXd::Identity(2, 2), vec({1.0}),
                                       MatrixXd::Identity(1, 1)),
                  irl::ShapeError);
}

TEST_CASE("generator linearity") {
  RngStream rng(9);
  for (int k = 0; k < 30; ++k) {
    const int n = 1 + static_cast<int>(rng.uniform_index(4));
    const VectorXd f1 = rng.normal_vector(n), f2 = rng.normal_vector(n);
    const VectorXd g1 = rng.normal_vector(n), g2 = rng.normal_vector(n);
    MatrixXd a = MatrixXd::Random(n, n), h1 = MatrixXd::Random(n, n), h2 = MatrixXd::Random(n, n);
    const MatrixXd ggt = a * a.transpose();
    h1 = (h1 + h1.transpose()).eval();
    h2 = (h2 + h2.transpose()).eval();
    const double c = rng.normal();
    const double joint = sde::apply_generator(f1, ggt, g1 + c * g2, h1 + c * h2);
    CHECK(joint == doctest::Approx(sde::apply_generator(f1, ggt, g1, h1) +
                                   c * sde::apply_generator(f1, ggt, g2, h2)));
    const double in_f = sde::apply_generator(f1 + c * f2, MatrixXd::Zero(n, n), g1, h1);
    CHECK(in_f == doctest::Approx(sde::apply_generator(f1, MatrixXd::Zero(n, n), g1, h1) +
                                  c * sde::apply_generator(f2, MatrixXd::Zero(n, n), g1, h1)));
    const double in_ggt = sde::apply_generator(VectorXd::Zero(n), (1 + c * c) * ggt, g1, h1);
    CHECK(in_ggt ==
          doctest::Approx((1 + c * c) * sde::apply_generator(VectorXd::Zero(n), ggt, g1, h1)));
  }
}

TEST_CASE("L operator examples") {
  const VectorXd z = VectorXd::Zero(1);
  const MatrixXd zz = MatrixXd::Zero(1, 1);
  CHECK(sde::apply_L(0.6, 1.0, z, zz, z, zz) == doctest::Approx(std::log(0.6)).epsilon(1e-15));
  CHECK(sde::apply_L(0.6, 1.0, z, zz, z, zz) == doctest::Approx(-0.5108).epsilon(1e-4));
  CHECK(sde::apply_L(0.3, 0.0, z, zz, z, zz) == 0.0);
  const double v = sde::apply_L(0.6, 2.0, vec({-0.3}), MatrixXd::Constant(1, 1, 0.25),
                                vec({1.4}), MatrixXd::Constant(1, 1, 2.0));
  CHECK(v == doctest::Approx(2 * std::log(0.6) - 0.17).epsilon(1e-14));
  CHECK_THROWS_AS(sde::apply_L(0.0, 1.0, z, zz, z, zz), irl::DomainError);
  CHECK_THROWS_AS(sde::apply_L(1.0, 1.0, z, zz, z, zz), irl::DomainError);
}

TEST_CASE("single-step path equals one euler step") {
  const auto spec = nonlinear_spec();
  RngStream a(41), b(41);
  const VectorXd y0 = vec({0.2, -0.4});
  const auto path = sde::simulate_path(spec, y0, 0.05, 1, a);
  REQUIRE(path.size() == 2);
  CHECK(path[0] == y0);
  CHECK(path[1] == sde::euler_step(spec, y0, 0.05, sde::brownian_increment(b, 2, 0.05)));
}

TEST_CASE("zero coefficients give a constant path; identical seeds give identical paths") {
  const auto flat = constant_spec(VectorXd::Zero(1), MatrixXd::Zero(1, 1));
  RngStream rng(2);
  for (const auto& y : sde::simulate_path(flat, vec({3.0}), 0.1, 20, rng)) CHECK(y[0] == 3.0);
  RngStream a(8), b(8);
  const auto spec = nonlinear_spec();
  CHECK(sde::simulate_path(spec, vec({0.1, 0.1}), 0.01, 50, a) ==
        sde::simulate_path(spec, vec({0.1, 0.1}), 0.01, 50, b));
  CHECK_THROWS_AS(sde::simulate_path(spec, vec({0.1, 0.1}), 0.01, 0, a), irl::DomainError);
}

TEST_CASE("OU paths reproduce the analytic mean and variance") {
  const double theta = 1.0, sigma = 0.5, x0 = 1.0, dt = 0.01;
  const int steps = 100, paths = 10000;
  const auto spec = sde::ornstein_uhlenbeck(theta, 0.0, sigma);
  RngStream root(123);
  double sum = 0.0, sq = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream rng = root.split(static_cast<std::uint64_t>(p));
    const double x = sde::simulate_path(spec, vec({x0}), dt, steps, rng).back()[0];
    sum += x;
    sq += x * x;
  }
  const double mean = sum / paths;
  const double var = (sq - paths * mean * mean) / (paths - 1);
  const double t = steps * dt;
  const double true_mean = x0 * std::exp(-theta * t);
  const double true_var = sigma * sigma * (1 - std::exp(-2 * theta * t)) / (2 * theta);
  CHECK(std::abs(mean - true_mean) < 3.0 * std::sqrt(true_var / paths));
  // SE of a Gaussian sample variance is var * sqrt(2 / (N - 1)).
  CHECK(std::abs(var - true_var) < 3.0 * true_var * std::sqrt(2.0 / (paths - 1)));
  CHECK(true_mean == doctest::Approx(0.3679).epsilon(1e-4));
}

TEST_CASE("OU mean error shrinks at first order in dt") {
  const double theta = 1.0, sigma = 0.5, x0 = 1.0, t = 1.0;
  const auto spec = sde::ornstein_uhlenbeck(theta, 0.0, sigma);
  std::vector<double> log_dt, log_err;
  for (double dt : {0.04, 0.02, 0.01, 0.005}) {
    const int steps = static_cast<int>(std::lround(t / dt));
    RngStream root(555);
    const int pairs = 2000;
    double sum = 0.0;
    for (int p = 0; p < pairs; ++p) {
      RngStream rng = root.split(static_cast<std::uint64_t>(p));
      VectorXd a = vec({x0}), b = vec({x0});
      for (int k = 0; k < steps; ++k) {
        const VectorXd d = sde::brownian_increment(rng, 1, dt);
        a = sde::euler_step(spec, a, dt, d);
        b = sde::euler_step(spec, b, dt, -d);
      }
      sum += a[0] + b[0];
    }
    // Antithetic pairs cancel the noise exactly in a linear drift, leaving the bias.
    const double err = std::abs(sum / (2.0 * pairs) - x0 * std::exp(-theta * t));
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(err));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    mx += log_dt[i] / 4;
    my += log_err[i] / 4;
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    sxy += (log_dt[i] - mx) * (log_err[i] - my);
    sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
  }
  const double slope = sxy / sxx;
  CHECK(slope >= 0.7);
  CHECK(slope <= 1.3);
}
