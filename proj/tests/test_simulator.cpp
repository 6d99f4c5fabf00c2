#include "zonoid/zonoid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace zonoid;

namespace {

constexpr double pi = std::numbers::pi;

// γ·f(p) with γ ~ N(0,1): the zero set is that of f for almost every draw.
RandomFieldModel scaled(const Chart& chart, std::function<double(const Point&)> f, std::function<Eigen::VectorXd(const Point&)> df) {
  auto b = function_basis(
      1, chart.dim, "scaled", [f](const Point& p) { return Eigen::VectorXd::Constant(1, f(p)); },
      [df](const Point& p) -> Eigen::MatrixXd { return df(p).transpose(); });
  return gaussian_model(chart, std::move(b));
}

RandomFieldModel torus_sine(int axis, double shift = 0.0) {
  return scaled(
      torus_chart(2), [axis, shift](const Point& p) { return std::sin(2 * pi * (p(axis) - shift)); },
      [axis, shift](const Point& p) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(2);
        d(axis) = 2 * pi * std::cos(2 * pi * (p(axis) - shift));
        return d;
      });
}

SimulationOptions sim(std::size_t trials, std::uint64_t seed, int grid = 256) {
  SimulationOptions o;
  o.trials = trials;
  o.seed = seed;
  o.grid_n = grid;
  return o;
}

SectionOptions sec(std::size_t n, std::uint64_t seed) {
  SectionOptions o;
  o.n_samples = n;
  o.seed = seed;
  return o;
}

}  // namespace

TEST(Simulator, CosineThreeTheta) {
  const auto model = scaled(
      circle().chart, [](const Point& p) { return std::cos(3 * p(0)); },
      [](const Point& p) { return Eigen::VectorXd::Constant(1, -3 * std::sin(3 * p(0))); });
  const auto r = count_zeros_1d(model, sim(50, 1));
  EXPECT_EQ(r.mean, 6.0);
  EXPECT_EQ(r.variance, 0.0);
  EXPECT_TRUE(r.valid);
}

TEST(Simulator, LinearCircle) {
  auto o = sim(200, 2);
  const auto r = count_zeros_1d(normal_field(1), o);
  EXPECT_EQ(r.mean, 2.0);
  EXPECT_EQ(r.per_trial.size(), 200u);
  o.mode = CountMode::signed_count;
  const auto s = count_zeros_1d(normal_field(1), o);
  EXPECT_EQ(s.mean, 0.0);
  EXPECT_EQ(s.quantity, "signed_count");
}

TEST(Simulator, SeedDeterminism) {
  const auto model = gaussian_model(circle().chart, kostlan_basis(1, 5));
  const auto a = count_zeros_1d(model, sim(100, 3));
  const auto b = count_zeros_1d(model, sim(100, 3));
  auto o = sim(100, 3);
  o.threads = 3;
  const auto c = count_zeros_1d(model, o);
  EXPECT_EQ(a.per_trial, b.per_trial);
  EXPECT_EQ(a.per_trial, c.per_trial);
}

TEST(Simulator, TorusSineGrid) {
  const auto r = count_zeros_2d({torus_sine(0), torus_sine(1)}, sim(30, 4, 64));
  EXPECT_EQ(r.mean, 4.0);
  EXPECT_EQ(r.variance, 0.0);
}

TEST(Simulator, GreatCircles) {
  auto o = sim(200, 5, 64);
  o.stream = 1;
  const auto r = count_zeros_2d({normal_field(2), normal_field(2)}, o);
  EXPECT_NEAR(r.mean, 2.0, 3.0 * r.standard_error + 0.02);
  EXPECT_TRUE(r.valid);
}

TEST(Simulator, SharedCoefficientsAreFlagged) {
  auto o = sim(40, 6, 32);
  o.shared_coefficients = true;
  const auto r = count_zeros_2d({normal_field(2), normal_field(2)}, o);
  EXPECT_FALSE(r.valid);
  EXPECT_GT(r.warnings, 0u);
}

TEST(Simulator, ComponentDimensionChecked) {
  EXPECT_THROW(count_zeros_2d({normal_field(2)}, sim(1, 0)), std::invalid_argument);
  EXPECT_THROW(count_zeros_2d({normal_field(1), normal_field(1)}, sim(1, 0)), std::invalid_argument);
}

TEST(Simulator, LinesOnTorus) {
  const auto r = measure_zero_length_2d(torus_sine(0, 0.1234), sim(10, 7, 512));
  EXPECT_NEAR(r.mean, 2.0, 0.005 * 2.0);
}

TEST(Simulator, GreatCircleLength) {
  const auto r = measure_zero_length_2d(normal_field(2), sim(20, 8, 192));
  EXPECT_NEAR(r.mean, 2 * pi, 0.01 * 2 * pi);
  auto o = sim(1, 8);
  o.mode = CountMode::signed_count;
  EXPECT_THROW(measure_zero_length_2d(normal_field(2), o), std::invalid_argument);
}

TEST(Simulator, CurveRestriction) {
  const auto r = count_zeros_1d(normal_field(2), equator_arc(0.0, 2 * pi), sim(100, 9));
  EXPECT_EQ(r.mean, 2.0);
}

TEST(Simulator, WeightedCountMatchesAlpha) {
  // α = cos²θ on the zeros θ₀, θ₀+π of a linear form: E = ∫ cos²θ dθ / π = 1.
  const auto weight = [](const Point& p, const MultiVector&) { return std::pow(std::cos(p(0)), 2); };
  auto o = sim(4000, 10);
  o.mode = CountMode::weighted;
  o.weight = weight;
  const auto mc = count_zeros_1d(normal_field(1), o);
  EXPECT_NEAR(mc.mean, 1.0, 3.0 * mc.standard_error);
  const auto s = estimate_section(normal_field(1), circle(32).rule, sec(3000, 11));
  const Estimate pred = alpha_expectation(s, TangentFunctional{weight});
  EXPECT_NEAR(pred.value, 1.0, 3.0 * pred.standard_error);
}

TEST(Simulator, WeightedLengthMatchesAlpha) {
  // α(p, ν) = ν₀², ν the unit conormal of the zero great circle in the orthonormal (θ, φ) frame.
  const auto weight = [](const Point&, const MultiVector& nu) { return nu[0] * nu[0]; };
  auto o = sim(400, 12, 128);
  o.mode = CountMode::weighted;
  o.weight = weight;
  const auto mc = measure_zero_length_2d(normal_field(2), o);
  const auto s = estimate_section(normal_field(2), sphere2(16, 32).rule, sec(2000, 16));
  const Estimate pred = alpha_expectation(s, TangentFunctional{weight});
  // The conormal of a random great circle is uniform in each tangent plane, so E[ν₀²] = ½ and the total is π.
  EXPECT_NEAR(pred.value, pi, 3.0 * pred.standard_error + 1e-3);
  EXPECT_NEAR(mc.mean, pred.value, 3.0 * std::hypot(mc.standard_error, pred.standard_error) + 0.01 * pred.value);
}

TEST(Simulator, StudentTKeepsTheZeroSet) {
  // A multivariate t field is a Gaussian field times an independent positive scalar, so the
  // expected count equals the Gaussian one, 2√d for the Kostlan field of degree d on S¹.
  const auto chart = circle().chart;
  const RandomFieldModel model(chart, kostlan_basis(1, 2), StudentTLaw{5.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)});
  const auto s = estimate_section(model, circle(32).rule, sec(4000, 13));
  const Estimate pred = kac_rice_volume(s);
  EXPECT_TRUE(std::isfinite(pred.value));
  EXPECT_NEAR(pred.value, 2 * std::sqrt(2.0), 3.0 * pred.standard_error + 0.01);
  const auto mc = count_zeros_1d(model, sim(2000, 14));
  EXPECT_NEAR(mc.mean, 2 * std::sqrt(2.0), 3.0 * mc.standard_error);
}

TEST(Simulator, ReportExport) {
  const auto r = count_zeros_1d(normal_field(1), sim(5, 15));
  const auto j = to_json(r, true);
  EXPECT_EQ(j["per_trial"].size(), 5u);
  EXPECT_EQ(j["quantity"], "count");
  std::ostringstream os;
  write_csv(os, r);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "quantity,trials,mean,variance,standard_error,warnings,valid");
}
