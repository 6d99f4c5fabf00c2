#include "zonoid/zonoid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace zonoid;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

// X(u) = u²γ₁ + γ₂ on [−1, 1].
RandomFieldModel parabola_model() {
  FieldBasis b;
  b.name = "parabola";
  b.n = 2;
  b.evaluate = [](const Point& p) {
    Jet j;
    j.values.resize(1, 2);
    j.differentials.resize(1, 2);
    j.values << p(0) * p(0), 1.0;
    j.differentials << 2.0 * p(0), 0.0;
    return j;
  };
  return gaussian_model(interval_chart(-1.0, 1.0), b);
}

}  // namespace

// ---- manifold ----

TEST(Manifold, QuadratureTotals) {
  EXPECT_NEAR(circle(128).rule.total(), 2.0 * std::numbers::pi, 1e-13);
  EXPECT_NEAR(sphere2(32, 64).rule.total(), 4.0 * std::numbers::pi, 1e-10);
  EXPECT_NEAR(sphere3(8, 8, 16).rule.total(), 2.0 * std::numbers::pi * std::numbers::pi, 1e-8);
  EXPECT_NEAR(torus({8, 8}).rule.total(), 1.0, 1e-14);
  const auto I = interval(0.0, 1.0, 64);
  EXPECT_NEAR(integrate(I.rule, [](const Point& p) { return p(0) * p(0); }), 1.0 / 3.0, 1e-14);
}

TEST(Manifold, Integrate) {
  EXPECT_NEAR(integrate(sphere2().rule, [](const Point&) { return 1.0; }), 4.0 * std::numbers::pi, 1e-10);
  EXPECT_NEAR(integrate(circle(128).rule, [](const Point& p) { return std::pow(std::cos(p(0)), 2); }), std::numbers::pi, 1e-12);
}

TEST(Manifold, UnknownNameThrows) { EXPECT_THROW(builtin("klein_bottle"), std::invalid_argument); }

TEST(Manifold, CoframeIsOrthonormal) {
  const Chart c = sphere_chart(3);
  const Point p = pt({0.7, 1.1, 2.0});
  const Eigen::MatrixXd F = c.coframe(p);
  EXPECT_LT((F.transpose() * c.metric(p) * F - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
  const Eigen::MatrixXd J = c.embedding_jacobian(p);
  EXPECT_LT((J.transpose() * J - c.metric(p)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Manifold, EquatorTangent) {
  const auto M = sphere2();
  const Curve eq = equator_arc(0.0, 2.0 * std::numbers::pi);
  EXPECT_TRUE(eq.closed());
  const auto f = curve_pullback_frame(M.chart, eq, 0.0);
  EXPECT_NEAR(f.speed, 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(f.unit_tangent(0), 0.0, 1e-15);
  EXPECT_NEAR(f.unit_tangent(1), 1.0, 1e-15);
  // The embedded velocity is horizontal: orthogonal to the position and to the polar axis.
  const Eigen::VectorXd x = M.chart.embedding(f.point);
  const Eigen::VectorXd east = M.chart.embedding_jacobian(f.point) * eq.velocity(0.0);
  EXPECT_NEAR(east.norm(), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(east.dot(x), 0.0, 1e-12);
}

TEST(Manifold, SegmentAndReparameterization) {
  const Chart T = torus_chart(2);
  const Curve s = Curve::segment(pt({0.1, 0.2}), pt({0.4, 0.6}));
  const auto a = curve_pullback_frame(T, s, 0.1), b = curve_pullback_frame(T, s, 0.9);
  EXPECT_LT((a.tangent - b.tangent).norm(), 1e-15);
  const Curve r = s.reparameterized([](double t) { return t * t; }, [](double t) { return 2.0 * t; });
  const auto c = curve_pullback_frame(T, r, 0.5);
  const auto d = curve_pullback_frame(T, s, 0.25);
  EXPECT_NEAR(c.speed, 1.0 * d.speed, 1e-14);  // ds(½) = 1
  EXPECT_LT((c.unit_tangent - d.unit_tangent).norm(), 1e-14);
  EXPECT_LT((r(0.5) - s(0.25)).norm(), 1e-15);
  const Curve still = Curve::segment(pt({0.3, 0.3}), pt({0.3, 0.3}));
  EXPECT_THROW(curve_pullback_frame(T, still, 0.5), std::invalid_argument);
}

TEST(Manifold, PiecewiseCubicMatchesPolynomial) {
  // One segment x(τ) = τ², y(τ) = 1 − τ³.
  const Curve c = Curve::piecewise_cubic({{{0.0, 0.0, 1.0, 0.0}, {1.0, 0.0, 0.0, -1.0}}});
  EXPECT_NEAR(c(0.5)(0), 0.25, 1e-15);
  EXPECT_NEAR(c(0.5)(1), 0.875, 1e-15);
  EXPECT_NEAR(c.velocity(0.5)(0), 1.0, 1e-15);
  EXPECT_NEAR(c.velocity(0.5)(1), -0.75, 1e-15);
}

// ---- random fields ----

TEST(Fields, CircleTrigJet) {
  const auto j = fourier_basis({0.0, 1.0}).evaluate(pt({0.0}));
  EXPECT_NEAR(j.values(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(j.values(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(j.differentials(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(j.differentials(0, 1), 1.0, 1e-15);
  const auto c = fourier_basis({1.0}).evaluate(pt({1.3}));
  EXPECT_EQ(c.values(0, 0), 1.0);
  EXPECT_EQ(c.differentials(0, 0), 0.0);
}

TEST(Fields, KostlanDegreeTwoJet) {
  // weights √(2!/α!) on (x², xy, y²): values (1, 0, 0), derivatives (0, √2, 0) at θ = 0.
  const auto j = kostlan_basis(1, 2).evaluate(pt({0.0}));
  ASSERT_EQ(j.values.cols(), 3);
  EXPECT_NEAR(j.values(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(j.values(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(j.values(0, 2), 0.0, 1e-15);
  EXPECT_NEAR(j.differentials(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(j.differentials(0, 1), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(j.differentials(0, 2), 0.0, 1e-15);
}

TEST(Fields, JetsMatchFiniteDifferences) {
  RandomStream rng(4, 0);
  auto check = [&](const RandomFieldModel& model, const Point& p) {
    const double h = 1e-6;
    const Jet j = model.jet(p);
    const int k = model.k(), m = model.m();
    for (int c = 0; c < m; ++c) {
      Point a = p, b = p;
      a(c) += h;
      b(c) -= h;
      const Eigen::MatrixXd fd = (model.basis().evaluate(a).values - model.basis().evaluate(b).values) / (2.0 * h);
      for (int i = 0; i < k; ++i)
        for (Eigen::Index t = 0; t < fd.cols(); ++t) EXPECT_NEAR(j.differentials(i * m + c, t), fd(i, t), 1e-7);
    }
  };
  check(gaussian_model(sphere_chart(2), kostlan_basis(2, 3)), pt({1.0, 2.0}));
  check(gaussian_model(sphere_chart(3), kostlan_basis(3, 2)), pt({0.6, 2.1, 4.0}));
  check(gaussian_model(sphere_chart(2), spherical_harmonics_basis({0.0, 1.0, 1.0, 0.5})), pt({0.9, 0.4}));
  check(gaussian_model(torus_chart(2), trig_torus_basis(2, 3, 0.0)), pt({0.3, 0.8}));
  check(gaussian_model(circle().chart, fourier_basis({1.0, 0.5, 0.25})), pt({2.5}));
}

TEST(Fields, SphericalHarmonicsAreInvariant) {
  // An isotropic field has a covariance that depends only on the angular distance.
  const auto model = gaussian_model(sphere_chart(2), spherical_harmonics_basis({1.0, 1.0, 1.0}));
  const auto var = [&](const Point& p) { return model.jet(p).values.squaredNorm(); };
  EXPECT_NEAR(var(pt({0.3, 1.0})), var(pt({2.2, 5.0})), 1e-12);
}

TEST(Fields, NormalFieldMetric) {
  const auto model = normal_field(2);
  for (const Point& p : {pt({0.5 * std::numbers::pi, 0.0}), pt({0.4, 1.0}), pt({2.5, 4.0})}) {
    const Jet j = model.jet(p);
    const Eigen::MatrixXd G = j.differentials * j.differentials.transpose();
    EXPECT_LT((G - model.chart().metric(p)).cwiseAbs().maxCoeff(), 1e-12);
    const Eigen::MatrixXd F = model.chart().coframe(p);
    EXPECT_LT((F.transpose() * G * F - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Fields, LinearCircleConditioning) {
  const auto model = normal_field(1);
  for (double th : {0.0, 0.7, 2.0, 4.4}) {
    const auto cj = condition_at_zero(model, pt({th}));
    EXPECT_NEAR(cj.density_at_zero(), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(cj.mean()(0), 0.0, 1e-14);
    EXPECT_NEAR(cj.covariance()(0, 0), 1.0, 1e-14);
  }
}

TEST(Fields, ParabolaConditionalDerivativeVanishes) {
  const auto cj = condition_at_zero(parabola_model(), pt({0.0}));
  EXPECT_TRUE(cj.deterministic());
  EXPECT_EQ(cj.mean()(0), 0.0);
}

TEST(Fields, IndependentValueAndGradient) {
  // Value and gradient carried by disjoint coefficients: conditioning leaves the gradient law unchanged.
  FieldBasis b;
  b.name = "split";
  b.n = 3;
  b.evaluate = [](const Point& p) {
    Jet j;
    j.values.resize(1, 3);
    j.differentials.resize(1, 3);
    j.values << 1.0, 0.0, 0.0;
    j.differentials << 0.0, 2.0, p(0);
    return j;
  };
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(3, 3);
  S(1, 2) = S(2, 1) = 0.3;
  RandomFieldModel model(interval_chart(0.0, 1.0), b, GaussianLaw{Eigen::VectorXd::Zero(3), S});
  const Point p = pt({0.5});
  const auto cj = condition_at_zero(model, p);
  const Eigen::MatrixXd B = model.jet(p).differentials;
  EXPECT_NEAR(cj.covariance()(0, 0), (B * S * B.transpose())(0, 0), 1e-14);
}

TEST(Fields, DegenerateCovarianceNamesThePoint) {
  FieldBasis b = function_basis(
      1, 1, "sin", [](const Point& p) { return Eigen::VectorXd::Constant(1, std::sin(p(0))); },
      [](const Point& p) { return Eigen::MatrixXd::Constant(1, 1, std::cos(p(0))); });
  const auto model = gaussian_model(circle().chart, b);
  try {
    condition_at_zero(model, pt({0.0}));
    FAIL() << "expected a degenerate-covariance error";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("p=(0.000000)"), std::string::npos) << e.what();
  }
}

TEST(Fields, ImportancePathAgreesWithExactConditioning) {
  const auto model = gaussian_model(circle().chart, kostlan_basis(1, 3));
  const Point p = pt({0.8});
  const auto exact = condition_at_zero(model, p);
  RandomStream rng(33, 0);
  const auto is = condition_at_zero_mc(model, p, 20000, rng);
  EXPECT_NEAR(is.density_at_zero, exact.density_at_zero(), 3.0 * is.density_standard_error + 1e-12);
  // E|X′| ρ(0): exact value for a Gaussian conditional law N(μ, σ²) with μ = 0.
  const double sigma = std::sqrt(exact.covariance()(0, 0));
  const double target = exact.density_at_zero() * sigma * std::sqrt(2.0 / std::numbers::pi);
  double est = 0.0, est2 = 0.0;
  for (Eigen::Index i = 0; i < is.weights.size(); ++i) {
    const double y = is.weights(i) * std::abs(is.gradients(i, 0)) * static_cast<double>(is.weights.size());
    est += y;
    est2 += y * y;
  }
  const double n = static_cast<double>(is.weights.size());
  est /= n;
  const double se = std::sqrt((est2 / n - est * est) / n);
  EXPECT_NEAR(est, target, 3.0 * se + 1e-12);
  EXPECT_FALSE(is.low_ess);
}

TEST(Fields, ImportanceRejectsZeroSamples) {
  RandomStream rng(1, 0);
  EXPECT_THROW(condition_at_zero_mc(normal_field(1), pt({0.0}), 0, rng), std::invalid_argument);
}

TEST(Fields, StudentTDensityFinite) {
  const auto chart = circle().chart;
  const auto basis = kostlan_basis(1, 2);
  RandomFieldModel model(chart, basis, StudentTLaw{5.0, Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)});
  EXPECT_THROW(condition_at_zero(model, pt({0.0})), std::invalid_argument);
  RandomStream rng(8, 0);
  for (double th : {0.0, 1.0, 3.0}) {
    const auto is = condition_at_zero_mc(model, pt({th}), 4000, rng);
    EXPECT_TRUE(std::isfinite(is.density_at_zero));
    EXPECT_GT(is.density_at_zero, 0.0);
  }
}

TEST(Fields, SeededSamplingIsDeterministic) {
  const auto model = gaussian_model(torus_chart(2), trig_torus_basis(2, 2, 0.0));
  const Eigen::VectorXd a = sample_field(model, 123, 4), b = sample_field(model, 123, 4), c = sample_field(model, 123, 5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Fields, SampleCovarianceIsIdentity) {
  const auto model = gaussian_model(circle().chart, kostlan_basis(1, 2));
  RandomStream rng(2, 9);
  const int n = 100000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd c = model.sample(rng);
    acc += c * c.transpose();
  }
  acc /= n;
  EXPECT_LT((acc - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Fields, LawValidation) {
  const auto chart = circle().chart;
  EXPECT_THROW(RandomFieldModel(chart, kostlan_basis(1, 2), standard_gaussian(2)), std::invalid_argument);
  EXPECT_THROW(RandomFieldModel(chart, kostlan_basis(2, 2), standard_gaussian(6)), std::invalid_argument);
  EXPECT_THROW(RandomFieldModel(chart, kostlan_basis(1, 1), StudentTLaw{1.0, {}, Eigen::MatrixXd::Identity(2, 2)}),
               std::invalid_argument);
}

TEST(Fields, LevelSetConditioningIsExact) {
  const auto chart = circle().chart;
  const auto model = level_set_model(
      chart, [](const Point& p) { return std::cos(p(0)); }, [](const Point& p) { return Eigen::VectorXd::Constant(1, -std::sin(p(0))); });
  for (double th : {0.3, 1.9, 4.0}) {
    const auto cj = condition_at_zero(model, pt({th}));
    EXPECT_TRUE(cj.deterministic());
    EXPECT_NEAR(cj.density_at_zero(), std::exp(-0.5 * std::pow(std::cos(th), 2)) / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(cj.mean()(0), -std::sin(th), 1e-15);
  }
}

TEST(Fields, PullbackRestrictsTheJet) {
  const auto model = normal_field(2);
  const Curve eq = equator_arc(0.0, 2.0 * std::numbers::pi);
  const auto pb = pullback_model(model, eq.embedding());
  const Jet j = pb.jet(pt({0.25}));
  const Jet full = model.jet(eq(0.25));
  EXPECT_LT((j.values - full.values).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd expect = eq.velocity(0.25).transpose() * full.differentials;
  EXPECT_LT((j.differentials - expect).cwiseAbs().maxCoeff(), 1e-14);
}
