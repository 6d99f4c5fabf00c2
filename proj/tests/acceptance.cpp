// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any criterion fails.
#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <algorithm>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace zonoid;
namespace ex = zonoid::experiments;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }
double combined(double a, double b) { return std::sqrt(a * a + b * b); }

SectionOptions sec(std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  SectionOptions o;
  o.n_samples = n;
  o.seed = seed;
  o.stream = stream;
  return o;
}

SimulationOptions sim(std::size_t trials, std::uint64_t seed, int grid = 256, std::uint64_t stream = 0) {
  SimulationOptions o;
  o.trials = trials;
  o.seed = seed;
  o.grid_n = grid;
  o.stream = stream;
  o.keep_trials = true;
  return o;
}

double gauss_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); }

Zonotope random_planar(RandomStream& rng, int generators) {
  Zonotope K(2, 1);
  for (int i = 0; i < generators; ++i) K.add_generator(0.5 + rng.uniform(), MultiVector::vector({rng.normal(), rng.normal()}));
  return K;
}

// Area of a centered planar zonotope by rejection sampling in its bounding box.
double rejection_area(const Zonotope& K, std::size_t n, RandomStream& rng) {
  const double hx = K.support(MultiVector::vector({1.0, 0.0})), hy = K.support(MultiVector::vector({0.0, 1.0}));
  std::vector<std::array<double, 3>> facets;  // unit normal and support value
  for (std::size_t i = 0; i < K.size(); ++i) {
    const auto g = K.generator(i);
    const double len = std::hypot(g[0], g[1]);
    if (len == 0.0) continue;
    const double nx = -g[1] / len, ny = g[0] / len;
    facets.push_back({nx, ny, K.support(MultiVector::vector({nx, ny}))});
  }
  std::size_t inside = 0;
  for (std::size_t s = 0; s < n; ++s) {
    const double x = (2.0 * rng.uniform() - 1.0) * hx, y = (2.0 * rng.uniform() - 1.0) * hy;
    bool in = true;
    for (const auto& f : facets)
      if (std::abs(f[0] * x + f[1] * y) > f[2]) {
        in = false;
        break;
      }
    inside += in;
  }
  return 4.0 * hx * hy * static_cast<double>(inside) / static_cast<double>(n);
}

RandomFieldModel cosine_level_set() {
  return level_set_model(
      circle().chart, [](const Point& p) { return std::cos(p(0)); },
      [](const Point& p) { return Eigen::VectorXd::Constant(1, -std::sin(p(0))); });
}

// ---------------------------------------------------------------------------------------------

void gaussian_ball(Outcome& o) {
  RandomStream rng(101, 0);
  const int n = 100000;
  Eigen::MatrixXd xs(n, 2);
  for (int i = 0; i < n; ++i) xs.row(i) << rng.normal(), rng.normal();
  const Zonotope K = from_samples(2, 1, xs, SampleMode::centered);
  const double target = 1.0 / std::sqrt(2.0 * pi);
  double worst = 0.0;
  for (int j = 0; j < 64; ++j) {
    const double a = 2.0 * pi * j / 64.0;
    worst = std::max(worst, std::abs(K.support(MultiVector::vector({std::cos(a), std::sin(a)})) / target - 1.0));
  }
  o.detail << "max relative deviation from 0.39894 over 64 directions: " << worst;
  o.require(worst <= 0.01, "deviation > 1%");
}

void gaussian_norm_constants(Outcome& o) {
  RandomStream rng(102, 0);
  const int n = 100000;
  double m2 = 0.0, m3 = 0.0;
  for (int i = 0; i < n; ++i) {
    m2 += std::hypot(rng.normal(), rng.normal());
    const Eigen::Vector3d a(rng.normal(), rng.normal(), rng.normal()), b(rng.normal(), rng.normal(), rng.normal());
    m3 += a.cross(b).norm();
  }
  m2 /= n;
  m3 /= n;
  const double f2 = gaussian_wedge_norm_mean(2, 1), f3 = gaussian_wedge_norm_mean(3, 2);
  o.detail << "E|xi| R^2: MC " << m2 << " formula " << f2 << "; E|xi1^xi2| R^3: MC " << m3 << " formula " << f3;
  o.require(within(f2, std::sqrt(pi / 2.0), 1e-12) && within(f3, 2.0, 1e-12), "formula values");
  o.require(within(m2, f2, 0.01 * f2) && within(m3, f3, 0.01 * f3), "Monte Carlo vs formula beyond 1%");
}

void zonotope_exactness(Outcome& o) {
  Zonotope square(2, 1);
  square.add_generator(1.0, MultiVector::vector({1.0, 0.0}));
  square.add_generator(1.0, MultiVector::vector({0.0, 1.0}));
  const double v1 = intrinsic_volume(square, 1), v2 = intrinsic_volume(square, 2);
  Zonotope e1(2, 1), e2(2, 1);
  e1.add_generator(1.0, MultiVector::vector({1.0, 0.0}));
  e2.add_generator(1.0, MultiVector::vector({0.0, 1.0}));
  const double mv = mixed_volume({e1, e2});
  Zonotope hex(2, 1);
  for (int i = 0; i < 3; ++i) hex.add_generator(1.0, MultiVector::vector({std::cos(pi * i / 3), std::sin(pi * i / 3)}));
  const double h = intrinsic_volume(hex, 2);
  o.detail << "V1(square)=" << v1 << " V2(square)=" << v2 << " MV(e1,e2)=" << mv << " V2(hexagon)=" << h;
  o.require(within(v1, 2.0, 1e-12) && within(v2, 1.0, 1e-12) && within(mv, 0.5, 1e-12) && within(h, 1.5 * std::sqrt(3.0), 1e-12),
            "exact values");
  RandomStream rng(103, 0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Zonotope K = random_planar(rng, 3 + t % 5);
    const double exact = volume(K);
    worst = std::max(worst, std::abs(rejection_area(K, 1000000, rng) / exact - 1.0));
  }
  o.detail << "; rejection-sampling max relative error " << worst;
  o.require(worst <= 0.01, "rejection oracle beyond 1%");
}

void length_with_balls(Outcome& o) {
  Zonotope C(3, 2);
  C.add_generator(1.0, MultiVector::basis(3, {0, 1}));
  const auto r = length_with_balls_check(C, 100000, 104);
  o.detail << "l(C)=" << r.lhs << " l(C^B3)/(1! b1)=" << r.rhs;
  o.require(within(r.rhs, r.lhs, 0.02 * r.lhs), "sides differ by more than 2%");
}

void kac_rice_circle(Outcome& o) {
  const auto s = estimate_section(normal_field(1), circle(64).rule, sec(4000, 105));
  std::size_t bad = 0;
  for (const auto& node : s.nodes)
    if (!within(node_density(node), 1.0 / pi, 3.0 * node_density_standard_error(node))) ++bad;
  const Estimate kr = kac_rice_volume(s);
  const auto mc = count_zeros_1d(normal_field(1), sim(10000, 105));
  o.detail << "nodes off 1/pi by > 3 s.e.: " << bad << "/" << s.size() << "; integral " << kr.value << " +- " << kr.standard_error
           << "; simulator " << mc.mean << " +- " << mc.standard_error;
  o.require(bad == 0, "nodewise density");
  o.require(within(kr.value, 2.0, 3.0 * kr.standard_error), "integral vs 2");
  o.require(within(kr.value, mc.mean, 3.0 * combined(kr.standard_error, mc.standard_error)), "prediction vs simulator");
}

void kostlan_circle(Outcome& o) {
  for (int d : {2, 4, 9}) {
    const auto model = gaussian_model(circle().chart, kostlan_basis(1, d));
    const Estimate kr = kac_rice_volume(estimate_section(model, circle(64).rule, sec(4000, 106, static_cast<std::uint64_t>(d))));
    const auto mc = count_zeros_1d(model, sim(10000, 106, 256, static_cast<std::uint64_t>(d)));
    const double target = 2.0 * std::sqrt(static_cast<double>(d));
    o.detail << "d=" << d << ": KR " << kr.value << " +- " << kr.standard_error << ", MC " << mc.mean << " +- " << mc.standard_error
             << ", 2sqrt(d) " << target << "; ";
    o.require(within(kr.value, mc.mean, 3.0 * combined(kr.standard_error, mc.standard_error)), "KR vs MC, d=" + std::to_string(d));
    o.require(within(kr.value, target, 3.0 * kr.standard_error), "KR vs 2sqrt(d), d=" + std::to_string(d));
    o.require(within(mc.mean, target, 3.0 * mc.standard_error), "MC vs 2sqrt(d), d=" + std::to_string(d));
  }
}

void level_sets(Outcome& o) {
  const auto model = cosine_level_set();
  const double exact = 2.0 * std::erf(1.0 / std::sqrt(2.0));
  const auto s = estimate_section(model, circle(4096).rule, sec(1, 107));
  const double kr = kac_rice_volume(s).value;
  double worst = 0.0;
  for (const auto& node : s.nodes) {
    const double th = node.point(0);
    worst = std::max(worst, std::abs(node.zonotope.nigiro()[0] - gauss_pdf(std::cos(th)) * -std::sin(th)));
  }
  const double loop = current_pairing_from_nigiro(s, [](const Point&) { return MultiVector::scalar(1, 1.0); });
  const auto mc = count_zeros_1d(model, sim(10000, 107));
  o.detail << "2(2Phi(1)-1)=" << exact << " quadrature " << kr << " MC " << mc.mean << " +- " << mc.standard_error
           << "; max nodal |e_X - rho dphi| " << worst << "; closed-loop current " << loop;
  o.require(within(kr, exact, 1e-5), "quadrature of the exact density");
  o.require(within(mc.mean, exact, 3.0 * mc.standard_error), "simulator vs exact");
  o.require(worst <= 1e-12, "nodewise current");
  o.require(std::abs(loop) <= 1e-9, "closed-loop current");
}

void wedge_intersections(Outcome& o) {
  {
    const auto rule = sphere2(12, 24).rule;
    const auto w = wedge_sections(estimate_section(normal_field(2), rule, sec(256, 108, 1)),
                                  estimate_section(normal_field(2), rule, sec(256, 108, 2)));
    const Estimate kr = kac_rice_volume(w);
    const auto mc = count_zeros_2d({normal_field(2), normal_field(2)}, sim(1000, 108, 64));
    o.detail << "S2 great circles: wedge " << kr.value << " +- " << kr.standard_error << ", MC " << mc.mean << " +- " << mc.standard_error
             << " (valid " << mc.valid << "); ";
    o.require(within(kr.value, 2.0, 3.0 * kr.standard_error), "S2 wedge vs 2");
    o.require(mc.valid && within(kr.value, mc.mean, 3.0 * combined(kr.standard_error, mc.standard_error)), "S2 wedge vs simulator");
  }
  const auto f1 = gaussian_model(torus_chart(2), trig_torus_basis(2, 1));
  const auto f2 = gaussian_model(torus_chart(2), trig_torus_basis(2, 2, 1.5, {1.0, 0.7}));
  const auto rule = torus({24, 24}).rule;
  const auto s1 = estimate_section(f1, rule, sec(200, 108, 3));
  const auto s2 = estimate_section(f2, rule, sec(200, 108, 4));
  const auto w = wedge_sections(s1, s2);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double mv = 2.0 * mixed_volume({s1.nodes[i].zonotope, s2.nodes[i].zonotope});
    worst = std::max(worst, std::abs(node_density(w.nodes[i]) - mv) / std::max(1e-300, mv));
  }
  const Estimate kr = kac_rice_volume(w);
  const auto mc = count_zeros_2d({f1, f2}, sim(1000, 108, 96, 5));
  o.detail << "torus trig pair: wedge " << kr.value << " +- " << kr.standard_error << ", MC " << mc.mean << " +- " << mc.standard_error
           << " (valid " << mc.valid << "); max relative |delta12 - 2MV| " << worst;
  o.require(mc.valid && within(kr.value, mc.mean, 3.0 * combined(kr.standard_error, mc.standard_error)), "torus wedge vs simulator");
  o.require(worst <= 1e-12, "delta12 = 2 MV code paths");
}

// A scalar trig field on the torus with seeded spectral shape.
RandomFieldModel seeded_trig(RandomStream& rng) {
  const int degree = 1 + static_cast<int>(rng.uniform() * 2.0);
  return gaussian_model(torus_chart(2), trig_torus_basis(2, degree, 0.6 + 1.5 * rng.uniform(), {0.5 + rng.uniform(), 0.5 + rng.uniform()}));
}

void kraf(Outcome& o) {
  const auto rule = torus({8, 8}).rule;
  std::size_t ok = 0, total = 0;
  double min_margin = 1e300;
  for (std::uint64_t pair = 0; pair < 50; ++pair) {
    RandomStream shape(109, pair);
    const auto X1 = seeded_trig(shape), X2 = seeded_trig(shape);
    auto est = [&](const RandomFieldModel& m, std::uint64_t tag) { return estimate_section(m, rule, sec(128, 109, derive_stream(pair, {tag}))); };
    const auto a = est(X1, 1), a2 = est(X1, 2), b = est(X2, 3), b2 = est(X2, 4);
    const auto w12 = wedge_sections(a, b), w11 = wedge_sections(a, a2), w22 = wedge_sections(b, b2);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      const double d12 = node_density(w12.nodes[i]), d11 = node_density(w11.nodes[i]), d22 = node_density(w22.nodes[i]);
      const double s12 = node_density_standard_error(w12.nodes[i]);
      const double s11 = node_density_standard_error(w11.nodes[i]), s22 = node_density_standard_error(w22.nodes[i]);
      const double gm = std::sqrt(d11 * d22);
      const double sgm = 0.5 * gm * combined(s11 / d11, s22 / d22);
      const double se = combined(s12, sgm);
      ++total;
      if (d12 >= gm - 3.0 * se) ++ok;
      min_margin = std::min(min_margin, (d12 - gm) / se);
    }
  }
  const double frac = static_cast<double>(ok) / static_cast<double>(total);
  o.detail << "nodes satisfying delta12 >= sqrt(delta11' delta22') - 3 s.e.: " << ok << "/" << total << " (" << 100.0 * frac
           << "%); smallest margin " << min_margin << " s.e.";
  o.require(frac >= 0.99, "fewer than 99% of nodes");
}

void krbm(Outcome& o) {
  RandomStream shape(110, 0);
  const auto X0 = seeded_trig(shape), X1 = seeded_trig(shape);
  const auto rule = torus({12, 12}).rule;
  const auto a = estimate_section(X0, rule, sec(128, 110, 1)), a2 = estimate_section(X0, rule, sec(128, 110, 2));
  const auto b = estimate_section(X1, rule, sec(128, 110, 3)), b2 = estimate_section(X1, rule, sec(128, 110, 4));
  const auto w00 = wedge_sections(a, a2), w11 = wedge_sections(b, b2), w01 = wedge_sections(a, b2), w10 = wedge_sections(b, a2);
  const auto probes = probe_directions(2, 1, 32);
  double exact_err = 0.0, identity_err = 0.0;
  std::size_t bad = 0;
  for (double t : {0.25, 0.5, 0.75}) {
    const auto mix = bernoulli_mixture(a, b, t), mix2 = bernoulli_mixture(a2, b2, t);
    const auto wt = wedge_sections(mix, mix2);
    for (std::size_t i = 0; i < rule.size(); ++i) {
      for (const auto& u : probes) {
        const double lhs = mix.nodes[i].zonotope.support(u);
        const double rhs = (1 - t) * a.nodes[i].zonotope.support(u) + t * b.nodes[i].zonotope.support(u);
        exact_err = std::max(exact_err, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
      }
      const double dt = node_density(wt.nodes[i]);
      const double d0 = node_density(w00.nodes[i]), d1 = node_density(w11.nodes[i]);
      const double expand = (1 - t) * (1 - t) * d0 + t * t * d1 + t * (1 - t) * (node_density(w01.nodes[i]) + node_density(w10.nodes[i]));
      identity_err = std::max(identity_err, std::abs(dt - expand) / expand);
      const double bound = std::pow(d0, 1 - t) * std::pow(d1, t);
      const double s0 = node_density_standard_error(w00.nodes[i]), s1 = node_density_standard_error(w11.nodes[i]);
      const double sb = bound * combined((1 - t) * s0 / d0, t * s1 / d1);
      const double se = combined(node_density_standard_error(wt.nodes[i]), sb);
      if (dt < bound - 3.0 * se) ++bad;
    }
  }
  o.detail << "max relative |h_mix - convex combination| " << exact_err << "; max relative error of the mixture expansion "
           << identity_err << "; nodes violating delta_t >= delta0^(1-t) delta1^t - 3 s.e.: " << bad << "/" << 3 * rule.size();
  o.require(exact_err <= 1e-12, "mixture is not the convex combination");
  o.require(identity_err <= 1e-12, "mixture expansion");
  o.require(bad == 0, "KRBM inequality");
}

void curve_crofton(Outcome& o) {
  const double lengths[] = {0.5 * pi, pi, 2.0 * pi};
  for (int j = 0; j < 3; ++j) {
    const Curve arc = equator_arc(0.0, lengths[j]);
    const Estimate len = finsler_length(normal_field(2), arc, 64, sec(4000, 111, static_cast<std::uint64_t>(j)));
    const auto mc = count_zeros_1d(normal_field(2), arc, sim(10000, 111, 256, static_cast<std::uint64_t>(j)));
    const double expect = lengths[j] / pi;
    o.detail << "arc " << lengths[j] << ": 2l^F " << 2 * len.value << " +- " << 2 * len.standard_error << ", MC " << mc.mean << " +- "
             << mc.standard_error << " (expected " << expect << "); ";
    o.require(within(mc.mean, 2 * len.value, 3.0 * combined(mc.standard_error, 2 * len.standard_error)), "MC vs 2l^F");
    o.require(within(2 * len.value, expect, 3.0 * 2 * len.standard_error), "2l^F vs arc length / pi");
  }
}

void holmes_thompson(Outcome& o) {
  RandomStream rng(112, 0);
  const MultiVector e12 = MultiVector::basis(2, {0, 1});
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Zonotope K = random_planar(rng, 2 + t % 7);
    const double a = holmes_thompson_density(K, e12), b = holmes_thompson_projection(K, e12);
    worst = std::max(worst, std::abs(a - b) / b);
  }
  Embedding S;
  S.dim = 2;
  S.lower = Eigen::Vector2d(0.0, 0.0);
  S.upper = Eigen::Vector2d(pi, 2.0 * pi);
  S.periodic = {false, true};
  S.position = [](const Eigen::VectorXd& u) -> Point { return Eigen::Vector3d(0.5 * pi, u(0), u(1)); };
  S.jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 2);
    J(1, 0) = 1.0;
    J(2, 1) = 1.0;
    return J;
  };
  CroftonOptions co;
  co.section = sec(300, 112);
  const auto r = crofton_check(normal_field(3), S, box_rule(S.lower, S.upper, {8, 12}, S.periodic), co);
  const double alg = std::abs(r.algebraic_lhs - r.algebraic_rhs) / std::abs(r.algebraic_rhs);
  o.detail << "max relative wedge-power vs projection " << worst << "; surface Crofton algebraic sides " << r.algebraic_lhs << " / "
           << r.algebraic_rhs << " (relative gap " << alg << ")";
  o.require(worst <= 1e-6, "HT formulas disagree");
  o.require(alg <= 1e-9, "surface Crofton algebraic sides");
}

void tangent_functionals(Outcome& o) {
  struct Case {
    std::string name;
    ZeroWeight w;
  };
  std::size_t failed = 0;
  auto check = [&](const std::string& name, const Estimate& pred, const CountReport& mc) {
    const bool ok = within(pred.value, mc.mean, 3.0 * combined(pred.standard_error, mc.standard_error));
    o.detail << name << ": " << pred.value << " vs " << mc.mean << (ok ? "; " : " (off); ");
    failed += !ok;
  };
  {
    const auto model = gaussian_model(circle().chart, fourier_basis({1.0, 0.7, 0.4}));
    const auto s = estimate_section(model, circle(64).rule, sec(3000, 113, 1));
    const std::vector<Case> cases = {
        {"S1 1", [](const Point&, const MultiVector&) { return 1.0; }},
        {"S1 cos^2", [](const Point& p, const MultiVector&) { return std::pow(std::cos(p(0)), 2); }},
        {"S1 2+sin", [](const Point& p, const MultiVector&) { return 2.0 + std::sin(p(0)); }},
        {"S1 exp(cos)", [](const Point& p, const MultiVector&) { return std::exp(std::cos(p(0))); }},
    };
    std::uint64_t j = 0;
    for (const auto& c : cases) {
      auto so = sim(4000, 113, 256, 10 + j++);
      so.mode = CountMode::weighted;
      so.weight = c.w;
      check(c.name, alpha_expectation(s, TangentFunctional{c.w}), count_zeros_1d(model, so));
    }
  }
  {
    const auto model = gaussian_model(torus_chart(2), trig_torus_basis(2, 2, 1.0, {1.0, 1.5}));
    const auto s = estimate_section(model, torus({32, 32}).rule, sec(500, 113, 2));
    const std::vector<Case> cases = {
        {"T2 1", [](const Point&, const MultiVector&) { return 1.0; }},
        {"T2 nu0^2", [](const Point&, const MultiVector& n) { return n[0] * n[0]; }},
        {"T2 nu1^2", [](const Point&, const MultiVector& n) { return n[1] * n[1]; }},
        {"T2 |nu0|", [](const Point&, const MultiVector& n) { return std::abs(n[0]); }},
        {"T2 nu0^2(1+cos 2pi x)", [](const Point& p, const MultiVector& n) { return n[0] * n[0] * (1.0 + std::cos(2 * pi * p(0))); }},
        {"T2 |nu0 nu1|", [](const Point&, const MultiVector& n) { return std::abs(n[0] * n[1]); }},
    };
    std::uint64_t j = 0;
    for (const auto& c : cases) {
      auto so = sim(500, 113, 128, 20 + j++);
      so.mode = CountMode::weighted;
      so.weight = c.w;
      check(c.name, alpha_expectation(s, TangentFunctional{c.w}), measure_zero_length_2d(model, so));
    }
  }
  o.require(failed == 0, std::to_string(failed) + " functional(s) outside 3 s.e.");
}

void expected_current(Outcome& o) {
  std::size_t bad = 0, nodes = 0;
  auto scan = [&](const ZonoidSectionEstimate& s) {
    for (const auto& node : s.nodes) {
      const auto se = current_standard_errors(node);
      double s2 = 0.0;
      for (double v : se) s2 += v * v;
      ++nodes;
      if (node.zonotope.nigiro().norm() > 3.0 * std::sqrt(s2)) ++bad;
    }
  };
  scan(estimate_section(normal_field(2), sphere2(8, 16).rule, sec(2000, 114, 1)));
  scan(estimate_section(gaussian_model(torus_chart(2), trig_torus_basis(2, 2)), torus({12, 12}).rule, sec(2000, 114, 2)));
  auto so = sim(2000, 114);
  so.mode = CountMode::signed_count;
  const auto mc = count_zeros_1d(gaussian_model(circle().chart, kostlan_basis(1, 5)), so);
  std::size_t nonzero = 0;
  for (double v : mc.per_trial) nonzero += v != 0.0;
  o.detail << "nodes with |e_X| > 3 s.e.: " << bad << "/" << nodes << "; circle trials with nonzero signed count: " << nonzero << "/"
           << mc.per_trial.size();
  o.require(bad == 0, "symmetric current");
  o.require(nonzero == 0 && mc.per_trial.size() == 2000, "signed count");
}

void determinism(Outcome& o) {
  const fs::path dir = fs::path(ZONOID_SAMPLE_DIR) / "configs";
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".toml" && e.path().stem() != "malformed") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  std::size_t same = 0;
  for (const auto& path : configs) {
    const toml::table cfg = parse_toml_file(path.string());
    const std::string kind = cfg["experiment"].value_or(std::string{});
    ex::RunContext ctx;
    ctx.config_dir = dir;
    const auto a = ex::run_experiment(kind, cfg, ctx);
    const auto b = ex::run_experiment(kind, cfg, ctx);
    bool eq = a.csv == b.csv && a.extra_csv == b.extra_csv;
    if (eq) ++same;
    else o.detail << path.filename().string() << " differs; ";
  }
  o.detail << same << "/" << configs.size() << " sample experiments byte-identical on rerun";
  o.require(same == configs.size() && !configs.empty(), "non-deterministic output");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"Gaussian zonoid is the ball of radius 1/sqrt(2pi)", gaussian_ball},
      {"Gaussian wedge-norm constants", gaussian_norm_constants},
      {"zonotope algebra exactness", zonotope_exactness},
      {"length via wedge with balls", length_with_balls},
      {"Kac-Rice on S1, linear field", kac_rice_circle},
      {"Kostlan fields on S1", kostlan_circle},
      {"random level sets", level_sets},
      {"wedge sections and intersections", wedge_intersections},
      {"Kac-Rice Alexandrov-Fenchel", kraf},
      {"Kac-Rice Brunn-Minkowski and Bernoulli mixtures", krbm},
      {"Crofton formula for curves", curve_crofton},
      {"Holmes-Thompson identity and surface Crofton", holmes_thompson},
      {"tangent functionals", tangent_functionals},
      {"expected current sanity", expected_current},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail.str() << " ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::defaultfloat << std::setprecision(6) << std::endl;
  }
  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
