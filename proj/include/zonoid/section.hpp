#pragma once

#include "zonoid/algebra.hpp"
#include "zonoid/error.hpp"
#include "zonoid/manifold.hpp"
#include "zonoid/parallel.hpp"
#include "zonoid/random_field.hpp"
#include "zonoid/zonotope.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace zonoid {

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// One quadrature node of a zonoid section. The zonotope lives in Λᵏ of the orthonormal
// coframe at `point`. Its Monte Carlo structure is kept for error propagation:
//  - groups: ranges [begin, end) of generators that are n i.i.d. draws, each of the form (Yᵢ/n)·[0, vᵢ];
//  - left/right: the two independent factors when the node is a wedge;
//  - parts: independent scaled summands when the node is a mixture of structured nodes.
// Generators outside every group are deterministic.
struct SectionNode {
  Point point;
  double weight = 0.0;
  Zonotope zonotope;
  double density_at_zero = 0.0;
  double density_standard_error = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  std::shared_ptr<const SectionNode> left, right;
  std::vector<std::pair<double, std::shared_ptr<const SectionNode>>> parts;
  bool low_ess = false;
};

struct ZonoidSectionEstimate {
  Chart chart;
  int m = 1;
  int k = 1;
  std::vector<SectionNode> nodes;
  // (seed, stream) pairs whose draws went into the section; empty for sample-free sections.
  std::set<std::pair<std::uint64_t, std::uint64_t>> sources;
  std::size_t samples = 0;

  std::size_t size() const { return nodes.size(); }
};

struct SectionOptions {
  std::size_t n_samples = 4096;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int threads = 1;
  SampleMode mode = SampleMode::segment;
  ImportanceOptions importance;
};

namespace detail {

inline MultiVector gradient_wedge(const Eigen::MatrixXd& ortho_rows) { return wedge_vectors(ortho_rows); }

inline SectionNode estimate_node(const RandomFieldModel& model, const Point& p, double weight, const SectionOptions& opt,
                                 std::size_t node_index) {
  const int k = model.k(), m = model.m();
  const Chart& chart = model.chart();
  SectionNode node;
  node.point = p;
  node.weight = weight;
  node.zonotope = Zonotope(m, k);
  const Eigen::MatrixXd F = chart.coframe(p);
  auto ortho_rows = [&](const Eigen::Ref<const Eigen::RowVectorXd>& vec_d) {
    Eigen::MatrixXd G(k, m);
    for (int i = 0; i < k; ++i) G.row(i) = vec_d.segment(i * m, m);
    return Eigen::MatrixXd(G * F.transpose());
  };
  std::vector<double> buf(binomial(m, k));

  if (model.is_shifted()) {
    const ConditionedJet cj = condition_at_zero(model, p);
    node.density_at_zero = cj.density_at_zero();
    const Eigen::MatrixXd G = ortho_rows(cj.mean().transpose());
    wedge_rows_into(G, buf);
    MultiVector v(m, k, buf);
    if (cj.density_at_zero() > 0.0 && !v.is_zero(0.0)) node.zonotope.add_generator(cj.density_at_zero(), v);
    if (opt.mode == SampleMode::segment) node.zonotope.set_nigiro(v * cj.density_at_zero());
    return node;
  }

  if (opt.n_samples == 0) throw std::invalid_argument("estimate_section: n_samples must be positive");
  RandomStream rng(opt.seed, derive_stream(opt.stream, {static_cast<std::uint64_t>(node_index)}));
  const auto n = opt.n_samples;
  node.zonotope.reserve(n);
  MultiVector nigiro(m, k);
  auto add = [&](double w, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
    wedge_rows_into(ortho_rows(row), buf);
    node.zonotope.add_generator(w, std::span<const double>(buf));
    for (std::size_t c = 0; c < buf.size(); ++c) nigiro[c] += w * buf[c];
  };
  try {
    if (model.is_gaussian()) {
      const ConditionedJet cj = condition_at_zero(model, p);
      const Eigen::MatrixXd draws = cj.draw(rng, n);
      node.density_at_zero = cj.density_at_zero();
      const double w = cj.density_at_zero() / static_cast<double>(n);
      for (Eigen::Index s = 0; s < draws.rows(); ++s) add(w, draws.row(s));
    } else {
      const ImportanceConditionedJet ij = condition_at_zero_mc(model, p, n, rng, opt.importance);
      node.density_at_zero = ij.density_at_zero;
      node.density_standard_error = ij.density_standard_error;
      node.low_ess = ij.low_ess;
      for (Eigen::Index s = 0; s < ij.gradients.rows(); ++s) add(ij.weights(s), ij.gradients.row(s));
    }
  } catch (const NumericalError& e) {
    throw NumericalError("node " + std::to_string(node_index) + " at " + point_string(p) + ": " + e.what());
  }
  node.groups.emplace_back(0, n);
  if (opt.mode == SampleMode::segment) node.zonotope.set_nigiro(nigiro);
  return node;
}

}  // namespace detail

// ζ_X at arbitrary chart points (each point gets its own stream, indexed by position in the list).
inline ZonoidSectionEstimate estimate_section_at(const RandomFieldModel& model, const std::vector<Point>& points,
                                                 const std::vector<double>& weights, const SectionOptions& opt = {}) {
  if (points.size() != weights.size()) throw std::invalid_argument("estimate_section: points and weights differ in length");
  ZonoidSectionEstimate s;
  s.chart = model.chart();
  s.m = model.m();
  s.k = model.k();
  if (s.k > s.m) throw std::invalid_argument("estimate_section: codomain dimension exceeds manifold dimension");
  s.nodes.resize(points.size());
  parallel_for(points.size(), opt.threads, [&](std::size_t i) {
    s.nodes[i] = detail::estimate_node(model, points[i], weights[i], opt, i);
  });
  if (!model.is_shifted()) {
    s.sources.emplace(opt.seed, opt.stream);
    s.samples = opt.n_samples;
  }
  return s;
}

inline ZonoidSectionEstimate estimate_section(const RandomFieldModel& model, const QuadratureRule& rule,
                                              const SectionOptions& opt = {}) {
  return estimate_section_at(model, rule.nodes, rule.weights, opt);
}

// ---------------------------------------------------------------------------------------------
// Error propagation for functionals Σ wᵢ f(vᵢ) that are linear in the generator measure.

using GeneratorFunctional = std::function<double(std::span<const double>)>;

inline double functional_value(const SectionNode& node, const GeneratorFunctional& f) {
  const Zonotope& z = node.zonotope;
  double s = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) s += z.weight(i) * f(z.generator(i));
  return s;
}

namespace detail {

inline double group_variance(std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  if (y.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return ss / (n - 1.0) / n;
}

}  // namespace detail

// Variance of the node estimate of Σ wᵢ f(vᵢ), where f is evaluated on generator coordinates.
inline double functional_variance(const SectionNode& node, const GeneratorFunctional& f) {
  double var = 0.0;
  const Zonotope& z = node.zonotope;
  for (auto [b, e] : node.groups) {
    const auto n = static_cast<double>(e - b);
    std::vector<double> y;
    y.reserve(e - b);
    for (std::size_t i = b; i < e; ++i) y.push_back(n * z.weight(i) * f(z.generator(i)));
    var += detail::group_variance(y);
  }
  if (node.left && node.right) {
    // Two-sample Hoeffding projections of Σᵢⱼ wᵢw′ⱼ f(vᵢ∧v′ⱼ).
    const Zonotope& A = node.left->zonotope;
    const Zonotope& B = node.right->zonotope;
    const int m = A.ambient_dim();
    const auto& plan = detail::Tables::get().plan(m, A.grade(), B.grade());
    std::vector<double> buf(binomial(m, A.grade() + B.grade()));
    std::vector<double> row(A.size(), 0.0), col(B.size(), 0.0);
    for (std::size_t i = 0; i < A.size(); ++i) {
      for (std::size_t j = 0; j < B.size(); ++j) {
        std::fill(buf.begin(), buf.end(), 0.0);
        wedge_accumulate(plan, A.generator(i), B.generator(j), buf, 1.0);
        const double v = f(buf);
        row[i] += B.weight(j) * v;
        col[j] += A.weight(i) * v;
      }
    }
    for (auto [b, e] : node.left->groups) {
      const auto n = static_cast<double>(e - b);
      std::vector<double> y;
      for (std::size_t i = b; i < e; ++i) y.push_back(n * A.weight(i) * row[i]);
      var += detail::group_variance(y);
    }
    for (auto [b, e] : node.right->groups) {
      const auto n = static_cast<double>(e - b);
      std::vector<double> y;
      for (std::size_t j = b; j < e; ++j) y.push_back(n * B.weight(j) * col[j]);
      var += detail::group_variance(y);
    }
    if (!node.left->parts.empty() || !node.right->parts.empty() || node.left->left || node.right->left)
      return std::numeric_limits<double>::quiet_NaN();
  }
  for (const auto& [scale, part] : node.parts) var += scale * scale * functional_variance(*part, f);
  return var;
}

inline double functional_standard_error(const SectionNode& node, const GeneratorFunctional& f) {
  return std::sqrt(functional_variance(node, f));
}

inline double norm_functional(std::span<const double> v) { return detail::norm_of(v); }

// δ(p) = ℓ(ζ_X(p)).
inline double node_density(const SectionNode& node) { return node.zonotope.length(); }
inline double node_density_standard_error(const SectionNode& node) {
  return functional_standard_error(node, norm_functional);
}

inline std::vector<double> density_field(const ZonoidSectionEstimate& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& n : s.nodes) out.push_back(node_density(n));
  return out;
}

inline std::vector<MultiVector> current_field(const ZonoidSectionEstimate& s) {
  std::vector<MultiVector> out;
  out.reserve(s.size());
  for (const auto& n : s.nodes) out.push_back(n.zonotope.nigiro());
  return out;
}

// Standard error of each coordinate of the nigiro e_X(p).
inline std::vector<double> current_standard_errors(const SectionNode& node) {
  std::vector<double> se;
  const std::size_t d = node.zonotope.coord_dim();
  for (std::size_t c = 0; c < d; ++c)
    se.push_back(functional_standard_error(node, [c](std::span<const double> v) { return v[c]; }));
  return se;
}

using NodePredicate = std::function<bool(const Point&)>;

// Quadrature Σ w(p)·f(node) with nodes treated as independent.
inline Estimate integrate_functional(const ZonoidSectionEstimate& s, const std::function<GeneratorFunctional(const SectionNode&)>& f,
                                     const NodePredicate& region = {}) {
  Estimate e;
  double var = 0.0;
  for (const auto& node : s.nodes) {
    if (region && !region(node.point)) continue;
    const GeneratorFunctional g = f(node);
    e.value += node.weight * functional_value(node, g);
    var += node.weight * node.weight * functional_variance(node, g);
  }
  e.standard_error = std::sqrt(var);
  return e;
}

// E vol_{m−k}(Z ∩ A) = ∫_A ℓ(ζ_X(p)) dM(p).
inline Estimate kac_rice_volume(const ZonoidSectionEstimate& s, const NodePredicate& region = {}) {
  return integrate_functional(s, [](const SectionNode&) -> GeneratorFunctional { return norm_functional; }, region);
}

// Weights for the Alpha formula: the constant 1, an even tangent functional F(p, L) of the unit
// simple generator L ∈ Λᵏ T*_pM (orthonormal coordinates), or a linear functional given by an
// (m−k)-form ω through ω ∧ e_X.
struct ConstantWeight {};
struct TangentFunctional {
  std::function<double(const Point&, const MultiVector&)> F;
  bool check_even = true;
};
struct LinearFunctional {
  std::function<MultiVector(const Point&)> form;
};
using WeightFunctional = std::variant<ConstantWeight, TangentFunctional, LinearFunctional>;

namespace detail {

// Top coefficient of ω ∧ x for ω of grade m−k and x of grade k.
inline double top_pairing(const MultiVector& omega, std::span<const double> x, int m, int k) {
  const auto& plan = Tables::get().plan(m, m - k, k);
  double out = 0.0;
  wedge_accumulate(plan, omega.coords(), x, std::span<double>(&out, 1), 1.0);
  return out;
}

}  // namespace detail

inline Estimate alpha_expectation(const ZonoidSectionEstimate& s, const WeightFunctional& weight,
                                  const NodePredicate& region = {}) {
  if (std::holds_alternative<ConstantWeight>(weight)) return kac_rice_volume(s, region);
  const int m = s.m, k = s.k;
  if (const auto* t = std::get_if<TangentFunctional>(&weight)) {
    const auto F = t->F;
    if (t->check_even) {
      for (const auto& node : s.nodes) {
        const Zonotope& z = node.zonotope;
        for (std::size_t i = 0; i < std::min<std::size_t>(z.size(), 4); ++i) {
          const double n = z.generator_norm(i);
          if (n == 0.0) continue;
          const MultiVector u = z.generator_vector(i) * (1.0 / n);
          const double a = F(node.point, u), b = F(node.point, -u);
          if (std::abs(a - b) > 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}))
            throw std::invalid_argument("alpha_expectation: tangent functional is not even");
        }
      }
    }
    return integrate_functional(
        s,
        [F, m, k](const SectionNode& node) -> GeneratorFunctional {
          const Point p = node.point;
          return [F, p, m, k](std::span<const double> v) {
            const double n = detail::norm_of(v);
            if (n == 0.0) return 0.0;
            std::vector<double> u(v.begin(), v.end());
            for (double& c : u) c /= n;
            return n * F(p, MultiVector(m, k, std::move(u)));
          };
        },
        region);
  }
  const auto form = std::get<LinearFunctional>(weight).form;
  return integrate_functional(
      s,
      [form, m, k](const SectionNode& node) -> GeneratorFunctional {
        const MultiVector omega = form(node.point);
        if (omega.ambient_dim() != m || omega.grade() != m - k)
          throw std::invalid_argument("form must have grade " + std::to_string(m - k) + " on a " + std::to_string(m) + "-manifold");
        return [omega, m, k](std::span<const double> v) { return detail::top_pairing(omega, v, m, k); };
      },
      region);
}

// E ∫_Z ω|_Z = ∫_M ω ∧ e_X. The nigiro equals Σ wᵢvᵢ for segment-mode sections, so the pairing
// is evaluated on the generators and shares the error propagation of the other functionals.
inline Estimate expected_current_pairing(const ZonoidSectionEstimate& s, const std::function<MultiVector(const Point&)>& omega,
                                         const NodePredicate& region = {}) {
  return alpha_expectation(s, LinearFunctional{omega}, region);
}

// Direct quadrature of ω ∧ nigiro, without error propagation.
inline double current_pairing_from_nigiro(const ZonoidSectionEstimate& s, const std::function<MultiVector(const Point&)>& omega) {
  double total = 0.0;
  for (const auto& node : s.nodes)
    total += node.weight * detail::top_pairing(omega(node.point), node.zonotope.nigiro().coords(), s.m, s.k);
  return total;
}

inline GrassmannianMeasure node_measure(const SectionNode& node) { return grassmannian_measure(node.zonotope); }

// ---------------------------------------------------------------------------------------------
// Operations on sections.

namespace detail {

inline void require_same_nodes(const ZonoidSectionEstimate& a, const ZonoidSectionEstimate& b, const std::string& what) {
  if (a.m != b.m || a.size() != b.size()) throw std::invalid_argument(what + ": sections live on different quadrature rules");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a.nodes[i].point - b.nodes[i].point).cwiseAbs().maxCoeff() > 1e-12 ||
        std::abs(a.nodes[i].weight - b.nodes[i].weight) > 1e-12 * std::max(1.0, std::abs(a.nodes[i].weight)))
      throw std::invalid_argument(what + ": sections live on different quadrature rules (node " + std::to_string(i) + ")");
  }
}

inline bool is_plain(const SectionNode& n) { return !n.left && n.parts.empty(); }

}  // namespace detail

// ζ_Y(p) = ζ_{X₁}(p) ∧ ζ_{X₂}(p) for independent X₁, X₂.
inline ZonoidSectionEstimate wedge_sections(const ZonoidSectionEstimate& s1, const ZonoidSectionEstimate& s2, int threads = 1) {
  detail::require_same_nodes(s1, s2, "wedge_sections");
  if (s1.k + s2.k > s1.m) throw std::invalid_argument("wedge_sections: grade overflow (k1 + k2 > m)");
  for (const auto& src : s1.sources)
    if (s2.sources.count(src))
      throw IndependenceError("wedge_sections: both sections draw from seed " + std::to_string(src.first) + ", stream " +
                              std::to_string(src.second) + "; independent sections need distinct streams");
  ZonoidSectionEstimate out;
  out.chart = s1.chart;
  out.m = s1.m;
  out.k = s1.k + s2.k;
  out.sources = s1.sources;
  out.sources.insert(s2.sources.begin(), s2.sources.end());
  out.samples = std::max(s1.samples, s2.samples);
  out.nodes.resize(s1.size());
  parallel_for(s1.size(), threads, [&](std::size_t i) {
    const SectionNode& a = s1.nodes[i];
    const SectionNode& b = s2.nodes[i];
    SectionNode& r = out.nodes[i];
    r.point = a.point;
    r.weight = a.weight;
    r.density_at_zero = a.density_at_zero * b.density_at_zero;
    const bool a_det = a.groups.empty() && detail::is_plain(a);
    const bool b_det = b.groups.empty() && detail::is_plain(b);
    Zonotope z = wedge(a.zonotope, b.zonotope);
    // A single deterministic generator keeps the other factor's generator order, so its groups carry over.
    if (a_det && a.zonotope.size() == 1 && detail::is_plain(b)) {
      r.zonotope = std::move(z);
      r.groups = b.groups;
      return;
    }
    if (b_det && b.zonotope.size() == 1 && detail::is_plain(a)) {
      r.zonotope = std::move(z);
      r.groups = a.groups;
      return;
    }
    if (z.coord_dim() == 1) z = z.merged();
    r.zonotope = std::move(z);
    if (a_det && b_det) return;
    r.left = std::make_shared<const SectionNode>(a);
    r.right = std::make_shared<const SectionNode>(b);
  });
  return out;
}

// ζ_{X∘φ}(u) = (d_uφ)*ζ_X(φ(u)) on the parameter box of φ; `s` must have been estimated at
// the points φ(uⱼ) of `param_rule` (see estimate_pullback).
inline ZonoidSectionEstimate pullback_section(const ZonoidSectionEstimate& s, const Embedding& e, const QuadratureRule& param_rule) {
  if (s.size() != param_rule.size()) throw std::invalid_argument("pullback_section: section does not cover the parameter rule");
  if (s.k > e.dim) throw std::invalid_argument("pullback_section: codimension exceeds the submanifold dimension");
  ZonoidSectionEstimate out;
  out.chart = box_chart(e.lower, e.upper, e.periodic);
  out.m = e.dim;
  out.k = s.k;
  out.sources = s.sources;
  out.samples = s.samples;
  out.nodes.resize(s.size());
  std::function<SectionNode(const SectionNode&, const Eigen::MatrixXd&)> image = [&](const SectionNode& n, const Eigen::MatrixXd& T) {
    SectionNode r;
    r.point = n.point;
    r.weight = n.weight;
    r.density_at_zero = n.density_at_zero;
    r.density_standard_error = n.density_standard_error;
    r.zonotope = linear_image(n.zonotope, T);
    r.groups = n.groups;
    r.low_ess = n.low_ess;
    if (n.left) r.left = std::make_shared<const SectionNode>(image(*n.left, T));
    if (n.right) r.right = std::make_shared<const SectionNode>(image(*n.right, T));
    for (const auto& [c, part] : n.parts) r.parts.emplace_back(c, std::make_shared<const SectionNode>(image(*part, T)));
    return r;
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Point& u = param_rule.nodes[i];
    const Point p = e.position(u);
    if ((p - s.nodes[i].point).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("pullback_section: section node " + std::to_string(i) + " is not at φ(u)");
    const Eigen::MatrixXd J = e.jacobian(u);
    Eigen::MatrixXd D(J.rows(), J.cols());
    for (Eigen::Index c = 0; c < J.cols(); ++c) D.col(c) = s.chart.frame_vector(p, J.col(c));
    if (e.dim == 1 && D.norm() == 0.0) throw std::invalid_argument("pullback_section: zero velocity at t=" + std::to_string(u(0)));
    SectionNode r = image(s.nodes[i], D.transpose());
    r.point = u;
    r.weight = param_rule.weights[i];
    out.nodes[i] = std::move(r);
  }
  return out;
}

inline ZonoidSectionEstimate estimate_pullback(const RandomFieldModel& model, const Embedding& e, const QuadratureRule& param_rule,
                                               const SectionOptions& opt = {}) {
  std::vector<Point> pts;
  pts.reserve(param_rule.size());
  for (const auto& u : param_rule.nodes) pts.push_back(e.position(u));
  return pullback_section(estimate_section_at(model, pts, param_rule.weights, opt), e, param_rule);
}

inline ZonoidSectionEstimate pullback_section(const RandomFieldModel& model, const Curve& curve, int n_nodes,
                                              const SectionOptions& opt = {}) {
  return estimate_pullback(model, curve.embedding(), parameter_rule(n_nodes, curve.closed()), opt);
}

// ζ_{X_t} = (1−t)ζ_{X₀} + tζ_{X₁}, where X_t is X₀ with probability 1−t and X₁ with probability t.
inline ZonoidSectionEstimate bernoulli_mixture(const ZonoidSectionEstimate& s1, const ZonoidSectionEstimate& s2, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("bernoulli_mixture: t must lie in [0,1]");
  detail::require_same_nodes(s1, s2, "bernoulli_mixture");
  if (s1.k != s2.k) throw std::invalid_argument("bernoulli_mixture: sections have different codimension");
  std::string bad;
  std::size_t n_bad = 0;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1.nodes[i].density_at_zero <= 0.0 && s2.nodes[i].density_at_zero <= 0.0) {
      if (n_bad++ < 10) bad += (bad.empty() ? "" : ", ") + std::to_string(i) + " " + point_string(s1.nodes[i].point);
    }
  }
  if (n_bad) throw std::invalid_argument("bernoulli_mixture: both densities vanish at " + std::to_string(n_bad) + " node(s): " + bad);
  if (t == 0.0) return s1;
  if (t == 1.0) return s2;
  ZonoidSectionEstimate out;
  out.chart = s1.chart;
  out.m = s1.m;
  out.k = s1.k;
  out.sources = s1.sources;
  out.sources.insert(s2.sources.begin(), s2.sources.end());
  out.samples = std::max(s1.samples, s2.samples);
  out.nodes.resize(s1.size());
  for (std::size_t i = 0; i < s1.size(); ++i) {
    const SectionNode& a = s1.nodes[i];
    const SectionNode& b = s2.nodes[i];
    SectionNode& r = out.nodes[i];
    r.point = a.point;
    r.weight = a.weight;
    r.zonotope = convex_combine(a.zonotope, b.zonotope, t);
    r.density_at_zero = (1.0 - t) * a.density_at_zero + t * b.density_at_zero;
    r.density_standard_error = std::hypot((1.0 - t) * a.density_standard_error, t * b.density_standard_error);
    r.low_ess = a.low_ess || b.low_ess;
    if (detail::is_plain(a) && detail::is_plain(b)) {
      r.groups = a.groups;
      const std::size_t off = a.zonotope.size();
      for (auto [x, y] : b.groups) r.groups.emplace_back(x + off, y + off);
    } else {
      r.parts.emplace_back(1.0 - t, std::make_shared<const SectionNode>(a));
      r.parts.emplace_back(t, std::make_shared<const SectionNode>(b));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Export.

inline nlohmann::json to_json(const ZonoidSectionEstimate& s, bool include_generators = false) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& n = s.nodes[i];
    nlohmann::json j;
    j["index"] = i;
    j["point"] = std::vector<double>(n.point.data(), n.point.data() + n.point.size());
    j["weight"] = n.weight;
    j["delta"] = node_density(n);
    j["delta_se"] = node_density_standard_error(n);
    j["density_at_zero"] = n.density_at_zero;
    const auto e = n.zonotope.nigiro().coords();
    j["current"] = std::vector<double>(e.begin(), e.end());
    j["generators"] = n.zonotope.size();
    if (include_generators) j["zonotope"] = to_json(n.zonotope);
    nodes.push_back(std::move(j));
  }
  nlohmann::json sources = nlohmann::json::array();
  for (auto [seed, stream] : s.sources) sources.push_back({{"seed", seed}, {"stream", stream}});
  return {{"manifold", s.chart.name}, {"m", s.m}, {"k", s.k}, {"samples", s.samples}, {"sources", sources}, {"nodes", nodes}};
}

inline void write_csv(std::ostream& os, const ZonoidSectionEstimate& s) {
  os << "node";
  for (int i = 0; i < s.m; ++i) os << ",p" << i;
  os << ",weight,delta,delta_se";
  const std::size_t d = binomial(s.m, s.k);
  for (std::size_t c = 0; c < d; ++c) os << ",e" << c;
  os << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& n = s.nodes[i];
    os << i;
    for (Eigen::Index c = 0; c < n.point.size(); ++c) os << ',' << n.point(c);
    os << ',' << n.weight << ',' << node_density(n) << ',' << node_density_standard_error(n);
    for (double c : n.zonotope.nigiro().coords()) os << ',' << c;
    os << '\n';
  }
}

}  // namespace zonoid
