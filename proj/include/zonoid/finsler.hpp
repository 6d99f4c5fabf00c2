#pragma once

#include "zonoid/algebra.hpp"
#include "zonoid/manifold.hpp"
#include "zonoid/random_field.hpp"
#include "zonoid/section.hpp"
#include "zonoid/zonotope.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

// F_p(v) = h_{ζ(p)}(v) with ζ(p) the centered part of a scalar section, v in orthonormal components.
class FinslerStructure {
 public:
  explicit FinslerStructure(const ZonoidSectionEstimate& section) : section_(section) {
    if (section.k != 1) throw std::invalid_argument("finsler_from_section: section must have k = 1, got k = " + std::to_string(section.k));
    for (auto& n : section_.nodes) n.zonotope = n.zonotope.centered();
  }

  const ZonoidSectionEstimate& section() const { return section_; }
  std::size_t size() const { return section_.size(); }
  int dim() const { return section_.m; }
  const Point& point(std::size_t i) const { return section_.nodes[i].point; }
  const Zonotope& body(std::size_t i) const { return section_.nodes[i].zonotope; }

  double evaluate_ortho(std::size_t i, const Eigen::VectorXd& v) const {
    return body(i).support(std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
  }

  // v given in chart components.
  double evaluate(std::size_t i, const Eigen::VectorXd& v) const {
    return evaluate_ortho(i, section_.chart.frame_vector(point(i), v));
  }

  double evaluate_standard_error(std::size_t i, const Eigen::VectorXd& v) const {
    const Eigen::VectorXd u = section_.chart.frame_vector(point(i), v);
    return functional_standard_error(section_.nodes[i], [u](std::span<const double> g) {
      double d = 0.0;
      for (std::size_t c = 0; c < g.size(); ++c) d += g[c] * u(static_cast<Eigen::Index>(c));
      return 0.5 * std::abs(d);
    });
  }

  std::size_t node_near(const Point& p, double tol = 1e-9) const {
    for (std::size_t i = 0; i < size(); ++i)
      if ((point(i) - p).cwiseAbs().maxCoeff() <= tol) return i;
    throw std::invalid_argument("finsler structure has no node at " + point_string(p));
  }

 private:
  ZonoidSectionEstimate section_;
};

inline FinslerStructure finsler_from_section(const ZonoidSectionEstimate& section) { return FinslerStructure(section); }

// The Finsler structure of `model` at the points γ(tⱼ) of a curve quadrature.
inline FinslerStructure finsler_along(const RandomFieldModel& model, const Curve& curve, const QuadratureRule& t_rule,
                                      const SectionOptions& opt = {}) {
  std::vector<Point> pts;
  for (const auto& t : t_rule.nodes) pts.push_back(curve(t(0)));
  return FinslerStructure(estimate_section_at(model, pts, t_rule.weights, opt));
}

// ℓ^F(γ) = ∫₀¹ F_{γ(t)}(γ̇(t)) dt; the structure must have nodes at γ(tⱼ).
inline Estimate finsler_length(const FinslerStructure& F, const Curve& curve, const QuadratureRule& t_rule) {
  Estimate e;
  double var = 0.0;
  for (std::size_t j = 0; j < t_rule.size(); ++j) {
    const double t = t_rule.nodes[j](0);
    const std::size_t i = F.node_near(curve(t));
    const Eigen::VectorXd v = curve.velocity(t);
    e.value += t_rule.weights[j] * F.evaluate(i, v);
    const double se = F.evaluate_standard_error(i, v);
    var += t_rule.weights[j] * t_rule.weights[j] * se * se;
  }
  e.standard_error = std::sqrt(var);
  return e;
}

inline Estimate finsler_length(const RandomFieldModel& model, const Curve& curve, int n_nodes, const SectionOptions& opt = {}) {
  const QuadratureRule rule = parameter_rule(n_nodes, curve.closed());
  return finsler_length(finsler_along(model, curve, rule, opt), curve, rule);
}

// Rows (t, F(γ̇), cumulative length) along the quadrature nodes.
inline void write_length_table(std::ostream& os, const FinslerStructure& F, const Curve& curve, const QuadratureRule& t_rule) {
  os << "t,F,cumulative\n";
  os.precision(17);
  double cum = 0.0;
  for (std::size_t j = 0; j < t_rule.size(); ++j) {
    const double t = t_rule.nodes[j](0);
    const double f = F.evaluate(F.node_near(curve(t)), curve.velocity(t));
    cum += t_rule.weights[j] * f;
    os << t << ',' << f << ',' << cum << '\n';
  }
}

// ---------------------------------------------------------------------------------------------
// Holmes-Thompson densities of a centered grade-1 body ζ ⊂ ℝᵐ on simple k-vectors v.

namespace detail {

inline Eigen::MatrixXd simple_factors(const MultiVector& v) {
  const int m = v.ambient_dim(), k = v.grade();
  if (v.is_zero(0.0)) throw std::invalid_argument("holmes_thompson_density: v must be nonzero");
  if (!is_simple(v, kSimpleTolerance * std::max(1.0, v.norm())))
    throw std::invalid_argument("holmes_thompson_density: v is not a simple multivector");
  if (k == m) return Eigen::MatrixXd::Identity(m, m);
  // Orthonormal basis of the k-plane of v: the kernel of x ↦ x∧v is span(v).
  const auto& plan = Tables::get().plan(m, 1, k);
  Eigen::MatrixXd W(static_cast<Eigen::Index>(binomial(m, k + 1)), m);
  std::vector<double> e(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    std::vector<double> out(static_cast<std::size_t>(W.rows()), 0.0);
    wedge_accumulate(plan, e, v.coords(), out, 1.0);
    for (Eigen::Index r = 0; r < W.rows(); ++r) W(r, i) = out[static_cast<std::size_t>(r)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k);
}

}  // namespace detail

// φ_k^{HT}(v) = (2/(k! b_k))·h_{ζ^{∧k}}(v). The wedge power is materialized for small bodies;
// larger ones use the equal value ‖v‖·𝒱_k(Qᵗζ)/b_k, Q an orthonormal basis of the plane of v.
inline double holmes_thompson_density(const Zonotope& zeta, const MultiVector& v) {
  if (zeta.grade() != 1) throw std::invalid_argument("holmes_thompson_density: body must have grade 1");
  if (v.ambient_dim() != zeta.ambient_dim()) throw std::invalid_argument("holmes_thompson_density: dimension mismatch");
  const int k = v.grade();
  const Eigen::MatrixXd Q = detail::simple_factors(v);
  const double n = static_cast<double>(zeta.size());
  const double subsets = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(std::max(1.0, n - k + 1.0)));
  const Zonotope c = zeta.centered();
  if (subsets <= 1e6) return 2.0 / (factorial(k) * unit_ball_volume(k)) * support(wedge_power(c, k), v);
  return v.norm() * intrinsic_volume(linear_image(c, Q.transpose()), k) / unit_ball_volume(k);
}

// The projection-volume definition ‖v‖·vol_k(π_v ζ)/b_k with the zonotope volume formula
// vol_k = Σ_{|I|=k} Π wᵢ |det(Qᵗv_I)|, for cross-checking.
inline double holmes_thompson_projection(const Zonotope& zeta, const MultiVector& v) {
  const int k = v.grade();
  const Eigen::MatrixXd Q = detail::simple_factors(v);
  const Zonotope P = linear_image(zeta.centered(), Q.transpose());
  double vol = 0.0;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  const std::size_t n = P.size();
  if (n >= static_cast<std::size_t>(k)) {
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    Eigen::MatrixXd M(k, k);
    for (;;) {
      double w = 1.0;
      for (int a = 0; a < k; ++a) {
        const auto g = P.generator(idx[static_cast<std::size_t>(a)]);
        for (int b = 0; b < k; ++b) M(a, b) = g[static_cast<std::size_t>(b)];
        w *= P.weight(idx[static_cast<std::size_t>(a)]);
      }
      vol += w * std::abs(M.determinant());
      int a = k - 1;
      while (a >= 0 && idx[static_cast<std::size_t>(a)] == n - static_cast<std::size_t>(k - a)) --a;
      if (a < 0) break;
      ++idx[static_cast<std::size_t>(a)];
      for (int b = a + 1; b < k; ++b) idx[static_cast<std::size_t>(b)] = idx[static_cast<std::size_t>(b) - 1] + 1;
    }
  }
  return v.norm() * vol / unit_ball_volume(k);
}

// ---------------------------------------------------------------------------------------------
// Crofton checks: E#(S ∩ Z⁽ᵏ⁾) = k!·b_k·vol_k^{F}(S) for a k-dimensional S and Z⁽ᵏ⁾ the
// intersection of k independent copies of the zero set of a scalar field.

struct CroftonResult {
  int k = 1;
  Estimate lhs;            // ∫ ℓ(ζ¹∧⋯∧ζᵏ) over S from k independent pulled-back sections
  Estimate rhs;            // k!·b_k·∫ φ^{HT} over S, from the first copy
  double algebraic_lhs = 0;  // ∫ ℓ((Dᵗζ¹)^{∧k}) from the first copy
  double algebraic_rhs = 0;  // k!·b_k·∫ φ^{HT}(D₁∧⋯∧D_k) from the same zonotopes
};

struct CroftonOptions {
  SectionOptions section;  // copy j uses stream derive_stream(section.stream, {j})
};

inline CroftonResult crofton_check(const RandomFieldModel& model, const Embedding& S, const QuadratureRule& param_rule,
                                   const CroftonOptions& opt = {}) {
  if (model.k() != 1) throw std::invalid_argument("crofton_check: model must be scalar");
  const int k = S.dim;
  if (k < 1 || k > model.m()) throw std::invalid_argument("crofton_check: surface dimension out of range");
  CroftonResult r;
  r.k = k;
  std::vector<Point> pts;
  for (const auto& u : param_rule.nodes) pts.push_back(S.position(u));
  std::vector<ZonoidSectionEstimate> copies;
  std::vector<ZonoidSectionEstimate> pulled;
  for (int j = 0; j < k; ++j) {
    SectionOptions o = opt.section;
    o.stream = derive_stream(opt.section.stream, {static_cast<std::uint64_t>(j)});
    copies.push_back(estimate_section_at(model, pts, param_rule.weights, o));
    pulled.push_back(pullback_section(copies.back(), S, param_rule));
  }
  ZonoidSectionEstimate w = pulled[0];
  for (int j = 1; j < k; ++j) w = wedge_sections(w, pulled[static_cast<std::size_t>(j)], opt.section.threads);
  r.lhs = kac_rice_volume(w);

  const double c = factorial(k) * unit_ball_volume(k);
  const ZonoidSectionEstimate& first = copies[0];
  double rhs = 0.0, var = 0.0;
  for (std::size_t i = 0; i < param_rule.size(); ++i) {
    const Point& u = param_rule.nodes[i];
    const Point p = first.nodes[i].point;
    const Eigen::MatrixXd J = S.jacobian(u);
    Eigen::MatrixXd D(J.rows(), J.cols());
    for (Eigen::Index a = 0; a < J.cols(); ++a) D.col(a) = first.chart.frame_vector(p, J.col(a));
    const MultiVector v = wedge_vectors(Eigen::MatrixXd(D.transpose()));
    const Zonotope zeta = first.nodes[i].zonotope.centered();
    const double wgt = param_rule.weights[i];
    if (v.is_zero(0.0)) continue;
    const double ht = holmes_thompson_density(zeta, v);
    rhs += wgt * c * ht;
    r.algebraic_rhs += wgt * c * ht;
    const Zonotope pulled_body = linear_image(zeta, D.transpose());
    r.algebraic_lhs += wgt * (k == 1 ? pulled_body.length() : intrinsic_volume(pulled_body, k) * factorial(k));
    if (k == 1) {
      const double se = functional_standard_error(first.nodes[i], [&D](std::span<const double> g) {
        double d = 0.0;
        for (std::size_t a = 0; a < g.size(); ++a) d += g[a] * D(static_cast<Eigen::Index>(a), 0);
        return std::abs(d);
      });
      var += wgt * wgt * se * se;
    }
  }
  r.rhs.value = rhs;
  if (k == 1) {
    r.rhs.standard_error = std::sqrt(var);
  } else {
    // The HT integrand is a U-statistic of order k in the samples; its leading-order variance
    // comes from the first Hoeffding projection, estimated here by per-node batch splitting.
    double bvar = 0.0;
    for (std::size_t i = 0; i < param_rule.size(); ++i) {
      const auto& node = first.nodes[i];
      if (node.groups.empty()) continue;
      const Point& u = param_rule.nodes[i];
      const Eigen::MatrixXd J = S.jacobian(u);
      Eigen::MatrixXd D(J.rows(), J.cols());
      for (Eigen::Index a = 0; a < J.cols(); ++a) D.col(a) = first.chart.frame_vector(node.point, J.col(a));
      const Zonotope P = linear_image(node.zonotope.centered(), D.transpose());
      const std::size_t n = P.size();
      constexpr std::size_t batches = 8;
      if (n < batches * static_cast<std::size_t>(k)) continue;
      std::vector<double> vals;
      for (std::size_t b = 0; b < batches; ++b) {
        Zonotope sub(P.ambient_dim(), 1);
        for (std::size_t g = b * n / batches; g < (b + 1) * n / batches; ++g) sub.add_generator(P.weight(g) * static_cast<double>(batches), P.generator(g));
        vals.push_back(param_rule.weights[i] * c * intrinsic_volume(sub, k) / unit_ball_volume(k));
      }
      bvar += detail::group_variance(vals);
    }
    r.rhs.standard_error = std::sqrt(bvar);
  }
  return r;
}

}  // namespace zonoid
