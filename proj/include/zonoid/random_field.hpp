#pragma once

#include "zonoid/error.hpp"
#include "zonoid/exterior.hpp"
#include "zonoid/manifold.hpp"
#include "zonoid/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace zonoid {

// values: k×n with X(p) = values·c; differentials: (k·m)×n with row i·m + j holding ∂_j Xⁱ.
struct Jet {
  Eigen::MatrixXd values;
  Eigen::MatrixXd differentials;
};

struct FieldBasis {
  std::string name;
  int k = 1;  // codomain dimension
  int m = 1;  // chart dimension
  int n = 0;  // number of basis functions
  std::function<Jet(const Point&)> evaluate;
};

struct GaussianLaw {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct StudentTLaw {
  double dof = 5.0;
  Eigen::VectorXd location;
  Eigen::MatrixXd scale;
};

// X = Σ cᵢfᵢ − λ with fixed coefficients c and a random shift λ ∈ ℝᵏ.
struct ShiftedLaw {
  Eigen::VectorXd coefficients;
  std::variant<GaussianLaw, StudentTLaw> shift;
};

using CoefficientLaw = std::variant<GaussianLaw, StudentTLaw, ShiftedLaw>;

namespace detail {

struct Factorized {
  Eigen::MatrixXd factor;   // LLᵗ = Σ
  Eigen::MatrixXd inverse;  // empty when Σ is singular
  double log_det = 0.0;
};

inline Factorized factorize(const Eigen::MatrixXd& S, const std::string& what) {
  if (S.rows() != S.cols()) throw std::invalid_argument(what + ": covariance must be square");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(what + ": covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError(what + ": eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.size() > 0 && ev.minCoeff() < -1e-10 * scale)
    throw NumericalError(what + ": covariance is not positive semidefinite (not factorizable)");
  Factorized f;
  f.factor = es.eigenvectors() * ev.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  if (ev.size() > 0 && ev.minCoeff() > 1e-12 * scale) {
    f.inverse = es.eigenvectors() * ev.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    f.log_det = ev.array().log().sum();
  }
  return f;
}

inline double log_gaussian_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean, const Factorized& f) {
  const Eigen::VectorXd d = x - mean;
  const double q = d.dot(f.inverse * d);
  return -0.5 * (static_cast<double>(x.size()) * std::log(2.0 * std::numbers::pi) + f.log_det + q);
}

inline double log_student_density(const Eigen::VectorXd& x, const Eigen::VectorXd& loc, double nu, const Factorized& f) {
  const double n = static_cast<double>(x.size());
  const Eigen::VectorXd d = x - loc;
  const double q = d.dot(f.inverse * d);
  return std::lgamma(0.5 * (nu + n)) - std::lgamma(0.5 * nu) - 0.5 * n * std::log(nu * std::numbers::pi) -
         0.5 * f.log_det - 0.5 * (nu + n) * std::log1p(q / nu);
}

}  // namespace detail

class RandomFieldModel {
 public:
  RandomFieldModel(Chart chart, FieldBasis basis, CoefficientLaw law)
      : chart_(std::move(chart)), basis_(std::move(basis)), law_(std::move(law)) {
    if (basis_.m != chart_.dim) throw std::invalid_argument("basis dimension does not match the chart");
    if (!basis_.evaluate) throw std::invalid_argument("basis has no evaluator");
    auto check_gaussian = [](const GaussianLaw& g, int n, const std::string& what) {
      if (g.covariance.rows() != n) throw std::invalid_argument(what + ": covariance must be " + std::to_string(n) + "x" + std::to_string(n));
      if (g.mean.size() != 0 && g.mean.size() != n) throw std::invalid_argument(what + ": mean has wrong length");
    };
    auto check_student = [](const StudentTLaw& t, int n, int k, const std::string& what) {
      if (t.scale.rows() != n) throw std::invalid_argument(what + ": scale must be " + std::to_string(n) + "x" + std::to_string(n));
      if (t.location.size() != 0 && t.location.size() != n) throw std::invalid_argument(what + ": location has wrong length");
      if (!(t.dof > k)) throw std::invalid_argument(what + ": degrees of freedom must exceed the codomain dimension");
    };
    if (auto* g = std::get_if<GaussianLaw>(&law_)) {
      check_gaussian(*g, basis_.n, "gaussian law");
      if (g->mean.size() == 0) g->mean = Eigen::VectorXd::Zero(basis_.n);
      fac_ = detail::factorize(g->covariance, "gaussian law");
    } else if (auto* t = std::get_if<StudentTLaw>(&law_)) {
      check_student(*t, basis_.n, basis_.k, "student-t law");
      if (t->location.size() == 0) t->location = Eigen::VectorXd::Zero(basis_.n);
      fac_ = detail::factorize(t->scale, "student-t law");
      if (fac_.inverse.size() == 0) throw std::invalid_argument("student-t law: scale matrix must be positive definite");
    } else {
      auto& s = std::get<ShiftedLaw>(law_);
      if (s.coefficients.size() != basis_.n) throw std::invalid_argument("shifted law: coefficient count must match the basis");
      if (auto* sg = std::get_if<GaussianLaw>(&s.shift)) {
        check_gaussian(*sg, basis_.k, "shift law");
        if (sg->mean.size() == 0) sg->mean = Eigen::VectorXd::Zero(basis_.k);
        fac_ = detail::factorize(sg->covariance, "shift law");
        if (fac_.inverse.size() == 0) throw std::invalid_argument("shift law: covariance must be positive definite");
      } else {
        auto& st = std::get<StudentTLaw>(s.shift);
        check_student(st, basis_.k, 0, "shift law");
        if (st.location.size() == 0) st.location = Eigen::VectorXd::Zero(basis_.k);
        fac_ = detail::factorize(st.scale, "shift law");
        if (fac_.inverse.size() == 0) throw std::invalid_argument("shift law: scale must be positive definite");
      }
    }
  }

  const Chart& chart() const { return chart_; }
  const FieldBasis& basis() const { return basis_; }
  const CoefficientLaw& law() const { return law_; }
  int k() const { return basis_.k; }
  int m() const { return basis_.m; }
  // Length of the coefficient vector c (a shifted model appends λ).
  int n() const { return basis_.n + (is_shifted() ? basis_.k : 0); }
  bool is_gaussian() const { return std::holds_alternative<GaussianLaw>(law_); }
  bool is_student() const { return std::holds_alternative<StudentTLaw>(law_); }
  bool is_shifted() const { return std::holds_alternative<ShiftedLaw>(law_); }
  const detail::Factorized& factorization() const { return fac_; }

  Jet jet(const Point& p) const {
    chart_.require_contains(p);
    return jet_unchecked(p);
  }

  Jet jet_unchecked(const Point& p) const {
    Jet j = basis_.evaluate(p);
    if (!is_shifted()) return j;
    const int k = basis_.k, m = basis_.m, n = basis_.n;
    Jet out;
    out.values = Eigen::MatrixXd::Zero(k, n + k);
    out.values.leftCols(n) = j.values;
    out.values.rightCols(k) = -Eigen::MatrixXd::Identity(k, k);
    out.differentials = Eigen::MatrixXd::Zero(k * m, n + k);
    out.differentials.leftCols(n) = j.differentials;
    return out;
  }

  // Log-density of the coefficient vector (Gaussian with invertible covariance, or Student-t).
  double log_coefficient_density(const Eigen::VectorXd& c) const {
    if (auto* g = std::get_if<GaussianLaw>(&law_)) {
      if (fac_.inverse.size() == 0) throw NumericalError("coefficient density needs an invertible covariance");
      return detail::log_gaussian_density(c, g->mean, fac_);
    }
    if (auto* t = std::get_if<StudentTLaw>(&law_)) return detail::log_student_density(c, t->location, t->dof, fac_);
    throw std::invalid_argument("shifted models have no coefficient density");
  }

  // Density of the shift λ (shifted models only).
  double shift_density(const Eigen::VectorXd& x) const {
    const auto& s = std::get<ShiftedLaw>(law_);
    if (auto* g = std::get_if<GaussianLaw>(&s.shift)) return std::exp(detail::log_gaussian_density(x, g->mean, fac_));
    const auto& t = std::get<StudentTLaw>(s.shift);
    return std::exp(detail::log_student_density(x, t.location, t.dof, fac_));
  }

  Eigen::VectorXd sample(RandomStream& rng) const {
    auto gaussian = [&](const Eigen::VectorXd& mean, int n) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z(i) = rng.normal();
      return Eigen::VectorXd(mean + fac_.factor * z);
    };
    auto student = [&](const StudentTLaw& t, int n) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z(i) = rng.normal();
      const double w = rng.chi_squared(t.dof);
      return Eigen::VectorXd(t.location + fac_.factor * z * std::sqrt(t.dof / w));
    };
    if (auto* g = std::get_if<GaussianLaw>(&law_)) return gaussian(g->mean, basis_.n);
    if (auto* t = std::get_if<StudentTLaw>(&law_)) return student(*t, basis_.n);
    const auto& s = std::get<ShiftedLaw>(law_);
    Eigen::VectorXd c(basis_.n + basis_.k);
    c.head(basis_.n) = s.coefficients;
    if (auto* sg = std::get_if<GaussianLaw>(&s.shift))
      c.tail(basis_.k) = gaussian(sg->mean, basis_.k);
    else
      c.tail(basis_.k) = student(std::get<StudentTLaw>(s.shift), basis_.k);
    return c;
  }

 private:
  Chart chart_;
  FieldBasis basis_;
  CoefficientLaw law_;
  detail::Factorized fac_;
};

inline Eigen::VectorXd sample_field(const RandomFieldModel& model, std::uint64_t seed, std::uint64_t stream = 0) {
  RandomStream rng(seed, stream);
  return model.sample(rng);
}

inline Jet jet(const RandomFieldModel& model, const Point& p) { return model.jet(p); }

// ---------------------------------------------------------------------------------------------
// Conditioning on X(p) = 0.

class ConditionedJet {
 public:
  ConditionedJet(int k, int m, double density, Eigen::VectorXd mean, Eigen::MatrixXd factor)
      : k_(k), m_(m), density_(density), mean_(std::move(mean)), factor_(std::move(factor)) {}

  int k() const { return k_; }
  int m() const { return m_; }
  double density_at_zero() const { return density_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  Eigen::MatrixXd covariance() const { return factor_ * factor_.transpose(); }
  bool deterministic() const { return factor_.size() == 0 || factor_.cwiseAbs().maxCoeff() == 0.0; }

  // n draws of vec(d_pX) given X(p) = 0, one per row (entry i·m + j is ∂_j Xⁱ).
  Eigen::MatrixXd draw(RandomStream& rng, std::size_t n) const {
    const auto km = static_cast<Eigen::Index>(k_ * m_);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), km);
    Eigen::VectorXd z(factor_.cols());
    for (std::size_t s = 0; s < n; ++s) {
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
      out.row(static_cast<Eigen::Index>(s)) = (mean_ + factor_ * z).transpose();
    }
    return out;
  }

 private:
  int k_, m_;
  double density_;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd factor_;
};

inline std::string point_string(const Point& p) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < p.size(); ++i) s += (i ? ", " : "") + std::to_string(p(i));
  return s + ")";
}

// Exact conditional law for Gaussian models; the closed form for shifted models.
inline ConditionedJet condition_at_zero(const RandomFieldModel& model, const Point& p) {
  const int k = model.k(), m = model.m();
  if (model.is_student())
    throw std::invalid_argument("condition_at_zero: Student-t models need condition_at_zero_mc");
  if (model.is_shifted()) {
    // X = φ − λ vanishes iff λ = φ(p); then d_pX = d_pφ.
    const auto& s = std::get<ShiftedLaw>(model.law());
    const Jet j = model.basis().evaluate(p);
    const Eigen::VectorXd phi = j.values * s.coefficients;
    const Eigen::VectorXd dphi = j.differentials * s.coefficients;
    return ConditionedJet(k, m, model.shift_density(phi), dphi, Eigen::MatrixXd::Zero(k * m, 0));
  }
  const auto& g = std::get<GaussianLaw>(model.law());
  const Jet j = model.jet(p);
  const Eigen::MatrixXd& A = j.values;
  const Eigen::MatrixXd& B = j.differentials;
  const Eigen::MatrixXd& S = g.covariance;
  const Eigen::MatrixXd CX = A * S * A.transpose();
  const Eigen::MatrixXd CDX = B * S * A.transpose();
  const Eigen::MatrixXd CD = B * S * B.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(CX);
  if (es.eigenvalues().minCoeff() <= 1e-12)
    throw NumericalError("degenerate Cov(X(p)) at p=" + point_string(p) + " (nondegeneracy violated)");
  const Eigen::MatrixXd CXinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::VectorXd muX = A * g.mean;
  const Eigen::VectorXd muD = B * g.mean;
  const double quad = muX.dot(CXinv * muX);
  const double density = std::pow(2.0 * std::numbers::pi, -0.5 * k) / std::sqrt(es.eigenvalues().prod()) * std::exp(-0.5 * quad);
  const Eigen::VectorXd mean = muD - CDX * (CXinv * muX);
  const Eigen::MatrixXd cov = CD - CDX * CXinv * CDX.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ec(0.5 * (cov + cov.transpose()));
  const Eigen::MatrixXd factor = ec.eigenvectors() * ec.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  return ConditionedJet(k, m, density, mean, factor);
}

struct ImportanceOptions {
  // Isotropic proposal scale on the fiber; 0 selects the smallest isotropic scale that
  // dominates the fiber covariance.
  double proposal_scale = 0.0;
  // Effective sample size fraction below which `low_ess` is set.
  double ess_warning_fraction = 0.05;
};

// Weighted draws of d_pX given X(p) = 0 from importance sampling over the fiber ker A(p).
// Σ weights estimates ρ_{X(p)}(0); Σ weights·g(gradient) estimates E{g(d_pX) | X(p)=0}·ρ_{X(p)}(0).
struct ImportanceConditionedJet {
  int k = 1, m = 1;
  double density_at_zero = 0.0;
  double density_standard_error = 0.0;
  double effective_sample_size = 0.0;
  bool low_ess = false;
  Eigen::MatrixXd gradients;  // n × (k·m)
  Eigen::VectorXd weights;    // n
};

inline ImportanceConditionedJet condition_at_zero_mc(const RandomFieldModel& model, const Point& p, std::size_t n_samples,
                                                     RandomStream& rng, const ImportanceOptions& opts = {}) {
  if (n_samples == 0) throw std::invalid_argument("condition_at_zero_mc: n_samples must be positive");
  if (model.is_shifted()) throw std::invalid_argument("condition_at_zero_mc: shifted models are handled in closed form");
  const int k = model.k(), m = model.m(), n = model.n();
  const Jet j = model.jet(p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(j.values, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() < k || sv(k - 1) <= 1e-12 * std::max(1.0, sv(0)))
    throw NumericalError("condition_at_zero_mc: evaluation map is not surjective at p=" + point_string(p));
  const double jacobian = sv.head(k).prod();
  const int d = n - k;
  const Eigen::MatrixXd N = svd.matrixV().rightCols(d);

  ImportanceConditionedJet out;
  out.k = k;
  out.m = m;
  out.gradients.resize(static_cast<Eigen::Index>(n_samples), k * m);
  out.weights.resize(static_cast<Eigen::Index>(n_samples));
  if (d == 0) {
    const double w = std::exp(model.log_coefficient_density(Eigen::VectorXd::Zero(n))) / jacobian;
    out.gradients.setZero();
    out.weights.setConstant(w / static_cast<double>(n_samples));
    out.density_at_zero = w;
    out.effective_sample_size = static_cast<double>(n_samples);
    return out;
  }

  // Restriction of the coefficient law to the fiber: location and shape.
  const auto& fac = model.factorization();
  if (fac.inverse.size() == 0) throw NumericalError("condition_at_zero_mc: coefficient law must have a density");
  const Eigen::VectorXd loc = model.is_gaussian() ? std::get<GaussianLaw>(model.law()).mean
                                                  : std::get<StudentTLaw>(model.law()).location;
  const Eigen::MatrixXd P = N.transpose() * fac.inverse * N;
  const Eigen::MatrixXd Cf = P.inverse();
  const Eigen::VectorXd y0 = Cf * (N.transpose() * fac.inverse * loc);
  double s = opts.proposal_scale;
  if (s <= 0.0) s = std::sqrt(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Cf).eigenvalues().maxCoeff());
  const bool heavy = model.is_student();
  const double nu = heavy ? std::get<StudentTLaw>(model.law()).dof : 0.0;
  const double dd = static_cast<double>(d);
  const double log_norm = heavy ? std::lgamma(0.5 * (nu + dd)) - std::lgamma(0.5 * nu) - 0.5 * dd * std::log(nu * std::numbers::pi) - dd * std::log(s)
                                : -0.5 * dd * std::log(2.0 * std::numbers::pi) - dd * std::log(s);

  Eigen::VectorXd z(d);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (int a = 0; a < d; ++a) z(a) = rng.normal();
    double r2;
    Eigen::VectorXd y;
    if (heavy) {
      const double w = rng.chi_squared(nu);
      y = y0 + s * std::sqrt(nu / w) * z;
      r2 = (y - y0).squaredNorm() / (s * s);
      r2 = log_norm - 0.5 * (nu + dd) * std::log1p(r2 / nu);
    } else {
      y = y0 + s * z;
      r2 = log_norm - 0.5 * z.squaredNorm();
    }
    const Eigen::VectorXd c = N * y;
    const double w = std::exp(model.log_coefficient_density(c) - r2) / jacobian;
    out.weights(static_cast<Eigen::Index>(i)) = w / static_cast<double>(n_samples);
    out.gradients.row(static_cast<Eigen::Index>(i)) = (j.differentials * c).transpose();
    sum += w;
    sum2 += w * w;
  }
  const double nn = static_cast<double>(n_samples);
  out.density_at_zero = sum / nn;
  const double var = std::max(0.0, sum2 / nn - out.density_at_zero * out.density_at_zero);
  out.density_standard_error = std::sqrt(var / nn);
  out.effective_sample_size = (sum2 > 0.0) ? sum * sum / sum2 : 0.0;
  out.low_ess = out.effective_sample_size < opts.ess_warning_fraction * nn;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Basis families.

// Monomials of degree d on Sᵐ ⊂ ℝᵐ⁺¹ in the hyperspherical chart, each multiplied by √(d!/α!):
// with iid standard coefficients this is the Kostlan ensemble; d = 1 is the linear field ⟨γ,p⟩.
inline FieldBasis kostlan_basis(int m, int d) {
  if (d < 1) throw std::invalid_argument("kostlan: degree must be at least 1");
  const Chart chart = sphere_chart(m);
  std::vector<std::vector<int>> alphas;
  std::vector<int> a(static_cast<std::size_t>(m) + 1, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == m) {
      a[static_cast<std::size_t>(pos)] = left;
      alphas.push_back(a);
      return;
    }
    for (int v = left; v >= 0; --v) {
      a[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, d);
  std::vector<double> weight;
  for (const auto& al : alphas) {
    double lw = std::lgamma(d + 1.0);
    for (int e : al) lw -= std::lgamma(e + 1.0);
    weight.push_back(std::exp(0.5 * lw));
  }
  FieldBasis b;
  b.name = "kostlan(" + std::to_string(d) + ")";
  b.k = 1;
  b.m = m;
  b.n = static_cast<int>(alphas.size());
  b.evaluate = [chart, alphas, weight, m](const Point& p) {
    const Eigen::VectorXd x = chart.embedding(p);
    const Eigen::MatrixXd J = chart.embedding_jacobian(p);
    Jet j;
    const auto n = static_cast<Eigen::Index>(alphas.size());
    j.values.resize(1, n);
    j.differentials = Eigen::MatrixXd::Zero(m, n);
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto& al = alphas[static_cast<std::size_t>(t)];
      double v = 1.0;
      for (int i = 0; i <= m; ++i) v *= std::pow(x(i), al[static_cast<std::size_t>(i)]);
      j.values(0, t) = weight[static_cast<std::size_t>(t)] * v;
      for (int i = 0; i <= m; ++i) {
        const int e = al[static_cast<std::size_t>(i)];
        if (e == 0) continue;
        double dv = e * std::pow(x(i), e - 1);
        for (int l = 0; l <= m; ++l)
          if (l != i) dv *= std::pow(x(l), al[static_cast<std::size_t>(l)]);
        for (int c = 0; c < m; ++c) j.differentials(c, t) += weight[static_cast<std::size_t>(t)] * dv * J(i, c);
      }
    }
    return j;
  };
  return b;
}

// Circle trigonometric basis: sigma[0]·1 and sigma[j]·(cos jθ, sin jθ); zero sigmas are skipped.
inline FieldBasis fourier_basis(const std::vector<double>& sigma) {
  std::vector<std::pair<int, double>> terms;  // frequency, sigma; frequency 0 appears once
  for (std::size_t j = 0; j < sigma.size(); ++j)
    if (sigma[j] != 0.0) terms.emplace_back(static_cast<int>(j), sigma[j]);
  if (terms.empty()) throw std::invalid_argument("fourier: all amplitudes are zero");
  int n = 0;
  for (auto [f, s] : terms) n += (f == 0) ? 1 : 2;
  FieldBasis b;
  b.name = "fourier";
  b.k = 1;
  b.m = 1;
  b.n = n;
  b.evaluate = [terms, n](const Point& p) {
    Jet j;
    j.values.resize(1, n);
    j.differentials.resize(1, n);
    int c = 0;
    for (auto [f, s] : terms) {
      if (f == 0) {
        j.values(0, c) = s;
        j.differentials(0, c++) = 0.0;
        continue;
      }
      const double a = f * p(0);
      j.values(0, c) = s * std::cos(a);
      j.differentials(0, c++) = -s * f * std::sin(a);
      j.values(0, c) = s * std::sin(a);
      j.differentials(0, c++) = s * f * std::cos(a);
    }
    return j;
  };
  return b;
}

// Trigonometric fields on the flat torus [0,1)ᵈ: σ·cos(2π⟨f,x⟩), σ·sin(2π⟨f,x⟩) per frequency f.
struct TorusMode {
  std::vector<int> frequency;
  double sigma;
};

inline FieldBasis trig_torus_basis(int d, std::vector<TorusMode> modes) {
  int n = 0;
  for (const auto& md : modes) {
    if (static_cast<int>(md.frequency.size()) != d) throw std::invalid_argument("torus mode has wrong dimension");
    const bool zero = std::all_of(md.frequency.begin(), md.frequency.end(), [](int f) { return f == 0; });
    n += zero ? 1 : 2;
  }
  if (n == 0) throw std::invalid_argument("torus basis needs at least one mode");
  FieldBasis b;
  b.name = "trig";
  b.k = 1;
  b.m = d;
  b.n = n;
  b.evaluate = [modes, n, d](const Point& p) {
    Jet j;
    j.values.resize(1, n);
    j.differentials = Eigen::MatrixXd::Zero(d, n);
    int c = 0;
    for (const auto& md : modes) {
      double a = 0.0;
      bool zero = true;
      for (int i = 0; i < d; ++i) {
        a += md.frequency[static_cast<std::size_t>(i)] * p(i);
        zero = zero && md.frequency[static_cast<std::size_t>(i)] == 0;
      }
      a *= 2.0 * std::numbers::pi;
      if (zero) {
        j.values(0, c++) = md.sigma;
        continue;
      }
      const double ca = std::cos(a), sa = std::sin(a);
      j.values(0, c) = md.sigma * ca;
      j.values(0, c + 1) = md.sigma * sa;
      for (int i = 0; i < d; ++i) {
        const double g = 2.0 * std::numbers::pi * md.frequency[static_cast<std::size_t>(i)] * md.sigma;
        j.differentials(i, c) = -g * sa;
        j.differentials(i, c + 1) = g * ca;
      }
      c += 2;
    }
    return j;
  };
  return b;
}

// Isotropic trig field on [0,1)ᵈ: all frequency vectors with max |f_i| ≤ degree, one of each ±f pair,
// amplitude exp(−|f|²/(2·bandwidth²)) (bandwidth 0: flat). A positive spectral weight on each axis
// gives a nondegenerate field.
inline FieldBasis trig_torus_basis(int d, int degree, double bandwidth = 0.0,
                                   const std::vector<double>& anisotropy = {}) {
  std::vector<TorusMode> modes;
  std::vector<int> f(static_cast<std::size_t>(d), -degree);
  for (;;) {
    // Keep f if its first nonzero entry is positive.
    auto nz = std::find_if(f.begin(), f.end(), [](int v) { return v != 0; });
    if (nz != f.end() && *nz > 0) {
      double r2 = 0.0;
      for (int i = 0; i < d; ++i) {
        const double s = anisotropy.empty() ? 1.0 : anisotropy[static_cast<std::size_t>(i)];
        r2 += (f[static_cast<std::size_t>(i)] * s) * (f[static_cast<std::size_t>(i)] * s);
      }
      const double amp = bandwidth > 0.0 ? std::exp(-r2 / (4.0 * bandwidth * bandwidth)) : 1.0;
      modes.push_back({f, amp});
    }
    int i = d - 1;
    while (i >= 0 && f[static_cast<std::size_t>(i)] == degree) f[static_cast<std::size_t>(i--)] = -degree;
    if (i < 0) break;
    ++f[static_cast<std::size_t>(i)];
  }
  return trig_torus_basis(d, std::move(modes));
}

// Real spherical harmonics on the S² chart, degree l scaled by sigma[l], normalized so that
// Σ_m Y_lm² = 1 pointwise (each degree contributes variance sigma[l]²).
inline FieldBasis spherical_harmonics_basis(const std::vector<double>& sigma) {
  const int lmax = static_cast<int>(sigma.size()) - 1;
  if (lmax < 0) throw std::invalid_argument("spherical harmonics: need at least one degree");
  std::vector<std::pair<int, int>> lm;
  for (int l = 0; l <= lmax; ++l) {
    if (sigma[static_cast<std::size_t>(l)] == 0.0) continue;
    for (int m = -l; m <= l; ++m) lm.emplace_back(l, m);
  }
  if (lm.empty()) throw std::invalid_argument("spherical harmonics: all amplitudes are zero");
  FieldBasis b;
  b.name = "spherical_harmonics";
  b.k = 1;
  b.m = 2;
  b.n = static_cast<int>(lm.size());
  b.evaluate = [lm, sigma, lmax](const Point& p) {
    const double th = p(0), ph = p(1);
    const double x = std::cos(th), st = std::sin(th);
    // P[l][m] = P_l^m(x) without the Condon-Shortley phase.
    std::vector<std::vector<double>> P(static_cast<std::size_t>(lmax) + 2, std::vector<double>(static_cast<std::size_t>(lmax) + 2, 0.0));
    for (int m = 0; m <= lmax; ++m) {
      double pmm = 1.0;
      for (int i = 1; i <= m; ++i) pmm *= (2.0 * i - 1.0) * st;
      P[static_cast<std::size_t>(m)][static_cast<std::size_t>(m)] = pmm;
      if (m + 1 <= lmax) P[static_cast<std::size_t>(m) + 1][static_cast<std::size_t>(m)] = x * (2.0 * m + 1.0) * pmm;
      for (int l = m + 2; l <= lmax; ++l)
        P[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)] =
            ((2.0 * l - 1.0) * x * P[static_cast<std::size_t>(l) - 1][static_cast<std::size_t>(m)] -
             (l + m - 1.0) * P[static_cast<std::size_t>(l) - 2][static_cast<std::size_t>(m)]) / (l - m);
    }
    Jet j;
    const auto n = static_cast<Eigen::Index>(lm.size());
    j.values.resize(1, n);
    j.differentials.resize(2, n);
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto [l, mm] = lm[static_cast<std::size_t>(t)];
      const int m = std::abs(mm);
      const double K = std::exp(0.5 * (std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0))) * (m ? std::numbers::sqrt2 : 1.0) *
                       sigma[static_cast<std::size_t>(l)];
      const double plm = P[static_cast<std::size_t>(l)][static_cast<std::size_t>(m)];
      const double plm1 = (l - 1 >= m) ? P[static_cast<std::size_t>(l) - 1][static_cast<std::size_t>(m)] : 0.0;
      // dP/dθ = −(1/sinθ)·[(l+m)P_{l−1}^m − l·x·P_l^m]
      const double dth = (st > 1e-14) ? -((l + m) * plm1 - l * x * plm) / st : 0.0;
      const double trig = (mm > 0) ? std::cos(m * ph) : (mm < 0 ? std::sin(m * ph) : 1.0);
      const double dtrig = (mm > 0) ? -m * std::sin(m * ph) : (mm < 0 ? m * std::cos(m * ph) : 0.0);
      j.values(0, t) = K * plm * trig;
      j.differentials(0, t) = K * dth * trig;
      j.differentials(1, t) = K * plm * dtrig;
    }
    return j;
  };
  return b;
}

// 1, x, …, x^degree on an interval chart.
inline FieldBasis monomial_basis(int degree) {
  if (degree < 0) throw std::invalid_argument("monomial basis: negative degree");
  FieldBasis b;
  b.name = "monomial";
  b.k = 1;
  b.m = 1;
  b.n = degree + 1;
  b.evaluate = [degree](const Point& p) {
    Jet j;
    j.values.resize(1, degree + 1);
    j.differentials.resize(1, degree + 1);
    for (int e = 0; e <= degree; ++e) {
      j.values(0, e) = std::pow(p(0), e);
      j.differentials(0, e) = e == 0 ? 0.0 : e * std::pow(p(0), e - 1);
    }
    return j;
  };
  return b;
}

// A single deterministic function φ with its differential, as a one-element basis.
inline FieldBasis function_basis(int k, int m, std::string name,
                                 std::function<Eigen::VectorXd(const Point&)> value,
                                 std::function<Eigen::MatrixXd(const Point&)> differential) {
  FieldBasis b;
  b.name = std::move(name);
  b.k = k;
  b.m = m;
  b.n = 1;
  b.evaluate = [k, m, value, differential](const Point& p) {
    Jet j;
    j.values = value(p);
    const Eigen::MatrixXd D = differential(p);  // k×m
    j.differentials.resize(k * m, 1);
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < m; ++c) j.differentials(i * m + c, 0) = D(i, c);
    return j;
  };
  return b;
}

inline GaussianLaw standard_gaussian(int n) { return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Identity(n, n)}; }

inline RandomFieldModel gaussian_model(const Chart& chart, FieldBasis basis) {
  const int n = basis.n;
  return RandomFieldModel(chart, std::move(basis), standard_gaussian(n));
}

// 𝕪(p) = ⟨γ, p⟩ on Sᵐ with γ ~ N(0, I_{m+1}); m = 1 is the circle.
inline RandomFieldModel normal_field(int sphere_dim) {
  if (sphere_dim < 1 || sphere_dim > 7) throw std::invalid_argument("normal_field: unsupported sphere dimension");
  return gaussian_model(sphere_chart(sphere_dim), kostlan_basis(sphere_dim, 1));
}

inline RandomFieldModel normal_field(const std::string& manifold) {
  if (manifold == "circle") return normal_field(1);
  if (manifold.rfind("sphere", 0) == 0 && manifold.size() > 6) return normal_field(std::stoi(manifold.substr(6)));
  throw std::invalid_argument("normal_field: unsupported manifold '" + manifold + "'");
}

// Random level set φ − λ with λ ~ N(mean, variance) (scalar case).
inline RandomFieldModel level_set_model(const Chart& chart, std::function<double(const Point&)> phi,
                                        std::function<Eigen::VectorXd(const Point&)> dphi, double mean = 0.0,
                                        double variance = 1.0) {
  auto basis = function_basis(
      1, chart.dim, "level_set", [phi](const Point& p) { return Eigen::VectorXd::Constant(1, phi(p)); },
      [dphi](const Point& p) -> Eigen::MatrixXd { return dphi(p).transpose(); });
  ShiftedLaw law{Eigen::VectorXd::Ones(1), GaussianLaw{Eigen::VectorXd::Constant(1, mean), Eigen::MatrixXd::Constant(1, 1, variance)}};
  return RandomFieldModel(chart, std::move(basis), law);
}

inline Chart box_chart(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper, const std::vector<bool>& periodic) {
  Chart c;
  c.name = "parameters";
  c.dim = static_cast<int>(lower.size());
  c.lower = lower;
  c.upper = upper;
  c.periodic = periodic;
  const int d = c.dim;
  c.metric = [d](const Point&) { return Eigen::MatrixXd::Identity(d, d); };
  c.coframe = [d](const Point&) { return Eigen::MatrixXd::Identity(d, d); };
  c.normalize = [c](const Point& p) { return detail::wrap_periodic(c, p); };
  return c;
}

// X∘ι on the parameter box of an embedding; same coefficient law.
inline RandomFieldModel pullback_model(const RandomFieldModel& model, const Embedding& e) {
  const FieldBasis base = model.basis();
  const int k = base.k, m = base.m, d = e.dim;
  FieldBasis b;
  b.name = base.name + "|pullback";
  b.k = k;
  b.m = d;
  b.n = base.n;
  b.evaluate = [base, e, k, m, d](const Point& u) {
    const Point p = e.position(u);
    const Eigen::MatrixXd J = e.jacobian(u);  // m×d
    Jet j = base.evaluate(p);
    Eigen::MatrixXd D(k * d, j.differentials.cols());
    for (int i = 0; i < k; ++i) D.middleRows(i * d, d) = J.transpose() * j.differentials.middleRows(i * m, m);
    j.differentials = std::move(D);
    return j;
  };
  return RandomFieldModel(box_chart(e.lower, e.upper, e.periodic), std::move(b), model.law());
}

}  // namespace zonoid
