#pragma once

#include "zonoid/exterior.hpp"
#include "zonoid/rng.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

// K = Σ wᵢ·underline(vᵢ) + ½{e}, where underline(v) = ½[−v, v] and e is the nigiro.
class Zonotope {
 public:
  Zonotope() : Zonotope(1, 1) {}
  Zonotope(int ambient_dim, int grade)
      : m_(ambient_dim), k_(grade), dim_(binomial(ambient_dim, grade)), nigiro_(ambient_dim, grade) {}

  int ambient_dim() const { return m_; }
  int grade() const { return k_; }
  std::size_t coord_dim() const { return dim_; }
  std::size_t size() const { return weights_.size(); }
  bool empty() const { return weights_.empty(); }

  double weight(std::size_t i) const { return weights_[i]; }
  std::span<const double> generator(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  MultiVector generator_vector(std::size_t i) const {
    auto g = generator(i);
    return MultiVector(m_, k_, std::vector<double>(g.begin(), g.end()));
  }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& flat_coords() const { return coords_; }
  const MultiVector& nigiro() const { return nigiro_; }

  void reserve(std::size_t n) {
    weights_.reserve(n);
    coords_.reserve(n * dim_);
  }

  void add_generator(double w, std::span<const double> v) {
    if (!(w >= 0.0)) throw std::invalid_argument("generator weight must be nonnegative");
    if (v.size() != dim_) throw std::invalid_argument("generator has wrong coordinate count");
    weights_.push_back(w);
    coords_.insert(coords_.end(), v.begin(), v.end());
  }
  void add_generator(double w, const MultiVector& v) {
    check_space(v);
    add_generator(w, v.coords());
  }

  void set_nigiro(MultiVector e) {
    check_space(e);
    nigiro_ = std::move(e);
  }

  void scale_weights(double t) {
    for (double& w : weights_) w *= t;
  }

  double support(std::span<const double> u) const {
    if (u.size() != dim_) throw std::invalid_argument("support: direction has wrong coordinate count");
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const double* g = coords_.data() + i * dim_;
      double d = 0.0;
      for (std::size_t c = 0; c < dim_; ++c) d += g[c] * u[c];
      s += weights_[i] * std::abs(d);
    }
    double e = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) e += nigiro_[c] * u[c];
    return 0.5 * s + 0.5 * e;
  }
  double support(const MultiVector& u) const {
    check_space(u);
    return support(u.coords());
  }

  double length() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * generator_norm(i);
    return s;
  }

  double generator_norm(std::size_t i) const {
    const double* g = coords_.data() + i * dim_;
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) s += g[c] * g[c];
    return std::sqrt(s);
  }

  Zonotope centered() const {
    Zonotope r = *this;
    r.nigiro_ = MultiVector(m_, k_);
    return r;
  }

  // Drops zero-weight and zero-vector generators; the body is unchanged.
  Zonotope pruned() const {
    Zonotope r(m_, k_);
    r.nigiro_ = nigiro_;
    for (std::size_t i = 0; i < size(); ++i)
      if (weights_[i] > 0.0 && generator_norm(i) > 0.0) r.add_generator(weights_[i], generator(i));
    return r;
  }

  // Coalesces parallel and antiparallel generators: w·underline(v) + w'·underline(c·v) = underline((w+|c|w')v).
  // Output generators are unit vectors (first nonzero coordinate positive) carrying the summed length.
  Zonotope merged(double tol = 1e-9) const {
    struct Line {
      std::vector<double> dir;
      double mass;
    };
    std::vector<Line> lines;
    lines.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      const double n = generator_norm(i);
      if (weights_[i] <= 0.0 || n <= 0.0) continue;
      auto g = generator(i);
      std::vector<double> u(g.begin(), g.end());
      for (double& c : u) c /= n;
      auto lead = std::find_if(u.begin(), u.end(), [](double c) { return std::abs(c) > 1e-12; });
      if (lead != u.end() && *lead < 0.0)
        for (double& c : u) c = -c;
      lines.push_back({std::move(u), weights_[i] * n});
    }
    std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.dir < b.dir; });
    Zonotope r(m_, k_);
    r.nigiro_ = nigiro_;
    std::vector<bool> used(lines.size(), false);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (used[i]) continue;
      double mass = lines[i].mass;
      // Sorted order groups near-identical directions, but tolerance ties can straddle
      // lexicographic neighbours, so scan forward while the leading coordinate is close.
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        if (lines[j].dir[0] - lines[i].dir[0] > tol) break;
        if (used[j]) continue;
        double d = 0.0;
        for (std::size_t c = 0; c < dim_; ++c) d = std::max(d, std::abs(lines[j].dir[c] - lines[i].dir[c]));
        if (d <= tol) {
          mass += lines[j].mass;
          used[j] = true;
        }
      }
      r.add_generator(mass, lines[i].dir);
    }
    return r;
  }

  void check_space(const MultiVector& v) const {
    if (v.ambient_dim() != m_ || v.grade() != k_)
      throw std::invalid_argument("multivector does not live in Λ^" + std::to_string(k_) + "R^" +
                                  std::to_string(m_));
  }

  void check_same_space(const Zonotope& o) const {
    if (o.m_ != m_ || o.k_ != k_) throw std::invalid_argument("zonotopes live in different spaces");
  }

 private:
  int m_;
  int k_;
  std::size_t dim_;
  std::vector<double> weights_;
  std::vector<double> coords_;
  MultiVector nigiro_;
};

enum class SampleMode { segment, centered };

// Rows of `samples` are coordinate vectors of grade-k multivectors.
inline Zonotope from_samples(int m, int k, const Eigen::Ref<const Eigen::MatrixXd>& samples, SampleMode mode) {
  if (samples.rows() == 0) throw std::invalid_argument("from_samples: empty sample list");
  if (static_cast<std::size_t>(samples.cols()) != binomial(m, k))
    throw std::invalid_argument("from_samples: sample width does not match C(m,k)");
  Zonotope z(m, k);
  const auto n = static_cast<std::size_t>(samples.rows());
  const double w = 1.0 / static_cast<double>(n);
  z.reserve(n);
  std::vector<double> row(static_cast<std::size_t>(samples.cols()));
  MultiVector mean(m, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      mean[c] += row[c];
    }
    z.add_generator(w, row);
  }
  if (mode == SampleMode::segment) z.set_nigiro(mean * w);
  return z;
}

inline Zonotope from_samples(std::span<const MultiVector> xs, SampleMode mode) {
  if (xs.empty()) throw std::invalid_argument("from_samples: empty sample list");
  const int m = xs.front().ambient_dim(), k = xs.front().grade();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(binomial(m, k)));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs.front().require_same_space(xs[i]);
    for (std::size_t c = 0; c < xs[i].size(); ++c)
      rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = xs[i][c];
  }
  return from_samples(m, k, rows, mode);
}

inline Zonotope segment(const MultiVector& x) {
  Zonotope z(x.ambient_dim(), x.grade());
  z.add_generator(1.0, x);
  return z;
}

inline Zonotope point(const MultiVector& c) {
  Zonotope z(c.ambient_dim(), c.grade());
  z.set_nigiro(2.0 * c);
  return z;
}

inline double support(const Zonotope& K, const MultiVector& u) { return K.support(u); }
inline double length(const Zonotope& K) { return K.length(); }

inline Zonotope minkowski_sum(const Zonotope& K, const Zonotope& L) {
  K.check_same_space(L);
  Zonotope r = K;
  r.reserve(K.size() + L.size());
  for (std::size_t i = 0; i < L.size(); ++i) r.add_generator(L.weight(i), L.generator(i));
  r.set_nigiro(K.nigiro() + L.nigiro());
  return r;
}

inline Zonotope scale(const Zonotope& K, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("scale: factor must be nonnegative");
  Zonotope r = K;
  r.scale_weights(t);
  r.set_nigiro(K.nigiro() * t);
  return r;
}

inline Zonotope convex_combine(const Zonotope& K, const Zonotope& L, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("convex_combine: t must lie in [0,1]");
  K.check_same_space(L);
  if (t == 0.0) return K;
  if (t == 1.0) return L;
  return minkowski_sum(scale(K, 1.0 - t), scale(L, t));
}

// Image under T: ℝᵐ → ℝᵐ' acting on generators and nigiro through ΛᵏT.
inline Zonotope linear_image(const Zonotope& K, const Eigen::Ref<const Eigen::MatrixXd>& T) {
  if (T.cols() != K.ambient_dim())
    throw std::invalid_argument("linear_image: map expects dimension " + std::to_string(T.cols()) +
                                ", zonotope has " + std::to_string(K.ambient_dim()));
  const int mp = static_cast<int>(T.rows());
  const Eigen::MatrixXd P = exterior_power(T, K.grade());
  Zonotope r(mp, K.grade());
  r.reserve(K.size());
  Eigen::VectorXd y;
  for (std::size_t i = 0; i < K.size(); ++i) {
    auto g = K.generator(i);
    y = P * Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    r.add_generator(K.weight(i), std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
  }
  r.set_nigiro(apply(P, mp, K.nigiro()));
  return r;
}

// Low-discrepancy unit vectors in the coordinate space of Λᵏℝᵐ.
// Dimension 1: ±1; dimension 2: equally spaced angles; higher: Halton points pushed
// through the normal quantile and normalized.
inline std::vector<MultiVector> probe_directions(int m, int k, std::size_t count = 512) {
  const std::size_t d = binomial(m, k);
  std::vector<MultiVector> out;
  if (d == 1) {
    out.push_back(MultiVector(m, k, {1.0}));
    out.push_back(MultiVector(m, k, {-1.0}));
    return out;
  }
  if (d == 2) {
    for (std::size_t j = 0; j < count; ++j) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(count);
      out.push_back(MultiVector(m, k, {std::cos(a), std::sin(a)}));
    }
    return out;
  }
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                   59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113};
  if (d > std::size(primes)) throw std::invalid_argument("probe_directions: coordinate space too large");
  for (std::size_t j = 1; out.size() < count; ++j) {
    std::vector<double> x(d);
    for (std::size_t c = 0; c < d; ++c) {
      double f = 1.0, r = 0.0;
      for (std::size_t i = j; i > 0; i /= static_cast<std::size_t>(primes[c])) {
        f /= primes[c];
        r += f * static_cast<double>(i % static_cast<std::size_t>(primes[c]));
      }
      x[c] = std::numbers::sqrt2 * boost::math::erf_inv(2.0 * r - 1.0);
    }
    const double n = std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0));
    if (n == 0.0) continue;
    for (double& c : x) c /= n;
    out.push_back(MultiVector(m, k, std::move(x)));
  }
  return out;
}

inline double hausdorff_estimate(const Zonotope& K, const Zonotope& L, std::span<const MultiVector> probes) {
  K.check_same_space(L);
  if (probes.empty()) throw std::invalid_argument("hausdorff_estimate: empty probe set");
  double d = 0.0;
  for (const auto& u : probes) d = std::max(d, std::abs(K.support(u) - L.support(u)));
  return d;
}

inline double hausdorff_estimate(const Zonotope& K, const Zonotope& L) {
  const auto probes = probe_directions(K.ambient_dim(), K.grade());
  return hausdorff_estimate(K, L, probes);
}

// Replaces a large generator list by `cap` generators drawn with probability proportional to
// wᵢ‖vᵢ‖, reweighted so that support values stay unbiased and the length is preserved exactly.
inline Zonotope cap_generators(const Zonotope& K, std::size_t cap, RandomStream& rng) {
  if (cap == 0) throw std::invalid_argument("cap_generators: cap must be positive");
  if (K.size() <= cap) return K;
  std::vector<double> cumulative(K.size());
  double total = 0.0;
  for (std::size_t i = 0; i < K.size(); ++i) cumulative[i] = (total += K.weight(i) * K.generator_norm(i));
  Zonotope r(K.ambient_dim(), K.grade());
  r.set_nigiro(K.nigiro());
  if (total == 0.0) return r;
  for (std::size_t j = 0; j < cap; ++j) {
    const double x = rng.uniform() * total;
    const auto i = static_cast<std::size_t>(std::lower_bound(cumulative.begin(), cumulative.end(), x) -
                                            cumulative.begin());
    const std::size_t idx = std::min(i, K.size() - 1);
    r.add_generator(total / (static_cast<double>(cap) * K.generator_norm(idx)), K.generator(idx));
  }
  return r;
}

class GrassmannianMeasure {
 public:
  struct Atom {
    double mass;
    MultiVector line;
  };

  void add(double mass, MultiVector line) { atoms_.push_back({mass, std::move(line)}); }
  const std::vector<Atom>& atoms() const { return atoms_; }

  double total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
  }

  // ∫ F dμ for F even on unit simple multivectors.
  double integrate(const std::function<double(const MultiVector&)>& F) const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass * F(a.line);
    return s;
  }

  // Lines equal up to sign within `tol` (projective distance) are merged.
  GrassmannianMeasure merged(double tol = 1e-9) const {
    GrassmannianMeasure out;
    for (const auto& a : atoms_) {
      bool joined = false;
      for (auto& b : out.atoms_) {
        double plus = 0.0, minus = 0.0;
        for (std::size_t c = 0; c < a.line.size(); ++c) {
          plus = std::max(plus, std::abs(a.line[c] - b.line[c]));
          minus = std::max(minus, std::abs(a.line[c] + b.line[c]));
        }
        if (std::min(plus, minus) <= tol) {
          b.mass += a.mass;
          joined = true;
          break;
        }
      }
      if (!joined) out.atoms_.push_back(a);
    }
    return out;
  }

 private:
  std::vector<Atom> atoms_;
};

inline GrassmannianMeasure grassmannian_measure(const Zonotope& K, double tol = kSimpleTolerance) {
  GrassmannianMeasure mu;
  for (std::size_t i = 0; i < K.size(); ++i) {
    const double n = K.generator_norm(i);
    if (n == 0.0 || K.weight(i) == 0.0) continue;
    MultiVector v = K.generator_vector(i);
    if (!is_simple(v, tol)) throw std::invalid_argument("grassmannian_measure: generator " + std::to_string(i) + " is not simple");
    mu.add(K.weight(i) * n, v * (1.0 / n));
  }
  return mu;
}

// Serialization: {ambient:{m,k}, generators:[{w, coords}], nigiro:[coords]}.
// nlohmann::json prints doubles with round-trip precision, so the round trip is bit-exact.
inline nlohmann::json to_json(const Zonotope& K) {
  nlohmann::json gens = nlohmann::json::array();
  for (std::size_t i = 0; i < K.size(); ++i) {
    auto g = K.generator(i);
    gens.push_back({{"w", K.weight(i)}, {"coords", std::vector<double>(g.begin(), g.end())}});
  }
  auto e = K.nigiro().coords();
  return {{"ambient", {{"m", K.ambient_dim()}, {"k", K.grade()}}},
          {"generators", std::move(gens)},
          {"nigiro", std::vector<double>(e.begin(), e.end())}};
}

inline Zonotope zonotope_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("ambient") || !j.contains("generators") || !j.contains("nigiro"))
    throw std::invalid_argument("zonotope JSON needs ambient, generators and nigiro");
  const int m = j.at("ambient").at("m").get<int>();
  const int k = j.at("ambient").at("k").get<int>();
  Zonotope z(m, k);
  for (const auto& g : j.at("generators")) {
    const auto coords = g.at("coords").get<std::vector<double>>();
    z.add_generator(g.at("w").get<double>(), coords);
  }
  z.set_nigiro(MultiVector(m, k, j.at("nigiro").get<std::vector<double>>()));
  return z;
}

}  // namespace zonoid
