#pragma once

#include "zonoid/error.hpp"
#include "zonoid/exterior.hpp"
#include "zonoid/rng.hpp"
#include "zonoid/zonotope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace zonoid {

inline constexpr std::size_t kWedgePowerCap = 10'000'000;
// Streaming sums never materialize generators, so they get a much larger budget.
inline constexpr double kStreamingCap = 4e9;
// Above this many pairs, planar sums switch from direct enumeration to an angular sweep.
inline constexpr double kDirectPairLimit = 1e6;

inline double factorial(int n) { return std::tgamma(static_cast<double>(n) + 1.0); }

// b_k: volume of the unit ball in ℝᵏ.
inline double unit_ball_volume(int k) {
  if (k < 0) throw std::invalid_argument("unit_ball_volume: negative dimension");
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

// s_k: volume of the unit sphere Sᵏ ⊂ ℝᵏ⁺¹.
inline double unit_sphere_volume(int k) {
  if (k < 0) throw std::invalid_argument("unit_sphere_volume: negative dimension");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (k + 1)) / std::tgamma(0.5 * (k + 1));
}

// E‖ξ₁∧⋯∧ξ_k‖ for independent standard Gaussian vectors in ℝᵐ.
inline double gaussian_wedge_norm_mean(int m, int k) {
  if (k < 0 || k > m) throw std::invalid_argument("gaussian_wedge_norm_mean: need 0 <= k <= m");
  return factorial(m) * unit_ball_volume(m) /
         (std::pow(2.0 * std::numbers::pi, 0.5 * k) * factorial(m - k) * unit_ball_volume(m - k));
}

inline Zonotope wedge(const Zonotope& K, const Zonotope& L) {
  if (K.ambient_dim() != L.ambient_dim()) throw std::invalid_argument("wedge: ambient dimensions differ");
  const int m = K.ambient_dim();
  if (K.grade() + L.grade() > m)
    throw std::invalid_argument("wedge: grade overflow " + std::to_string(K.grade()) + "+" +
                                std::to_string(L.grade()) + " > " + std::to_string(m));
  const auto& plan = detail::Tables::get().plan(m, K.grade(), L.grade());
  Zonotope r(m, K.grade() + L.grade());
  r.reserve(K.size() * L.size());
  std::vector<double> buf(r.coord_dim());
  for (std::size_t i = 0; i < K.size(); ++i) {
    for (std::size_t j = 0; j < L.size(); ++j) {
      std::fill(buf.begin(), buf.end(), 0.0);
      wedge_accumulate(plan, K.generator(i), L.generator(j), buf);
      r.add_generator(K.weight(i) * L.weight(j), buf);
    }
  }
  r.set_nigiro(wedge(K.nigiro(), L.nigiro()));
  return r;
}

inline Zonotope wedge_zonotopes(const Zonotope& K, const Zonotope& L) { return wedge(K, L); }

namespace detail {

template <class Visit>
void enumerate_subsets(const Zonotope& K, int k, Visit&& visit) {
  const int m = K.ambient_dim();
  const std::size_t n = K.size();
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(k) + 1);
  partial[0] = {1.0};
  std::vector<double> weight(static_cast<std::size_t>(k) + 1, 1.0);
  auto rec = [&](auto&& self, int level, std::size_t start) -> void {
    if (level == k) {
      visit(weight[static_cast<std::size_t>(k)], std::span<const double>(partial[static_cast<std::size_t>(k)]));
      return;
    }
    const auto& plan = Tables::get().plan(m, level, 1);
    auto& next = partial[static_cast<std::size_t>(level) + 1];
    next.assign(binomial(m, level + 1), 0.0);
    for (std::size_t i = start; i + static_cast<std::size_t>(k - level) <= n; ++i) {
      std::fill(next.begin(), next.end(), 0.0);
      wedge_accumulate(plan, partial[static_cast<std::size_t>(level)], K.generator(i), next);
      weight[static_cast<std::size_t>(level) + 1] = weight[static_cast<std::size_t>(level)] * K.weight(i);
      self(self, level + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
}

inline double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

// Line masses and angles in [0, π) of a planar grade-1 zonotope, sorted by angle.
struct PlanarLines {
  std::vector<double> angle, mass, c, s;
};

inline PlanarLines planar_lines(const Zonotope& K) {
  std::vector<std::pair<double, double>> lines;
  lines.reserve(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) {
    auto g = K.generator(i);
    const double a = K.weight(i) * std::hypot(g[0], g[1]);
    if (a == 0.0) continue;
    double th = std::atan2(g[1], g[0]);
    if (th < 0.0) th += std::numbers::pi;
    if (th >= std::numbers::pi) th -= std::numbers::pi;
    lines.emplace_back(th, a);
  }
  std::sort(lines.begin(), lines.end());
  PlanarLines p;
  for (auto [th, a] : lines) {
    p.angle.push_back(th);
    p.mass.push_back(a);
    p.c.push_back(std::cos(th));
    p.s.push_back(std::sin(th));
  }
  return p;
}

// Σ_{i<j} aᵢaⱼ|sin(θⱼ−θᵢ)|: with angles sorted in [0,π) every difference is in [0,π).
inline double planar_pair_sum(const Zonotope& K) {
  const auto p = planar_lines(K);
  double C = 0.0, S = 0.0, total = 0.0;
  for (std::size_t j = 0; j < p.angle.size(); ++j) {
    total += p.mass[j] * (p.s[j] * C - p.c[j] * S);
    C += p.mass[j] * p.c[j];
    S += p.mass[j] * p.s[j];
  }
  return total;
}

// Σᵢⱼ aᵢbⱼ|sin(θᵢ−φⱼ)| between two planar bodies.
inline double planar_cross_sum(const Zonotope& K, const Zonotope& L) {
  const auto p = planar_lines(K);
  const auto q = planar_lines(L);
  const std::size_t n = p.angle.size();
  std::vector<double> C(n + 1, 0.0), S(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    C[i + 1] = C[i] + p.mass[i] * p.c[i];
    S[i + 1] = S[i] + p.mass[i] * p.s[i];
  }
  double total = 0.0;
  for (std::size_t j = 0; j < q.angle.size(); ++j) {
    const auto split = static_cast<std::size_t>(
        std::lower_bound(p.angle.begin(), p.angle.end(), q.angle[j]) - p.angle.begin());
    // θ < φ: |sin(θ−φ)| = sinφcosθ − cosφsinθ; θ ≥ φ: the negative of that.
    const double below = q.s[j] * C[split] - q.c[j] * S[split];
    const double above = q.c[j] * (S[n] - S[split]) - q.s[j] * (C[n] - C[split]);
    total += q.mass[j] * (below + above);
  }
  return total;
}

}  // namespace detail

// K^{∧k}. Grade-1 input: k!·Σ_{i₁<⋯<i_k} (Πw)·underline(v_{i₁}∧⋯∧v_{i_k}) by subset enumeration.
inline Zonotope wedge_power(const Zonotope& K, int k, std::size_t cap = kWedgePowerCap) {
  const int m = K.ambient_dim();
  if (k < 1) throw std::invalid_argument("wedge_power: k must be at least 1");
  if (K.grade() * k > m) throw std::invalid_argument("wedge_power: grade overflow");
  MultiVector e = K.nigiro();
  for (int j = 1; j < k; ++j) e = wedge(e, K.nigiro());
  if (K.grade() != 1) {
    const double terms = std::pow(static_cast<double>(K.size()), k);
    if (terms > static_cast<double>(cap))
      throw NumericalError("wedge_power: " + std::to_string(terms) + " terms exceed the cap; merge generators first");
    Zonotope r = K.centered();
    for (int j = 1; j < k; ++j) r = wedge(r, K.centered());
    r.set_nigiro(e);
    return r;
  }
  Zonotope r(m, k);
  r.set_nigiro(e);
  if (static_cast<std::size_t>(k) > K.size()) return r;
  const double terms = std::exp(std::lgamma(K.size() + 1.0) - std::lgamma(k + 1.0) - std::lgamma(K.size() - k + 1.0));
  if (terms > static_cast<double>(cap))
    throw NumericalError("wedge_power: C(" + std::to_string(K.size()) + "," + std::to_string(k) +
                         ") exceeds the enumeration cap; merge generators first");
  const double kf = factorial(k);
  detail::enumerate_subsets(K, k, [&](double w, std::span<const double> v) { r.add_generator(kf * w, v); });
  return r;
}

// ℓ(K₁∧⋯∧K_r) without materializing the product.
inline double wedge_length(std::span<const Zonotope> Ks, double cap = kStreamingCap) {
  if (Ks.empty()) throw std::invalid_argument("wedge_length: no bodies");
  const int m = Ks.front().ambient_dim();
  int grade = 0;
  double terms = 1.0;
  for (const auto& K : Ks) {
    if (K.ambient_dim() != m) throw std::invalid_argument("wedge_length: ambient dimensions differ");
    grade += K.grade();
    terms *= static_cast<double>(K.size());
  }
  if (grade > m) throw std::invalid_argument("wedge_length: grade overflow");
  if (terms > cap) throw NumericalError("wedge_length: product of generator counts exceeds the enumeration cap");
  const std::size_t r = Ks.size();
  std::vector<std::vector<double>> partial(r + 1);
  std::vector<int> grades(r + 1, 0);
  for (std::size_t j = 0; j < r; ++j) grades[j + 1] = grades[j] + Ks[j].grade();
  partial[0] = {1.0};
  double total = 0.0;
  auto rec = [&](auto&& self, std::size_t level, double w) -> void {
    if (level == r) {
      total += w * detail::norm_of(partial[r]);
      return;
    }
    const auto& K = Ks[level];
    const auto& plan = detail::Tables::get().plan(m, grades[level], K.grade());
    auto& next = partial[level + 1];
    next.assign(binomial(m, grades[level + 1]), 0.0);
    for (std::size_t i = 0; i < K.size(); ++i) {
      if (K.weight(i) == 0.0) continue;
      std::fill(next.begin(), next.end(), 0.0);
      wedge_accumulate(plan, partial[level], K.generator(i), next);
      if (std::all_of(next.begin(), next.end(), [](double c) { return c == 0.0; })) continue;
      self(self, level + 1, w * K.weight(i));
    }
  };
  rec(rec, 0, 1.0);
  return total;
}

inline double wedge_length(const Zonotope& K, const Zonotope& L) {
  const Zonotope both[] = {K, L};
  return wedge_length(both);
}

// Schneider normalization: MV(K,…,K) = vol(K); equals ℓ(K₁∧⋯∧K_m)/m!.
inline double mixed_volume(std::span<const Zonotope> Ks) {
  if (Ks.empty()) throw std::invalid_argument("mixed_volume: no bodies");
  const int m = Ks.front().ambient_dim();
  if (static_cast<int>(Ks.size()) != m)
    throw std::invalid_argument("mixed_volume: need exactly " + std::to_string(m) + " bodies, got " +
                                std::to_string(Ks.size()));
  for (const auto& K : Ks)
    if (K.grade() != 1 || K.ambient_dim() != m) throw std::invalid_argument("mixed_volume: bodies must be grade-1 in R^m");
  if (m == 2 && static_cast<double>(Ks[0].size()) * static_cast<double>(Ks[1].size()) > kDirectPairLimit)
    return 0.5 * detail::planar_cross_sum(Ks[0], Ks[1]);
  return wedge_length(Ks) / factorial(m);
}

inline double mixed_volume(std::initializer_list<Zonotope> Ks) {
  std::vector<Zonotope> v(Ks);
  return mixed_volume(std::span<const Zonotope>(v));
}

// 𝒱_k(K) = ℓ(K^{∧k})/k! = Σ_{i₁<⋯<i_k} (Πw)‖v_{i₁}∧⋯∧v_{i_k}‖.
inline double intrinsic_volume(const Zonotope& K, int k) {
  const int m = K.ambient_dim();
  if (K.grade() != 1) throw std::invalid_argument("intrinsic_volume: grade-1 zonotope required");
  if (k < 0 || k > m) throw std::invalid_argument("intrinsic_volume: k=" + std::to_string(k) + " outside [0," + std::to_string(m) + "]");
  if (k == 0) return 1.0;
  if (k == 1) return K.length();
  if (static_cast<std::size_t>(k) > K.size()) return 0.0;
  const double n = static_cast<double>(K.size());
  if (m == 2 && n * (n - 1.0) / 2.0 > kDirectPairLimit) return detail::planar_pair_sum(K);
  const double terms = std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  if (terms > kStreamingCap) throw NumericalError("intrinsic_volume: too many generator subsets; merge generators first");
  double total = 0.0;
  detail::enumerate_subsets(K, k, [&](double w, std::span<const double> v) { total += w * detail::norm_of(v); });
  return total;
}

inline double volume(const Zonotope& K) { return intrinsic_volume(K, K.ambient_dim()); }

// B_m ≈ √(2π)·(1/n)Σ underline(ξᵢ), ξᵢ ~ N(0, I_m).
inline Zonotope ball_approximant(int m, std::size_t n, RandomStream& rng) {
  if (n == 0) throw std::invalid_argument("ball_approximant: need at least one sample");
  Zonotope B(m, 1);
  B.reserve(n);
  const double s = std::sqrt(2.0 * std::numbers::pi);
  const double w = 1.0 / static_cast<double>(n);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : x) c = s * rng.normal();
    B.add_generator(w, x);
  }
  return B;
}

inline Zonotope ball_approximant(int m, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0) {
  RandomStream rng(seed, stream);
  return ball_approximant(m, n, rng);
}

struct SidesResult {
  double lhs;
  double rhs;
  bool holds;
};

// ℓ(C) against ℓ(C ∧ B^{∧(m−k)})/((m−k)!·b_{m−k}), the balls being independent approximants.
inline SidesResult length_with_balls_check(const Zonotope& C, std::size_t ball_samples, std::uint64_t seed,
                                           std::uint64_t stream = 0) {
  const int m = C.ambient_dim();
  const int k = C.grade();
  const double lhs = C.length();
  std::vector<Zonotope> bodies{C.centered()};
  for (int j = 0; j < m - k; ++j)
    bodies.push_back(ball_approximant(m, ball_samples, seed, derive_stream(stream, {static_cast<std::uint64_t>(j)})));
  const double rhs = (C.size() == 0) ? 0.0 : wedge_length(bodies) / (factorial(m - k) * unit_ball_volume(m - k));
  return {lhs, rhs, true};
}

inline SidesResult af_inequality(const Zonotope& K, const Zonotope& L, std::span<const Zonotope> rest) {
  auto with = [&](const Zonotope& A, const Zonotope& B) {
    std::vector<Zonotope> v{A, B};
    v.insert(v.end(), rest.begin(), rest.end());
    return mixed_volume(std::span<const Zonotope>(v));
  };
  const double lhs = with(K, L);
  const double rhs = std::sqrt(std::max(0.0, with(K, K)) * std::max(0.0, with(L, L)));
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

inline SidesResult bm_inequality(const Zonotope& K0, const Zonotope& K1, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("bm_inequality: t must lie in [0,1]");
  const double lhs = volume(convex_combine(K0, K1, t));
  const double rhs = std::pow(volume(K0), 1.0 - t) * std::pow(volume(K1), t);
  return {lhs, rhs, lhs >= rhs - 1e-9};
}

}  // namespace zonoid
