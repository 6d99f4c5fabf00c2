#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

inline constexpr int kMaxAmbientDim = 8;
inline constexpr double kSimpleTolerance = 1e-12;

inline std::size_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  return r;
}

namespace detail {

// Basis of Λᵏℝᵐ: strictly increasing multi-indices in lexicographic order, stored as bitmasks.
struct GradeBasis {
  std::vector<std::uint32_t> masks;
  std::array<int, 1 << kMaxAmbientDim> rank{};
};

struct WedgeTerm {
  int a, b, out;
  double sign;
};

inline void enumerate_combinations(int m, int k, int start, std::uint32_t mask,
                                   std::vector<std::uint32_t>& out) {
  if (k == 0) {
    out.push_back(mask);
    return;
  }
  for (int i = start; i <= m - k; ++i) enumerate_combinations(m, k - 1, i + 1, mask | (1u << i), out);
}

class Tables {
 public:
  static const Tables& get() {
    static const Tables tables;
    return tables;
  }

  const GradeBasis& basis(int m, int k) const { return basis_[m][k]; }
  const std::vector<WedgeTerm>& plan(int m, int k, int l) const { return plans_[m][k][l]; }

 private:
  Tables() {
    for (int m = 0; m <= kMaxAmbientDim; ++m) {
      for (int k = 0; k <= m; ++k) {
        auto& b = basis_[m][k];
        b.rank.fill(-1);
        enumerate_combinations(m, k, 0, 0u, b.masks);
        for (std::size_t i = 0; i < b.masks.size(); ++i) b.rank[b.masks[i]] = static_cast<int>(i);
      }
      for (int k = 0; k <= m; ++k) {
        for (int l = 0; k + l <= m; ++l) {
          auto& plan = plans_[m][k][l];
          const auto& bk = basis_[m][k];
          const auto& bl = basis_[m][l];
          const auto& bo = basis_[m][k + l];
          for (std::size_t i = 0; i < bk.masks.size(); ++i) {
            for (std::size_t j = 0; j < bl.masks.size(); ++j) {
              const std::uint32_t I = bk.masks[i], J = bl.masks[j];
              if (I & J) continue;
              // Parity of the shuffle putting I ∪ J in increasing order:
              // count pairs (x in I, y in J) with x > y.
              int inversions = 0;
              for (int y = 0; y < m; ++y)
                if (J & (1u << y)) inversions += std::popcount(I & ~((2u << y) - 1u));
              plan.push_back({static_cast<int>(i), static_cast<int>(j), bo.rank[I | J],
                              (inversions % 2) ? -1.0 : 1.0});
            }
          }
        }
      }
    }
  }

  std::array<std::array<GradeBasis, kMaxAmbientDim + 1>, kMaxAmbientDim + 1> basis_{};
  std::array<std::array<std::array<std::vector<WedgeTerm>, kMaxAmbientDim + 1>, kMaxAmbientDim + 1>,
             kMaxAmbientDim + 1>
      plans_{};
};

inline void check_dims(int m, int k) {
  if (m < 1 || m > kMaxAmbientDim)
    throw std::invalid_argument("ambient dimension must lie in [1, 8], got " + std::to_string(m));
  if (k < 0 || k > m)
    throw std::invalid_argument("grade " + std::to_string(k) + " outside [0, " + std::to_string(m) + "]");
}

}  // namespace detail

// Multi-indices of the basis of Λᵏℝᵐ, each as a sorted list of 0-based indices.
inline std::vector<std::vector<int>> multi_indices(int m, int k) {
  detail::check_dims(m, k);
  std::vector<std::vector<int>> out;
  for (std::uint32_t mask : detail::Tables::get().basis(m, k).masks) {
    std::vector<int> idx;
    for (int i = 0; i < m; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    out.push_back(std::move(idx));
  }
  return out;
}

// Position of a sorted multi-index in the lexicographic basis.
inline std::size_t multi_index_rank(int m, std::span<const int> indices) {
  std::uint32_t mask = 0;
  int prev = -1;
  for (int i : indices) {
    if (i <= prev || i >= m) throw std::invalid_argument("multi-index must be strictly increasing and < m");
    mask |= 1u << i;
    prev = i;
  }
  detail::check_dims(m, static_cast<int>(indices.size()));
  return static_cast<std::size_t>(detail::Tables::get().basis(m, static_cast<int>(indices.size())).rank[mask]);
}

class MultiVector {
 public:
  MultiVector() : m_(1), k_(0), coords_(1, 0.0) {}

  MultiVector(int ambient_dim, int grade) : m_(ambient_dim), k_(grade) {
    detail::check_dims(m_, k_);
    coords_.assign(binomial(m_, k_), 0.0);
  }

  MultiVector(int ambient_dim, int grade, std::vector<double> coords)
      : m_(ambient_dim), k_(grade), coords_(std::move(coords)) {
    detail::check_dims(m_, k_);
    if (coords_.size() != binomial(m_, k_))
      throw std::invalid_argument("coordinate count " + std::to_string(coords_.size()) + " != C(" +
                                  std::to_string(m_) + "," + std::to_string(k_) + ")");
  }

  static MultiVector vector(std::span<const double> v) {
    return MultiVector(static_cast<int>(v.size()), 1, std::vector<double>(v.begin(), v.end()));
  }
  static MultiVector vector(const Eigen::VectorXd& v) {
    return MultiVector(static_cast<int>(v.size()), 1, std::vector<double>(v.data(), v.data() + v.size()));
  }
  static MultiVector vector(std::initializer_list<double> v) {
    return MultiVector(static_cast<int>(v.size()), 1, std::vector<double>(v));
  }
  static MultiVector scalar(int m, double s) { return MultiVector(m, 0, {s}); }

  // e_{i1} ∧ ... ∧ e_{ik} for strictly increasing 0-based indices.
  static MultiVector basis(int m, std::initializer_list<int> indices) {
    MultiVector r(m, static_cast<int>(indices.size()));
    r.coords_[multi_index_rank(m, std::span<const int>(indices.begin(), indices.size()))] = 1.0;
    return r;
  }

  int ambient_dim() const { return m_; }
  int grade() const { return k_; }
  std::size_t size() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  std::span<double> coords() { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  double& operator[](std::size_t i) { return coords_[i]; }

  double norm() const {
    double s = 0.0;
    for (double c : coords_) s += c * c;
    return std::sqrt(s);
  }

  bool is_zero(double tol = kSimpleTolerance) const {
    return std::all_of(coords_.begin(), coords_.end(), [tol](double c) { return std::abs(c) <= tol; });
  }

  MultiVector& operator+=(const MultiVector& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  MultiVector& operator-=(const MultiVector& o) {
    require_same_space(o);
    for (std::size_t i = 0; i < coords_.size(); ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  MultiVector& operator*=(double t) {
    for (double& c : coords_) c *= t;
    return *this;
  }
  friend MultiVector operator+(MultiVector a, const MultiVector& b) { return a += b; }
  friend MultiVector operator-(MultiVector a, const MultiVector& b) { return a -= b; }
  friend MultiVector operator*(MultiVector a, double t) { return a *= t; }
  friend MultiVector operator*(double t, MultiVector a) { return a *= t; }
  friend MultiVector operator-(MultiVector a) { return a *= -1.0; }
  friend bool operator==(const MultiVector& a, const MultiVector& b) {
    return a.m_ == b.m_ && a.k_ == b.k_ && a.coords_ == b.coords_;
  }

  void require_same_space(const MultiVector& o) const {
    if (m_ != o.m_ || k_ != o.k_)
      throw std::invalid_argument("multivectors live in different spaces: Λ^" + std::to_string(k_) + "R^" +
                                  std::to_string(m_) + " vs Λ^" + std::to_string(o.k_) + "R^" +
                                  std::to_string(o.m_));
  }

 private:
  int m_;
  int k_;
  std::vector<double> coords_;
};

// out += a ∧ b on raw coordinate arrays; `plan` from detail::Tables for (m, grade a, grade b).
inline void wedge_accumulate(const std::vector<detail::WedgeTerm>& plan, std::span<const double> a,
                             std::span<const double> b, std::span<double> out, double scale = 1.0) {
  for (const auto& t : plan) out[t.out] += scale * t.sign * a[t.a] * b[t.b];
}

inline MultiVector wedge(const MultiVector& a, const MultiVector& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("wedge: ambient dimensions differ");
  const int m = a.ambient_dim();
  if (a.grade() + b.grade() > m)
    throw std::invalid_argument("wedge: grade overflow " + std::to_string(a.grade()) + "+" +
                                std::to_string(b.grade()) + " > " + std::to_string(m));
  MultiVector r(m, a.grade() + b.grade());
  wedge_accumulate(detail::Tables::get().plan(m, a.grade(), b.grade()), a.coords(), b.coords(), r.coords());
  return r;
}

inline double inner(const MultiVector& a, const MultiVector& b) {
  if (a.grade() != b.grade() || a.ambient_dim() != b.ambient_dim())
    throw std::invalid_argument("inner: grade or ambient dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const MultiVector& a) { return a.norm(); }

// Minors of the k×m matrix `rows` (one vector per row) written into `out` (length C(m,k)).
inline void wedge_rows_into(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::span<double> out) {
  const int k = static_cast<int>(rows.rows());
  const int m = static_cast<int>(rows.cols());
  if (k == 0) {
    out[0] = 1.0;
    return;
  }
  if (k == 1) {
    for (int j = 0; j < m; ++j) out[j] = rows(0, j);
    return;
  }
  const auto& basis = detail::Tables::get().basis(m, k);
  if (k == 2) {
    std::size_t idx = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) out[idx++] = rows(0, i) * rows(1, j) - rows(0, j) * rows(1, i);
    return;
  }
  Eigen::MatrixXd sub(k, k);
  for (std::size_t c = 0; c < basis.masks.size(); ++c) {
    int col = 0;
    for (int j = 0; j < m; ++j)
      if (basis.masks[c] & (1u << j)) sub.col(col++) = rows.col(j);
    out[c] = sub.determinant();
  }
}

inline MultiVector wedge_vectors(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  const int k = static_cast<int>(rows.rows());
  const int m = static_cast<int>(rows.cols());
  if (k > m) throw std::invalid_argument("wedge_vectors: more vectors than the ambient dimension");
  MultiVector r(m, k);
  wedge_rows_into(rows, r.coords());
  return r;
}

inline MultiVector wedge_vectors(const std::vector<Eigen::VectorXd>& vs) {
  if (vs.empty()) throw std::invalid_argument("wedge_vectors: empty list, ambient dimension unknown");
  const auto m = vs.front().size();
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(vs.size()), m);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != m) throw std::invalid_argument("wedge_vectors: dimension mismatch");
    rows.row(static_cast<Eigen::Index>(i)) = vs[i].transpose();
  }
  return wedge_vectors(rows);
}

// Matrix of ΛᵏT for T: ℝᵐ → ℝᵐ' in the lexicographic bases; entry (I, J) is the minor T[I, J].
inline Eigen::MatrixXd exterior_power(const Eigen::Ref<const Eigen::MatrixXd>& T, int k) {
  const int mp = static_cast<int>(T.rows());
  const int m = static_cast<int>(T.cols());
  detail::check_dims(m, k);
  detail::check_dims(mp, k);
  const auto& rows = detail::Tables::get().basis(mp, k).masks;
  const auto& cols = detail::Tables::get().basis(m, k).masks;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (k == 0) {
    out(0, 0) = 1.0;
    return out;
  }
  Eigen::MatrixXd sub(k, k);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      int ri = 0;
      for (int i = 0; i < mp; ++i) {
        if (!(rows[r] & (1u << i))) continue;
        int ci = 0;
        for (int j = 0; j < m; ++j)
          if (cols[c] & (1u << j)) sub(ri, ci++) = T(i, j);
        ++ri;
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sub.determinant();
    }
  }
  return out;
}

inline MultiVector apply(const Eigen::MatrixXd& power, int target_dim, const MultiVector& a) {
  Eigen::Map<const Eigen::VectorXd> x(a.coords().data(), static_cast<Eigen::Index>(a.size()));
  Eigen::VectorXd y = power * x;
  return MultiVector(target_dim, a.grade(), std::vector<double>(y.data(), y.data() + y.size()));
}

// A nonzero w is simple iff {v : v ∧ w = 0} has dimension exactly grade(w).
inline bool is_simple(const MultiVector& w, double tol = kSimpleTolerance) {
  const int m = w.ambient_dim();
  const int k = w.grade();
  if (k <= 1 || k >= m - 1) return true;
  const double scale = w.norm();
  if (scale <= tol) return true;
  const auto& plan = detail::Tables::get().plan(m, 1, k);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(binomial(m, k + 1)), m);
  std::vector<double> e(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(i)] = 1.0;
    std::vector<double> col(static_cast<std::size_t>(M.rows()), 0.0);
    wedge_accumulate(plan, e, w.coords(), col);
    for (Eigen::Index r = 0; r < M.rows(); ++r) M(r, i) = col[static_cast<std::size_t>(r)];
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  int nullity = m - static_cast<int>(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= tol * std::max(1.0, scale)) ++nullity;
  return nullity == k;
}

class Frame {
 public:
  explicit Frame(Eigen::MatrixXd vectors, double tol = 1e-10) : vectors_(std::move(vectors)) {
    if (vectors_.rows() != vectors_.cols() || vectors_.rows() < 1)
      throw std::invalid_argument("frame must be m vectors of dimension m");
    const Eigen::MatrixXd gram = vectors_.transpose() * vectors_;
    const double err = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
    if (err > tol) throw std::invalid_argument("frame is not orthonormal (Gram error " + std::to_string(err) + ")");
  }

  static Frame standard(int m) { return Frame(Eigen::MatrixXd::Identity(m, m)); }

  int ambient_dim() const { return static_cast<int>(vectors_.cols()); }
  // Column i is the i-th frame vector.
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const { return vectors_.transpose() * v; }

 private:
  Eigen::MatrixXd vectors_;
};

}  // namespace zonoid
