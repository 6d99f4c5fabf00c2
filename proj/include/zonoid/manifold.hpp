#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

using Point = Eigen::VectorXd;

// A coordinate chart. The coframe F(p) sends chart components a of a covector to
// orthonormal components F·a, so that FᵗF = g⁻¹; tangent vectors transform by F⁻ᵗ.
struct Chart {
  std::string name;
  int dim = 0;
  Eigen::VectorXd lower, upper;
  std::vector<bool> periodic;
  std::function<Eigen::MatrixXd(const Point&)> metric;
  std::function<Eigen::MatrixXd(const Point&)> coframe;
  // Embedding into Euclidean space (spheres only) and its Jacobian.
  std::function<Eigen::VectorXd(const Point&)> embedding;
  std::function<Eigen::MatrixXd(const Point&)> embedding_jacobian;
  // Brings a point that drifted outside the box back onto the manifold.
  std::function<Point(const Point&)> normalize;

  bool contains(const Point& p, double slack = 1e-9) const {
    if (p.size() != dim) return false;
    for (int i = 0; i < dim; ++i) {
      if (periodic[static_cast<std::size_t>(i)]) continue;
      if (p(i) < lower(i) - slack || p(i) > upper(i) + slack) return false;
    }
    return true;
  }

  void require_contains(const Point& p) const {
    if (!contains(p)) {
      std::string s = "point (";
      for (int i = 0; i < p.size(); ++i) s += (i ? ", " : "") + std::to_string(p(i));
      throw std::invalid_argument(s + ") lies outside the " + name + " chart");
    }
  }

  double volume_density(const Point& p) const { return std::sqrt(metric(p).determinant()); }

  Eigen::VectorXd frame_vector(const Point& p, const Eigen::VectorXd& v) const {
    return coframe(p).transpose().fullPivLu().solve(v);
  }

  // Rows of `d` are covectors in chart components; returns them in orthonormal components.
  Eigen::MatrixXd frame_covectors(const Point& p, const Eigen::MatrixXd& d) const {
    return d * coframe(p).transpose();
  }

  double period(int i) const { return upper(i) - lower(i); }
};

struct QuadratureRule {
  std::vector<Point> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

struct BuiltinManifold {
  Chart chart;
  QuadratureRule rule;
};

template <class F>
double integrate(const QuadratureRule& rule, F&& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
  return s;
}

// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(n - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = wt;
    w[static_cast<std::size_t>(n - 1 - i)] = wt;
  }
}

namespace detail {

inline Point wrap_periodic(const Chart& c, Point p) {
  for (int i = 0; i < c.dim; ++i) {
    if (!c.periodic[static_cast<std::size_t>(i)]) continue;
    const double L = c.period(i);
    p(i) = c.lower(i) + std::fmod(std::fmod(p(i) - c.lower(i), L) + L, L);
    if (p(i) >= c.upper(i)) p(i) = c.lower(i);
  }
  return p;
}

}  // namespace detail

inline Chart interval_chart(double a, double b) {
  if (!(b > a)) throw std::invalid_argument("interval: need a < b");
  Chart c;
  c.name = "interval";
  c.dim = 1;
  c.lower = Eigen::VectorXd::Constant(1, a);
  c.upper = Eigen::VectorXd::Constant(1, b);
  c.periodic = {false};
  c.metric = [](const Point&) { return Eigen::MatrixXd::Identity(1, 1); };
  c.coframe = [](const Point&) { return Eigen::MatrixXd::Identity(1, 1); };
  c.normalize = [](const Point& p) { return p; };
  return c;
}

// Flat torus ℝᵈ/ℤᵈ with coordinates in [0,1)ᵈ.
inline Chart torus_chart(int d) {
  Chart c;
  c.name = "torus" + std::to_string(d);
  c.dim = d;
  c.lower = Eigen::VectorXd::Zero(d);
  c.upper = Eigen::VectorXd::Ones(d);
  c.periodic.assign(static_cast<std::size_t>(d), true);
  c.metric = [d](const Point&) { return Eigen::MatrixXd::Identity(d, d); };
  c.coframe = [d](const Point&) { return Eigen::MatrixXd::Identity(d, d); };
  c.normalize = [c](const Point& p) { return detail::wrap_periodic(c, p); };
  return c;
}

// Hyperspherical chart of Sᵐ: angles (a₀,…,a_{m−2}) ∈ (0,π) and longitude a_{m−1} ∈ [0,2π).
// x_i = (Π_{l<i} sin a_l)·cos a_i for i < m, x_m = Π_{l<m} sin a_l. For m = 1 this is the circle.
inline Chart sphere_chart(int m) {
  if (m < 1) throw std::invalid_argument("sphere: dimension must be positive");
  Chart c;
  c.name = (m == 1) ? "circle" : "sphere" + std::to_string(m);
  c.dim = m;
  c.lower = Eigen::VectorXd::Zero(m);
  c.upper = Eigen::VectorXd::Constant(m, std::numbers::pi);
  c.upper(m - 1) = 2.0 * std::numbers::pi;
  c.periodic.assign(static_cast<std::size_t>(m), false);
  c.periodic[static_cast<std::size_t>(m - 1)] = true;
  auto diag = [m](const Point& p) {
    Eigen::VectorXd g(m);
    double s = 1.0;
    for (int i = 0; i < m; ++i) {
      g(i) = s * s;
      s *= std::sin(p(i));
    }
    return g;
  };
  c.metric = [diag](const Point& p) -> Eigen::MatrixXd { return diag(p).asDiagonal(); };
  c.coframe = [diag](const Point& p) -> Eigen::MatrixXd { return diag(p).cwiseSqrt().cwiseInverse().asDiagonal(); };
  c.embedding = [m](const Point& p) {
    Eigen::VectorXd x(m + 1);
    double s = 1.0;
    for (int i = 0; i < m; ++i) {
      x(i) = s * std::cos(p(i));
      s *= std::sin(p(i));
    }
    x(m) = s;
    return x;
  };
  c.embedding_jacobian = [m](const Point& p) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m + 1, m);
    for (int i = 0; i <= m; ++i) {
      // x_i = (Π_{l<min(i,m)} sin a_l)·(i<m ? cos a_i : 1)
      const int last = std::min(i, m);
      for (int j = 0; j <= std::min(i, m - 1); ++j) {
        double v = 1.0;
        for (int l = 0; l < last; ++l) v *= (l == j) ? std::cos(p(l)) : std::sin(p(l));
        if (i < m) v *= (i == j) ? -std::sin(p(i)) : std::cos(p(i));
        J(i, j) = v;
      }
    }
    return J;
  };
  c.normalize = [c, m](const Point& q) {
    Point p = q;
    // Reflect colatitudes through the poles; each reflection shifts the next angle.
    for (int i = 0; i + 1 < m; ++i) {
      p(i) = std::fmod(std::fmod(p(i), 2.0 * std::numbers::pi) + 2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
      if (p(i) > std::numbers::pi) {
        p(i) = 2.0 * std::numbers::pi - p(i);
        for (int j = i + 1; j + 1 < m; ++j) p(j) = std::numbers::pi - p(j);
        p(m - 1) += std::numbers::pi;
      }
    }
    return detail::wrap_periodic(c, p);
  };
  return c;
}

inline BuiltinManifold circle(int n = 128) {
  if (n < 1) throw std::invalid_argument("circle: need at least one node");
  BuiltinManifold M{sphere_chart(1), {}};
  const double h = 2.0 * std::numbers::pi / n;
  for (int j = 0; j < n; ++j) {
    M.rule.nodes.push_back(Eigen::VectorXd::Constant(1, j * h));
    M.rule.weights.push_back(h);
  }
  return M;
}

inline BuiltinManifold interval(double a, double b, int n = 64) {
  BuiltinManifold M{interval_chart(a, b), {}};
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    M.rule.nodes.push_back(Eigen::VectorXd::Constant(1, 0.5 * (a + b) + 0.5 * (b - a) * x[static_cast<std::size_t>(i)]));
    M.rule.weights.push_back(0.5 * (b - a) * w[static_cast<std::size_t>(i)]);
  }
  return M;
}

inline BuiltinManifold torus(const std::vector<int>& sizes) {
  const int d = static_cast<int>(sizes.size());
  if (d < 1) throw std::invalid_argument("torus: need grid sizes");
  BuiltinManifold M{torus_chart(d), {}};
  std::size_t total = 1;
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("torus: grid sizes must be positive");
    total *= static_cast<std::size_t>(s);
  }
  for (std::size_t flat = 0; flat < total; ++flat) {
    Point p(d);
    std::size_t r = flat;
    double w = 1.0;
    for (int i = d - 1; i >= 0; --i) {
      const auto s = static_cast<std::size_t>(sizes[static_cast<std::size_t>(i)]);
      p(i) = static_cast<double>(r % s) / static_cast<double>(s);
      r /= s;
      w /= static_cast<double>(s);
    }
    M.rule.nodes.push_back(p);
    M.rule.weights.push_back(w);
  }
  return M;
}

inline BuiltinManifold torus2(int n1 = 64, int n2 = 64) { return torus({n1, n2}); }

// Gauss-Legendre in cos(colatitude) × uniform longitude (offset by half a step).
inline BuiltinManifold sphere2(int n_theta = 32, int n_phi = 64) {
  if (n_theta < 1 || n_phi < 1) throw std::invalid_argument("sphere2: grid sizes must be positive");
  BuiltinManifold M{sphere_chart(2), {}};
  std::vector<double> x, w;
  gauss_legendre(n_theta, x, w);
  const double h = 2.0 * std::numbers::pi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      Point p(2);
      p << std::acos(x[static_cast<std::size_t>(i)]), (j + 0.5) * h;
      M.rule.nodes.push_back(p);
      M.rule.weights.push_back(w[static_cast<std::size_t>(i)] * h);
    }
  }
  return M;
}

// S³: Gauss-Legendre in the first angle (weight sin²), in cos of the second, uniform longitude.
inline BuiltinManifold sphere3(int n1 = 16, int n2 = 16, int n3 = 32) {
  if (n1 < 1 || n2 < 1 || n3 < 1) throw std::invalid_argument("sphere3: grid sizes must be positive");
  BuiltinManifold M{sphere_chart(3), {}};
  std::vector<double> x1, w1, x2, w2;
  gauss_legendre(n1, x1, w1);
  gauss_legendre(n2, x2, w2);
  const double h = 2.0 * std::numbers::pi / n3;
  for (int i = 0; i < n1; ++i) {
    const double a = 0.5 * std::numbers::pi * (x1[static_cast<std::size_t>(i)] + 1.0);
    const double wa = 0.5 * std::numbers::pi * w1[static_cast<std::size_t>(i)] * std::sin(a) * std::sin(a);
    for (int j = 0; j < n2; ++j) {
      for (int l = 0; l < n3; ++l) {
        Point p(3);
        p << a, std::acos(x2[static_cast<std::size_t>(j)]), (l + 0.5) * h;
        M.rule.nodes.push_back(p);
        M.rule.weights.push_back(wa * w2[static_cast<std::size_t>(j)] * h);
      }
    }
  }
  return M;
}

// Sizes are per chart dimension; missing sizes fall back to defaults.
inline BuiltinManifold builtin(const std::string& name, const std::vector<int>& sizes = {},
                               double a = 0.0, double b = 1.0) {
  auto size = [&](std::size_t i, int fallback) { return i < sizes.size() ? sizes[i] : fallback; };
  if (name == "circle") return circle(size(0, 128));
  if (name == "interval") return interval(a, b, size(0, 64));
  if (name == "torus2") return torus({size(0, 64), size(1, 64)});
  if (name == "torus3") return torus({size(0, 16), size(1, 16), size(2, 16)});
  if (name == "sphere2") return sphere2(size(0, 32), size(1, 64));
  if (name == "sphere3") return sphere3(size(0, 16), size(1, 16), size(2, 32));
  throw std::invalid_argument("unknown manifold '" + name + "'");
}

// A parameterized submanifold u ∈ box ⊂ ℝᵈ ↦ chart point, with its chart Jacobian (m×d).
struct Embedding {
  int dim = 1;
  Eigen::VectorXd lower, upper;
  std::vector<bool> periodic;
  std::function<Point(const Eigen::VectorXd&)> position;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
};

class Curve {
 public:
  Curve(std::function<Point(double)> position, std::function<Eigen::VectorXd(double)> velocity, bool closed = false)
      : position_(std::move(position)), velocity_(std::move(velocity)), closed_(closed) {}

  Point operator()(double t) const { return position_(t); }
  Eigen::VectorXd velocity(double t) const { return velocity_(t); }
  bool closed() const { return closed_; }

  static Curve segment(const Point& a, const Point& b) {
    return Curve([a, b](double t) -> Point { return a + t * (b - a); },
                 [a, b](double) -> Eigen::VectorXd { return b - a; });
  }

  // Piecewise cubic: coefficients[s][i] = (c0,c1,c2,c3) of coordinate i on segment s,
  // evaluated at the local parameter τ ∈ [0,1] of that segment.
  static Curve piecewise_cubic(std::vector<std::vector<std::array<double, 4>>> coefficients, bool closed = false) {
    if (coefficients.empty() || coefficients.front().empty())
      throw std::invalid_argument("piecewise_cubic: empty coefficient table");
    const std::size_t dim = coefficients.front().size();
    for (const auto& seg : coefficients)
      if (seg.size() != dim) throw std::invalid_argument("piecewise_cubic: segments disagree on dimension");
    auto table = std::make_shared<const std::vector<std::vector<std::array<double, 4>>>>(std::move(coefficients));
    auto locate = [table](double t, std::size_t& s, double& tau) {
      const double S = static_cast<double>(table->size());
      const double x = std::clamp(t, 0.0, 1.0) * S;
      s = std::min(static_cast<std::size_t>(x), table->size() - 1);
      tau = x - static_cast<double>(s);
    };
    return Curve(
        [table, locate, dim](double t) -> Point {
          std::size_t s;
          double tau;
          locate(t, s, tau);
          Point p(static_cast<Eigen::Index>(dim));
          for (std::size_t i = 0; i < dim; ++i) {
            const auto& c = (*table)[s][i];
            p(static_cast<Eigen::Index>(i)) = c[0] + tau * (c[1] + tau * (c[2] + tau * c[3]));
          }
          return p;
        },
        [table, locate, dim](double t) -> Eigen::VectorXd {
          std::size_t s;
          double tau;
          locate(t, s, tau);
          const double S = static_cast<double>(table->size());
          Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
          for (std::size_t i = 0; i < dim; ++i) {
            const auto& c = (*table)[s][i];
            v(static_cast<Eigen::Index>(i)) = S * (c[1] + tau * (2.0 * c[2] + 3.0 * tau * c[3]));
          }
          return v;
        },
        closed);
  }

  // γ∘s for a monotone map s: [0,1] → [0,1] with derivative ds.
  Curve reparameterized(std::function<double(double)> s, std::function<double(double)> ds) const {
    auto pos = position_;
    auto vel = velocity_;
    return Curve([pos, s](double t) { return pos(s(t)); },
                 [vel, s, ds](double t) -> Eigen::VectorXd { return vel(s(t)) * ds(t); }, closed_);
  }

  Embedding embedding() const {
    Embedding e;
    e.dim = 1;
    e.lower = Eigen::VectorXd::Zero(1);
    e.upper = Eigen::VectorXd::Ones(1);
    e.periodic = {closed_};
    auto pos = position_;
    auto vel = velocity_;
    e.position = [pos](const Eigen::VectorXd& u) { return pos(u(0)); };
    e.jacobian = [vel](const Eigen::VectorXd& u) -> Eigen::MatrixXd { return vel(u(0)); };
    return e;
  }

 private:
  std::function<Point(double)> position_;
  std::function<Eigen::VectorXd(double)> velocity_;
  bool closed_;
};

// Arc of the equator of the S² chart from longitude phi0 to phi1.
inline Curve equator_arc(double phi0, double phi1) {
  const bool closed = std::abs(std::abs(phi1 - phi0) - 2.0 * std::numbers::pi) < 1e-12;
  return Curve(
      [phi0, phi1](double t) -> Point {
        Point p(2);
        p << 0.5 * std::numbers::pi, phi0 + t * (phi1 - phi0);
        return p;
      },
      [phi0, phi1](double) -> Eigen::VectorXd {
        Eigen::VectorXd v(2);
        v << 0.0, phi1 - phi0;
        return v;
      },
      closed);
}

// Meridian arc of the S² chart at fixed longitude, colatitude from th0 to th1 (inside (0,π)).
inline Curve meridian_arc(double phi, double th0, double th1) {
  return Curve(
      [phi, th0, th1](double t) -> Point {
        Point p(2);
        p << th0 + t * (th1 - th0), phi;
        return p;
      },
      [th0, th1](double) -> Eigen::VectorXd {
        Eigen::VectorXd v(2);
        v << th1 - th0, 0.0;
        return v;
      });
}

struct CurveFrame {
  Point point;
  Eigen::VectorXd tangent;       // γ̇ in orthonormal frame components
  Eigen::VectorXd unit_tangent;  // tangent / speed
  double speed;
};

inline CurveFrame curve_pullback_frame(const Chart& chart, const Curve& curve, double t) {
  CurveFrame f;
  f.point = curve(t);
  f.tangent = chart.frame_vector(f.point, curve.velocity(t));
  f.speed = f.tangent.norm();
  if (!(f.speed > 0.0)) throw std::invalid_argument("curve has zero velocity at t=" + std::to_string(t));
  f.unit_tangent = f.tangent / f.speed;
  return f;
}

// Gauss-Legendre rule on [0,1] for curve parameters; uniform for closed curves.
inline QuadratureRule parameter_rule(int n, bool closed = false) {
  QuadratureRule r;
  if (closed) {
    for (int j = 0; j < n; ++j) {
      r.nodes.push_back(Eigen::VectorXd::Constant(1, (j + 0.5) / n));
      r.weights.push_back(1.0 / n);
    }
    return r;
  }
  std::vector<double> x, w;
  gauss_legendre(n, x, w);
  for (int i = 0; i < n; ++i) {
    r.nodes.push_back(Eigen::VectorXd::Constant(1, 0.5 * (x[static_cast<std::size_t>(i)] + 1.0)));
    r.weights.push_back(0.5 * w[static_cast<std::size_t>(i)]);
  }
  return r;
}

// Product rule over a box parameter domain (Gauss-Legendre per axis, uniform on periodic axes).
inline QuadratureRule box_rule(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                               const std::vector<int>& sizes, const std::vector<bool>& periodic) {
  const auto d = static_cast<std::size_t>(lower.size());
  if (sizes.size() != d || periodic.size() != d) throw std::invalid_argument("box_rule: dimension mismatch");
  std::vector<std::vector<double>> xs(d), ws(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double a = lower(static_cast<Eigen::Index>(i)), b = upper(static_cast<Eigen::Index>(i));
    const int n = sizes[i];
    if (periodic[i]) {
      for (int j = 0; j < n; ++j) {
        xs[i].push_back(a + (j + 0.5) * (b - a) / n);
        ws[i].push_back((b - a) / n);
      }
    } else {
      std::vector<double> x, w;
      gauss_legendre(n, x, w);
      for (int j = 0; j < n; ++j) {
        xs[i].push_back(0.5 * (a + b) + 0.5 * (b - a) * x[static_cast<std::size_t>(j)]);
        ws[i].push_back(0.5 * (b - a) * w[static_cast<std::size_t>(j)]);
      }
    }
  }
  QuadratureRule r;
  std::vector<std::size_t> idx(d, 0);
  for (;;) {
    Point p(static_cast<Eigen::Index>(d));
    double w = 1.0;
    for (std::size_t i = 0; i < d; ++i) {
      p(static_cast<Eigen::Index>(i)) = xs[i][idx[i]];
      w *= ws[i][idx[i]];
    }
    r.nodes.push_back(p);
    r.weights.push_back(w);
    std::size_t i = d;
    while (i > 0) {
      --i;
      if (++idx[i] < xs[i].size()) break;
      idx[i] = 0;
      if (i == 0) return r;
    }
    if (d == 0) return r;
  }
}

}  // namespace zonoid
