#pragma once

#include "zonoid/exterior.hpp"
#include "zonoid/manifold.hpp"
#include "zonoid/parallel.hpp"
#include "zonoid/random_field.hpp"
#include "zonoid/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

struct CountReport {
  std::string quantity = "count";
  std::size_t trials = 0;
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
  std::vector<double> per_trial;
  std::size_t warnings = 0;        // trials with at least one warning
  std::size_t warning_events = 0;  // total warnings over all trials
  bool valid = true;
};

enum class CountMode { plain, signed_count, weighted };

// α(p, ν): p a chart point, ν the unit conormal (d_pX¹∧⋯∧d_pXᵏ normalized) in orthonormal components.
using ZeroWeight = std::function<double(const Point&, const MultiVector&)>;

struct SimulationOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  int grid_n = 256;
  int threads = 1;
  CountMode mode = CountMode::plain;
  ZeroWeight weight;
  // All components reuse the first component's coefficient stream (a designed degenerate case).
  bool shared_coefficients = false;
  bool keep_trials = true;
};

namespace detail {

inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

inline CountReport summarize(std::string quantity, std::vector<double> values, std::vector<std::size_t> warnings, bool keep) {
  CountReport r;
  r.quantity = std::move(quantity);
  r.trials = values.size();
  if (r.trials == 0) throw std::invalid_argument("simulation needs at least one trial");
  const double n = static_cast<double>(r.trials);
  r.mean = pairwise_sum(values.data(), values.size()) / n;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - r.mean) * (values[i] - r.mean);
  r.variance = r.trials > 1 ? pairwise_sum(sq.data(), sq.size()) / (n - 1.0) : 0.0;
  r.standard_error = std::sqrt(r.variance / n);
  for (std::size_t w : warnings) {
    r.warning_events += w;
    if (w) ++r.warnings;
  }
  r.valid = static_cast<double>(r.warnings) < 0.05 * n;
  if (keep) r.per_trial = std::move(values);
  return r;
}

inline std::string mode_name(CountMode m) {
  switch (m) {
    case CountMode::plain: return "count";
    case CountMode::signed_count: return "signed_count";
    case CountMode::weighted: return "weighted_count";
  }
  return "count";
}

inline RandomStream trial_stream(const SimulationOptions& o, std::size_t trial, std::size_t component = 0) {
  return RandomStream(o.seed, derive_stream(o.stream, {static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(component)}));
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// One-dimensional domains: an interval or circle chart, or a curve through pullback_model.

inline CountReport count_zeros_1d(const RandomFieldModel& model, const SimulationOptions& opt) {
  if (model.m() != 1 || model.k() != 1) throw std::invalid_argument("count_zeros_1d: need a scalar field on a 1-dimensional domain");
  if (opt.grid_n < 2) throw std::invalid_argument("count_zeros_1d: grid_n must be at least 2");
  if (opt.mode == CountMode::weighted && !opt.weight) throw std::invalid_argument("count_zeros_1d: weighted mode needs a weight");
  const Chart& chart = model.chart();
  const bool periodic = chart.periodic[0];
  const double a = chart.lower(0), b = chart.upper(0);
  const int N = opt.grid_n;
  const double h = (b - a) / N;
  const int npts = periodic ? N : N + 1;
  const int n = model.n();
  Eigen::MatrixXd V(npts, n), D(npts, n);
  std::vector<double> ts(static_cast<std::size_t>(npts));
  for (int j = 0; j < npts; ++j) {
    ts[static_cast<std::size_t>(j)] = a + j * h;
    const Jet jt = model.jet_unchecked(Point::Constant(1, ts[static_cast<std::size_t>(j)]));
    V.row(j) = jt.values.row(0);
    D.row(j) = jt.differentials.row(0);
  }

  std::vector<double> values(opt.trials);
  std::vector<std::size_t> warns(opt.trials, 0);
  parallel_for(opt.trials, opt.threads, [&](std::size_t trial) {
    RandomStream rng = detail::trial_stream(opt, trial);
    const Eigen::VectorXd c = model.sample(rng);
    const Eigen::VectorXd f = V * c, d = D * c;
    auto eval = [&](double t, double& val, double& der) {
      const Jet jt = model.jet_unchecked(Point::Constant(1, t));
      val = jt.values.row(0).dot(c);
      der = jt.differentials.row(0).dot(c);
    };
    auto value_at = [&](double t) {
      double v, dv;
      eval(t, v, dv);
      return v;
    };
    auto deriv_at = [&](double t) {
      double v, dv;
      eval(t, v, dv);
      return dv;
    };
    auto bisect = [&](auto&& g, double lo, double hi, double glo) {
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    };
    std::vector<double> roots;
    for (int j = 0; j < N; ++j) {
      const int jb = (j + 1) % npts;
      const double ta = ts[static_cast<std::size_t>(j)], tb = ta + h;
      const double fa = f(j), fb = f(jb), da = d(j), db = d(jb);
      if (fa == 0.0) {
        roots.push_back(ta);
        continue;
      }
      if (fb == 0.0) continue;  // attributed to the next cell (or the end point below)
      if ((fa < 0.0) != (fb < 0.0)) {
        roots.push_back(bisect(value_at, ta, tb, fa));
      } else if ((da < 0.0) != (db < 0.0)) {
        // A critical point inside the cell may hide a pair of zeros.
        const double tc = bisect(deriv_at, ta, tb, da);
        const double fc = value_at(tc);
        if (fc == 0.0) {
          roots.push_back(tc);
          ++warns[trial];
        } else if ((fc < 0.0) != (fa < 0.0)) {
          roots.push_back(bisect(value_at, ta, tc, fa));
          roots.push_back(bisect(value_at, tc, tb, fc));
          ++warns[trial];
        }
      }
    }
    if (!periodic && f(N) == 0.0) roots.push_back(b);
    std::sort(roots.begin(), roots.end());
    std::vector<double> uniq;
    for (double r : roots)
      if (uniq.empty() || r - uniq.back() > 1e-9) uniq.push_back(r);
    if (periodic && uniq.size() > 1 && uniq.front() + (b - a) - uniq.back() <= 1e-9) uniq.pop_back();
    double total = 0.0;
    for (double r : uniq) {
      if (opt.mode == CountMode::plain) {
        total += 1.0;
        continue;
      }
      const double dv = deriv_at(r);
      if (opt.mode == CountMode::signed_count) {
        total += (dv > 0.0) - (dv < 0.0);
      } else {
        const Point p = Point::Constant(1, r);
        const double s = (dv > 0.0) - (dv < 0.0);
        total += opt.weight(p, MultiVector(1, 1, {s}));
      }
    }
    values[trial] = total;
  });
  return detail::summarize(detail::mode_name(opt.mode), std::move(values), std::move(warns), opt.keep_trials);
}

inline CountReport count_zeros_1d(const RandomFieldModel& model, const Curve& curve, const SimulationOptions& opt) {
  return count_zeros_1d(pullback_model(model, curve.embedding()), opt);
}

// ---------------------------------------------------------------------------------------------
// Two-dimensional domains.

namespace detail {

struct Grid2 {
  int n0 = 0, n1 = 0;  // points per axis
  std::array<bool, 2> periodic{};
  std::array<double, 2> lower{}, step{};
  std::vector<Point> points;  // row-major, index i*n1 + j

  Point at(int i, int j) const { return points[static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j)]; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * static_cast<std::size_t>(n1) + static_cast<std::size_t>(j); }
  int cells0() const { return periodic[0] ? n0 : n0 - 1; }
  int cells1() const { return periodic[1] ? n1 : n1 - 1; }
};

inline Grid2 make_grid(const Chart& chart, int N) {
  if (chart.dim != 2) throw std::invalid_argument("two-dimensional simulation needs a 2-dimensional chart");
  if (N < 2) throw std::invalid_argument("grid_n must be at least 2");
  Grid2 g;
  for (int a = 0; a < 2; ++a) {
    g.periodic[static_cast<std::size_t>(a)] = chart.periodic[static_cast<std::size_t>(a)];
    g.lower[static_cast<std::size_t>(a)] = chart.lower(a);
    g.step[static_cast<std::size_t>(a)] = chart.period(a) / N;
  }
  g.n0 = g.periodic[0] ? N : N + 1;
  g.n1 = g.periodic[1] ? N : N + 1;
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      Point p(2);
      p << g.lower[0] + i * g.step[0], g.lower[1] + j * g.step[1];
      g.points.push_back(p);
    }
  return g;
}

inline double chart_distance(const Chart& chart, const Point& p, const Point& q) {
  if (chart.embedding) return (chart.embedding(p) - chart.embedding(q)).norm();
  double s = 0.0;
  for (int i = 0; i < chart.dim; ++i) {
    double d = std::abs(p(i) - q(i));
    if (chart.periodic[static_cast<std::size_t>(i)]) d = std::min(d, chart.period(i) - d);
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace detail

// Counts points of {F = 0} for F = (X¹, X²) built from independent component models
// (two scalar models, or one model with k = 2) on the same 2-dimensional chart.
inline CountReport count_zeros_2d(const std::vector<RandomFieldModel>& components, const SimulationOptions& opt) {
  if (components.empty()) throw std::invalid_argument("count_zeros_2d: no components");
  int ktot = 0;
  for (const auto& c : components) {
    if (c.m() != 2) throw std::invalid_argument("count_zeros_2d: components must live on a 2-dimensional chart");
    ktot += c.k();
  }
  if (ktot != 2) throw std::invalid_argument("count_zeros_2d: components must have total codomain dimension 2");
  const Chart& chart = components.front().chart();
  const detail::Grid2 grid = detail::make_grid(chart, opt.grid_n);
  if (opt.mode == CountMode::weighted && !opt.weight) throw std::invalid_argument("count_zeros_2d: weighted mode needs a weight");

  std::vector<Eigen::MatrixXd> V;  // per component: (points·k_c) × n_c
  for (const auto& c : components) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(grid.points.size()) * c.k(), c.n());
    for (std::size_t q = 0; q < grid.points.size(); ++q) {
      const Jet jt = c.jet_unchecked(grid.points[q]);
      M.middleRows(static_cast<Eigen::Index>(q) * c.k(), c.k()) = jt.values;
    }
    V.push_back(std::move(M));
  }

  std::vector<double> values(opt.trials);
  std::vector<std::size_t> warns(opt.trials, 0);
  parallel_for(opt.trials, opt.threads, [&](std::size_t trial) {
    std::vector<Eigen::VectorXd> coef;
    for (std::size_t ci = 0; ci < components.size(); ++ci) {
      RandomStream rng = detail::trial_stream(opt, trial, opt.shared_coefficients ? 0 : ci);
      coef.push_back(components[ci].sample(rng));
    }
    // Grid values, component-major: F[r][q].
    std::array<Eigen::VectorXd, 2> F;
    {
      int r = 0;
      for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const Eigen::VectorXd all = V[ci] * coef[ci];
        const int kc = components[ci].k();
        for (int a = 0; a < kc; ++a, ++r) {
          F[static_cast<std::size_t>(r)].resize(static_cast<Eigen::Index>(grid.points.size()));
          for (std::size_t q = 0; q < grid.points.size(); ++q)
            F[static_cast<std::size_t>(r)](static_cast<Eigen::Index>(q)) = all(static_cast<Eigen::Index>(q) * kc + a);
        }
      }
    }
    auto eval = [&](const Point& p, Eigen::Vector2d& val, Eigen::Matrix2d& J) {
      int r = 0;
      for (std::size_t ci = 0; ci < components.size(); ++ci) {
        const Jet jt = components[ci].jet_unchecked(p);
        const int kc = components[ci].k();
        for (int a = 0; a < kc; ++a, ++r) {
          val(r) = jt.values.row(a).dot(coef[ci]);
          J(r, 0) = jt.differentials.row(a * 2).dot(coef[ci]);
          J(r, 1) = jt.differentials.row(a * 2 + 1).dot(coef[ci]);
        }
      }
    };
    const Eigen::Vector2d step(grid.step[0], grid.step[1]);
    auto newton = [&](Point x, Point& root) {
      Eigen::Vector2d val;
      Eigen::Matrix2d J;
      for (int it = 0; it < 40; ++it) {
        eval(x, val, J);
        const Eigen::FullPivLU<Eigen::Matrix2d> lu(J);
        if (lu.rank() < 2) return false;
        Eigen::Vector2d dx = lu.solve(-val);
        if (!dx.allFinite()) return false;
        // Damp steps longer than a few cells.
        const double len = (dx.array() / step.array()).abs().maxCoeff();
        if (len > 4.0) dx *= 4.0 / len;
        x += dx;
        x = chart.normalize(x);
        if ((dx.array() / step.array()).abs().maxCoeff() < 1e-10 ) {
          eval(x, val, J);
          if (val.cwiseAbs().maxCoeff() < 1e-8) {
            root = x;
            return true;
          }
        }
      }
      eval(x, val, J);
      if (val.cwiseAbs().maxCoeff() < 1e-10) {
        root = x;
        return true;
      }
      return false;
    };
    auto inside = [&](const Point& r, const Point& lo, double w0, double w1) {
      for (int a = 0; a < 2; ++a) {
        double d = r(a) - lo(a);
        if (grid.periodic[static_cast<std::size_t>(a)]) {
          const double L = chart.period(a);
          d = std::fmod(std::fmod(d, L) + L, L);
          if (d > L - 1e-9) d -= L;
        }
        const double w = a == 0 ? w0 : w1;
        if (d < -1e-9 || d > w + 1e-9) return false;
      }
      return true;
    };
    // A screened cell is no real candidate when the field is well conditioned there and its
    // linearization puts the root more than a cell away (nearby zero curves that do not cross).
    auto linear_model_excludes = [&](const Point& c) {
      Eigen::Vector2d val;
      Eigen::Matrix2d J;
      eval(c, val, J);
      const Eigen::JacobiSVD<Eigen::Matrix2d> svd(J);
      const auto& s = svd.singularValues();
      if (!(s(1) > 0.0) || s(0) / s(1) > 1e8) return false;
      const Eigen::Vector2d dx = J.partialPivLu().solve(-val);
      return (dx.array() / step.array()).abs().maxCoeff() > 1.0;
    };
    std::vector<Point> roots;
    std::size_t failures = 0;
    auto screen = [&](const std::array<Point, 4>& corners, bool computed, const std::array<std::size_t, 4>& idx) {
      for (int r = 0; r < 2; ++r) {
        double lo = 1e300, hi = -1e300;
        for (int q = 0; q < 4; ++q) {
          double v;
          if (computed) {
            v = F[static_cast<std::size_t>(r)](static_cast<Eigen::Index>(idx[static_cast<std::size_t>(q)]));
          } else {
            Eigen::Vector2d val;
            Eigen::Matrix2d J;
            eval(corners[static_cast<std::size_t>(q)], val, J);
            v = val(r);
          }
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        if (lo > 0.0 || hi < 0.0) return false;
      }
      return true;
    };
    for (int i = 0; i < grid.cells0(); ++i) {
      for (int j = 0; j < grid.cells1(); ++j) {
        const int i1 = (i + 1) % grid.n0, j1 = (j + 1) % grid.n1;
        const std::array<std::size_t, 4> idx{grid.index(i, j), grid.index(i1, j), grid.index(i1, j1), grid.index(i, j1)};
        if (!screen({}, true, idx)) continue;
        const Point lo = grid.at(i, j);
        Point center = lo;
        center(0) += 0.5 * step(0);
        center(1) += 0.5 * step(1);
        Point root;
        const bool ok = newton(center, root);
        if (ok) roots.push_back(root);
        if (ok && inside(root, lo, step(0), step(1))) continue;
        // Subdivide once; sub-cells whose Newton run diverges are flagged.
        bool diverged = false;
        for (int si = 0; si < 2; ++si) {
          for (int sj = 0; sj < 2; ++sj) {
            Point slo = lo;
            slo(0) += si * 0.5 * step(0);
            slo(1) += sj * 0.5 * step(1);
            std::array<Point, 4> corners{slo, slo, slo, slo};
            corners[1](0) += 0.5 * step(0);
            corners[2](0) += 0.5 * step(0);
            corners[2](1) += 0.5 * step(1);
            corners[3](1) += 0.5 * step(1);
            for (auto& c : corners) c = chart.normalize(c);
            if (!screen(corners, false, {})) continue;
            Point sc = slo;
            sc(0) += 0.25 * step(0);
            sc(1) += 0.25 * step(1);
            Point sroot;
            if (newton(sc, sroot))
              roots.push_back(sroot);
            else if (!linear_model_excludes(sc))
              diverged = true;
          }
        }
        if (diverged) ++failures;
      }
    }
    std::vector<Point> uniq;
    for (const auto& r : roots) {
      bool dup = false;
      for (const auto& u : uniq)
        if (detail::chart_distance(chart, r, u) <= 1e-6) {
          dup = true;
          break;
        }
      if (!dup) uniq.push_back(r);
    }
    double total = 0.0;
    std::size_t w = failures;
    for (const auto& r : uniq) {
      Eigen::Vector2d val;
      Eigen::Matrix2d J;
      eval(r, val, J);
      const Eigen::Matrix2d Jo = J * chart.coframe(r).transpose();
      const Eigen::JacobiSVD<Eigen::Matrix2d> svd(Jo);
      const auto& s = svd.singularValues();
      if (!(s(1) > 0.0) || s(0) / s(1) > 1e8) ++w;
      const double det = Jo.determinant();
      if (opt.mode == CountMode::plain) {
        total += 1.0;
      } else if (opt.mode == CountMode::signed_count) {
        total += (det > 0.0) - (det < 0.0);
      } else {
        const MultiVector nu = wedge_vectors(Eigen::MatrixXd(Jo));
        total += opt.weight(r, nu * (1.0 / std::max(nu.norm(), 1e-300)));
      }
    }
    values[trial] = total;
    warns[trial] = w;
  });
  return detail::summarize(detail::mode_name(opt.mode), std::move(values), std::move(warns), opt.keep_trials);
}

// Riemannian length of {X = 0} (or ∫_Z α(p, ν) when weighted) by marching squares.
inline CountReport measure_zero_length_2d(const RandomFieldModel& model, const SimulationOptions& opt) {
  if (model.m() != 2 || model.k() != 1) throw std::invalid_argument("measure_zero_length_2d: need a scalar field on a 2-dimensional chart");
  if (opt.mode == CountMode::weighted && !opt.weight) throw std::invalid_argument("measure_zero_length_2d: weighted mode needs a weight");
  if (opt.mode == CountMode::signed_count) throw std::invalid_argument("measure_zero_length_2d: signed mode is not defined for lengths");
  const Chart& chart = model.chart();
  const detail::Grid2 grid = detail::make_grid(chart, opt.grid_n);
  Eigen::MatrixXd V(static_cast<Eigen::Index>(grid.points.size()), model.n());
  for (std::size_t q = 0; q < grid.points.size(); ++q) V.row(static_cast<Eigen::Index>(q)) = model.jet_unchecked(grid.points[q]).values.row(0);

  std::vector<double> values(opt.trials);
  std::vector<std::size_t> warns(opt.trials, 0);
  parallel_for(opt.trials, opt.threads, [&](std::size_t trial) {
    RandomStream rng = detail::trial_stream(opt, trial);
    const Eigen::VectorXd c = model.sample(rng);
    const Eigen::VectorXd f = V * c;
    double total = 0.0;
    auto add_segment = [&](const Point& p, const Point& q) {
      const Eigen::Vector2d d = q - p;
      if (d.squaredNorm() == 0.0) return;
      const Point mid = 0.5 * (p + q);
      const double len = std::sqrt(std::max(0.0, d.dot(chart.metric(mid) * d)));
      if (opt.mode == CountMode::plain) {
        total += len;
        return;
      }
      Eigen::VectorXd a(2);
      a << -d(1), d(0);
      const Eigen::VectorXd nu = chart.coframe(mid) * a;
      const double nn = nu.norm();
      if (nn == 0.0) return;
      total += len * opt.weight(mid, MultiVector::vector(Eigen::VectorXd(nu / nn)));
    };
    for (int i = 0; i < grid.cells0(); ++i) {
      for (int j = 0; j < grid.cells1(); ++j) {
        const int i1 = (i + 1) % grid.n0, j1 = (j + 1) % grid.n1;
        // Corners counterclockwise: (i,j), (i+1,j), (i+1,j+1), (i,j+1), unwrapped coordinates.
        std::array<Point, 4> P;
        P[0] = grid.at(i, j);
        P[1] = P[0];
        P[1](0) += grid.step[0];
        P[2] = P[1];
        P[2](1) += grid.step[1];
        P[3] = P[0];
        P[3](1) += grid.step[1];
        const std::array<double, 4> v{f(static_cast<Eigen::Index>(grid.index(i, j))), f(static_cast<Eigen::Index>(grid.index(i1, j))),
                                      f(static_cast<Eigen::Index>(grid.index(i1, j1))), f(static_cast<Eigen::Index>(grid.index(i, j1)))};
        std::array<bool, 4> s;
        for (int q = 0; q < 4; ++q) s[static_cast<std::size_t>(q)] = v[static_cast<std::size_t>(q)] >= 0.0;
        std::vector<Point> cross;
        std::vector<int> edge;
        for (int e = 0; e < 4; ++e) {
          const int a = e, b = (e + 1) % 4;
          if (s[static_cast<std::size_t>(a)] == s[static_cast<std::size_t>(b)]) continue;
          const double va = v[static_cast<std::size_t>(a)], vb = v[static_cast<std::size_t>(b)];
          const double t = va / (va - vb);
          cross.push_back(P[static_cast<std::size_t>(a)] + t * (P[static_cast<std::size_t>(b)] - P[static_cast<std::size_t>(a)]));
          edge.push_back(e);
        }
        if (cross.size() == 2) {
          add_segment(cross[0], cross[1]);
        } else if (cross.size() == 4) {
          // Saddle: the center sign decides which corners are joined.
          const double vc = 0.25 * (v[0] + v[1] + v[2] + v[3]);
          if ((vc >= 0.0) == s[0]) {
            add_segment(cross[0], cross[1]);
            add_segment(cross[2], cross[3]);
          } else {
            add_segment(cross[1], cross[2]);
            add_segment(cross[3], cross[0]);
          }
        }
      }
    }
    values[trial] = total;
  });
  return detail::summarize(opt.mode == CountMode::plain ? "length" : "weighted_length", std::move(values), std::move(warns),
                           opt.keep_trials);
}

// ---------------------------------------------------------------------------------------------
// Export.

inline nlohmann::json to_json(const CountReport& r, bool include_trials = false) {
  nlohmann::json j{{"quantity", r.quantity},
                   {"trials", r.trials},
                   {"mean", r.mean},
                   {"variance", r.variance},
                   {"standard_error", r.standard_error},
                   {"warnings", r.warnings},
                   {"warning_events", r.warning_events},
                   {"valid", r.valid}};
  if (include_trials) j["per_trial"] = r.per_trial;
  return j;
}

inline void write_csv(std::ostream& os, const CountReport& r, bool include_trials = false) {
  os.precision(17);
  os << "quantity,trials,mean,variance,standard_error,warnings,valid\n";
  os << r.quantity << ',' << r.trials << ',' << r.mean << ',' << r.variance << ',' << r.standard_error << ',' << r.warnings << ','
     << (r.valid ? "true" : "false") << '\n';
  if (include_trials) {
    os << "trial,value\n";
    for (std::size_t i = 0; i < r.per_trial.size(); ++i) os << i << ',' << r.per_trial[i] << '\n';
  }
}

}  // namespace zonoid
