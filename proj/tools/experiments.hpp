#pragma once

#include "zonoid/zonoid.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace zonoid::experiments {

struct RunContext {
  std::uint64_t seed = 0;
  bool seed_override = false;
  int threads = 1;
  bool dump_trials = false;
  std::filesystem::path config_dir = ".";
};

struct ExperimentResult {
  std::string kind;
  bool pass = true;
  nlohmann::json report;
  std::string csv;  // body, without the comment header
  std::vector<std::pair<std::string, std::string>> extra_csv;  // file name, body
};

inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

namespace detail {

// Reads the prediction-vs-oracle verdict: |a − b| ≤ 3·√(se_a² + se_b²).
inline bool within3(double a, double se_a, double b, double se_b) {
  return std::abs(a - b) <= 3.0 * std::sqrt(se_a * se_a + se_b * se_b) + 1e-12 * std::max(1.0, std::abs(b));
}

inline std::vector<RandomFieldModel> load_models(TableReader& root, const Chart& chart) {
  std::vector<RandomFieldModel> models;
  auto single = root.table("model");
  auto many = root.tables("models");
  if (single && !many.empty()) throw ConfigError("models", "give either [model] or [[models]], not both");
  if (single) models.push_back(load_model(*single, chart));
  for (auto& t : many) models.push_back(load_model(t, chart));
  if (models.empty()) throw ConfigError("model", "missing required table");
  return models;
}

inline CountMode parse_mode(const std::string& q, const std::string& key) {
  if (q == "count") return CountMode::plain;
  if (q == "signed") return CountMode::signed_count;
  throw ConfigError(key, "unknown quantity '" + q + "'");
}

inline SimulationOptions sim_options(TableReader& root, const RunContext& ctx) {
  SimulationOptions so;
  so.trials = root.get<std::size_t>("trials", 1000);
  so.grid_n = root.get<int>("grid", 256);
  so.seed = ctx.seed;
  so.stream = derive_stream(0x5157ULL, {root.get<std::uint64_t>("stream", 0)});
  so.threads = ctx.threads;
  if (so.trials == 0) throw ConfigError("trials", "must be positive");
  if (so.grid_n < 2) throw ConfigError("grid", "must be at least 2");
  return so;
}

inline SectionOptions section_options(TableReader& root, const RunContext& ctx) {
  SectionOptions o;
  o.n_samples = root.get<std::size_t>("n_samples", 4096);
  o.seed = ctx.seed;
  o.stream = root.get<std::uint64_t>("stream", 0);
  o.threads = ctx.threads;
  if (o.n_samples == 0) throw ConfigError("n_samples", "must be positive");
  return o;
}

inline std::string count_csv(const CountReport& r, bool trials) {
  std::ostringstream os;
  write_csv(os, r, trials);
  return os.str();
}

inline Curve load_curve(TableReader t) {
  const auto kind = t.require<std::string>("kind");
  if (kind == "equator_arc") {
    const double a = t.get<double>("phi0", 0.0), b = t.require<double>("phi1");
    t.finish();
    return equator_arc(a, b);
  }
  if (kind == "meridian_arc") {
    const double phi = t.get<double>("phi", 0.0), a = t.require<double>("theta0"), b = t.require<double>("theta1");
    t.finish();
    return meridian_arc(phi, a, b);
  }
  if (kind == "segment") {
    auto a = t.numbers("from"), b = t.numbers("to");
    if (!a || !b || a->size() != b->size()) throw ConfigError(t.key_path("from"), "segment needs from and to of equal length");
    t.finish();
    return Curve::segment(Eigen::Map<const Eigen::VectorXd>(a->data(), static_cast<Eigen::Index>(a->size())),
                          Eigen::Map<const Eigen::VectorXd>(b->data(), static_cast<Eigen::Index>(b->size())));
  }
  if (kind == "cubic") {
    // segments = [ [ [c0,c1,c2,c3] per coordinate ] per segment ]
    const bool closed = t.get<bool>("closed", false);
    auto segs = t.tables("pieces");
    std::vector<std::vector<std::array<double, 4>>> table;
    for (auto& s : segs) {
      auto M = s.matrix("coefficients");
      if (!M || M->cols() != 4) throw ConfigError(s.key_path("coefficients"), "expected rows [c0, c1, c2, c3]");
      std::vector<std::array<double, 4>> seg;
      for (Eigen::Index r = 0; r < M->rows(); ++r) seg.push_back({(*M)(r, 0), (*M)(r, 1), (*M)(r, 2), (*M)(r, 3)});
      table.push_back(std::move(seg));
      s.finish();
    }
    t.finish();
    try {
      return Curve::piecewise_cubic(std::move(table), closed);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(t.key_path("pieces"), e.what());
    }
  }
  throw ConfigError(t.key_path("kind"), "unknown curve kind '" + kind + "'");
}

inline Zonotope load_body(const nlohmann::json& j, const std::string& key) {
  try {
    return zonotope_from_json(j);
  } catch (const std::exception& e) {
    throw ConfigError(key, std::string("invalid zonotope: ") + e.what());
  }
}

inline nlohmann::json toml_to_json(const toml::node& n) {
  if (auto t = n.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) j[std::string(k.str())] = toml_to_json(v);
    return j;
  }
  if (auto a = n.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v));
    return j;
  }
  if (n.is_integer()) return *n.value<std::int64_t>();
  if (n.is_floating_point()) return *n.value<double>();
  if (n.is_boolean()) return *n.value<bool>();
  if (n.is_string()) return *n.value<std::string>();
  return nullptr;
}

inline Zonotope random_zonotope(int m, int generators, RandomStream& rng) {
  Zonotope z(m, 1);
  std::vector<double> v(static_cast<std::size_t>(m));
  for (int g = 0; g < generators; ++g) {
    for (double& c : v) c = rng.normal();
    z.add_generator(0.5 + rng.uniform(), v);
  }
  return z;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------

inline ExperimentResult run_section(TableReader& root, const RunContext& ctx) {
  auto M = load_manifold(root.require_table("manifold"));
  auto models = detail::load_models(root, M.chart);
  const SectionOptions o = detail::section_options(root, ctx);
  const bool with_generators = root.get<bool>("include_generators", false);
  root.finish();
  if (models.size() != 1) throw ConfigError("models", "section takes a single model");
  const auto s = estimate_section(models.front(), M.rule, o);
  const Estimate vol = kac_rice_volume(s);
  ExperimentResult r;
  r.kind = "section";
  r.report = to_json(s, with_generators);
  r.report["expected_volume"] = {{"value", vol.value}, {"standard_error", vol.standard_error}};
  if (s.k == s.m) {
    const Estimate cur = expected_current_pairing(s, [&](const Point&) { return MultiVector::scalar(s.m, 1.0); });
    r.report["current_total"] = {{"value", cur.value}, {"standard_error", cur.standard_error}};
  }
  std::ostringstream os;
  write_csv(os, s);
  r.csv = os.str();
  return r;
}

inline ExperimentResult run_expect(TableReader& root, const RunContext& ctx) {
  auto M = load_manifold(root.require_table("manifold"));
  auto models = detail::load_models(root, M.chart);
  const SectionOptions o = detail::section_options(root, ctx);
  SimulationOptions so = detail::sim_options(root, ctx);
  const auto quantity = root.get<std::string>("quantity", "count");
  const auto expected = root.optional<double>("expected");
  root.finish();
  so.keep_trials = ctx.dump_trials;

  Estimate pred;
  CountReport mc;
  const int m = M.chart.dim;
  int ktot = 0;
  for (const auto& md : models) ktot += md.k();
  if (quantity == "length") {
    if (models.size() != 1 || m != 2 || ktot != 1) throw ConfigError("quantity", "length needs one scalar model on a surface");
    pred = kac_rice_volume(estimate_section(models[0], M.rule, o));
    mc = measure_zero_length_2d(models[0], so);
  } else {
    so.mode = detail::parse_mode(quantity, "quantity");
    if (ktot != m) throw ConfigError("models", "point counts need total codimension equal to the manifold dimension");
    ZonoidSectionEstimate s = estimate_section(models[0], M.rule, o);
    for (std::size_t i = 1; i < models.size(); ++i) {
      SectionOptions oi = o;
      oi.stream = derive_stream(o.stream, {0xC0FFEEULL, i});
      s = wedge_sections(s, estimate_section(models[i], M.rule, oi), ctx.threads);
    }
    if (so.mode == CountMode::plain)
      pred = kac_rice_volume(s);
    else
      pred = expected_current_pairing(s, [m](const Point&) { return MultiVector::scalar(m, 1.0); });
    if (m == 1)
      mc = count_zeros_1d(models[0], so);
    else if (m == 2)
      mc = count_zeros_2d(models, so);
    else
      throw ConfigError("manifold", "point counting is implemented on 1- and 2-dimensional manifolds");
  }
  bool pass = mc.valid && detail::within3(pred.value, pred.standard_error, mc.mean, mc.standard_error);
  if (expected) {
    pass = pass && detail::within3(pred.value, pred.standard_error, *expected, 1e-9 * std::max(1.0, std::abs(*expected)));
    pass = pass && detail::within3(mc.mean, mc.standard_error, *expected, 1e-9 * std::max(1.0, std::abs(*expected)));
  }
  ExperimentResult r;
  r.kind = "expect";
  r.pass = pass;
  r.report = {{"quantity", quantity},
              {"prediction", {{"value", pred.value}, {"standard_error", pred.standard_error}}},
              {"simulation", to_json(mc, ctx.dump_trials)},
              {"combined_standard_error", std::hypot(pred.standard_error, mc.standard_error)},
              {"verdict", pass ? "PASS" : "FAIL"}};
  if (expected) r.report["expected"] = *expected;
  std::ostringstream os;
  os << "quantity,prediction,prediction_se,mc_mean,mc_se,combined_se,expected,verdict\n";
  os << quantity << ',' << fmt(pred.value) << ',' << fmt(pred.standard_error) << ',' << fmt(mc.mean) << ',' << fmt(mc.standard_error)
     << ',' << fmt(std::hypot(pred.standard_error, mc.standard_error)) << ',' << (expected ? fmt(*expected) : "") << ','
     << (pass ? "PASS" : "FAIL") << '\n';
  r.csv = os.str();
  if (ctx.dump_trials) r.extra_csv.emplace_back("trials.csv", detail::count_csv(mc, true));
  return r;
}

inline ExperimentResult run_crofton(TableReader& root, const RunContext& ctx) {
  auto M = load_manifold(root.require_table("manifold"));
  auto models = detail::load_models(root, M.chart);
  if (models.size() != 1 || models[0].k() != 1) throw ConfigError("model", "crofton needs one scalar model");
  const RandomFieldModel& model = models[0];
  SectionOptions o = detail::section_options(root, ctx);
  auto curve_t = root.table("curve");
  auto surface_t = root.table("surface");
  ExperimentResult r;
  r.kind = "crofton";
  if (curve_t && surface_t) throw ConfigError("surface", "give either [curve] or [surface]");
  if (curve_t) {
    const int nodes = curve_t->get<int>("nodes", 64);
    if (nodes < 1) throw ConfigError(curve_t->key_path("nodes"), "must be positive");
    const Curve curve = detail::load_curve(*curve_t);
    SimulationOptions so = detail::sim_options(root, ctx);
    root.finish();
    so.keep_trials = ctx.dump_trials;
    const QuadratureRule rule = parameter_rule(nodes, curve.closed());
    const FinslerStructure F = finsler_along(model, curve, rule, o);
    const Estimate len = finsler_length(F, curve, rule);
    const CountReport mc = count_zeros_1d(model, curve, so);
    const double pred = 2.0 * len.value, pred_se = 2.0 * len.standard_error;
    r.pass = mc.valid && detail::within3(pred, pred_se, mc.mean, mc.standard_error);
    r.report = {{"finsler_length", {{"value", len.value}, {"standard_error", len.standard_error}}},
                {"prediction", {{"value", pred}, {"standard_error", pred_se}}},
                {"simulation", to_json(mc, ctx.dump_trials)},
                {"verdict", r.pass ? "PASS" : "FAIL"}};
    std::ostringstream os;
    os << "quantity,prediction,prediction_se,mc_mean,mc_se,verdict\n";
    os << "curve_intersections," << fmt(pred) << ',' << fmt(pred_se) << ',' << fmt(mc.mean) << ',' << fmt(mc.standard_error) << ','
       << (r.pass ? "PASS" : "FAIL") << '\n';
    r.csv = os.str();
    std::ostringstream lt;
    write_length_table(lt, F, curve, rule);
    r.extra_csv.emplace_back("lengths.csv", lt.str());
    if (ctx.dump_trials) r.extra_csv.emplace_back("trials.csv", detail::count_csv(mc, true));
    return r;
  }
  if (!surface_t) throw ConfigError("curve", "crofton needs a [curve] or [surface] table");
  const auto kind = surface_t->require<std::string>("kind");
  const auto sizes = surface_t->integers("nodes").value_or(std::vector<int>{16, 32});
  Embedding S;
  QuadratureRule rule;
  if (kind == "equatorial_sphere") {
    if (M.chart.name != "sphere3") throw ConfigError(surface_t->key_path("kind"), "equatorial_sphere needs the sphere3 manifold");
    S.dim = 2;
    S.lower = Eigen::Vector2d(0.0, 0.0);
    S.upper = Eigen::Vector2d(std::numbers::pi, 2.0 * std::numbers::pi);
    S.periodic = {false, true};
    S.position = [](const Eigen::VectorXd& u) -> Point { return Eigen::Vector3d(0.5 * std::numbers::pi, u(0), u(1)); };
    S.jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 2);
      J(1, 0) = 1.0;
      J(2, 1) = 1.0;
      return J;
    };
  } else if (kind == "torus_slice") {
    if (M.chart.name != "torus3") throw ConfigError(surface_t->key_path("kind"), "torus_slice needs the torus3 manifold");
    const double h = surface_t->get<double>("height", 0.0);
    S.dim = 2;
    S.lower = Eigen::Vector2d(0.0, 0.0);
    S.upper = Eigen::Vector2d(1.0, 1.0);
    S.periodic = {true, true};
    S.position = [h](const Eigen::VectorXd& u) -> Point { return Eigen::Vector3d(u(0), u(1), h); };
    S.jacobian = [](const Eigen::VectorXd&) -> Eigen::MatrixXd {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 2);
      J(0, 0) = 1.0;
      J(1, 1) = 1.0;
      return J;
    };
  } else {
    throw ConfigError(surface_t->key_path("kind"), "unknown surface kind '" + kind + "'");
  }
  surface_t->finish();
  root.finish();
  if (sizes.size() != 2) throw ConfigError("surface.nodes", "expected two node counts");
  rule = box_rule(S.lower, S.upper, sizes, S.periodic);
  CroftonOptions co;
  co.section = o;
  const CroftonResult c = crofton_check(model, S, rule, co);
  const bool algebraic = std::abs(c.algebraic_lhs - c.algebraic_rhs) <= 1e-9 * std::max(1.0, std::abs(c.algebraic_rhs));
  r.pass = algebraic && detail::within3(c.lhs.value, c.lhs.standard_error, c.rhs.value, c.rhs.standard_error);
  r.report = {{"k", c.k},
              {"lhs", {{"value", c.lhs.value}, {"standard_error", c.lhs.standard_error}}},
              {"rhs", {{"value", c.rhs.value}, {"standard_error", c.rhs.standard_error}}},
              {"algebraic_lhs", c.algebraic_lhs},
              {"algebraic_rhs", c.algebraic_rhs},
              {"verdict", r.pass ? "PASS" : "FAIL"}};
  std::ostringstream os;
  os << "quantity,lhs,lhs_se,rhs,rhs_se,algebraic_lhs,algebraic_rhs,verdict\n";
  os << "surface_intersections," << fmt(c.lhs.value) << ',' << fmt(c.lhs.standard_error) << ',' << fmt(c.rhs.value) << ','
     << fmt(c.rhs.standard_error) << ',' << fmt(c.algebraic_lhs) << ',' << fmt(c.algebraic_rhs) << ',' << (r.pass ? "PASS" : "FAIL")
     << '\n';
  r.csv = os.str();
  return r;
}

inline ExperimentResult run_inequality(TableReader& root, const RunContext& ctx) {
  const auto kind = root.require<std::string>("kind");
  const int m = root.get<int>("dim", 2);
  const int cases = root.get<int>("cases", 100);
  const int gens = root.get<int>("generators", 6);
  const auto ts = root.numbers("t").value_or(std::vector<double>{0.25, 0.5, 0.75});
  root.finish();
  if (m < 1 || m > 4) throw ConfigError("dim", "must lie in 1..4");
  if (cases < 1) throw ConfigError("cases", "must be positive");
  if (gens < 1) throw ConfigError("generators", "must be positive");
  if (kind != "af" && kind != "bm") throw ConfigError("kind", "unknown inequality '" + kind + "'");
  if (kind == "af" && m < 2) throw ConfigError("dim", "Alexandrov-Fenchel needs dim >= 2");
  for (double t : ts)
    if (!(t >= 0.0 && t <= 1.0)) throw ConfigError("t", "values must lie in [0,1]");
  std::ostringstream os;
  os << "case,t,lhs,rhs,holds\n";
  bool all = true;
  std::size_t n_hold = 0, n_total = 0;
  for (int c = 0; c < cases; ++c) {
    RandomStream rng(ctx.seed, derive_stream(0x1E0ULL, {static_cast<std::uint64_t>(c)}));
    const Zonotope K = detail::random_zonotope(m, gens, rng);
    const Zonotope L = detail::random_zonotope(m, gens, rng);
    std::vector<SidesResult> rs;
    std::vector<double> tv;
    if (kind == "af") {
      std::vector<Zonotope> rest;
      for (int i = 0; i < m - 2; ++i) rest.push_back(detail::random_zonotope(m, gens, rng));
      rs.push_back(af_inequality(K, L, rest));
      tv.push_back(std::nan(""));
    } else {
      for (double t : ts) {
        rs.push_back(bm_inequality(K, L, t));
        tv.push_back(t);
      }
    }
    for (std::size_t i = 0; i < rs.size(); ++i) {
      all = all && rs[i].holds;
      n_hold += rs[i].holds;
      ++n_total;
      os << c << ',' << (std::isnan(tv[i]) ? std::string() : fmt(tv[i])) << ',' << fmt(rs[i].lhs) << ',' << fmt(rs[i].rhs) << ','
         << (rs[i].holds ? "true" : "false") << '\n';
    }
  }
  ExperimentResult r;
  r.kind = "inequality";
  r.pass = all;
  r.report = {{"inequality", kind}, {"dim", m}, {"checks", n_total}, {"holds", n_hold}, {"verdict", all ? "PASS" : "FAIL"}};
  r.csv = os.str();
  return r;
}

inline ExperimentResult run_simulate(TableReader& root, const RunContext& ctx) {
  auto M = load_manifold(root.require_table("manifold"));
  auto models = detail::load_models(root, M.chart);
  SimulationOptions so = detail::sim_options(root, ctx);
  const auto quantity = root.get<std::string>("quantity", "count");
  root.finish();
  so.keep_trials = ctx.dump_trials;
  CountReport mc;
  if (quantity == "length") {
    if (models.size() != 1) throw ConfigError("models", "length needs a single model");
    mc = measure_zero_length_2d(models[0], so);
  } else {
    so.mode = detail::parse_mode(quantity, "quantity");
    if (M.chart.dim == 1) {
      if (models.size() != 1) throw ConfigError("models", "1-dimensional counting takes a single model");
      mc = count_zeros_1d(models[0], so);
    } else {
      mc = count_zeros_2d(models, so);
    }
  }
  ExperimentResult r;
  r.kind = "simulate";
  r.pass = mc.valid;
  r.report = to_json(mc, ctx.dump_trials);
  r.csv = detail::count_csv(mc, ctx.dump_trials);
  return r;
}


inline ExperimentResult run_algebra(TableReader& root, const RunContext& ctx) {
  const auto op = root.require<std::string>("op");
  std::vector<Zonotope> bodies;
  for (const auto& file : root.strings("bodies").value_or(std::vector<std::string>{})) {
    const auto path = ctx.config_dir / file;
    std::ifstream in(path);
    if (!in) throw ConfigError("bodies", "cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bodies", "'" + path.string() + "' is not valid JSON: " + e.what());
    }
    bodies.push_back(detail::load_body(j, "bodies"));
  }
  for (auto& t : root.tables("body")) {
    const int m = t.require<int>("m");
    const int k = t.get<int>("k", 1);
    if (m < 1 || k < 0 || k > m) throw ConfigError(t.key_path("m"), "need 1 <= m and 0 <= k <= m");
    Zonotope z(m, k);
    if (auto G = t.matrix("generators")) {
      if (static_cast<std::size_t>(G->cols()) != z.coord_dim())
        throw ConfigError(t.key_path("generators"), "rows must have C(m,k) = " + std::to_string(z.coord_dim()) + " coordinates");
      const auto w = t.numbers("weights").value_or(std::vector<double>(static_cast<std::size_t>(G->rows()), 1.0));
      if (static_cast<Eigen::Index>(w.size()) != G->rows()) throw ConfigError(t.key_path("weights"), "one weight per generator");
      for (Eigen::Index r = 0; r < G->rows(); ++r) {
        if (!(w[static_cast<std::size_t>(r)] >= 0.0)) throw ConfigError(t.key_path("weights"), "weights must be nonnegative");
        Eigen::VectorXd row = G->row(r).transpose();
        z.add_generator(w[static_cast<std::size_t>(r)], std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
      }
    }
    if (auto e = t.numbers("nigiro")) {
      if (e->size() != z.coord_dim()) throw ConfigError(t.key_path("nigiro"), "wrong number of coordinates");
      z.set_nigiro(MultiVector(m, k, *e));
    }
    t.finish();
    bodies.push_back(std::move(z));
  }
  const auto degree = root.optional<int>("degree");
  const auto direction = root.numbers("direction");
  root.finish();
  if (bodies.empty()) throw ConfigError("bodies", "no bodies given");

  auto need = [&](std::size_t n) {
    if (bodies.size() != n) throw ConfigError("bodies", op + " needs exactly " + std::to_string(n) + " bodies");
  };
  ExperimentResult r;
  r.kind = "algebra";
  std::ostringstream os;
  os << "op,index,value\n";
  nlohmann::json values = nlohmann::json::array();
  auto emit = [&](std::size_t i, double v) {
    os << op << ',' << i << ',' << fmt(v) << '\n';
    values.push_back(v);
  };
  std::optional<Zonotope> result_body;
  try {
    if (op == "mixed_volume") {
      need(static_cast<std::size_t>(bodies.front().ambient_dim()));
      emit(0, mixed_volume(bodies));
    } else if (op == "wedge") {
      Zonotope w = bodies.front();
      for (std::size_t i = 1; i < bodies.size(); ++i) w = wedge(w, bodies[i]);
      emit(0, w.length());
      result_body = std::move(w);
    } else if (op == "sum") {
      Zonotope w = bodies.front();
      for (std::size_t i = 1; i < bodies.size(); ++i) w = minkowski_sum(w, bodies[i]);
      emit(0, w.length());
      result_body = std::move(w);
    } else if (op == "length") {
      for (std::size_t i = 0; i < bodies.size(); ++i) emit(i, bodies[i].length());
    } else if (op == "volume") {
      for (std::size_t i = 0; i < bodies.size(); ++i) emit(i, volume(bodies[i]));
    } else if (op == "intrinsic_volume") {
      if (!degree) throw ConfigError("degree", "intrinsic_volume needs a degree");
      for (std::size_t i = 0; i < bodies.size(); ++i) emit(i, intrinsic_volume(bodies[i], *degree));
    } else if (op == "support") {
      if (!direction) throw ConfigError("direction", "support needs a direction");
      for (std::size_t i = 0; i < bodies.size(); ++i) {
        if (direction->size() != bodies[i].coord_dim()) throw ConfigError("direction", "wrong number of coordinates");
        emit(i, bodies[i].support(std::span<const double>(*direction)));
      }
    } else if (op == "hausdorff") {
      need(2);
      emit(0, hausdorff_estimate(bodies[0], bodies[1]));
    } else {
      throw ConfigError("op", "unknown operation '" + op + "'");
    }
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("bodies", e.what());
  }
  r.report = {{"op", op}, {"values", values}};
  if (result_body) r.report["body"] = to_json(*result_body);
  r.csv = os.str();
  return r;
}

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"section", "expect", "crofton", "inequality", "simulate", "algebra"};
  return kinds;
}

// Top-level keys common to every experiment: seed (mandatory unless overridden), experiment (optional tag).
inline ExperimentResult run_experiment(const std::string& kind, const toml::table& config, RunContext ctx) {
  TableReader root(config, "");
  const auto seed = root.optional<std::int64_t>("seed");
  if (!ctx.seed_override) {
    if (!seed) throw ConfigError("seed", "missing required key");
    if (*seed < 0) throw ConfigError("seed", "expected a nonnegative integer");
    ctx.seed = static_cast<std::uint64_t>(*seed);
  }
  if (auto tag = root.optional<std::string>("experiment"); tag && *tag != kind)
    throw ConfigError("experiment", "config is for '" + *tag + "', not '" + kind + "'");
  if (ctx.threads < 1) throw ConfigError("threads", "must be positive");
  ExperimentResult r;
  if (kind == "section")
    r = run_section(root, ctx);
  else if (kind == "expect")
    r = run_expect(root, ctx);
  else if (kind == "crofton")
    r = run_crofton(root, ctx);
  else if (kind == "inequality")
    r = run_inequality(root, ctx);
  else if (kind == "simulate")
    r = run_simulate(root, ctx);
  else if (kind == "algebra")
    r = run_algebra(root, ctx);
  else
    throw ConfigError("experiment", "unknown experiment '" + kind + "'");
  r.report["seed"] = ctx.seed;
  return r;
}

}  // namespace zonoid::experiments
