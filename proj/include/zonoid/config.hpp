#pragma once

#include "zonoid/manifold.hpp"
#include "zonoid/random_field.hpp"

#include <toml.hpp>

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace zonoid {

// A configuration problem; `key` is the dotted path of the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Typed access to a TOML table that remembers which keys were read, so leftovers can be rejected.
class TableReader {
 public:
  TableReader(const toml::table& table, std::string path) : table_(&table), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return table_->contains(key); }

  template <class T>
  std::optional<T> optional(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    if constexpr (std::is_same_v<T, std::string>) {
      if (auto v = n->value<std::string>()) return *v;
      throw ConfigError(key_path(key), "expected a string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (auto v = n->value<bool>()) return *v;
      throw ConfigError(key_path(key), "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!n->is_integer()) throw ConfigError(key_path(key), "expected an integer");
      const auto v = *n->value<std::int64_t>();
      if constexpr (std::is_unsigned_v<T>)
        if (v < 0) throw ConfigError(key_path(key), "expected a nonnegative integer");
      return static_cast<T>(v);
    } else {
      if (!n->is_number()) throw ConfigError(key_path(key), "expected a number");
      return *n->value<double>();
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    auto v = optional<T>(key);
    return v ? *v : fallback;
  }

  template <class T>
  T require(const std::string& key) {
    auto v = optional<T>(key);
    if (!v) throw ConfigError(key_path(key), "missing required key");
    return *v;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : *a) {
      if (!e.is_number()) throw ConfigError(key_path(key), "expected an array of numbers");
      out.push_back(*e.value<double>());
    }
    return out;
  }

  std::optional<std::vector<int>> integers(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key_path(key), "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : *a) {
      if (!e.is_integer()) throw ConfigError(key_path(key), "expected an array of integers");
      out.push_back(static_cast<int>(*e.value<std::int64_t>()));
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key_path(key), "expected an array of strings");
    std::vector<std::string> out;
    for (const auto& e : *a) {
      auto v = e.value<std::string>();
      if (!v) throw ConfigError(key_path(key), "expected an array of strings");
      out.push_back(*v);
    }
    return out;
  }

  TableReader require_table(const std::string& key) {
    auto t = table(key);
    if (!t) throw ConfigError(key_path(key), "missing required table");
    return *t;
  }

  std::optional<Eigen::MatrixXd> matrix(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    const toml::array* rows = n->as_array();
    if (!rows || rows->empty()) throw ConfigError(key_path(key), "expected a nonempty array of rows");
    Eigen::MatrixXd M;
    Eigen::Index r = 0;
    for (const auto& row : *rows) {
      const toml::array* cols = row.as_array();
      if (!cols) throw ConfigError(key_path(key), "expected an array of rows");
      if (r == 0) M.resize(static_cast<Eigen::Index>(rows->size()), static_cast<Eigen::Index>(cols->size()));
      if (static_cast<Eigen::Index>(cols->size()) != M.cols()) throw ConfigError(key_path(key), "rows differ in length");
      Eigen::Index c = 0;
      for (const auto& e : *cols) {
        if (!e.is_number()) throw ConfigError(key_path(key), "expected numbers");
        M(r, c++) = *e.value<double>();
      }
      ++r;
    }
    return M;
  }

  std::optional<TableReader> table(const std::string& key) {
    used_.insert(key);
    const toml::node* n = table_->get(key);
    if (!n) return std::nullopt;
    const toml::table* t = n->as_table();
    if (!t) throw ConfigError(key_path(key), "expected a table");
    return TableReader(*t, key_path(key));
  }

  std::vector<TableReader> tables(const std::string& key) {
    used_.insert(key);
    std::vector<TableReader> out;
    const toml::node* n = table_->get(key);
    if (!n) return out;
    const toml::array* a = n->as_array();
    if (!a) throw ConfigError(key_path(key), "expected an array of tables");
    std::size_t i = 0;
    for (const auto& e : *a) {
      const toml::table* t = e.as_table();
      if (!t) throw ConfigError(key_path(key), "expected an array of tables");
      out.emplace_back(*t, key_path(key) + "[" + std::to_string(i++) + "]");
    }
    return out;
  }

  // Rejects every key that was never read.
  void finish() const {
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) throw ConfigError(key_path(key), "unknown key");
    }
  }

 private:
  const toml::table* table_;
  std::string path_;
  std::set<std::string> used_;
};

inline toml::table parse_toml_file(const std::string& path) {
  try {
    return toml::parse_file(path);
  } catch (const toml::parse_error& e) {
    throw ConfigError("", "cannot parse " + path + ": " + std::string(e.description()));
  }
}

inline toml::table parse_toml_string(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError("", "cannot parse configuration: " + std::string(e.description()));
  }
}

// [manifold] name = circle | interval | torus2 | torus3 | sphere2 | sphere3; nodes = [...]; interval = [a, b]
inline BuiltinManifold load_manifold(TableReader t) {
  const auto name = t.require<std::string>("name");
  const auto sizes = t.integers("nodes").value_or(std::vector<int>{});
  for (int s : sizes)
    if (s < 1) throw ConfigError(t.key_path("nodes"), "node counts must be positive");
  double a = 0.0, b = 1.0;
  if (auto iv = t.numbers("interval")) {
    if (iv->size() != 2 || !((*iv)[0] < (*iv)[1])) throw ConfigError(t.key_path("interval"), "expected [a, b] with a < b");
    a = (*iv)[0];
    b = (*iv)[1];
  }
  t.finish();
  try {
    return builtin(name, sizes, a, b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(t.key_path("name"), e.what());
  }
}

namespace detail {

inline GaussianLaw load_gaussian(TableReader& t, int n, const std::string& prefix) {
  GaussianLaw g;
  g.mean = Eigen::VectorXd::Zero(n);
  g.covariance = Eigen::MatrixXd::Identity(n, n);
  if (auto mu = t.numbers(prefix + "mean")) {
    if (static_cast<int>(mu->size()) != n) throw ConfigError(t.key_path(prefix + "mean"), "expected " + std::to_string(n) + " entries");
    g.mean = Eigen::Map<const Eigen::VectorXd>(mu->data(), n);
  }
  if (auto C = t.matrix(prefix + "covariance")) {
    if (C->rows() != n || C->cols() != n)
      throw ConfigError(t.key_path(prefix + "covariance"), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    g.covariance = *C;
  } else if (auto v = t.optional<double>(prefix + "variance")) {
    if (!(*v >= 0.0)) throw ConfigError(t.key_path(prefix + "variance"), "must be nonnegative");
    g.covariance *= *v;
  }
  return g;
}

inline StudentTLaw load_student(TableReader& t, int n, const std::string& prefix) {
  StudentTLaw s;
  s.dof = t.require<double>(prefix + "dof");
  s.location = Eigen::VectorXd::Zero(n);
  s.scale = Eigen::MatrixXd::Identity(n, n);
  if (auto mu = t.numbers(prefix + "location")) {
    if (static_cast<int>(mu->size()) != n) throw ConfigError(t.key_path(prefix + "location"), "expected " + std::to_string(n) + " entries");
    s.location = Eigen::Map<const Eigen::VectorXd>(mu->data(), n);
  }
  if (auto C = t.matrix(prefix + "scale")) {
    if (C->rows() != n || C->cols() != n)
      throw ConfigError(t.key_path(prefix + "scale"), "expected a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    s.scale = *C;
  }
  return s;
}

}  // namespace detail

// [model] family = linear | kostlan | fourier | spherical_harmonics | trig | monomial
//         law = gaussian | student_t | shifted, plus family and law parameters.
inline RandomFieldModel load_model(TableReader t, const Chart& chart) {
  const auto family = t.require<std::string>("family");
  FieldBasis basis;
  auto need_sphere = [&](int m) {
    if (chart.name != "sphere" + std::to_string(m) && !(m == 1 && chart.name == "circle"))
      throw ConfigError(t.key_path("family"), "family '" + family + "' needs a sphere manifold, got " + chart.name);
  };
  try {
    if (family == "linear" || family == "kostlan") {
      const int m = chart.dim;
      need_sphere(m);
      const int d = family == "linear" ? 1 : t.require<int>("degree");
      basis = kostlan_basis(m, d);
    } else if (family == "fourier") {
      if (chart.dim != 1 || !chart.periodic[0]) throw ConfigError(t.key_path("family"), "fourier needs the circle");
      auto sigma = t.numbers("sigma");
      if (!sigma) throw ConfigError(t.key_path("sigma"), "missing required key");
      basis = fourier_basis(*sigma);
    } else if (family == "spherical_harmonics") {
      need_sphere(2);
      auto sigma = t.numbers("sigma");
      if (!sigma) {
        const int lmax = t.require<int>("lmax");
        sigma = std::vector<double>(static_cast<std::size_t>(lmax) + 1, 1.0);
      }
      basis = spherical_harmonics_basis(*sigma);
    } else if (family == "trig") {
      if (chart.name.rfind("torus", 0) != 0) throw ConfigError(t.key_path("family"), "trig needs a torus manifold");
      auto modes = t.tables("modes");
      if (!modes.empty()) {
        std::vector<TorusMode> ms;
        for (auto& mt : modes) {
          auto f = mt.integers("frequency");
          if (!f) throw ConfigError(mt.key_path("frequency"), "missing required key");
          ms.push_back({*f, mt.get<double>("sigma", 1.0)});
          mt.finish();
        }
        basis = trig_torus_basis(chart.dim, std::move(ms));
      } else {
        const int degree = t.require<int>("degree");
        const double bandwidth = t.get<double>("bandwidth", 0.0);
        const auto aniso = t.numbers("anisotropy").value_or(std::vector<double>{});
        basis = trig_torus_basis(chart.dim, degree, bandwidth, aniso);
      }
    } else if (family == "monomial") {
      if (chart.name != "interval") throw ConfigError(t.key_path("family"), "monomial needs an interval manifold");
      basis = monomial_basis(t.require<int>("degree"));
    } else {
      throw ConfigError(t.key_path("family"), "unknown family '" + family + "'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(t.path(), e.what());
  }

  const auto law = t.get<std::string>("law", "gaussian");
  const int n = basis.n;
  CoefficientLaw coeff;
  if (law == "gaussian") {
    coeff = detail::load_gaussian(t, n, "");
  } else if (law == "student_t") {
    coeff = detail::load_student(t, n, "");
  } else if (law == "shifted") {
    auto c = t.numbers("coefficients");
    if (!c) throw ConfigError(t.key_path("coefficients"), "missing required key");
    if (static_cast<int>(c->size()) != n) throw ConfigError(t.key_path("coefficients"), "expected " + std::to_string(n) + " entries");
    ShiftedLaw s;
    s.coefficients = Eigen::Map<const Eigen::VectorXd>(c->data(), n);
    const auto shift = t.get<std::string>("shift_law", "gaussian");
    if (shift == "gaussian")
      s.shift = detail::load_gaussian(t, basis.k, "shift_");
    else if (shift == "student_t")
      s.shift = detail::load_student(t, basis.k, "shift_");
    else
      throw ConfigError(t.key_path("shift_law"), "unknown law '" + shift + "'");
    coeff = s;
  } else {
    throw ConfigError(t.key_path("law"), "unknown law '" + law + "'");
  }
  t.finish();
  try {
    return RandomFieldModel(chart, std::move(basis), std::move(coeff));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(t.path(), e.what());
  }
}

}  // namespace zonoid
