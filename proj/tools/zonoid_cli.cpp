#include "experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
namespace ex = zonoid::experiments;

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kNumerical = 3 };

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

int fail_with(int code, const std::string& type, const std::string& message, const std::string& key, const fs::path& out_dir) {
  nlohmann::json err = {{"error", {{"type", type}, {"message", message}, {"exit_code", code}}}};
  if (!key.empty()) err["error"]["key"] = key;
  std::cout << err.dump() << std::endl;
  if (!out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (!ec) {
      std::ofstream f(out_dir / "error.json");
      f << err.dump(2) << '\n';
    }
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zonoid sections of random fields: predictions and Monte Carlo checks"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
  bool dump = false;
  for (const auto& kind : ex::experiment_kinds()) {
    auto* sub = app.add_subcommand(kind);
    sub->add_option("--config", config_path, "TOML experiment config")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker cap");
    sub->add_flag("--dump-trials", dump, "write per-trial values");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail_with(kConfig, "usage", e.what(), "", {});
  }
  const std::string kind = app.get_subcommands().front()->get_name();
  const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;
  const fs::path out(out_dir);

  std::string text;
  {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) return fail_with(kConfig, "config", "cannot open '" + config_path + "'", "config", out);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  const std::string hash = ex::hex64(ex::fnv1a(text));

  try {
    toml::table config;
    try {
      config = zonoid::parse_toml_string(text);
    } catch (const zonoid::ConfigError& e) {
      return fail_with(kConfig, "config", e.what(), e.key(), out);
    }
    ex::RunContext ctx;
    ctx.seed = seed;
    ctx.seed_override = seed_given;
    ctx.threads = threads;
    ctx.dump_trials = dump;
    ctx.config_dir = fs::path(config_path).parent_path();
    ex::ExperimentResult r = ex::run_experiment(kind, config, ctx);

    const std::string stamp = timestamp();
    r.report["experiment"] = kind;
    r.report["config_hash"] = hash;
    r.report["generated"] = stamp;
    const std::string header =
        "# generated " + stamp + " config_hash=" + hash + " seed=" + std::to_string(r.report["seed"].get<std::uint64_t>()) + "\n";
    fs::create_directories(out);
    write_file(out / "report.json", r.report.dump(2) + "\n");
    write_file(out / "report.csv", header + r.csv);
    for (const auto& [name, body] : r.extra_csv) write_file(out / name, header + body);

    nlohmann::json summary = {{"experiment", kind}, {"verdict", r.pass ? "PASS" : "FAIL"}, {"out", out.string()}};
    std::cout << summary.dump() << std::endl;
    return r.pass ? kPass : kFail;
  } catch (const zonoid::ConfigError& e) {
    return fail_with(kConfig, "config", e.what(), e.key(), out);
  } catch (const zonoid::NumericalError& e) {
    return fail_with(kNumerical, "numerical", e.what(), "", out);
  } catch (const zonoid::IndependenceError& e) {
    return fail_with(kNumerical, "independence", e.what(), "", out);
  } catch (const std::invalid_argument& e) {
    return fail_with(kNumerical, "module", e.what(), "", out);
  } catch (const std::exception& e) {
    return fail_with(kNumerical, "runtime", e.what(), "", out);
  }
}
