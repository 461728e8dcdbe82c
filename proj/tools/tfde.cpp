#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tfde/bench.hpp"
#include "tfde/error.hpp"

namespace {
constexpr const char* kVersion = "0.1.0";
}

int main(int argc, char** argv) {
  using namespace tfde;
  CLI::App app{"Tempered fractional PDE benchmark harness"};
  std::string example, config_path, out_dir, format = "csv", scheme;
  bool iterative = false;
  app.add_option("example", example, "ex1, ex2, ex2-flap, ex3, ml-eval, precond-study")->required();
  app.add_option("--config", config_path, "JSON parameter document")->required();
  app.add_option("--out", out_dir, "output directory (stdout when omitted)");
  app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--iterative", iterative, "preconditioned or shifted GMRES instead of dense LU");
  app.add_option("--scheme", scheme, "cf, pc, dti or l1")->check(CLI::IsMember({"cf", "pc", "dti", "l1"}));
  app.set_version_flag("--version", kVersion);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  ExperimentConfig cfg;
  cfg.example = example;
  cfg.iterative = iterative;
  cfg.scheme = scheme;
  try {
    std::ifstream in(config_path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + config_path);
    try {
      cfg.params = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    validate_config(cfg);
  } catch (const Error& e) {
    std::cerr << "tfde: " << e.what() << "\n";
    return 1;
  }

  try {
    const ResultTable table = run_experiment(cfg);
    const std::string body = format == "csv" ? to_csv(table) : to_json(table).dump(2) + "\n";
    if (out_dir.empty()) {
      std::cout << body;
    } else {
      std::filesystem::create_directories(out_dir);
      const std::filesystem::path base = std::filesystem::path(out_dir) / example;
      write_file(base.string() + "." + format, body);
      write_file(base.string() + ".meta.json", metadata(table, kVersion).dump(2) + "\n");
    }
    for (const auto& n : table.notes) std::cerr << "tfde: " << n << "\n";
    return table.partial() ? 2 : 0;
  } catch (const Error& e) {
    std::cerr << "tfde: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "tfde: " << e.what() << "\n";
    return 2;
  }
}
