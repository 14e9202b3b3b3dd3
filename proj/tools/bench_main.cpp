#include <cstdio>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "recourse/bench.hpp"
#include "recourse/catalog.hpp"

namespace {

constexpr int kConfigExit = 2;

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_override) {
  recourse::RunConfig cfg;
  try {
    cfg = recourse::load_run_config(config_path);
  } catch (const recourse::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigExit;
  }
  const auto out_dir = out_override.empty() ? cfg.output_dir : out_override;
  recourse::RunResult result;
  try {
    result = recourse::run(cfg);
  } catch (const recourse::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigExit;
  }
  recourse::write_outputs(result, out_dir);
  std::vector<recourse::BenchmarkRecord> records;
  for (const auto& c : result.cells) records.push_back(c.record);
  std::cout << recourse::records_markdown(records);
  fmt::print(stderr, "wrote {}\n", out_dir.string());
  return result.exit_code;
}

int cmd_report(const std::filesystem::path& dir, const std::string& format) {
  const auto fmt_kind = recourse::parse_report_format(format);
  std::cout << recourse::render_report(recourse::read_records(dir), fmt_kind);
  return 0;
}

int cmd_list_methods() {
  for (const auto& m : recourse::list_methods()) {
    fmt::print("{:<16} {:<12} {}\n", m.name, m.family, m.summary);
  }
  return 0;
}

int cmd_list_datasets(const std::filesystem::path& catalog_dir) {
  for (const auto& e : recourse::load_catalog(catalog_dir)) {
    const std::string source = e.synthetic ? "synthetic" : e.source.string();
    fmt::print("{:<16} d={:<3} {:<10} {}\n", e.name, e.schema.size(), e.available() ? "available" : "missing",
               source);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark counterfactual explanation methods"};
  app.require_subcommand(1);

  std::filesystem::path config_path, out_dir;
  auto* run = app.add_subcommand("run", "Run a benchmark configuration");
  run->add_option("-c,--config", config_path, "Run config (YAML)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "Output directory (overrides output_dir)");

  std::filesystem::path report_dir;
  std::string format = "md";
  auto* report = app.add_subcommand("report", "Render records of a finished run");
  report->add_option("-d,--dir", report_dir, "Run output directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("-f,--format", format, "csv, json or md")
      ->check(CLI::IsMember({"csv", "json", "md", "markdown"}));

  auto* methods = app.add_subcommand("list-methods", "List the available methods");

  std::filesystem::path catalog_dir = "data/catalog";
  auto* datasets = app.add_subcommand("list-datasets", "List catalog datasets");
  datasets->add_option("--catalog", catalog_dir, "Catalog directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*report) return cmd_report(report_dir, format);
    if (*methods) return cmd_list_methods();
    if (*datasets) return cmd_list_datasets(catalog_dir);
  } catch (const recourse::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigExit;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 0;
}
