#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/evaluation.hpp"
#include "recourse/model.hpp"
#include "recourse/vae.hpp"

namespace recourse {

struct MethodSpec {
  std::string name;
  // Hyperparameter overrides by field name, e.g. {"learning_rate": 0.05}.
  std::map<std::string, double> params;
};

struct RunConfig {
  std::vector<std::string> datasets;
  std::filesystem::path catalog_dir = "data/catalog";
  std::vector<Architecture> models;
  std::vector<MethodSpec> methods;
  std::size_t cohort_size = 100;
  std::uint64_t seed = 0;
  double theta = 0.5;
  std::filesystem::path output_dir = "results";
  // Fans instances out over threads; avg_time is then not reported.
  bool parallel = false;
  VaeTrainConfig vae;
  // 0 selects min(max(d, 2), 8).
  std::size_t latent_dim = 0;

  void validate() const;
};

// Relative paths in the file are resolved against `base_dir`.
RunConfig parse_run_config(std::string_view yaml_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct MethodInfo {
  std::string name;
  // "independent" or "dependent".
  std::string family;
  std::string summary;
};

const std::vector<MethodInfo>& list_methods();
const MethodInfo& method_info(std::string_view name);

struct CellOutput {
  BenchmarkRecord record;
  std::vector<InstanceMeasures> instances;
};

// Trained reference classifier and its held-out accuracy.
struct ModelReport {
  std::string dataset;
  std::string model_arch;
  double test_accuracy = 0.0;
  double train_seconds = 0.0;
  std::shared_ptr<const Classifier> model;
};

struct RunResult {
  std::vector<CellOutput> cells;
  std::vector<ModelReport> models;
  // 0 iff every cell produced a record without a cell-level error.
  int exit_code = 0;
};

// Runs every (dataset, model, method) cell. A cell that throws is recorded with
// its error and the run continues.
RunResult run(const RunConfig& config);

// records.csv, records.json, per_instance/<cell>.jsonl, plots/<cell>_costs.csv.
void write_outputs(const RunResult& result, const std::filesystem::path& dir);

// Per-instance c0/c1 rows followed by a median/q25/q75 summary row.
std::string plot_data_csv(const CellOutput& cell);

std::string cell_id(const BenchmarkRecord& record);

enum class ReportFormat { Csv, Json, Markdown };
ReportFormat parse_report_format(std::string_view text);

std::string records_csv(const std::vector<BenchmarkRecord>& records);
std::string records_json(const std::vector<BenchmarkRecord>& records);
std::string records_markdown(const std::vector<BenchmarkRecord>& records);
std::string render_report(const std::vector<BenchmarkRecord>& records, ReportFormat format);

// Reads records.json from a run directory.
std::vector<BenchmarkRecord> read_records(const std::filesystem::path& dir);

}  // namespace recourse
