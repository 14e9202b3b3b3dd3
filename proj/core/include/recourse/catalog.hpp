#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/model.hpp"

namespace recourse {

// Parameters for a generated two-feature correlated dataset.
struct SyntheticSpec {
  std::size_t rows = 2000;
  double correlation = 0.9;
  std::uint64_t seed = 0;
};

// One catalog file: where the data lives, how it is typed, and how the
// reference classifiers are trained on it.
struct DatasetEntry {
  std::string name;
  // CSV source, resolved against the catalog file's directory.
  std::filesystem::path source;
  std::optional<SyntheticSpec> synthetic;
  Schema schema;
  TargetSpec target;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  TrainConfig linear_training;
  TrainConfig mlp_training;

  const TrainConfig& training(Architecture arch) const {
    return arch == Architecture::Linear ? linear_training : mlp_training;
  }
  // Synthetic entries are always available; CSV entries need their file.
  bool available() const;
};

// Throws ConfigError on malformed YAML or unknown keys.
DatasetEntry parse_catalog_entry(std::string_view yaml_text, const std::filesystem::path& base_dir);
DatasetEntry load_catalog_entry(const std::filesystem::path& path);
// Every *.yaml in `dir`, sorted by file name.
std::vector<DatasetEntry> load_catalog(const std::filesystem::path& dir);
const DatasetEntry& find_entry(const std::vector<DatasetEntry>& catalog, std::string_view name);

struct PreparedData {
  EncodedDataset train;
  EncodedDataset test;
};

// Load (or generate), binarize, fit the scaler on all rows, then split.
PreparedData prepare(const DatasetEntry& entry);

}  // namespace recourse
