#include "recourse/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "yaml_util.hpp"

namespace recourse {

bool DatasetEntry::available() const {
  return synthetic.has_value() || std::filesystem::is_regular_file(source);
}

namespace {

using detail::allow_keys;
using detail::scalar;

FeatureSchema parse_feature(const YAML::Node& node) {
  allow_keys(node, "feature", {"name", "kind", "immutable", "direction", "positive_level"});
  FeatureSchema f;
  f.name = scalar<std::string>(node, "name");
  try {
    f.kind = parse_feature_kind(scalar<std::string>(node, "kind", "continuous"));
    f.direction = parse_direction(scalar<std::string>(node, "direction", "free"));
  } catch (const SchemaError& e) {
    throw ConfigError(fmt::format("feature '{}': {}", f.name, e.what()));
  }
  f.immutable = scalar<bool>(node, "immutable", false);
  f.positive_level = scalar<std::string>(node, "positive_level", "");
  if (!f.positive_level.empty() && !f.is_binary()) {
    throw ConfigError(fmt::format("feature '{}': positive_level only applies to binary features", f.name));
  }
  return f;
}

TrainConfig parse_training(const YAML::Node& node, TrainConfig cfg) {
  if (!node) return cfg;
  allow_keys(node, "training", {"epochs", "batch_size", "learning_rate", "seed", "rho", "epsilon"});
  cfg.epochs = scalar<int>(node, "epochs", cfg.epochs);
  cfg.batch_size = scalar<int>(node, "batch_size", cfg.batch_size);
  cfg.learning_rate = scalar<double>(node, "learning_rate", cfg.learning_rate);
  cfg.seed = scalar<std::uint64_t>(node, "seed", cfg.seed);
  cfg.rho = scalar<double>(node, "rho", cfg.rho);
  cfg.epsilon = scalar<double>(node, "epsilon", cfg.epsilon);
  cfg.validate();
  return cfg;
}

}  // namespace

DatasetEntry parse_catalog_entry(std::string_view yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("catalog entry is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("catalog entry must be a mapping");
  allow_keys(root, "catalog entry", {"name", "source", "synthetic", "target", "split", "features", "training"});

  DatasetEntry e;
  e.name = scalar<std::string>(root, "name");
  if (root["synthetic"]) {
    const auto s = root["synthetic"];
    allow_keys(s, "synthetic", {"rows", "correlation", "seed"});
    SyntheticSpec spec;
    spec.rows = scalar<std::size_t>(s, "rows", spec.rows);
    spec.correlation = scalar<double>(s, "correlation", spec.correlation);
    spec.seed = scalar<std::uint64_t>(s, "seed", spec.seed);
    if (spec.rows < 2) throw ConfigError("synthetic rows must be >= 2");
    if (!(spec.correlation > -1.0 && spec.correlation < 1.0)) throw ConfigError("correlation must lie in (-1,1)");
    e.synthetic = spec;
    if (root["source"]) throw ConfigError("catalog entry sets both source and synthetic");
  } else {
    e.source = base_dir / scalar<std::string>(root, "source");
  }

  if (root["features"]) {
    if (!root["features"].IsSequence()) throw ConfigError("features must be a list");
    std::vector<FeatureSchema> features;
    for (const auto& node : root["features"]) features.push_back(parse_feature(node));
    try {
      e.schema = Schema(std::move(features));
    } catch (const SchemaError& err) {
      throw ConfigError(err.what());
    }
  } else if (!e.synthetic) {
    throw ConfigError("catalog entry needs a features list");
  }

  if (root["target"]) {
    const auto t = root["target"];
    allow_keys(t, "target", {"column", "positive"});
    e.target.column = scalar<std::string>(t, "column");
    if (t["positive"]) {
      if (!t["positive"].IsSequence()) throw ConfigError("target.positive must be a list");
      for (const auto& v : t["positive"]) e.target.positive_values.push_back(v.as<std::string>());
    }
  } else if (!e.synthetic) {
    throw ConfigError("catalog entry needs a target");
  }

  if (root["split"]) {
    const auto s = root["split"];
    allow_keys(s, "split", {"train_fraction", "seed"});
    e.train_fraction = scalar<double>(s, "train_fraction", e.train_fraction);
    e.split_seed = scalar<std::uint64_t>(s, "seed", e.split_seed);
  }
  if (!(e.train_fraction > 0.0 && e.train_fraction < 1.0)) throw ConfigError("train_fraction must lie in (0,1)");

  TrainConfig linear_defaults;
  linear_defaults.epochs = 100;
  linear_defaults.batch_size = 2048;
  TrainConfig mlp_defaults;
  if (root["training"]) {
    const auto t = root["training"];
    allow_keys(t, "training", {"linear", "mlp"});
    e.linear_training = parse_training(t["linear"], linear_defaults);
    e.mlp_training = parse_training(t["mlp"], mlp_defaults);
  } else {
    e.linear_training = linear_defaults;
    e.mlp_training = mlp_defaults;
  }
  return e;
}

DatasetEntry load_catalog_entry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open catalog entry " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_catalog_entry(buf.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.filename().string() + ": " + e.what());
  }
}

std::vector<DatasetEntry> load_catalog(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("catalog directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".yaml") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<DatasetEntry> out;
  std::set<std::string> names;
  for (const auto& f : files) {
    out.push_back(load_catalog_entry(f));
    if (!names.insert(out.back().name).second) throw ConfigError("duplicate catalog name '" + out.back().name + "'");
  }
  return out;
}

const DatasetEntry& find_entry(const std::vector<DatasetEntry>& catalog, std::string_view name) {
  for (const auto& e : catalog) {
    if (e.name == name) return e;
  }
  throw ConfigError(fmt::format("dataset '{}' is not in the catalog", name));
}

PreparedData prepare(const DatasetEntry& entry) {
  Dataset raw = [&] {
    if (entry.synthetic) {
      Dataset gen = synthetic_generate(entry.synthetic->rows, entry.synthetic->correlation, entry.synthetic->seed);
      std::vector<Column> columns;
      for (std::size_t j = 0; j < gen.features(); ++j) columns.push_back(gen.column(j));
      const Schema& schema = entry.schema.size() == 0 ? gen.schema() : entry.schema;
      return Dataset(entry.name, schema, std::move(columns), gen.target());
    }
    if (!std::filesystem::is_regular_file(entry.source)) {
      throw Error(fmt::format("data file for '{}' not found: {}", entry.name, entry.source.string()));
    }
    return load_csv(entry.source, entry.schema, entry.target, entry.name);
  }();
  const Dataset binarized = binarize_categoricals(raw);
  const MinMaxScaler scaler = MinMaxScaler::fit(binarized);
  auto [train, test] = split(binarized, entry.train_fraction, entry.split_seed);
  return {scaler.transform(train), scaler.transform(test)};
}

}  // namespace recourse
