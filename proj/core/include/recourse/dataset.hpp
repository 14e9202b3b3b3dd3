#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "recourse/types.hpp"

namespace recourse {

enum class FeatureKind { Continuous, BinaryCategorical };
enum class Direction { Free, IncreaseOnly, DecreaseOnly };

std::string_view to_string(FeatureKind kind);
std::string_view to_string(Direction direction);
FeatureKind parse_feature_kind(std::string_view text);
Direction parse_direction(std::string_view text);

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  bool immutable = false;
  Direction direction = Direction::Free;
  // Continuous only. Filled in when a scaler is fit.
  double raw_min = 0.0;
  double raw_max = 0.0;
  // Binary only: the level encoded as 1. Empty means "most frequent level".
  std::string positive_level;

  bool is_binary() const noexcept { return kind == FeatureKind::BinaryCategorical; }

  friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

// Ordered feature list with unique names.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<FeatureSchema> features);

  std::size_t size() const noexcept { return features_.size(); }
  const FeatureSchema& operator[](std::size_t j) const { return features_.at(j); }
  auto begin() const noexcept { return features_.begin(); }
  auto end() const noexcept { return features_.end(); }

  std::optional<std::size_t> find(std::string_view name) const;
  std::vector<std::string> names() const;
  std::vector<bool> immutable_mask() const;
  std::vector<bool> binary_mask() const;

  // Copy with feature j replaced; re-validates.
  Schema with_feature(std::size_t j, FeatureSchema feature) const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<FeatureSchema> features_;
};

// A raw column: numeric, or string-valued for categoricals not yet binarized.
using Column = std::variant<std::vector<double>, std::vector<std::string>>;

// Raw tabular data. Immutable after construction.
class Dataset {
 public:
  Dataset(std::string name, Schema schema, std::vector<Column> columns, std::vector<int> target);

  const std::string& name() const noexcept { return name_; }
  const Schema& schema() const noexcept { return schema_; }
  const Column& column(std::size_t j) const { return columns_.at(j); }
  const std::vector<int>& target() const noexcept { return target_; }
  std::size_t rows() const noexcept { return target_.size(); }
  std::size_t features() const noexcept { return schema_.size(); }

  // True once every column is numeric (i.e. after binarization).
  bool numeric() const;
  // N x d numeric matrix; throws SchemaError while categoricals are unbinarized.
  Matrix matrix() const;
  Dataset subset(std::span<const std::size_t> rows) const;

 private:
  std::string name_;
  Schema schema_;
  std::vector<Column> columns_;
  std::vector<int> target_;
};

// How the target column maps onto {0,1}; y = 1 is the desirable outcome.
struct TargetSpec {
  std::string column;
  // Raw values counted as y = 1. Empty: the column must already hold 0/1.
  std::vector<std::string> positive_values;
};

// Reads an RFC-4180 CSV with a header row. Rows with any empty cell among the
// schema/target columns are dropped; other columns are ignored.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema, const TargetSpec& target,
                 std::string name = {});

// Each string column becomes 1 where the value equals the positive level, else 0.
// The positive level is the preset one, or the most frequent level with ties
// broken by the lexicographically smallest name. Idempotent.
Dataset binarize_categoricals(const Dataset& ds);

struct ScalingParams {
  double raw_min = 0.0;
  double raw_max = 1.0;
  bool continuous = true;
};

class EncodedDataset;

// Affine map of continuous columns onto [0,1]; binary columns pass through.
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  explicit MinMaxScaler(std::vector<ScalingParams> params);

  // Throws SchemaError on a constant continuous column.
  static MinMaxScaler fit(const Dataset& ds);

  Vector encode(const Vector& raw) const;
  Vector decode(const Vector& encoded) const;
  EncodedDataset transform(const Dataset& ds) const;

  const std::vector<ScalingParams>& params() const noexcept { return params_; }
  std::size_t size() const noexcept { return params_.size(); }

 private:
  std::vector<ScalingParams> params_;
};

class EncodedDataset {
 public:
  EncodedDataset(std::shared_ptr<const Dataset> parent, Schema schema, Matrix values,
                 std::vector<int> target, MinMaxScaler scaler);

  const std::string& name() const noexcept { return parent_->name(); }
  const Schema& schema() const noexcept { return schema_; }
  const Matrix& matrix() const noexcept { return values_; }
  const std::vector<int>& target() const noexcept { return target_; }
  const MinMaxScaler& scaler() const noexcept { return scaler_; }
  const Dataset& parent() const noexcept { return *parent_; }
  std::size_t rows() const noexcept { return target_.size(); }
  std::size_t features() const noexcept { return schema_.size(); }
  Vector row(std::size_t i) const { return values_.row(static_cast<Eigen::Index>(i)).transpose(); }

  void write_csv(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<const Dataset> parent_;
  Schema schema_;
  Matrix values_;
  std::vector<int> target_;
  MinMaxScaler scaler_;
};

EncodedDataset minmax_scale(const Dataset& ds);

// Deterministic shuffled split; the first round(N * train_fraction) shuffled rows train.
std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed);

// Two continuous features from a unit-variance bivariate Gaussian with the given
// correlation; label = 1[x1 + x2 + noise > 0] with noise ~ N(0, 0.5^2).
Dataset synthetic_generate(std::size_t n, double correlation, std::uint64_t seed);

}  // namespace recourse
