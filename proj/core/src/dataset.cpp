#include "recourse/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "csv.hpp"

namespace recourse {

std::string_view to_string(FeatureKind kind) {
  return kind == FeatureKind::Continuous ? "continuous" : "binary";
}

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::IncreaseOnly:
      return "increase";
    case Direction::DecreaseOnly:
      return "decrease";
    default:
      return "free";
  }
}

FeatureKind parse_feature_kind(std::string_view text) {
  if (text == "continuous") return FeatureKind::Continuous;
  if (text == "binary" || text == "categorical" || text == "binary_categorical") {
    return FeatureKind::BinaryCategorical;
  }
  throw SchemaError(fmt::format("unknown feature kind '{}'", text));
}

Direction parse_direction(std::string_view text) {
  if (text == "free") return Direction::Free;
  if (text == "increase" || text == "increase_only") return Direction::IncreaseOnly;
  if (text == "decrease" || text == "decrease_only") return Direction::DecreaseOnly;
  throw SchemaError(fmt::format("unknown direction '{}'", text));
}

// --- Schema -----------------------------------------------------------------

Schema::Schema(std::vector<FeatureSchema> features) : features_(std::move(features)) {
  std::set<std::string_view> seen;
  for (const auto& f : features_) {
    if (f.name.empty()) throw SchemaError("feature with empty name");
    if (!seen.insert(f.name).second) throw SchemaError("duplicate feature name '" + f.name + "'");
    if (!f.is_binary() && f.raw_max != 0.0 && !(f.raw_min < f.raw_max)) {
      throw SchemaError("feature '" + f.name + "' needs raw_min < raw_max");
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j].name == name) return j;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.name);
  return out;
}

std::vector<bool> Schema::immutable_mask() const {
  std::vector<bool> out;
  for (const auto& f : features_) out.push_back(f.immutable);
  return out;
}

std::vector<bool> Schema::binary_mask() const {
  std::vector<bool> out;
  for (const auto& f : features_) out.push_back(f.is_binary());
  return out;
}

Schema Schema::with_feature(std::size_t j, FeatureSchema feature) const {
  auto copy = features_;
  copy.at(j) = std::move(feature);
  return Schema(std::move(copy));
}

// --- Dataset ----------------------------------------------------------------

Dataset::Dataset(std::string name, Schema schema, std::vector<Column> columns,
                 std::vector<int> target)
    : name_(std::move(name)),
      schema_(std::move(schema)),
      columns_(std::move(columns)),
      target_(std::move(target)) {
  if (columns_.size() != schema_.size()) {
    throw SchemaError(fmt::format("{} columns for {} schema features", columns_.size(),
                                  schema_.size()));
  }
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    std::size_t n = std::visit([](const auto& c) { return c.size(); }, columns_[j]);
    if (n != target_.size()) {
      throw SchemaError(fmt::format("column '{}' has {} rows, target has {}", schema_[j].name, n,
                                    target_.size()));
    }
    if (schema_[j].is_binary()) {
      if (const auto* num = std::get_if<std::vector<double>>(&columns_[j])) {
        for (double v : *num) {
          if (v != 0.0 && v != 1.0) {
            throw SchemaError("binary column '" + schema_[j].name + "' holds a value outside {0,1}");
          }
        }
      }
    } else if (!std::holds_alternative<std::vector<double>>(columns_[j])) {
      throw SchemaError("continuous column '" + schema_[j].name + "' is not numeric");
    }
  }
  for (int y : target_) {
    if (y != 0 && y != 1) throw SchemaError("target values must be 0 or 1");
  }
}

bool Dataset::numeric() const {
  return std::all_of(columns_.begin(), columns_.end(), [](const Column& c) {
    return std::holds_alternative<std::vector<double>>(c);
  });
}

Matrix Dataset::matrix() const {
  Matrix m(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(features()));
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    const auto* num = std::get_if<std::vector<double>>(&columns_[j]);
    if (num == nullptr) {
      throw SchemaError("column '" + schema_[j].name + "' is categorical; binarize first");
    }
    for (std::size_t i = 0; i < num->size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*num)[i];
    }
  }
  return m;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<Column> cols;
  cols.reserve(columns_.size());
  for (const auto& col : columns_) {
    cols.push_back(std::visit(
        [&](const auto& c) -> Column {
          std::remove_cvref_t<decltype(c)> out;
          out.reserve(rows.size());
          for (std::size_t i : rows) out.push_back(c.at(i));
          return out;
        },
        col));
  }
  std::vector<int> target;
  target.reserve(rows.size());
  for (std::size_t i : rows) target.push_back(target_.at(i));
  return Dataset(name_, schema_, std::move(cols), std::move(target));
}

// --- CSV loading ------------------------------------------------------------

namespace {

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "?" || cell == "NA" || cell == "NaN" || cell == "nan";
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, const std::string& column, std::size_t line) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(fmt::format("cannot parse '{}' in column '{}' as a number", cell, column),
                     line);
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const Schema& schema, const TargetSpec& target,
                 std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  detail::CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw SchemaError(path.string() + " is empty");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);
  for (auto& h : header) h = trim(h);

  auto locate = [&](const std::string& col) {
    auto it = std::find(header.begin(), header.end(), col);
    if (it == header.end()) throw SchemaError("missing column '" + col + "' in " + path.string());
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> src;
  for (const auto& f : schema) src.push_back(locate(f.name));
  const std::size_t target_src = locate(target.column);

  std::vector<Column> columns;
  for (const auto& f : schema) {
    if (f.is_binary()) {
      columns.emplace_back(std::vector<std::string>{});
    } else {
      columns.emplace_back(std::vector<double>{});
    }
  }
  std::vector<int> y;
  std::vector<std::string> fields;
  std::vector<std::string> cells(schema.size());
  while (reader.next(fields)) {
    if (fields.size() == 1 && trim(fields[0]).empty()) continue;
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("expected {} fields, found {}", header.size(), fields.size()),
                       reader.record_line());
    }
    bool missing = false;
    for (std::size_t j = 0; j < schema.size(); ++j) {
      cells[j] = trim(fields[src[j]]);
      missing = missing || is_missing(cells[j]);
    }
    std::string label = trim(fields[target_src]);
    if (missing || is_missing(label)) continue;

    int yi = 0;
    if (target.positive_values.empty()) {
      double v = parse_number(label, target.column, reader.record_line());
      if (v != 0.0 && v != 1.0) {
        throw ParseError("target '" + label + "' is not 0/1", reader.record_line());
      }
      yi = static_cast<int>(v);
    } else {
      yi = std::find(target.positive_values.begin(), target.positive_values.end(), label) !=
                   target.positive_values.end()
               ? 1
               : 0;
    }
    for (std::size_t j = 0; j < schema.size(); ++j) {
      if (schema[j].is_binary()) {
        std::get<std::vector<std::string>>(columns[j]).push_back(cells[j]);
      } else {
        std::get<std::vector<double>>(columns[j])
            .push_back(parse_number(cells[j], schema[j].name, reader.record_line()));
      }
    }
    y.push_back(yi);
  }
  if (name.empty()) name = path.stem().string();
  return Dataset(std::move(name), schema, std::move(columns), std::move(y));
}

// --- Binarization -------------------------------------------------------------

Dataset binarize_categoricals(const Dataset& ds) {
  std::vector<Column> cols;
  std::vector<FeatureSchema> features(ds.schema().begin(), ds.schema().end());
  for (std::size_t j = 0; j < ds.features(); ++j) {
    const auto* levels = std::get_if<std::vector<std::string>>(&ds.column(j));
    if (levels == nullptr) {
      cols.push_back(ds.column(j));
      continue;
    }
    std::string positive = features[j].positive_level;
    if (positive.empty()) {
      std::map<std::string, std::size_t> counts;  // ordered: ties resolve lexicographically
      for (const auto& v : *levels) ++counts[v];
      std::size_t best = 0;
      for (const auto& [level, count] : counts) {
        if (count > best) {
          best = count;
          positive = level;
        }
      }
    }
    std::vector<double> out;
    out.reserve(levels->size());
    for (const auto& v : *levels) out.push_back(v == positive ? 1.0 : 0.0);
    features[j].positive_level = positive;
    cols.emplace_back(std::move(out));
  }
  return Dataset(ds.name(), Schema(std::move(features)), std::move(cols), ds.target());
}

// --- Scaling ------------------------------------------------------------------

MinMaxScaler::MinMaxScaler(std::vector<ScalingParams> params) : params_(std::move(params)) {
  for (const auto& p : params_) {
    if (p.continuous && !(p.raw_min < p.raw_max)) throw SchemaError("scaler needs raw_min < raw_max");
  }
}

MinMaxScaler MinMaxScaler::fit(const Dataset& ds) {
  std::vector<ScalingParams> params;
  for (std::size_t j = 0; j < ds.features(); ++j) {
    const auto& f = ds.schema()[j];
    if (f.is_binary()) {
      params.push_back({0.0, 1.0, false});
      continue;
    }
    const auto& col = std::get<std::vector<double>>(ds.column(j));
    if (col.empty()) throw SchemaError("cannot fit scaler on empty column '" + f.name + "'");
    auto [lo, hi] = std::minmax_element(col.begin(), col.end());
    if (!(*lo < *hi)) {
      throw SchemaError("column '" + f.name + "' is constant; remove it from the schema");
    }
    params.push_back({*lo, *hi, true});
  }
  return MinMaxScaler(std::move(params));
}

Vector MinMaxScaler::encode(const Vector& raw) const {
  check_dim(params_.size(), static_cast<std::size_t>(raw.size()));
  Vector out(raw.size());
  for (Eigen::Index j = 0; j < raw.size(); ++j) {
    const auto& p = params_[static_cast<std::size_t>(j)];
    out[j] = p.continuous ? (raw[j] - p.raw_min) / (p.raw_max - p.raw_min) : raw[j];
  }
  return out;
}

Vector MinMaxScaler::decode(const Vector& encoded) const {
  check_dim(params_.size(), static_cast<std::size_t>(encoded.size()));
  Vector out(encoded.size());
  for (Eigen::Index j = 0; j < encoded.size(); ++j) {
    const auto& p = params_[static_cast<std::size_t>(j)];
    out[j] = p.continuous ? p.raw_min + encoded[j] * (p.raw_max - p.raw_min) : encoded[j];
  }
  return out;
}

EncodedDataset MinMaxScaler::transform(const Dataset& ds) const {
  check_dim(params_.size(), ds.features());
  Matrix raw = ds.matrix();
  Matrix enc(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    enc.row(i) = encode(raw.row(i).transpose()).transpose();
  }
  std::vector<FeatureSchema> features(ds.schema().begin(), ds.schema().end());
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (params_[j].continuous) {
      features[j].raw_min = params_[j].raw_min;
      features[j].raw_max = params_[j].raw_max;
    }
  }
  return EncodedDataset(std::make_shared<const Dataset>(ds), Schema(std::move(features)),
                        std::move(enc), ds.target(), *this);
}

EncodedDataset::EncodedDataset(std::shared_ptr<const Dataset> parent, Schema schema, Matrix values,
                               std::vector<int> target, MinMaxScaler scaler)
    : parent_(std::move(parent)),
      schema_(std::move(schema)),
      values_(std::move(values)),
      target_(std::move(target)),
      scaler_(std::move(scaler)) {
  check_dim(schema_.size(), static_cast<std::size_t>(values_.cols()));
  check_dim(target_.size(), static_cast<std::size_t>(values_.rows()));
}

void EncodedDataset::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& f : schema_) out << detail::csv_escape(f.name) << ',';
  out << "target\n";
  for (Eigen::Index i = 0; i < values_.rows(); ++i) {
    for (Eigen::Index j = 0; j < values_.cols(); ++j) out << fmt::format("{},", values_(i, j));
    out << target_[static_cast<std::size_t>(i)] << '\n';
  }
}

EncodedDataset minmax_scale(const Dataset& ds) { return MinMaxScaler::fit(ds).transform(ds); }

// --- Split / synthetic ----------------------------------------------------------

std::pair<Dataset, Dataset> split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error("train_fraction must lie in (0,1)");
  }
  std::vector<std::size_t> idx(ds.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ds.rows())));
  std::span<const std::size_t> all(idx);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

Dataset synthetic_generate(std::size_t n, double correlation, std::uint64_t seed) {
  if (n == 0) throw Error("synthetic_generate needs n > 0");
  if (!(correlation >= -1.0 && correlation <= 1.0)) throw Error("correlation must lie in [-1,1]");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double ortho = std::sqrt(1.0 - correlation * correlation);
  std::vector<double> x1(n), x2(n);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = normal(rng);
    const double b = normal(rng);
    const double noise = 0.5 * normal(rng);
    x1[i] = a;
    x2[i] = correlation * a + ortho * b;
    y[i] = (x1[i] + x2[i] + noise > 0.0) ? 1 : 0;
  }
  FeatureSchema f1, f2;
  f1.name = "x1";
  f2.name = "x2";
  Schema schema({f1, f2});
  return Dataset("synthetic", std::move(schema), {Column(std::move(x1)), Column(std::move(x2))},
                 std::move(y));
}

}  // namespace recourse
