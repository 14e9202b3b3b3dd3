#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recourse/dataset.hpp"
#include "recourse/error.hpp"
#include "recourse/model.hpp"

namespace recourse::detail {

using nlohmann::json;

inline constexpr const char* kWeightFormat = "recourse-weights";
inline constexpr int kWeightVersion = 1;

inline json layer_to_json(const DenseLayer& layer) {
  json j;
  j["in"] = layer.weights.cols();
  j["out"] = layer.weights.rows();
  std::vector<double> w(layer.weights.data(), layer.weights.data() + layer.weights.size());
  j["weights"] = w;
  j["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
  return j;
}

inline DenseLayer layer_from_json(const json& j) {
  try {
    const auto in = j.at("in").get<Eigen::Index>();
    const auto out = j.at("out").get<Eigen::Index>();
    const auto w = j.at("weights").get<std::vector<double>>();
    const auto b = j.at("bias").get<std::vector<double>>();
    if (in <= 0 || out <= 0 || static_cast<Eigen::Index>(w.size()) != in * out ||
        static_cast<Eigen::Index>(b.size()) != out) {
      throw FormatError("layer arrays do not match declared dims");
    }
    DenseLayer layer{Matrix(out, in), Vector(out)};
    std::copy(w.begin(), w.end(), layer.weights.data());
    std::copy(b.begin(), b.end(), layer.bias.data());
    return layer;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed layer: ") + e.what());
  }
}

inline json scaler_to_json(const MinMaxScaler& scaler) {
  json arr = json::array();
  for (const auto& p : scaler.params()) {
    arr.push_back({{"raw_min", p.raw_min}, {"raw_max", p.raw_max}, {"continuous", p.continuous}});
  }
  return arr;
}

inline MinMaxScaler scaler_from_json(const json& j) {
  std::vector<ScalingParams> params;
  for (const auto& e : j) {
    params.push_back({e.at("raw_min").get<double>(), e.at("raw_max").get<double>(),
                      e.at("continuous").get<bool>()});
  }
  return MinMaxScaler(std::move(params));
}

inline json parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("weight file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", "") != kWeightFormat) {
    throw FormatError("not a recourse weight file");
  }
  if (doc.value("version", 0) != kWeightVersion) {
    throw FormatError("unsupported weight file version");
  }
  return doc;
}

}  // namespace recourse::detail
