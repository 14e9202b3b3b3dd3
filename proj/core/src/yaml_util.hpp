#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "recourse/error.hpp"

namespace recourse::detail {

inline void allow_keys(const YAML::Node& node, std::string_view context,
                       std::initializer_list<std::string_view> keys) {
  if (!node.IsMap()) throw ConfigError(fmt::format("{} must be a mapping", context));
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (auto k : keys) known = known || k == key;
    if (!known) throw ConfigError(fmt::format("unknown key '{}' in {}", key, context));
  }
}

template <typename T>
T scalar(const YAML::Node& node, const char* key) {
  const auto v = node[key];
  if (!v) throw ConfigError(fmt::format("missing required key '{}'", key));
  try {
    return v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("key '{}' has the wrong type", key));
  }
}

template <typename T>
T scalar(const YAML::Node& node, const char* key, T fallback) {
  if (!node[key]) return fallback;
  return scalar<T>(node, key);
}

}  // namespace recourse::detail
