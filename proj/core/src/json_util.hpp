// Copyright 2026 The blockdvfs Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "blockdvfs/error.hpp"

namespace blockdvfs::detail {

nlohmann::json read_json_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames, so readers never see a
/// partially written file.
void write_text_file(const std::filesystem::path& path, const std::string& text);

template <typename T>
bool holds(const nlohmann::json& v) {
  if constexpr (std::is_same_v<T, double>) return v.is_number();
  else if constexpr (std::is_same_v<T, bool>) return v.is_boolean();
  else if constexpr (std::is_same_v<T, std::string>) return v.is_string();
  else if constexpr (std::is_integral_v<T>) return v.is_number_integer() || v.is_number_unsigned();
  else return true;
}

template <typename T>
std::optional<T> optional(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!holds<T>(*it)) {
    throw ParseError(where + ": field '" + key + "' has the wrong type");
  }
  return it->get<T>();
}

template <typename T>
T require(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto v = optional<T>(obj, key, where);
  if (!v) throw ParseError(where + ": missing field '" + key + "'");
  return *v;
}

}  // namespace blockdvfs::detail
