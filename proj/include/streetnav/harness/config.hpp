/* Copyright 2026 The StreetNav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>

namespace streetnav::harness {

enum class ValueKind { kCount, kReal, kString, kBool };

struct ConfigKey {
  std::string_view name;
  ValueKind kind;
  std::string_view default_value;
  std::string_view help;
};

// Every accepted key with its default.
std::span<const ConfigKey> config_schema();

// Experiment settings as validated key/value pairs. Files hold one
// "key = value" per line; '#' starts a comment. Unknown keys, malformed
// values and duplicate keys within one file are rejected with a ParseError
// naming the source and line.
class Config {
 public:
  Config();  // all defaults

  void set(std::string_view key, std::string_view value, const std::string& source = "command line",
           std::size_t line = 0);
  // "key=value" from the command line.
  void apply_override(std::string_view assignment);
  void merge(std::istream& in, const std::string& source);
  void merge_file(const std::filesystem::path& file);

  const std::string& string(std::string_view key) const;
  std::size_t count(std::string_view key) const;
  double real(std::string_view key) const;
  bool flag(std::string_view key) const;

  // Every key, defaults included, for echoing into reports.
  const std::map<std::string, std::string, std::less<>>& values() const { return values_; }

 private:
  const std::string& raw(std::string_view key, ValueKind kind) const;
  std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace streetnav::harness
