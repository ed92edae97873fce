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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace streetnav::text {

// Token <-> id map. Id 0 is reserved for unknown tokens.
class Vocab {
 public:
  static constexpr std::size_t kUnk = 0;
  static constexpr std::string_view kUnkToken = "<unk>";

  Vocab();

  // Builds from tokenized training sentences; tokens seen fewer than
  // `min_count` times map to UNK. Ids follow first occurrence.
  static Vocab build(std::span<const std::vector<std::string>> sentences, std::size_t min_count = 1);

  std::size_t add(std::string_view token);
  std::size_t id(std::string_view token) const;
  const std::string& token(std::size_t id) const;
  bool contains(std::string_view token) const;
  std::size_t size() const { return tokens_.size(); }

  std::vector<std::size_t> encode(std::span<const std::string> tokens) const;
  std::vector<std::size_t> encode(std::string_view sentence) const;

  // One token per line; the line number is the id.
  void save(std::ostream& out) const;
  static Vocab load(std::istream& in, const std::string& source = "vocab");
  void save(const std::filesystem::path& file) const;
  static Vocab load(const std::filesystem::path& file);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> ids_;
};

std::vector<std::string> tokenize(std::string_view sentence);

}  // namespace streetnav::text
