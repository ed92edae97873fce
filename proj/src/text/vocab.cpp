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
#include "streetnav/text/vocab.hpp"

#include <cctype>
#include <fstream>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"

namespace streetnav::text {

std::vector<std::string> tokenize(std::string_view sentence) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < sentence.size()) {
    while (i < sentence.size() && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
    std::size_t j = i;
    while (j < sentence.size() && !std::isspace(static_cast<unsigned char>(sentence[j]))) ++j;
    if (j > i) out.emplace_back(sentence.substr(i, j - i));
    i = j;
  }
  return out;
}

Vocab::Vocab() { add(kUnkToken); }

Vocab Vocab::build(std::span<const std::vector<std::string>> sentences, std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (counts[t]++ == 0) order.push_back(t);
    }
  }
  Vocab v;
  for (const auto& t : order) {
    if (counts[t] >= min_count) v.add(t);
  }
  return v;
}

std::size_t Vocab::add(std::string_view token) {
  std::string t(token);
  if (auto it = ids_.find(t); it != ids_.end()) return it->second;
  const std::size_t id = tokens_.size();
  tokens_.push_back(t);
  ids_.emplace(std::move(t), id);
  return id;
}

std::size_t Vocab::id(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(std::size_t id) const {
  if (id >= tokens_.size()) {
    throw LookupError("token id " + std::to_string(id) + " out of range (vocabulary size " +
                      std::to_string(tokens_.size()) + ")");
  }
  return tokens_[id];
}

bool Vocab::contains(std::string_view token) const { return ids_.count(std::string(token)) > 0; }

std::vector<std::size_t> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

std::vector<std::size_t> Vocab::encode(std::string_view sentence) const {
  return encode(tokenize(sentence));
}

void Vocab::save(std::ostream& out) const {
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(std::istream& in, const std::string& source) {
  Vocab v;
  v.tokens_.clear();
  v.ids_.clear();
  std::string line;
  std::size_t line_no = 0;
  while (io::read_line(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_of(" \t") != std::string::npos) {
      throw ParseError(source, line_no, "token must be non-empty and contain no whitespace");
    }
    if (v.ids_.count(line)) throw ParseError(source, line_no, "duplicate token '" + line + "'");
    v.add(line);
  }
  if (v.tokens_.empty() || v.tokens_[0] != kUnkToken) {
    throw ParseError(source, 1, "first token must be " + std::string(kUnkToken));
  }
  return v;
}

void Vocab::save(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw Error("cannot write " + file.string());
  save(out);
}

Vocab Vocab::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open file");
  return load(in, file.string());
}

}  // namespace streetnav::text
