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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "streetnav/route/world.hpp"

namespace streetnav::route {

// Dataset directory layout:
//   nodes.txt, links.tsv   panorama graph
//   features/<id>.fmap     per-panorama feature maps
//   nav.jsonl, sdr.jsonl   examples
//   vocab.txt              one token per line, line number = id
//   meta.json              feature grid / image scale, generator settings
struct DatasetMeta {
  int schema_version = 1;
  sdr::GridSpec grid;
  std::optional<WorldConfig> generator;
};

inline constexpr int kDatasetSchemaVersion = 1;

DatasetMeta read_meta(std::istream& in, const std::string& source = "meta.json");
void write_meta(std::ostream& out, const DatasetMeta& meta);

// Readers validate every line against the graph, vocabulary and grid and
// throw ParseError(source, line, ...) on the first violation. Lines may give
// "text" (whitespace tokenized, unknown words -> UNK) instead of "tokens".
std::vector<NavExample> read_nav_jsonl(std::istream& in, const std::string& source, const env::PanoGraph& graph,
                                       const text::Vocab& vocab);
void write_nav_jsonl(std::ostream& out, const std::vector<NavExample>& examples, const env::PanoGraph& graph);

std::vector<sdr::SdrExample> read_sdr_jsonl(std::istream& in, const std::string& source,
                                            const env::PanoGraph& graph, const text::Vocab& vocab,
                                            const sdr::GridSpec& grid);
void write_sdr_jsonl(std::ostream& out, const std::vector<sdr::SdrExample>& examples);

std::filesystem::path feature_path(const std::filesystem::path& dir, const std::string& pano);

void save_world(const World& world, const std::filesystem::path& dir);
// Loads a dataset directory eagerly, including every feature map.
World load_world(const std::filesystem::path& dir);

}  // namespace streetnav::route
