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
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "streetnav/route/world_io.hpp"

namespace streetnav::harness {

// Loads feature maps on demand and keeps the `capacity` most recently used.
// Safe to share between threads.
class FeatureCache {
 public:
  FeatureCache(std::filesystem::path dir, sdr::GridSpec grid, std::size_t capacity);

  std::shared_ptr<const sdr::FeatureMap> get(const std::string& pano);
  sdr::FeatureLookup lookup();

  std::size_t size() const;
  std::size_t loads() const;  // files read so far

 private:
  using Entry = std::pair<std::string, std::shared_ptr<const sdr::FeatureMap>>;
  std::filesystem::path dir_;
  sdr::GridSpec grid_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;  // most recent first
  std::unordered_map<std::string, std::list<Entry>::iterator> index_;
  std::size_t loads_ = 0;
};

struct Dataset {
  std::filesystem::path dir;
  route::DatasetMeta meta;
  env::PanoGraph graph;
  text::Vocab vocab;
  std::vector<route::NavExample> nav;
  std::vector<sdr::SdrExample> sdr;
  std::shared_ptr<FeatureCache> features;
  std::size_t channels = 0;  // feature channels, read from the first map

  std::vector<route::NavExample> nav_split(const std::string& split) const;
  std::vector<sdr::SdrExample> sdr_split(const std::string& split) const;
};

// Validates every file; features are checked for existence and read lazily.
// Throws ParseError naming the file (and line) on the first problem.
Dataset load_dataset(const std::filesystem::path& dir, std::size_t cache_capacity = 512);

// `configured` when non-empty, else $STREETNAV_DATA; throws when neither is set.
std::filesystem::path data_root(const std::string& configured);

}  // namespace streetnav::harness
