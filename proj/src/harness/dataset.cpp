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
#include "streetnav/harness/dataset.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include "streetnav/common/error.hpp"
#include "streetnav/env/graph_io.hpp"

namespace streetnav::harness {

namespace fs = std::filesystem;

FeatureCache::FeatureCache(fs::path dir, sdr::GridSpec grid, std::size_t capacity)
    : dir_(std::move(dir)), grid_(grid), capacity_(capacity) {
  if (capacity_ == 0) throw PreconditionError("feature cache capacity must be positive");
}

std::shared_ptr<const sdr::FeatureMap> FeatureCache::get(const std::string& pano) {
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(pano); it != index_.end()) {
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }
  const fs::path p = route::feature_path(dir_, pano);
  if (!fs::exists(p)) throw LookupError("no feature file for panorama '" + pano + "' (" + p.string() + ")");
  auto map = std::make_shared<const sdr::FeatureMap>(sdr::FeatureMap::load(p));
  if (map->height() != grid_.height || map->width() != grid_.width) {
    throw ParseError(p.string(), 0, "feature grid does not match meta.json");
  }
  ++loads_;
  order_.emplace_front(pano, map);
  index_[pano] = order_.begin();
  if (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
  return map;
}

sdr::FeatureLookup FeatureCache::lookup() {
  return [this](const std::string& pano) { return get(pano); };
}

std::size_t FeatureCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::size_t FeatureCache::loads() const {
  std::lock_guard lock(mutex_);
  return loads_;
}

std::vector<route::NavExample> Dataset::nav_split(const std::string& split) const {
  std::vector<route::NavExample> out;
  for (const auto& e : nav)
    if (e.split == split) out.push_back(e);
  return out;
}

std::vector<sdr::SdrExample> Dataset::sdr_split(const std::string& split) const {
  std::vector<sdr::SdrExample> out;
  for (const auto& e : sdr)
    if (e.split == split) out.push_back(e);
  return out;
}

namespace {

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError(p.string(), 0, "cannot open file");
  return in;
}

}  // namespace

Dataset load_dataset(const fs::path& dir, std::size_t cache_capacity) {
  if (!fs::is_directory(dir)) throw ParseError(dir.string(), 0, "dataset directory not found");
  Dataset d;
  d.dir = dir;
  {
    auto in = open_in(dir / "meta.json");
    d.meta = route::read_meta(in, (dir / "meta.json").string());
  }
  d.graph = env::load_graph(dir / "nodes.txt", dir / "links.tsv");
  d.vocab = text::Vocab::load(dir / "vocab.txt");
  {
    auto in = open_in(dir / "nav.jsonl");
    d.nav = route::read_nav_jsonl(in, (dir / "nav.jsonl").string(), d.graph, d.vocab);
  }
  {
    auto in = open_in(dir / "sdr.jsonl");
    d.sdr = route::read_sdr_jsonl(in, (dir / "sdr.jsonl").string(), d.graph, d.vocab, d.meta.grid);
  }
  std::set<std::string> referenced;
  for (const auto& e : d.sdr) referenced.insert(e.pano);
  for (const auto& e : d.nav)
    for (auto n : e.route) referenced.insert(d.graph.id(n));
  for (const auto& id : referenced) {
    const fs::path p = route::feature_path(dir, id);
    if (!fs::exists(p)) throw ParseError(p.string(), 0, "missing feature file for panorama '" + id + "'");
  }
  d.features = std::make_shared<FeatureCache>(dir, d.meta.grid, cache_capacity);
  if (!referenced.empty()) d.channels = d.features->get(*referenced.begin())->channels();
  return d;
}

fs::path data_root(const std::string& configured) {
  if (!configured.empty()) return configured;
  if (const char* env = std::getenv("STREETNAV_DATA"); env != nullptr && *env != '\0') return env;
  throw PreconditionError("no dataset given: set 'data' or STREETNAV_DATA");
}

}  // namespace streetnav::harness
