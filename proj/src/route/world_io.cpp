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
#include "streetnav/route/world_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"
#include "streetnav/env/graph_io.hpp"

namespace streetnav::route {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class LineContext {
 public:
  LineContext(const std::string& source, std::size_t line) : source_(source), line_(line) {}
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(source_, line_, msg); }

  const json& field(const json& obj, const char* key) const {
    auto it = obj.find(key);
    if (it == obj.end()) fail(std::string("missing field '") + key + "'");
    return *it;
  }
  std::string string_field(const json& obj, const char* key) const {
    const json& v = field(obj, key);
    if (!v.is_string()) fail(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
  }
  double number_field(const json& obj, const char* key) const {
    const json& v = field(obj, key);
    if (!v.is_number()) fail(std::string("field '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(std::string("field '") + key + "' must be finite");
    return d;
  }
  std::optional<std::string> optional_string(const json& obj, const char* key) const {
    if (!obj.contains(key)) return std::nullopt;
    return string_field(obj, key);
  }
  env::NodeIndex pano(const env::PanoGraph& graph, const std::string& id) const {
    auto n = graph.find(id);
    if (!n) fail("unknown panorama '" + id + "'");
    return *n;
  }
  std::vector<std::size_t> tokens(const json& obj, const text::Vocab& vocab) const {
    std::vector<std::size_t> out;
    if (obj.contains("tokens")) {
      const json& t = obj["tokens"];
      if (!t.is_array()) fail("field 'tokens' must be an array of ids");
      for (const json& v : t) {
        if (!v.is_number_unsigned()) fail("token ids must be non-negative integers");
        const auto id = v.get<std::uint64_t>();
        if (id >= vocab.size()) {
          fail("token id " + std::to_string(id) + " >= vocabulary size " + std::to_string(vocab.size()));
        }
        out.push_back(static_cast<std::size_t>(id));
      }
    } else if (obj.contains("text")) {
      out = vocab.encode(string_field(obj, "text"));
    } else {
      fail("missing field 'tokens' (or 'text')");
    }
    if (out.empty()) fail("empty token sequence");
    return out;
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

template <typename F>
void for_each_json_line(std::istream& in, const std::string& source, F&& f) {
  std::string line;
  std::size_t line_no = 0;
  while (io::read_line(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    LineContext ctx(source, line_no);
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) ctx.fail("invalid JSON");
    if (!obj.is_object()) ctx.fail("expected a JSON object");
    f(obj, ctx);
  }
}

json config_to_json(const WorldConfig& c) {
  return {{"seed", c.seed},
          {"grid_rows", c.grid_rows},
          {"grid_cols", c.grid_cols},
          {"shortcut_prob", c.shortcut_prob},
          {"heading_jitter", c.heading_jitter},
          {"feature_height", c.feature_height},
          {"feature_width", c.feature_width},
          {"marker_classes", c.marker_classes},
          {"noise_channels", c.noise_channels},
          {"marker_gap", c.marker_gap},
          {"image_scale", c.image_scale},
          {"vocab_size", c.vocab_size},
          {"sdr_train", c.sdr_train},
          {"sdr_dev", c.sdr_dev},
          {"max_maps_per_sentence", c.max_maps_per_sentence},
          {"nav_train", c.nav_train},
          {"nav_dev", c.nav_dev},
          {"nav_test", c.nav_test},
          {"route_min", c.route_min},
          {"route_max", c.route_max}};
}

WorldConfig config_from_json(const json& j, const LineContext& ctx) {
  WorldConfig c;
  auto get = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    try {
      out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
    } catch (const json::exception&) {
      ctx.fail(std::string("generator field '") + key + "' has the wrong type");
    }
  };
  get("seed", c.seed);
  get("grid_rows", c.grid_rows);
  get("grid_cols", c.grid_cols);
  get("shortcut_prob", c.shortcut_prob);
  get("heading_jitter", c.heading_jitter);
  get("feature_height", c.feature_height);
  get("feature_width", c.feature_width);
  get("marker_classes", c.marker_classes);
  get("noise_channels", c.noise_channels);
  get("marker_gap", c.marker_gap);
  get("image_scale", c.image_scale);
  get("vocab_size", c.vocab_size);
  get("sdr_train", c.sdr_train);
  get("sdr_dev", c.sdr_dev);
  get("max_maps_per_sentence", c.max_maps_per_sentence);
  get("nav_train", c.nav_train);
  get("nav_dev", c.nav_dev);
  get("nav_test", c.nav_test);
  get("route_min", c.route_min);
  get("route_max", c.route_max);
  return c;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ParseError(p.string(), 0, "cannot open file");
  return in;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

}  // namespace

DatasetMeta read_meta(std::istream& in, const std::string& source) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  LineContext ctx(source, 0);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) ctx.fail("invalid JSON object");
  DatasetMeta m;
  const json& version = ctx.field(j, "schema_version");
  if (!version.is_number_integer() || version.get<int>() != kDatasetSchemaVersion) {
    ctx.fail("unsupported schema_version (expected " + std::to_string(kDatasetSchemaVersion) + ")");
  }
  const json& grid = ctx.field(j, "grid");
  if (!grid.is_object()) ctx.fail("field 'grid' must be an object");
  const double h = ctx.number_field(grid, "height"), w = ctx.number_field(grid, "width");
  m.grid.scale = ctx.number_field(grid, "image_scale");
  if (h < 1 || w < 1 || h != std::floor(h) || w != std::floor(w) || m.grid.scale <= 0) {
    ctx.fail("grid needs positive integer height/width and positive image_scale");
  }
  m.grid.height = static_cast<std::size_t>(h);
  m.grid.width = static_cast<std::size_t>(w);
  if (j.contains("generator")) {
    if (!j["generator"].is_object()) ctx.fail("field 'generator' must be an object");
    m.generator = config_from_json(j["generator"], ctx);
  }
  return m;
}

void write_meta(std::ostream& out, const DatasetMeta& meta) {
  json j = {{"schema_version", meta.schema_version},
            {"grid", {{"height", meta.grid.height}, {"width", meta.grid.width}, {"image_scale", meta.grid.scale}}}};
  if (meta.generator) j["generator"] = config_to_json(*meta.generator);
  out << j.dump(2) << '\n';
}

std::vector<NavExample> read_nav_jsonl(std::istream& in, const std::string& source, const env::PanoGraph& graph,
                                       const text::Vocab& vocab) {
  std::vector<NavExample> out;
  for_each_json_line(in, source, [&](const json& obj, const LineContext& ctx) {
    NavExample ex;
    ex.id = ctx.string_field(obj, "id");
    ex.tokens = ctx.tokens(obj, vocab);
    ex.start_pano = ctx.pano(graph, ctx.string_field(obj, "start_pano"));
    ex.start_heading = ctx.number_field(obj, "start_heading");
    if (!graph.is_valid(ex.start())) ctx.fail("start_heading is not an edge heading of the start panorama");
    const json& route = ctx.field(obj, "route");
    if (!route.is_array()) ctx.fail("field 'route' must be an array of panorama ids");
    for (const json& p : route) {
      if (!p.is_string()) ctx.fail("route entries must be panorama ids");
      ex.route.push_back(ctx.pano(graph, p.get<std::string>()));
    }
    try {
      validate_route(graph, ex.route);
    } catch (const PreconditionError& e) {
      ctx.fail(std::string("invalid route: ") + e.what());
    }
    if (ex.route.front() != ex.start_pano) ctx.fail("route does not begin at start_pano");
    ex.goal = ctx.pano(graph, ctx.string_field(obj, "goal_pano"));
    ex.split = ctx.optional_string(obj, "split").value_or("");
    out.push_back(std::move(ex));
  });
  return out;
}

void write_nav_jsonl(std::ostream& out, const std::vector<NavExample>& examples, const env::PanoGraph& graph) {
  for (const auto& ex : examples) {
    json route = json::array();
    for (NodeIndex p : ex.route) route.push_back(graph.id(p));
    json j = {{"id", ex.id},
              {"tokens", ex.tokens},
              {"start_pano", graph.id(ex.start_pano)},
              {"start_heading", ex.start_heading},
              {"route", route},
              {"goal_pano", graph.id(ex.goal)}};
    if (!ex.split.empty()) j["split"] = ex.split;
    out << j.dump() << '\n';
  }
}

std::vector<sdr::SdrExample> read_sdr_jsonl(std::istream& in, const std::string& source,
                                            const env::PanoGraph& graph, const text::Vocab& vocab,
                                            const sdr::GridSpec& grid) {
  std::vector<sdr::SdrExample> out;
  for_each_json_line(in, source, [&](const json& obj, const LineContext& ctx) {
    sdr::SdrExample ex;
    ex.sentence_id = ctx.string_field(obj, "sentence_id");
    ex.pano = ctx.string_field(obj, "pano");
    ctx.pano(graph, ex.pano);
    ex.tokens = ctx.tokens(obj, vocab);
    ex.target = {ctx.number_field(obj, "target_x"), ctx.number_field(obj, "target_y")};
    if (ex.target.x < 0 || ex.target.y < 0 || ex.target.x >= grid.image_width() ||
        ex.target.y >= grid.image_height()) {
      ctx.fail("target outside the image");
    }
    ex.split = ctx.optional_string(obj, "split").value_or("");
    ex.nav_id = ctx.optional_string(obj, "nav_id");
    out.push_back(std::move(ex));
  });
  return out;
}

void write_sdr_jsonl(std::ostream& out, const std::vector<sdr::SdrExample>& examples) {
  for (const auto& ex : examples) {
    json j = {{"sentence_id", ex.sentence_id},
              {"pano", ex.pano},
              {"tokens", ex.tokens},
              {"target_x", ex.target.x},
              {"target_y", ex.target.y}};
    if (!ex.split.empty()) j["split"] = ex.split;
    if (ex.nav_id) j["nav_id"] = *ex.nav_id;
    out << j.dump() << '\n';
  }
}

fs::path feature_path(const fs::path& dir, const std::string& pano) {
  return dir / "features" / (pano + ".fmap");
}

void save_world(const World& world, const fs::path& dir) {
  fs::create_directories(dir / "features");
  env::save_graph(world.graph, dir / "nodes.txt", dir / "links.tsv");
  for (const auto& [id, f] : world.features) f.save(feature_path(dir, id));
  {
    auto out = open_out(dir / "nav.jsonl");
    write_nav_jsonl(out, world.nav, world.graph);
  }
  {
    auto out = open_out(dir / "sdr.jsonl");
    write_sdr_jsonl(out, world.sdr);
  }
  world.vocab.save(dir / "vocab.txt");
  auto out = open_out(dir / "meta.json");
  write_meta(out, {kDatasetSchemaVersion, world.grid(), world.config});
}

World load_world(const fs::path& dir) {
  World w;
  DatasetMeta meta;
  {
    auto in = open_in(dir / "meta.json");
    meta = read_meta(in, (dir / "meta.json").string());
  }
  w.config = meta.generator.value_or(WorldConfig{});
  w.config.feature_height = meta.grid.height;
  w.config.feature_width = meta.grid.width;
  w.config.image_scale = meta.grid.scale;
  w.graph = env::load_graph(dir / "nodes.txt", dir / "links.tsv");
  w.vocab = text::Vocab::load(dir / "vocab.txt");
  for (std::uint32_t i = 0; i < w.graph.num_nodes(); ++i) {
    const std::string& id = w.graph.id(NodeIndex{i});
    const fs::path p = feature_path(dir, id);
    if (!fs::exists(p)) throw ParseError(p.string(), 0, "missing feature file for panorama '" + id + "'");
    sdr::FeatureMap f = sdr::FeatureMap::load(p);
    if (f.height() != meta.grid.height || f.width() != meta.grid.width) {
      throw ParseError(p.string(), 0, "feature grid does not match meta.json");
    }
    w.features.emplace(id, std::move(f));
  }
  {
    auto in = open_in(dir / "nav.jsonl");
    w.nav = read_nav_jsonl(in, (dir / "nav.jsonl").string(), w.graph, w.vocab);
  }
  auto in = open_in(dir / "sdr.jsonl");
  w.sdr = read_sdr_jsonl(in, (dir / "sdr.jsonl").string(), w.graph, w.vocab, meta.grid);
  return w;
}

}  // namespace streetnav::route
