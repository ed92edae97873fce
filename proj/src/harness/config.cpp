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
#include "streetnav/harness/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"

namespace streetnav::harness {

namespace {

using enum ValueKind;

constexpr ConfigKey kSchema[] = {
    {"seed", kCount, "1", "random seed for every stochastic step"},
    {"workers", kCount, "1", "navigation training threads (Hogwild when > 1)"},
    {"deterministic", kBool, "false", "force one worker for reproducible runs"},
    {"data", kString, "", "dataset directory (defaults to $STREETNAV_DATA)"},
    {"split", kString, "dev", "evaluation split"},
    {"feature_cache", kCount, "512", "feature maps kept in memory"},
    {"input", kString, "", "report whose records the metrics command rescores"},

    {"sdr.model", kString, "lingunet", "lingunet|unet|concat|concatconv|text2conv|random|center|average"},
    {"sdr.checkpoint", kString, "", "SDR parameter file (written by train-sdr, read by eval)"},
    {"sdr.lr", kReal, "0", "learning rate; 0 picks the per-model default"},
    {"sdr.epochs", kCount, "30", "maximum epochs"},
    {"sdr.patience", kCount, "4", "early-stopping patience"},
    {"sdr.sigma", kReal, "3", "Gaussian target width in grid cells"},
    {"sdr.dropout", kReal, "0.5", "word embedding dropout"},
    {"sdr.early_stop_radius", kReal, "80", "dev accuracy radius in image pixels"},
    {"sdr.channels", kCount, "128", "feature channels entering the model"},
    {"sdr.levels", kCount, "2", "LingUNet depth"},
    {"sdr.mlp_hidden", kCount, "128", "per-pixel head width"},
    {"sdr.embedding_dim", kCount, "300", "word embedding size"},
    {"sdr.text_hidden", kCount, "300", "text LSTM size per direction"},
    {"sdr.init_scale", kReal, "0.1", "uniform initialization range"},

    {"nav.model", kString, "rconcat", "rconcat|ga|stop|random|frequent"},
    {"nav.checkpoint", kString, "", "navigation parameter file"},
    {"nav.ablation", kString, "none", "none|no_text|no_image"},
    {"nav.lr", kReal, "0.00025", "learning rate"},
    {"nav.epochs", kCount, "50", "maximum epochs"},
    {"nav.patience", kCount, "5", "early-stopping patience"},
    {"nav.horizon", kCount, "50", "evaluation step limit"},
    {"nav.train_horizon", kCount, "55", "time embeddings cover steps up to this"},
    {"nav.crop_width", kCount, "100", "observation width in feature columns"},
    {"nav.convs", kString, "", "conv stack as CxK/S,...; empty picks the model default"},
    {"nav.image_dim", kCount, "0", "image representation size; 0 picks the model default"},
    {"nav.ga_hidden", kCount, "256", "gated-attention LSTM input size"},
    {"nav.embedding_dim", kCount, "32", "word embedding size"},
    {"nav.text_hidden", kCount, "256", "instruction LSTM size"},
    {"nav.action_dim", kCount, "16", "previous action embedding size"},
    {"nav.time_dim", kCount, "32", "time step embedding size"},
    {"nav.lstm_hidden", kCount, "256", "policy LSTM size"},
    {"nav.init_scale", kReal, "0.1", "uniform initialization range"},
    {"nav.decode", kString, "greedy", "greedy|sample"},

    {"world.grid_rows", kCount, "20", "street grid rows"},
    {"world.grid_cols", kCount, "20", "street grid columns"},
    {"world.shortcut_prob", kReal, "0.15", "probability of a diagonal shortcut per block"},
    {"world.heading_jitter", kReal, "5", "heading noise in degrees"},
    {"world.feature_height", kCount, "16", "feature map rows"},
    {"world.feature_width", kCount, "32", "feature map columns"},
    {"world.marker_classes", kCount, "2", "landmark classes"},
    {"world.noise_channels", kCount, "2", "distractor channels"},
    {"world.marker_gap", kCount, "3", "columns between the two markers of a pair"},
    {"world.image_scale", kReal, "8", "image pixels per grid cell"},
    {"world.vocab_size", kCount, "20", "vocabulary size"},
    {"world.sdr_train", kCount, "500", "SDR training examples"},
    {"world.sdr_dev", kCount, "100", "SDR development examples"},
    {"world.max_maps_per_sentence", kCount, "3", "panoramas sharing one SDR sentence"},
    {"world.nav_train", kCount, "200", "navigation training examples"},
    {"world.nav_dev", kCount, "50", "navigation development examples"},
    {"world.nav_test", kCount, "50", "navigation test examples"},
    {"world.route_min", kCount, "4", "shortest route in panoramas"},
    {"world.route_max", kCount, "8", "longest route in panoramas"},
};

const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : kSchema)
    if (k.name == name) return &k;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Empty string when valid, otherwise the reason.
std::string check_value(ValueKind kind, std::string_view v) {
  switch (kind) {
    case kCount: {
      const auto n = io::parse_int(v);
      if (!n || *n < 0) return "expected a non-negative integer";
      return {};
    }
    case kReal: {
      const auto x = io::parse_double(v);
      if (!x || !std::isfinite(*x)) return "expected a finite number";
      return {};
    }
    case kBool:
      if (v != "true" && v != "false") return "expected true or false";
      return {};
    case kString:
      return {};
  }
  return "bad value kind";
}

}  // namespace

std::span<const ConfigKey> config_schema() { return kSchema; }

Config::Config() {
  for (const auto& k : kSchema) values_.emplace(std::string(k.name), std::string(k.default_value));
}

void Config::set(std::string_view key, std::string_view value, const std::string& source, std::size_t line) {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw ParseError(source, line, "unknown key '" + std::string(key) + "'");
  const std::string why = check_value(k->kind, value);
  if (!why.empty()) {
    throw ParseError(source, line, "key '" + std::string(key) + "': " + why + ", got '" + std::string(value) + "'");
  }
  values_.find(key)->second = std::string(value);
}

void Config::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ParseError("command line", 0, "expected key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::merge(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t no = 0;
  std::set<std::string, std::less<>> seen;
  while (io::read_line(in, line)) {
    ++no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, no, "expected 'key = value'");
    const std::string_view key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError(source, no, "empty key");
    if (!seen.insert(std::string(key)).second) {
      throw ParseError(source, no, "duplicate key '" + std::string(key) + "'");
    }
    set(key, trim(s.substr(eq + 1)), source, no);
  }
  if (in.bad()) throw ParseError(source, no, "read error");
}

void Config::merge_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ParseError(file.string(), 0, "cannot open config file");
  merge(in, file.string());
}

const std::string& Config::raw(std::string_view key, ValueKind kind) const {
  const ConfigKey* k = find_key(key);
  if (k == nullptr) throw LookupError("config: unknown key '" + std::string(key) + "'");
  if (k->kind != kind) throw LookupError("config: key '" + std::string(key) + "' read with the wrong type");
  return values_.find(key)->second;
}

const std::string& Config::string(std::string_view key) const { return raw(key, kString); }

std::size_t Config::count(std::string_view key) const {
  return static_cast<std::size_t>(*io::parse_int(raw(key, kCount)));
}

double Config::real(std::string_view key) const { return *io::parse_double(raw(key, kReal)); }

bool Config::flag(std::string_view key) const { return raw(key, kBool) == "true"; }

}  // namespace streetnav::harness
