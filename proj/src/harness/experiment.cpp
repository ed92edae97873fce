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
#include "streetnav/harness/experiment.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"
#include "streetnav/harness/dataset.hpp"
#include "streetnav/harness/gradcheck_suite.hpp"
#include "streetnav/nav/pipeline.hpp"
#include "streetnav/route/world_io.hpp"

namespace streetnav::harness {

using nlohmann::json;

namespace {

constexpr std::string_view kCommands[] = {"gen-world", "train-sdr", "eval-sdr", "train-nav",
                                          "eval-nav",  "full-task", "metrics",  "gradcheck"};

bool is_sdr_baseline(const std::string& name) { return name == "random" || name == "center" || name == "average"; }
bool is_nav_baseline(const std::string& name) { return name == "stop" || name == "random" || name == "frequent"; }

std::size_t workers(const Config& c) { return c.flag("deterministic") ? 1 : std::max<std::size_t>(1, c.count("workers")); }

Dataset open_dataset(const Config& c) { return load_dataset(data_root(c.string("data")), c.count("feature_cache")); }

void add_sdr_metrics(Report& r, std::span<const metrics::SdrEvalRecord> records, double scale) {
  const auto s = metrics::summarize_sdr(records, scale);
  r.metrics["sdr.accuracy_40"] = s.accuracy_40;
  r.metrics["sdr.accuracy_80"] = s.accuracy_80;
  r.metrics["sdr.accuracy_120"] = s.accuracy_120;
  r.metrics["sdr.consistency_40"] = s.consistency_40;
  r.metrics["sdr.consistency_80"] = s.consistency_80;
  r.metrics["sdr.consistency_120"] = s.consistency_120;
  r.metrics["sdr.mean_distance"] = s.mean_distance;
}

void add_nav_metrics(Report& r, std::span<const metrics::NavEvalRecord> records, const env::PanoGraph& g) {
  const auto s = metrics::summarize_nav(records, g);
  r.metrics["nav.tc"] = s.tc;
  r.metrics["nav.spd"] = s.spd;
  r.metrics["nav.sed"] = s.sed;
}

void add_sdr_records(Report& r, std::span<const metrics::SdrEvalRecord> records,
                     std::span<const sdr::SdrExample> examples) {
  for (std::size_t i = 0; i < records.size(); ++i) r.records.push_back(sdr_record_to_json(records[i], examples[i].pano));
}

void add_nav_records(Report& r, std::span<const metrics::NavEvalRecord> records,
                     std::span<const route::NavExample> examples, const env::PanoGraph& g) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    r.records.push_back({{"id", examples[i].id},
                         {"goal", g.id(records[i].goal)},
                         {"predicted", execution_to_json(records[i].predicted, g)},
                         {"reference", execution_to_json(records[i].reference, g)}});
  }
}

template <typename T>
void require_nonempty(const std::vector<T>& v, const std::string& what) {
  if (v.empty()) throw PreconditionError("dataset has no " + what);
}

tensor::ParamStore load_checkpoint(const Config& c, std::string_view key) {
  const std::string& path = c.string(key);
  if (path.empty()) throw PreconditionError("'" + std::string(key) + "' must name a checkpoint for this model");
  return tensor::ParamStore::load(path);
}

// Guards against evaluating a checkpoint with a different architecture.
void check_compatible(const tensor::ParamStore& loaded, const tensor::ParamStore& fresh, std::string_view key) {
  if (loaded.names() != fresh.names()) {
    throw PreconditionError("checkpoint '" + std::string(key) + "' does not match the configured model");
  }
  for (const auto& n : fresh.names()) {
    if (loaded.shape(n) != fresh.shape(n)) {
      throw PreconditionError("checkpoint '" + std::string(key) + "': parameter '" + n + "' has the wrong shape");
    }
  }
}

Report gen_world(const Config& c) {
  route::WorldConfig wc = world_config(c);
  const route::World w = route::generate_world(wc);
  const auto dir = data_root(c.string("data"));
  route::save_world(w, dir);
  Report r;
  r.summary = {{"directory", dir.string()},
               {"panoramas", w.graph.num_nodes()},
               {"edges", w.graph.num_edges()},
               {"nav_examples", w.nav.size()},
               {"sdr_examples", w.sdr.size()},
               {"vocab_size", w.vocab.size()}};
  return r;
}

struct SdrSetup {
  sdr::SdrModel model;
  tensor::ParamStore params;
};

SdrSetup fresh_sdr(const Config& c, const Dataset& d, Rng& rng) {
  sdr::ModelConfig mc = sdr_model_config(c, d.vocab.size());
  if (d.channels != mc.channels) {
    throw PreconditionError("sdr.channels is " + std::to_string(mc.channels) + " but the features have " +
                            std::to_string(d.channels));
  }
  SdrSetup s{sdr::SdrModel(mc), {}};
  s.model.init(s.params, rng);
  return s;
}

Report train_sdr(const Config& c, std::ostream* log) {
  if (is_sdr_baseline(c.string("sdr.model"))) throw PreconditionError("SDR baselines are not trained; use eval-sdr");
  const Dataset d = open_dataset(c);
  Rng rng(c.count("seed"));
  SdrSetup s = fresh_sdr(c, d, rng);
  const auto train = d.sdr_split("train"), dev = d.sdr_split("dev");
  require_nonempty(train, "SDR training examples");
  Report r;
  const auto result = sdr::train_sdr(s.model, s.params, train, dev, d.features->lookup(), d.meta.grid,
                                     sdr_train_config(c), rng, [&](const sdr::EpochStats& e) {
                                       r.history.push_back({{"epoch", e.epoch},
                                                            {"train_loss", e.train_loss},
                                                            {"dev_accuracy", e.dev_accuracy},
                                                            {"improved", e.improved}});
                                       if (log) {
                                         *log << "epoch " << e.epoch << " loss " << e.train_loss << " dev acc "
                                              << e.dev_accuracy << (e.improved ? " *" : "") << "\n";
                                       }
                                     });
  if (!c.string("sdr.checkpoint").empty()) result.best.save(c.string("sdr.checkpoint"));
  const auto eval = d.sdr_split(c.string("split"));
  require_nonempty(eval, "SDR examples in split '" + c.string("split") + "'");
  const auto records = sdr::evaluate_sdr(s.model, result.best, eval, d.features->lookup(), d.meta.grid);
  add_sdr_metrics(r, records, d.meta.grid.scale);
  add_sdr_records(r, records, eval);
  r.summary = {{"best_epoch", result.best_epoch}, {"epochs", result.history.size()}, {"train_examples", train.size()}};
  return r;
}

Report eval_sdr(const Config& c) {
  const Dataset d = open_dataset(c);
  Rng rng(c.count("seed"));
  const auto eval = d.sdr_split(c.string("split"));
  require_nonempty(eval, "SDR examples in split '" + c.string("split") + "'");
  std::vector<metrics::SdrEvalRecord> records;
  const std::string& name = c.string("sdr.model");
  if (is_sdr_baseline(name)) {
    records = sdr::evaluate_baseline(sdr::parse_baseline(name), d.sdr_split("train"), eval, d.meta.grid, rng);
  } else {
    SdrSetup s = fresh_sdr(c, d, rng);
    const auto params = load_checkpoint(c, "sdr.checkpoint");
    check_compatible(params, s.params, "sdr.checkpoint");
    records = sdr::evaluate_sdr(s.model, params, eval, d.features->lookup(), d.meta.grid);
  }
  Report r;
  add_sdr_metrics(r, records, d.meta.grid.scale);
  add_sdr_records(r, records, eval);
  r.summary = {{"examples", eval.size()}};
  return r;
}

std::size_t feature_height(const Dataset& d) { return d.meta.grid.height; }

nav::DecodeMode decode_mode(const Config& c) {
  const std::string& m = c.string("nav.decode");
  if (m == "greedy") return nav::DecodeMode::kGreedy;
  if (m == "sample") return nav::DecodeMode::kSample;
  throw PreconditionError("nav.decode must be greedy or sample, got '" + m + "'");
}

// Navigation policy named by nav.model; learned models load nav.checkpoint.
struct NavPolicy {
  std::unique_ptr<nav::NavModel> model;
  std::unique_ptr<nav::Policy> policy;
};

NavPolicy make_nav_policy(const Config& c, const Dataset& d, Rng& rng) {
  NavPolicy p;
  const std::string& name = c.string("nav.model");
  if (is_nav_baseline(name)) {
    p.policy = nav::make_baseline(nav::parse_baseline(name));
    return p;
  }
  p.model = std::make_unique<nav::NavModel>(nav_model_config(c, d.vocab.size(), feature_height(d)));
  tensor::ParamStore fresh;
  p.model->init(fresh, rng);
  const auto params = load_checkpoint(c, "nav.checkpoint");
  check_compatible(params, fresh, "nav.checkpoint");
  p.policy = std::make_unique<nav::LearnedPolicy>(*p.model, params, c.count("nav.crop_width"));
  return p;
}

Report train_nav(const Config& c, std::ostream* log) {
  if (is_nav_baseline(c.string("nav.model"))) {
    throw PreconditionError("navigation baselines are not trained; use eval-nav");
  }
  const Dataset d = open_dataset(c);
  Rng rng(c.count("seed"));
  const nav::NavModel model(nav_model_config(c, d.vocab.size(), feature_height(d)));
  tensor::ParamStore params;
  model.init(params, rng);
  const auto train = d.nav_split("train"), dev = d.nav_split("dev");
  require_nonempty(train, "navigation training examples");
  require_nonempty(dev, "navigation development examples");
  const auto features = d.features->lookup();
  Report r;
  const auto result = nav::train_nav(model, params, train, dev, d.graph, features, nav_train_config(c), rng,
                                     [&](const nav::EpochStats& e) {
                                       r.history.push_back({{"epoch", e.epoch},
                                                            {"train_nll", e.train_nll},
                                                            {"dev_spd", e.dev_spd},
                                                            {"dev_tc", e.dev_tc},
                                                            {"improved", e.improved}});
                                       if (log) {
                                         *log << "epoch " << e.epoch << " nll " << e.train_nll << " dev spd "
                                              << e.dev_spd << " tc " << e.dev_tc << (e.improved ? " *" : "")
                                              << "\n";
                                       }
                                     });
  if (!c.string("nav.checkpoint").empty()) result.best.save(c.string("nav.checkpoint"));
  const auto eval = d.nav_split(c.string("split"));
  require_nonempty(eval, "navigation examples in split '" + c.string("split") + "'");
  nav::LearnedPolicy policy(model, result.best, c.count("nav.crop_width"));
  const auto records = nav::evaluate_nav(policy, d.graph, features, eval, c.count("nav.horizon"), decode_mode(c), rng);
  add_nav_metrics(r, records, d.graph);
  add_nav_records(r, records, eval, d.graph);
  r.summary = {{"best_epoch", result.best_epoch}, {"epochs", result.history.size()}, {"train_examples", train.size()},
               {"workers", nav_train_config(c).workers}};
  return r;
}

Report eval_nav(const Config& c) {
  const Dataset d = open_dataset(c);
  Rng rng(c.count("seed"));
  const auto eval = d.nav_split(c.string("split"));
  require_nonempty(eval, "navigation examples in split '" + c.string("split") + "'");
  NavPolicy p = make_nav_policy(c, d, rng);
  const auto records =
      nav::evaluate_nav(*p.policy, d.graph, d.features->lookup(), eval, c.count("nav.horizon"), decode_mode(c), rng);
  Report r;
  add_nav_metrics(r, records, d.graph);
  add_nav_records(r, records, eval, d.graph);
  r.summary = {{"examples", eval.size()}};
  return r;
}

Report full_task(const Config& c) {
  const Dataset d = open_dataset(c);
  Rng rng(c.count("seed"));
  NavPolicy p = make_nav_policy(c, d, rng);
  if (is_sdr_baseline(c.string("sdr.model"))) throw PreconditionError("the full task needs a learned SDR model");
  SdrSetup s = fresh_sdr(c, d, rng);
  const auto sdr_params = load_checkpoint(c, "sdr.checkpoint");
  check_compatible(sdr_params, s.params, "sdr.checkpoint");

  const std::string& split = c.string("split");
  const auto features = d.features->lookup();
  std::vector<nav::FullTaskRecord> records;
  std::vector<metrics::NavEvalRecord> nav_records;
  Report r;
  for (const auto& target : d.sdr) {
    if (target.split != split || !target.nav_id) continue;
    const auto ex = std::find_if(d.nav.begin(), d.nav.end(), [&](const auto& e) { return e.id == *target.nav_id; });
    if (ex == d.nav.end()) {
      throw PreconditionError("SDR example '" + target.sentence_id + "' links to unknown navigation example '" +
                              *target.nav_id + "'");
    }
    const nav::Episode episode{d.graph, features, *ex};
    auto rec = nav::full_task(*p.policy, episode, s.model, sdr_params, target, d.meta.grid, c.count("nav.horizon"), rng);
    nav_records.push_back({rec.execution, route::demonstration_from_route(d.graph, ex->route, ex->start_heading), ex->goal});
    json j = {{"id", ex->id},
              {"sentence_id", target.sentence_id},
              {"goal", d.graph.id(ex->goal)},
              {"final", d.graph.id(rec.execution.final_pano())},
              {"gold", {rec.gold.x, rec.gold.y}},
              {"success", rec.success}};
    j["predicted"] = rec.predicted ? json{rec.predicted->x, rec.predicted->y} : json(nullptr);
    r.records.push_back(std::move(j));
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw PreconditionError("no linked navigation/SDR examples in split '" + split + "'");
  r.metrics["full.accuracy_80"] = nav::full_task_accuracy(records);
  add_nav_metrics(r, nav_records, d.graph);
  r.summary = {{"examples", records.size()}};
  return r;
}

Report rescore(const Config& c) {
  const std::string& input = c.string("input");
  if (input.empty()) throw PreconditionError("'input' must name a report to rescore");
  std::ifstream in(input);
  if (!in) throw ParseError(input, 0, "cannot open report");
  const Report source = parse_report(in, input);
  const Dataset d = open_dataset(c);
  Report r;
  if (source.command == "eval-nav" || source.command == "train-nav") {
    std::vector<metrics::NavEvalRecord> records;
    for (const auto& j : source.records) {
      if (!j.is_object() || !j.contains("goal") || !j["goal"].is_string()) {
        throw ParseError(input, 0, "navigation record without a goal");
      }
      const auto goal = d.graph.find(j["goal"].get<std::string>());
      if (!goal) throw ParseError(input, 0, "unknown goal panorama");
      records.push_back({execution_from_json(j.value("predicted", json()), d.graph, input),
                         execution_from_json(j.value("reference", json()), d.graph, input), *goal});
    }
    if (records.empty()) throw ParseError(input, 0, "report has no records");
    add_nav_metrics(r, records, d.graph);
  } else if (source.command == "eval-sdr" || source.command == "train-sdr") {
    std::vector<metrics::SdrEvalRecord> records;
    for (const auto& j : source.records) records.push_back(sdr_record_from_json(j, input));
    if (records.empty()) throw ParseError(input, 0, "report has no records");
    add_sdr_metrics(r, records, d.meta.grid.scale);
  } else {
    throw ParseError(input, 0, "cannot rescore a '" + source.command + "' report");
  }
  r.summary = {{"source_command", source.command}, {"records", source.records.size()}};
  return r;
}

Report gradcheck(const Config& c) {
  Report r;
  bool all = true;
  for (const auto& e : run_gradcheck_suite(c.count("seed"))) {
    r.metrics["max_error." + e.name] = e.report.max_error;
    r.records.push_back({{"name", e.name},
                         {"max_error", e.report.max_error},
                         {"checked", e.report.checked},
                         {"worst_input", e.report.worst_input},
                         {"worst_index", e.report.worst_index},
                         {"worst_analytic", e.report.worst_analytic},
                         {"worst_numeric", e.report.worst_numeric},
                         {"draws", e.draws},
                         {"passed", e.passed()}});
    if (e.kink_margin) r.records.back()["kink_margin"] = *e.kink_margin;
    all = all && e.passed();
  }
  r.summary = {{"tolerance", kGradCheckTolerance}, {"passed", all}};
  return r;
}

}  // namespace

std::span<const std::string_view> commands() { return kCommands; }

route::WorldConfig world_config(const Config& c) {
  route::WorldConfig w;
  w.seed = c.count("seed");
  w.grid_rows = c.count("world.grid_rows");
  w.grid_cols = c.count("world.grid_cols");
  w.shortcut_prob = c.real("world.shortcut_prob");
  w.heading_jitter = c.real("world.heading_jitter");
  w.feature_height = c.count("world.feature_height");
  w.feature_width = c.count("world.feature_width");
  w.marker_classes = c.count("world.marker_classes");
  w.noise_channels = c.count("world.noise_channels");
  w.marker_gap = c.count("world.marker_gap");
  w.image_scale = c.real("world.image_scale");
  w.vocab_size = c.count("world.vocab_size");
  w.sdr_train = c.count("world.sdr_train");
  w.sdr_dev = c.count("world.sdr_dev");
  w.max_maps_per_sentence = c.count("world.max_maps_per_sentence");
  w.nav_train = c.count("world.nav_train");
  w.nav_dev = c.count("world.nav_dev");
  w.nav_test = c.count("world.nav_test");
  w.route_min = c.count("world.route_min");
  w.route_max = c.count("world.route_max");
  return w;
}

sdr::ModelConfig sdr_model_config(const Config& c, std::size_t vocab_size) {
  sdr::ModelConfig m;
  m.kind = sdr::parse_model_kind(c.string("sdr.model"));
  m.channels = c.count("sdr.channels");
  m.levels = c.count("sdr.levels");
  m.mlp_hidden = c.count("sdr.mlp_hidden");
  m.text = {vocab_size, c.count("sdr.embedding_dim"), c.count("sdr.text_hidden")};
  m.init_scale = c.real("sdr.init_scale");
  return m;
}

sdr::TrainConfig sdr_train_config(const Config& c) {
  sdr::TrainConfig t;
  t.lr = c.real("sdr.lr");
  t.max_epochs = c.count("sdr.epochs");
  t.patience = c.count("sdr.patience");
  t.sigma = c.real("sdr.sigma");
  t.embedding_dropout = c.real("sdr.dropout");
  t.early_stop_radius = c.real("sdr.early_stop_radius");
  return t;
}

nav::ModelConfig nav_model_config(const Config& c, std::size_t vocab_size, std::size_t feature_height) {
  nav::ModelConfig m;
  m.kind = nav::parse_model_kind(c.string("nav.model"));
  m.ablation = nav::parse_ablation(c.string("nav.ablation"));
  m.obs_height = feature_height;
  m.obs_width = c.count("nav.crop_width");
  m.convs = parse_convs(c.string("nav.convs"));
  m.image_dim = c.count("nav.image_dim");
  m.ga_hidden = c.count("nav.ga_hidden");
  m.text = {vocab_size, c.count("nav.embedding_dim"), c.count("nav.text_hidden")};
  m.action_dim = c.count("nav.action_dim");
  m.time_dim = c.count("nav.time_dim");
  m.lstm_hidden = c.count("nav.lstm_hidden");
  m.horizon = c.count("nav.train_horizon");
  m.init_scale = c.real("nav.init_scale");
  return m;
}

nav::TrainConfig nav_train_config(const Config& c) {
  nav::TrainConfig t;
  t.lr = c.real("nav.lr");
  t.max_epochs = c.count("nav.epochs");
  t.patience = c.count("nav.patience");
  t.horizon_test = c.count("nav.horizon");
  t.crop_width = c.count("nav.crop_width");
  t.workers = workers(c);
  return t;
}

std::vector<nav::ConvLayer> parse_convs(std::string_view spec) {
  std::vector<nav::ConvLayer> out;
  if (spec.empty()) return out;
  for (std::string_view layer : io::split(spec, ',')) {
    const auto x = layer.find('x'), slash = layer.find('/');
    const auto bad = [&] {
      return PreconditionError("nav.convs: expected CxK/S, got '" + std::string(layer) + "'");
    };
    if (x == std::string_view::npos || slash == std::string_view::npos || slash < x) throw bad();
    const auto ch = io::parse_int(layer.substr(0, x));
    const auto k = io::parse_int(layer.substr(x + 1, slash - x - 1));
    const auto s = io::parse_int(layer.substr(slash + 1));
    if (!ch || !k || !s || *ch <= 0 || *k <= 0 || *s <= 0) throw bad();
    out.push_back({static_cast<std::size_t>(*ch), static_cast<std::size_t>(*k), static_cast<std::size_t>(*s)});
  }
  return out;
}

Report run_experiment(std::string_view command, const Config& config, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  Report r;
  if (command == "gen-world") {
    r = gen_world(config);
  } else if (command == "train-sdr") {
    r = train_sdr(config, log);
  } else if (command == "eval-sdr") {
    r = eval_sdr(config);
  } else if (command == "train-nav") {
    r = train_nav(config, log);
  } else if (command == "eval-nav") {
    r = eval_nav(config);
  } else if (command == "full-task") {
    r = full_task(config);
  } else if (command == "metrics") {
    r = rescore(config);
  } else if (command == "gradcheck") {
    r = gradcheck(config);
  } else {
    throw PreconditionError("unknown command '" + std::string(command) + "'");
  }
  r.command = std::string(command);
  r.seed = config.count("seed");
  r.config = config.values();
  r.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace streetnav::harness
