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
#include "streetnav/harness/report.hpp"

#include <istream>

#include "streetnav/common/error.hpp"

namespace streetnav::harness {

using nlohmann::json;

json to_json(const Report& r) {
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = r.command;
  j["seed"] = r.seed;
  j["config"] = r.config;
  j["metrics"] = r.metrics;
  j["summary"] = r.summary;
  j["history"] = r.history;
  j["records"] = r.records;
  j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j;
}

std::string render(const Report& report) { return to_json(report).dump(2) + "\n"; }

std::string render_reproducible(const Report& report) {
  json j = to_json(report);
  j.erase("wall_clock_seconds");
  return j.dump(2) + "\n";
}

Report parse_report(std::istream& in, const std::string& source) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(source, 0, std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw ParseError(source, 0, "report must be a JSON object");
    if (j.value("schema_version", -1) != kReportSchemaVersion) {
      throw ParseError(source, 0, "unsupported report schema_version");
    }
    Report r;
    r.command = j.at("command").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.config = j.at("config").get<std::map<std::string, std::string, std::less<>>>();
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
    r.summary = j.value("summary", json::object());
    r.history = j.value("history", json::array());
    r.records = j.at("records");
    if (!r.records.is_array()) throw ParseError(source, 0, "'records' must be an array");
    r.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    return r;
  } catch (const json::exception& e) {
    throw ParseError(source, 0, std::string("malformed report: ") + e.what());
  }
}

json execution_to_json(const env::Execution& e, const env::PanoGraph& graph) {
  json steps = json::array();
  for (const auto& s : e.steps) {
    steps.push_back({{"pano", graph.id(s.state.pano)}, {"heading", s.state.heading},
                     {"action", std::string(env::to_string(s.action))}});
  }
  return steps;
}

env::Execution execution_from_json(const json& j, const env::PanoGraph& graph, const std::string& source) {
  env::Execution e;
  try {
    if (!j.is_array()) throw ParseError(source, 0, "execution must be an array of steps");
    for (const auto& s : j) {
      const auto pano = graph.find(s.at("pano").get<std::string>());
      if (!pano) throw ParseError(source, 0, "unknown panorama '" + s.at("pano").get<std::string>() + "'");
      e.steps.push_back({{*pano, s.at("heading").get<double>()}, env::parse_action(s.at("action").get<std::string>())});
    }
    env::validate_execution(graph, e);
  } catch (const json::exception& ex) {
    throw ParseError(source, 0, std::string("malformed execution: ") + ex.what());
  } catch (const PreconditionError& ex) {
    throw ParseError(source, 0, std::string("invalid execution: ") + ex.what());
  }
  return e;
}

json sdr_record_to_json(const metrics::SdrEvalRecord& r, const std::string& pano) {
  return {{"sentence_id", r.sentence_id},
          {"pano", pano},
          {"predicted", {r.predicted.x, r.predicted.y}},
          {"gold", {r.gold.x, r.gold.y}}};
}

metrics::SdrEvalRecord sdr_record_from_json(const json& j, const std::string& source) {
  try {
    const auto p = j.at("predicted").get<std::array<double, 2>>();
    const auto g = j.at("gold").get<std::array<double, 2>>();
    return {{p[0], p[1]}, {g[0], g[1]}, j.at("sentence_id").get<std::string>()};
  } catch (const json::exception& ex) {
    throw ParseError(source, 0, std::string("malformed SDR record: ") + ex.what());
  }
}

}  // namespace streetnav::harness
