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

#include <iosfwd>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "streetnav/env/graph.hpp"
#include "streetnav/harness/config.hpp"
#include "streetnav/metrics/metrics.hpp"

namespace streetnav::harness {

inline constexpr int kReportSchemaVersion = 1;

// Result of one command. Every entry of `metrics` comes from the metrics
// module (or the gradient checker for `gradcheck`); `summary` holds
// descriptive counts.
struct Report {
  std::string command;
  std::uint64_t seed = 0;
  std::map<std::string, std::string, std::less<>> config;
  std::map<std::string, double> metrics;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json history = nlohmann::json::array();  // per training epoch
  nlohmann::json records = nlohmann::json::array();  // per example
  double wall_clock_seconds = 0.0;
};

nlohmann::json to_json(const Report& report);
// Pretty-printed JSON with a trailing newline. Keys are sorted, numbers use
// the shortest round-trip form, so equal reports give equal bytes.
std::string render(const Report& report);
// Same document without the wall-clock field.
std::string render_reproducible(const Report& report);

Report parse_report(std::istream& in, const std::string& source);

nlohmann::json execution_to_json(const env::Execution& e, const env::PanoGraph& graph);
// Throws ParseError(source) when the steps are malformed or not a valid
// execution in `graph`.
env::Execution execution_from_json(const nlohmann::json& j, const env::PanoGraph& graph, const std::string& source);

nlohmann::json sdr_record_to_json(const metrics::SdrEvalRecord& r, const std::string& pano);
metrics::SdrEvalRecord sdr_record_from_json(const nlohmann::json& j, const std::string& source);

}  // namespace streetnav::harness
