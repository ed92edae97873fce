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
#include "streetnav/env/graph_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>

#include "streetnav/common/error.hpp"
#include "streetnav/common/text_io.hpp"

namespace streetnav::env {

namespace {

struct ParsedEdge {
  std::string source;
  double heading;
  std::string target;
  std::size_t line;
};

bool bad_id(std::string_view id) {
  return id.empty() || id.find_first_of("\t\n\r ") != std::string_view::npos;
}

}  // namespace

std::string format_heading(double heading) { return io::format_double(heading); }

PanoGraph load_graph(std::istream& nodes, std::istream& links, const std::string& nodes_name,
                     const std::string& links_name) {
  PanoGraph::Builder builder;
  std::set<std::string, std::less<>> known;
  std::string line;
  std::size_t lineno = 0;
  while (io::read_line(nodes, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (bad_id(line)) throw ParseError(nodes_name, lineno, "malformed panorama id");
    if (!known.insert(line).second) throw ParseError(nodes_name, lineno, "duplicate panorama id '" + line + "'");
    builder.add_node(line);
  }
  if (known.empty()) throw ParseError(nodes_name, 0, "no panoramas");

  std::vector<ParsedEdge> parsed;
  lineno = 0;
  while (io::read_line(links, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = io::split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(links_name, lineno, "expected 3 tab-separated fields, got " +
                                               std::to_string(fields.size()));
    }
    if (bad_id(fields[0]) || bad_id(fields[2])) throw ParseError(links_name, lineno, "malformed panorama id");
    auto heading = io::parse_double(fields[1]);
    if (!heading) throw ParseError(links_name, lineno, "malformed heading '" + std::string(fields[1]) + "'");
    if (!std::isfinite(*heading) || *heading < 0.0 || *heading >= 360.0) {
      throw ParseError(links_name, lineno, "heading out of [0,360)");
    }
    for (auto f : {fields[0], fields[2]}) {
      if (!known.contains(f)) throw ParseError(links_name, lineno, "unknown panorama '" + std::string(f) + "'");
    }
    parsed.push_back({std::string(fields[0]), *heading, std::string(fields[2]), lineno});
  }

  // Invariant checks with line-level diagnostics before handing to the builder.
  std::map<std::string, std::map<double, std::size_t>, std::less<>> headings;
  std::set<std::pair<std::string, std::string>> directed;
  for (const auto& e : parsed) {
    auto [it, inserted] = headings[e.source].emplace(e.heading, e.line);
    if (!inserted) {
      throw ParseError(links_name, e.line, "duplicate heading " + format_heading(e.heading) +
                                               " at panorama '" + e.source + "' (first on line " +
                                               std::to_string(it->second) + ")");
    }
    directed.emplace(e.source, e.target);
  }
  for (const auto& e : parsed) {
    if (!directed.contains({e.target, e.source})) {
      throw ParseError(links_name, e.line, "missing reverse edge " + e.target + " -> " + e.source);
    }
  }
  for (const auto& id : known) {
    if (!headings.contains(id)) throw ParseError(nodes_name, 0, "panorama '" + id + "' has no edges");
  }
  for (const auto& e : parsed) builder.add_half_edge(e.source, e.heading, e.target);
  return std::move(builder).build();
}

PanoGraph load_graph(const std::filesystem::path& nodes_file,
                     const std::filesystem::path& links_file) {
  std::ifstream nodes(nodes_file);
  if (!nodes) throw ParseError(nodes_file.string(), 0, "cannot open file");
  std::ifstream links(links_file);
  if (!links) throw ParseError(links_file.string(), 0, "cannot open file");
  return load_graph(nodes, links, nodes_file.string(), links_file.string());
}

void save_graph(const PanoGraph& graph, std::ostream& nodes, std::ostream& links) {
  for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) nodes << graph.id(NodeIndex{i}) << '\n';
  for (std::uint32_t i = 0; i < graph.num_nodes(); ++i) {
    for (const HalfEdge& e : graph.edges(NodeIndex{i})) {
      links << graph.id(NodeIndex{i}) << '\t' << format_heading(e.heading) << '\t'
            << graph.id(e.target) << '\n';
    }
  }
}

void save_graph(const PanoGraph& graph, const std::filesystem::path& nodes_file,
                const std::filesystem::path& links_file) {
  std::ofstream nodes(nodes_file, std::ios::binary);
  std::ofstream links(links_file, std::ios::binary);
  if (!nodes || !links) throw Error("cannot write graph files");
  save_graph(graph, nodes, links);
}

}  // namespace streetnav::env
