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
#include <string>

#include "streetnav/env/graph.hpp"

namespace streetnav::env {

// Nodes file: one panorama id per line.
// Links file: one half-edge per line, "source<TAB>heading<TAB>target", heading
// a decimal in [0, 360). Violations throw ParseError naming source and line;
// nothing is repaired.
PanoGraph load_graph(std::istream& nodes, std::istream& links,
                     const std::string& nodes_name = "nodes",
                     const std::string& links_name = "links");
PanoGraph load_graph(const std::filesystem::path& nodes_file,
                     const std::filesystem::path& links_file);

// Writes headings in shortest round-trip decimal form, so save -> load -> save
// is byte-identical.
void save_graph(const PanoGraph& graph, std::ostream& nodes, std::ostream& links);
void save_graph(const PanoGraph& graph, const std::filesystem::path& nodes_file,
                const std::filesystem::path& links_file);

std::string format_heading(double heading);

}  // namespace streetnav::env
