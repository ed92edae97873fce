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
#include "streetnav/nav/pipeline.hpp"

#include "streetnav/common/error.hpp"

namespace streetnav::nav {

FullTaskRecord full_task(Policy& policy, const Episode& episode, const sdr::SdrModel& sdr_model,
                         const tensor::ParamStore& sdr_params, const sdr::SdrExample& target, const sdr::GridSpec& grid,
                         std::size_t horizon, Rng& rng, double radius) {
  FullTaskRecord rec;
  rec.execution = rollout(policy, episode, horizon, DecodeMode::kGreedy, rng);
  rec.gold = target.target;
  if (episode.graph.id(rec.execution.final_pano()) != target.pano) return rec;
  const sdr::SdrExample one[] = {target};
  const auto sdr_records = sdr::evaluate_sdr(sdr_model, sdr_params, one, episode.features, grid);
  rec.predicted = sdr_records.front().predicted;
  const auto at_grid = metrics::to_grid(sdr_records, grid.scale);
  rec.success = metrics::sdr_correct(at_grid.front(), metrics::grid_radius(radius, grid.scale));
  return rec;
}

double full_task_accuracy(std::span<const FullTaskRecord> records) {
  if (records.empty()) throw PreconditionError("full_task_accuracy: no records");
  std::size_t ok = 0;
  for (const auto& r : records) ok += r.success ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(records.size());
}

}  // namespace streetnav::nav
