// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Training schedules as pure functions of the global iteration.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dfn/key_values.hpp"

namespace dfn {

struct ScheduleConfig {
  int warmup_epochs = 3;
  int total_epochs = 100;
  int iters_per_epoch = 1000;
  double lr_peak = 5e-4;
  double lr_final = 1e-6;
  double wd_initial = 0.05;
  double wd_final = 0.1;
  int batch_start = 8;
  int batch_end = 96;
  // Epochs over which the batch size ramps; 0 means twice the warmup.
  int batch_ramp_epochs = 0;

  std::int64_t total_iters() const {
    return static_cast<std::int64_t>(total_epochs) * iters_per_epoch;
  }
  std::int64_t warmup_iters() const {
    return static_cast<std::int64_t>(warmup_epochs) * iters_per_epoch;
  }
  std::int64_t batch_ramp_iters() const;

  // Batch sizes doubling from batch_start, the last stage capped at batch_end.
  std::vector<int> BatchStages() const;

  void Validate() const;
  void Apply(const KeyValues& kv);
};

struct SchedulePoint {
  std::int64_t iter = 0;
  double lr = 0.0;
  double wd = 0.0;
  int batch_size = 0;

  bool operator==(const SchedulePoint&) const = default;
};

// lr: linear 0 -> lr_peak over the warmup, then half-cosine to lr_final at the
// last iteration. wd: increasing half-cosine over the whole run. Iterations
// past the end clamp to the final values.
SchedulePoint ScheduleAt(std::int64_t iter, const ScheduleConfig& cfg);

// "iter,epoch,lr,wd,batch" rows, one per `stride` iterations plus the last.
std::string ScheduleCsv(const ScheduleConfig& cfg, std::int64_t stride = 1);

}  // namespace dfn
