// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "dfn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dfn/error.hpp"

namespace dfn {

std::int64_t ScheduleConfig::batch_ramp_iters() const {
  const int epochs = batch_ramp_epochs > 0 ? batch_ramp_epochs : 2 * warmup_epochs;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(epochs) * iters_per_epoch);
}

std::vector<int> ScheduleConfig::BatchStages() const {
  std::vector<int> stages;
  for (int b = batch_start; b < batch_end; b *= 2) stages.push_back(b);
  stages.push_back(batch_end);
  return stages;
}

void ScheduleConfig::Validate() const {
  if (iters_per_epoch < 1) throw ConfigError("schedule: iters_per_epoch must be >= 1");
  if (total_epochs < 1) throw ConfigError("schedule: total_epochs must be >= 1");
  if (warmup_epochs < 0 || warmup_epochs >= total_epochs)
    throw ConfigError("schedule: warmup_epochs must be in [0, total_epochs)");
  if (batch_start < 1 || batch_start > batch_end)
    throw ConfigError("schedule: need 1 <= batch_start <= batch_end");
  if (batch_ramp_epochs < 0) throw ConfigError("schedule: batch_ramp_epochs must be >= 0");
  if (lr_peak < 0 || lr_final < 0 || wd_initial < 0 || wd_final < 0)
    throw ConfigError("schedule: rates must be non-negative");
  if (lr_final > lr_peak) throw ConfigError("schedule: lr_final must be <= lr_peak");
  if (wd_final < wd_initial) throw ConfigError("schedule: wd_final must be >= wd_initial");
}

void ScheduleConfig::Apply(const KeyValues& kv) {
  warmup_epochs = static_cast<int>(kv.GetInt("warmup_epochs", warmup_epochs));
  total_epochs = static_cast<int>(kv.GetInt("total_epochs", total_epochs));
  iters_per_epoch = static_cast<int>(kv.GetInt("iters_per_epoch", iters_per_epoch));
  lr_peak = kv.GetDouble("lr_peak", lr_peak);
  lr_final = kv.GetDouble("lr_final", lr_final);
  wd_initial = kv.GetDouble("wd_initial", wd_initial);
  wd_final = kv.GetDouble("wd_final", wd_final);
  batch_start = static_cast<int>(kv.GetInt("batch_start", batch_start));
  batch_end = static_cast<int>(kv.GetInt("batch_end", batch_end));
  batch_ramp_epochs = static_cast<int>(kv.GetInt("batch_ramp_epochs", batch_ramp_epochs));
}

SchedulePoint ScheduleAt(std::int64_t iter, const ScheduleConfig& cfg) {
  cfg.Validate();
  if (iter < 0) throw ConfigError("schedule: iteration must be >= 0");
  const std::int64_t last = cfg.total_iters() - 1;
  const std::int64_t i = std::min(iter, last);
  const std::int64_t warm = cfg.warmup_iters();
  SchedulePoint p;
  p.iter = iter;

  if (i < warm) {
    p.lr = cfg.lr_peak * static_cast<double>(i) / static_cast<double>(warm);
  } else if (last <= warm) {
    p.lr = cfg.lr_final;
  } else {
    const double t = static_cast<double>(i - warm) / static_cast<double>(last - warm);
    p.lr = cfg.lr_final +
           0.5 * (cfg.lr_peak - cfg.lr_final) * (1.0 + std::cos(std::numbers::pi * t));
  }
  if (i == last) p.lr = cfg.lr_final;

  const double u = last > 0 ? static_cast<double>(i) / static_cast<double>(last) : 1.0;
  p.wd = i == last ? cfg.wd_final
                   : cfg.wd_initial + 0.5 * (cfg.wd_final - cfg.wd_initial) *
                                          (1.0 - std::cos(std::numbers::pi * u));

  const auto stages = cfg.BatchStages();
  const auto n_steps = static_cast<std::int64_t>(stages.size()) - 1;
  const std::int64_t stage =
      std::min<std::int64_t>(n_steps, i * n_steps / cfg.batch_ramp_iters());
  p.batch_size = stages[static_cast<std::size_t>(stage)];
  return p;
}

std::string ScheduleCsv(const ScheduleConfig& cfg, std::int64_t stride) {
  cfg.Validate();
  if (stride < 1) throw ConfigError("schedule: stride must be >= 1");
  std::string out = "iter,epoch,lr,wd,batch\n";
  const std::int64_t last = cfg.total_iters() - 1;
  auto row = [&](std::int64_t i) {
    const auto p = ScheduleAt(i, cfg);
    out += std::to_string(i) + ',' + std::to_string(i / cfg.iters_per_epoch) + ',' +
           FormatNumber(p.lr) + ',' + FormatNumber(p.wd) + ',' +
           std::to_string(p.batch_size) + '\n';
  };
  for (std::int64_t i = 0; i <= last; i += stride) row(i);
  if (last % stride != 0) row(last);
  return out;
}

}  // namespace dfn
