#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "advtrain/error.hpp"

namespace advtrain {

// Tagged learning-rate schedule. All variants are pure functions of the epoch.
struct ScheduleSpec {
  enum class Kind { Constant, Step, Multistep, Ssfd };

  Kind kind = Kind::Constant;

  // constant / step / multistep
  double base_lr = 0.1;
  // step: plateau length i and scale gamma; multistep reuses gamma
  int plateau = 1;
  double gamma = 1.0;
  std::vector<int> milestones;

  // slow start, fast decay: geometric ramp from start_fraction*peak_lr up to
  // peak_lr over warmup_epochs, then geometric decay by `decay` per epoch.
  double peak_lr = 1e-3;
  int warmup_epochs = 3;
  double start_fraction = 0.04;
  double decay = 0.3;
  int total_epochs = 10;

  static ScheduleSpec constant(double lr) {
    ScheduleSpec s;
    s.kind = Kind::Constant;
    s.base_lr = lr;
    return s;
  }

  static ScheduleSpec step(double lr, int plateau, double gamma) {
    ScheduleSpec s;
    s.kind = Kind::Step;
    s.base_lr = lr;
    s.plateau = plateau;
    s.gamma = gamma;
    return s;
  }

  static ScheduleSpec multistep(double lr, std::vector<int> milestones,
                                double gamma) {
    ScheduleSpec s;
    s.kind = Kind::Multistep;
    s.base_lr = lr;
    s.milestones = std::move(milestones);
    s.gamma = gamma;
    return s;
  }

  static ScheduleSpec ssfd(double peak_lr, int warmup_epochs,
                           double start_fraction, double decay,
                           int total_epochs) {
    ScheduleSpec s;
    s.kind = Kind::Ssfd;
    s.peak_lr = peak_lr;
    s.warmup_epochs = warmup_epochs;
    s.start_fraction = start_fraction;
    s.decay = decay;
    s.total_epochs = total_epochs;
    return s;
  }

  // Defaults paired with the Adam fine-tuner over a 10-epoch horizon.
  static ScheduleSpec ssfd_default() { return ssfd(1e-3, 3, 0.04, 0.3, 10); }

  void validate() const {
    switch (kind) {
      case Kind::Constant:
        if (base_lr <= 0) throw ConfigError("schedule: base_lr must be > 0");
        break;
      case Kind::Step:
        if (base_lr <= 0) throw ConfigError("schedule: base_lr must be > 0");
        if (plateau < 1) throw ConfigError("schedule: plateau must be >= 1");
        if (gamma <= 0 || gamma > 1)
          throw ConfigError("schedule: gamma must be in (0, 1]");
        break;
      case Kind::Multistep:
        if (base_lr <= 0) throw ConfigError("schedule: base_lr must be > 0");
        if (gamma <= 0 || gamma > 1)
          throw ConfigError("schedule: gamma must be in (0, 1]");
        if (!std::is_sorted(milestones.begin(), milestones.end()))
          throw ConfigError("schedule: milestones must be sorted");
        break;
      case Kind::Ssfd:
        if (peak_lr <= 0) throw ConfigError("schedule: peak_lr must be > 0");
        if (start_fraction <= 0 || start_fraction >= 1)
          throw ConfigError("schedule: start_fraction must be in (0, 1)");
        if (decay <= 0 || decay >= 1)
          throw ConfigError("schedule: decay must be in (0, 1)");
        if (warmup_epochs < 1 || warmup_epochs >= total_epochs)
          throw ConfigError("schedule: need 1 <= warmup_epochs < total_epochs");
        break;
    }
  }
};

// Epoch horizon of the schedule, when it has one (ssfd only).
inline std::optional<int> schedule_horizon(const ScheduleSpec& spec) {
  if (spec.kind == ScheduleSpec::Kind::Ssfd) return spec.total_epochs;
  return std::nullopt;
}

inline double lr_at(const ScheduleSpec& spec, int epoch) {
  if (epoch < 0)
    throw ContractError("lr_at: epoch must be nonnegative, got " +
                        std::to_string(epoch));
  switch (spec.kind) {
    case ScheduleSpec::Kind::Constant:
      return spec.base_lr;
    case ScheduleSpec::Kind::Step:
      return spec.base_lr * std::pow(spec.gamma, epoch / spec.plateau);
    case ScheduleSpec::Kind::Multistep: {
      int drops = 0;
      for (int m : spec.milestones)
        if (m <= epoch) ++drops;
      return spec.base_lr * std::pow(spec.gamma, drops);
    }
    case ScheduleSpec::Kind::Ssfd: {
      if (epoch >= spec.total_epochs)
        throw ContractError("lr_at: epoch " + std::to_string(epoch) +
                            " beyond ssfd horizon " +
                            std::to_string(spec.total_epochs));
      if (epoch < spec.warmup_epochs) {
        const double t = static_cast<double>(epoch) /
                         static_cast<double>(spec.warmup_epochs);
        return spec.peak_lr * std::pow(spec.start_fraction, 1.0 - t);
      }
      return spec.peak_lr * std::pow(spec.decay, epoch - spec.warmup_epochs);
    }
  }
  throw ContractError("lr_at: unknown schedule kind");
}

}  // namespace advtrain
