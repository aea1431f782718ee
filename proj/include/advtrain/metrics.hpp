#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "advtrain/error.hpp"

namespace advtrain {

// Per-epoch experiment record; the unit of all metrics output.
struct MetricsRow {
  int epoch = 0;
  double lr = 0.0;
  double clean_train_acc = 0.0;
  double clean_test_acc = 0.0;
  double robust_train_acc = 0.0;
  double robust_test_acc = 0.0;
  double train_loss = 0.0;     // mean loss of the batches actually stepped on
  double adv_test_loss = 0.0;  // mean loss on attacked test inputs
};

// Column order is part of the format; bump the version when changing it.
constexpr const char* kMetricsCsvVersion = "v1";
constexpr const char* kMetricsCsvHeader =
    "epoch,lr,clean_train_acc,clean_test_acc,robust_train_acc,robust_test_acc,"
    "train_loss,adv_test_loss";

namespace detail {
inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline void write_metrics_csv(const std::vector<MetricsRow>& rows,
                              std::ostream& out) {
  out << kMetricsCsvHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.epoch << ',' << detail::fmt_double(r.lr) << ','
        << detail::fmt_double(r.clean_train_acc) << ','
        << detail::fmt_double(r.clean_test_acc) << ','
        << detail::fmt_double(r.robust_train_acc) << ','
        << detail::fmt_double(r.robust_test_acc) << ','
        << detail::fmt_double(r.train_loss) << ','
        << detail::fmt_double(r.adv_test_loss) << '\n';
  }
}

// Overfitting-gap curve: robust train accuracy minus robust test accuracy,
// aligned with epochs.
inline std::vector<double> gap_series(const std::vector<MetricsRow>& rows) {
  std::vector<double> gaps;
  gaps.reserve(rows.size());
  for (const MetricsRow& r : rows)
    gaps.push_back(r.robust_train_acc - r.robust_test_acc);
  return gaps;
}

// Epoch index with the highest robust test accuracy (first on ties).
inline std::size_t best_robust_epoch(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw ContractError("best_robust_epoch: empty report");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].robust_test_acc > rows[best].robust_test_acc) best = i;
  return best;
}

}  // namespace advtrain
