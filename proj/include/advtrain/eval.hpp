#pragma once

#include <optional>
#include <vector>

#include "advtrain/attack.hpp"
#include "advtrain/dataset.hpp"
#include "advtrain/model.hpp"

namespace advtrain {

struct EvalResult {
  double clean_acc = 0.0;
  double clean_loss = 0.0;
  std::optional<double> robust_acc;
  std::optional<double> robust_loss;
};

namespace detail {

struct AccLoss {
  double acc = 0.0;
  double loss = 0.0;
};

// Accuracy and mean loss over a dataset; samples are visited in index order
// so the accumulation is batching-invariant.
template <typename LogitsFn>
AccLoss accumulate_eval(const Dataset& ds, std::size_t eval_batch,
                        LogitsFn&& logits_for) {
  std::size_t correct = 0;
  double loss_sum = 0.0;
  for (std::size_t start = 0; start < ds.size(); start += eval_batch) {
    const std::size_t end = std::min(ds.size(), start + eval_batch);
    std::vector<std::size_t> idx(end - start);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = start + i;
    Batch b = gather(ds, idx);
    Tensor logits = logits_for(b);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (argmax_row(logits, i) == b.y[i]) ++correct;
      loss_sum += softmax_ce_row(logits, i, b.y[i]);
    }
  }
  AccLoss out;
  out.acc = static_cast<double>(correct) / static_cast<double>(ds.size());
  out.loss = loss_sum / static_cast<double>(ds.size());
  return out;
}

}  // namespace detail

// Clean accuracy, and robust accuracy under a PGD adversary when one is given.
inline EvalResult evaluate(const Model& model, const Dataset& data,
                           const std::optional<AttackConfig>& attack = {},
                           std::size_t eval_batch = 256) {
  if (data.size() == 0) throw ContractError("evaluate: empty dataset");
  EvalResult res;
  auto clean = detail::accumulate_eval(
      data, eval_batch, [&](const Batch& b) { return model.forward(b.x); });
  res.clean_acc = clean.acc;
  res.clean_loss = clean.loss;
  if (attack) {
    attack->validate();
    auto robust = detail::accumulate_eval(data, eval_batch, [&](const Batch& b) {
      return model.forward(pgd(model, b, *attack).x_adv);
    });
    res.robust_acc = robust.acc;
    res.robust_loss = robust.loss;
  }
  return res;
}

}  // namespace advtrain
