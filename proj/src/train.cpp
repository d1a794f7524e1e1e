#include "tot/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tot {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

LossKind loss_for(const Model& m) {
  if (m.head_kind == HeadKind::Readiness) return LossKind::Mse;
  return m.multimodal() ? LossKind::MinOfK : LossKind::L1;
}

std::vector<SampleView> make_views(std::span<const TrainingSample> samples) {
  std::vector<SampleView> views;
  views.reserve(samples.size());
  for (const TrainingSample& s : samples) {
    views.push_back({s.window.data(), s.rows, s.cols, s.targets});
  }
  return views;
}

std::vector<SampleView> make_views(std::span<const OriSample> samples) {
  std::vector<SampleView> views;
  views.reserve(samples.size());
  for (const OriSample& s : samples) {
    views.push_back({s.window.data(), s.rows, s.cols, {s.label, 0.0, 0.0}});
  }
  return views;
}

// Post-epoch validation metrics. For take-over-time heads: overall MAE
// (mean of the three component MAEs) and take-over-time MAE (max-of-three
// on both sides); multimodal models are scored on the most probable mode.
// For readiness heads: mean absolute label error in the first slot.
std::pair<double, double> val_metrics(const Model& m,
                                      std::span<const SampleView> val) {
  if (val.empty()) return {kNaN, kNaN};
  if (m.head_kind == HeadKind::Readiness) {
    double err = 0.0;
    for (const SampleView& s : val) {
      err += std::abs(forward_readiness(m, s.window, s.rows, s.cols) -
                      s.targets[0]);
    }
    return {err / static_cast<double>(val.size()), kNaN};
  }
  double comp[3] = {0.0, 0.0, 0.0};
  double takeover = 0.0;
  for (const SampleView& s : val) {
    const Prediction pred = forward(m, s.window, s.rows, s.cols);
    const std::array<double, 3> t =
        pred.multimodal() ? pred.mode(pred.most_probable_mode()) : pred.times;
    for (int c = 0; c < 3; ++c) comp[c] += std::abs(t[static_cast<std::size_t>(c)] - s.targets[static_cast<std::size_t>(c)]);
    const double pred_max = std::max({t[0], t[1], t[2]});
    const double target_max =
        std::max({s.targets[0], s.targets[1], s.targets[2]});
    takeover += std::abs(pred_max - target_max);
  }
  const double n = static_cast<double>(val.size());
  const double overall = (comp[0] + comp[1] + comp[2]) / (3.0 * n);
  return {overall, takeover / n};
}

TrainResult run_training(Model model, std::vector<SampleView> train_views,
                         std::vector<SampleView> val_views,
                         const TrainConfig& tc) {
  if (train_views.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  for (const SampleView& s : train_views) {
    if (s.cols != model.config.input_dim) {
      throw std::invalid_argument(
          "train: sample width does not match model input_dim");
    }
  }
  if (tc.epochs < 0) throw std::invalid_argument("train: negative epochs");
  if (tc.batch_size < 1) throw std::invalid_argument("train: batch_size < 1");

  const LossKind kind = loss_for(model);
  const std::size_t n = train_views.size();
  AdamState adam(model.params.size());
  std::mt19937_64 rng(tc.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<SampleView> batch;
  batch.reserve(static_cast<std::size_t>(tc.batch_size));

  TrainResult result;
  result.history.reserve(static_cast<std::size_t>(tc.epochs));
  for (int epoch = 1; epoch <= tc.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < n;
         start += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(tc.batch_size));
      batch.clear();
      for (std::size_t i = start; i < stop; ++i) {
        batch.push_back(train_views[order[i]]);
      }
      GradResult g = batch_gradient(model, batch, kind, tc.policy);
      adam_step(model.params, g.grad, adam, tc.adam);
      loss_sum += g.loss * static_cast<double>(batch.size());
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = loss_sum / static_cast<double>(n);
    std::tie(stats.val_overall_mae_s, stats.val_takeover_mae_s) =
        val_metrics(model, val_views);
    if (tc.verbose) {
      std::fprintf(stderr,
                   "epoch %3d/%d  train loss %.5f  val overall MAE %.5f\n",
                   epoch, tc.epochs, stats.train_loss,
                   stats.val_overall_mae_s);
    }
    result.history.push_back(stats);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

TrainResult train(std::span<const TrainingSample> train_set,
                  std::span<const TrainingSample> val_set,
                  const ModelConfig& config, const FeatureMask& mask,
                  const TrainConfig& tc) {
  return run_training(make_tot_model(config, mask), make_views(train_set),
                      make_views(val_set), tc);
}

TrainResult train_from(Model model, std::span<const TrainingSample> train_set,
                       std::span<const TrainingSample> val_set,
                       const TrainConfig& tc) {
  if (model.head_kind != HeadKind::TakeoverTimes) {
    throw std::invalid_argument(
        "train_from: model must have a take-over-time head (use "
        "transfer() on a pretrained model first)");
  }
  return run_training(std::move(model), make_views(train_set),
                      make_views(val_set), tc);
}

TrainResult pretrain_ori(std::span<const OriSample> train_set,
                         std::span<const OriSample> val_set,
                         const ModelConfig& config, const FeatureMask& mask,
                         const TrainConfig& tc) {
  for (const OriSample& s : train_set) {
    if (!(s.label >= 0.0 && s.label <= 1.0)) {
      throw std::invalid_argument(
          "pretrain_ori: labels must lie in [0,1] (sample from event " +
          s.event_id + ")");
    }
  }
  return run_training(make_ori_model(config, mask), make_views(train_set),
                      make_views(val_set), tc);
}

Model transfer(const Model& pretrained, const ModelConfig& config) {
  if (is_independent(pretrained.config.variant) !=
      is_independent(config.variant)) {
    throw std::invalid_argument(
        "transfer: trunk cell counts differ between the pretrained model "
        "and the target config");
  }
  if (pretrained.config.hidden_dim != config.hidden_dim ||
      pretrained.config.input_dim != config.input_dim) {
    throw std::invalid_argument(
        "transfer: hidden_dim/input_dim mismatch between the pretrained "
        "model and the target config");
  }
  Model model = make_tot_model(config, pretrained.mask);
  for (const TensorSpec& t : model.layout.tensors) {
    if (t.name.rfind("head.", 0) == 0) continue;  // heads stay fresh
    const TensorSpec& src = pretrained.layout.at(t.name);
    if (src.rows != t.rows || src.cols != t.cols) {
      throw std::invalid_argument("transfer: tensor shape mismatch for " +
                                  t.name);
    }
    std::copy_n(pretrained.params.data() + src.offset, t.size(),
                model.params.data() + t.offset);
  }
  return model;
}

}  // namespace tot
