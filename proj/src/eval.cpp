#include "tot/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tot/common.hpp"

namespace tot {

namespace {

constexpr int kEvalBlockSamples = 64;

struct ResidualSums {
  double comp[3] = {0.0, 0.0, 0.0};
  double takeover = 0.0;

  ResidualSums& operator+=(const ResidualSums& o) {
    for (int c = 0; c < 3; ++c) comp[c] += o.comp[c];
    takeover += o.takeover;
    return *this;
  }
};

ResidualSums sample_residuals(const Model& model, const TrainingSample& s,
                              EvalMode mode) {
  const Prediction pred = forward(model, s.window.data(), s.rows, s.cols);
  ResidualSums r;
  const double target_max = std::max({s.targets[0], s.targets[1], s.targets[2]});
  if (mode == EvalMode::BestOfK) {
    // Best mode chosen independently per column.
    for (int c = 0; c < 3; ++c) {
      double best = std::abs(pred.mode(0)[static_cast<std::size_t>(c)] -
                             s.targets[static_cast<std::size_t>(c)]);
      for (int k = 1; k < pred.num_modes(); ++k) {
        best = std::min(best, std::abs(pred.mode(k)[static_cast<std::size_t>(c)] -
                                       s.targets[static_cast<std::size_t>(c)]));
      }
      r.comp[c] = best;
    }
    double best_to = 0.0;
    for (int k = 0; k < pred.num_modes(); ++k) {
      const std::array<double, 3> t = pred.mode(k);
      const double e = std::abs(std::max({t[0], t[1], t[2]}) - target_max);
      if (k == 0 || e < best_to) best_to = e;
    }
    r.takeover = best_to;
  } else {
    const std::array<double, 3> t =
        pred.multimodal() ? pred.mode(pred.most_probable_mode()) : pred.times;
    for (int c = 0; c < 3; ++c) {
      r.comp[c] = std::abs(t[static_cast<std::size_t>(c)] -
                           s.targets[static_cast<std::size_t>(c)]);
    }
    r.takeover = std::abs(std::max({t[0], t[1], t[2]}) - target_max);
  }
  return r;
}

}  // namespace

MaeReport evaluate(const Model& model, std::span<const TrainingSample> samples,
                   EvalMode mode, ExecPolicy policy) {
  if (samples.empty()) {
    throw std::invalid_argument("evaluate: empty sample set");
  }
  if (mode == EvalMode::BestOfK && !model.multimodal()) {
    throw std::invalid_argument(
        "evaluate: best-of-k requires a multimodal variant");
  }
  for (const TrainingSample& s : samples) {
    if (s.cols != model.config.input_dim) {
      throw std::invalid_argument(
          "evaluate: sample width does not match model input_dim");
    }
  }

  const long n = static_cast<long>(samples.size());
  const long nblocks = (n + kEvalBlockSamples - 1) / kEvalBlockSamples;
  std::vector<ResidualSums> partial(static_cast<std::size_t>(nblocks));

  std::exception_ptr error;
  const bool parallel = policy == ExecPolicy::Parallel && nblocks > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long bi = 0; bi < nblocks; ++bi) {
    try {
      ResidualSums acc;
      const long lo = bi * kEvalBlockSamples;
      const long hi = std::min(n, lo + kEvalBlockSamples);
      for (long i = lo; i < hi; ++i) {
        acc += sample_residuals(model, samples[static_cast<std::size_t>(i)], mode);
      }
      partial[static_cast<std::size_t>(bi)] = acc;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  ResidualSums total;
  for (const ResidualSums& p : partial) total += p;

  MaeReport report;
  const double dn = static_cast<double>(n);
  report.eyes_mae_s = total.comp[0] / dn;
  report.foot_mae_s = total.comp[1] / dn;
  report.hands_mae_s = total.comp[2] / dn;
  report.overall_mae_s =
      (report.eyes_mae_s + report.foot_mae_s + report.hands_mae_s) / 3.0;
  report.takeover_mae_s = total.takeover / dn;
  report.sample_count = n;
  return report;
}

std::vector<FeatureMask> default_ablation_masks() {
  std::vector<FeatureMask> masks;
  for (const char* label : {"F", "G", "H", "HS", "HO", "HSO", "GHO", "GHSO",
                            "FGHS", "FGHO", "FGHSO"}) {
    masks.push_back(mask_from_label(label));
  }
  return masks;
}

namespace {

MaeReport mean_report(std::span<const MaeReport> reports) {
  MaeReport mean;
  for (const MaeReport& r : reports) {
    mean.eyes_mae_s += r.eyes_mae_s;
    mean.foot_mae_s += r.foot_mae_s;
    mean.hands_mae_s += r.hands_mae_s;
    mean.takeover_mae_s += r.takeover_mae_s;
  }
  const double dn = static_cast<double>(reports.size());
  mean.eyes_mae_s /= dn;
  mean.foot_mae_s /= dn;
  mean.hands_mae_s /= dn;
  mean.takeover_mae_s /= dn;
  mean.overall_mae_s =
      (mean.eyes_mae_s + mean.foot_mae_s + mean.hands_mae_s) / 3.0;
  mean.sample_count = reports.empty() ? 0 : reports.front().sample_count;
  if (!reports.empty()) {
    mean.model_id = reports.front().model_id;
    mean.dataset_id = reports.front().dataset_id;
  }
  return mean;
}

// One seeded training run on prebuilt samples, scored on `eval_samples`.
MaeReport run_once(const FeatureMask& mask, const RunPlan& plan,
                   std::uint64_t seed,
                   std::span<const TrainingSample> train_samples,
                   std::span<const TrainingSample> eval_samples,
                   const std::string& dataset_id) {
  ModelConfig mc = plan.model;
  mc.input_dim = feature_dim(mask);
  mc.seed = seed;
  TrainConfig tc = plan.train;
  tc.seed = seed;
  TrainResult tr = train(train_samples, {}, mc, mask, tc);
  MaeReport report =
      evaluate(tr.model, eval_samples, plan.eval_mode, tc.policy);
  std::ostringstream id;
  id << to_string(mc.variant) << "/" << mask_label(mask) << "/seed" << seed;
  report.model_id = id.str();
  report.dataset_id = dataset_id;
  return report;
}

}  // namespace

std::vector<AblationRow> ablate(const AblationSpec& spec,
                                const EventSplits& splits) {
  if (spec.masks.empty()) {
    throw std::invalid_argument("ablate: no masks given");
  }
  if (spec.plan.seeds.empty()) {
    throw std::invalid_argument("ablate: no seeds given");
  }
  std::vector<AblationRow> rows;
  rows.reserve(spec.masks.size());
  for (const FeatureMask& mask : spec.masks) {
    const std::vector<TrainingSample> train_samples = build_training_set(
        splits.train, mask, spec.plan.augment, spec.plan.train.policy);
    const std::vector<TrainingSample> val_samples =
        build_training_set(splits.val, mask, false, spec.plan.train.policy);
    AblationRow row;
    row.mask = mask;
    for (std::uint64_t seed : spec.plan.seeds) {
      row.per_seed.push_back(
          run_once(mask, spec.plan, seed, train_samples, val_samples, "val"));
    }
    row.mean = mean_report(row.per_seed);
    row.mean.model_id =
        std::string(to_string(spec.plan.model.variant)) + "/" + mask_label(mask);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> fraction_sweep(std::span<const double> fractions,
                                     const FeatureMask& mask,
                                     const RunPlan& plan,
                                     const EventSplits& splits) {
  if (fractions.empty()) {
    throw std::invalid_argument("fraction_sweep: no fractions given");
  }
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) {
      throw std::invalid_argument(
          "fraction_sweep: fractions must lie in (0, 1]");
    }
  }
  if (plan.seeds.empty()) {
    throw std::invalid_argument("fraction_sweep: no seeds given");
  }

  const std::vector<TrainingSample> test_samples =
      build_training_set(splits.test, mask, false, plan.train.policy);

  std::vector<SweepRow> rows;
  rows.reserve(fractions.size());
  for (double fraction : fractions) {
    SweepRow row;
    row.fraction = fraction;
    for (std::uint64_t seed : plan.seeds) {
      // Seeded subset of train events, kept in original order so that
      // fraction 1.0 reproduces the full split exactly.
      const std::size_t n = splits.train.size();
      const auto keep = static_cast<std::size_t>(
          std::lround(fraction * static_cast<double>(n)));
      std::vector<std::size_t> idx(n);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::mt19937_64 rng(seed);
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(std::max<std::size_t>(keep, 1));
      std::sort(idx.begin(), idx.end());
      std::vector<TakeoverEvent> subset;
      subset.reserve(idx.size());
      for (std::size_t i : idx) subset.push_back(splits.train[i]);
      row.train_events = static_cast<long>(subset.size());

      const std::vector<TrainingSample> train_samples =
          build_training_set(subset, mask, plan.augment, plan.train.policy);
      row.per_seed.push_back(
          run_once(mask, plan, seed, train_samples, test_samples, "test"));
    }
    row.mean = mean_report(row.per_seed);
    std::ostringstream id;
    id << to_string(plan.model.variant) << "/" << mask_label(mask)
       << "/fraction" << fraction;
    row.mean.model_id = id.str();
    rows.push_back(std::move(row));
  }
  return rows;
}

AugmentationComparison compare_augmentation(const FeatureMask& mask,
                                            const RunPlan& plan,
                                            const EventSplits& splits) {
  if (plan.seeds.empty()) {
    throw std::invalid_argument("compare_augmentation: no seeds given");
  }
  const std::vector<TrainingSample> raw_samples =
      build_training_set(splits.train, mask, false, plan.train.policy);
  const std::vector<TrainingSample> aug_samples =
      build_training_set(splits.train, mask, true, plan.train.policy);
  const std::vector<TrainingSample> val_samples =
      build_training_set(splits.val, mask, false, plan.train.policy);

  AugmentationComparison cmp;
  for (std::uint64_t seed : plan.seeds) {
    cmp.raw_per_seed.push_back(
        run_once(mask, plan, seed, raw_samples, val_samples, "val/raw"));
    cmp.augmented_per_seed.push_back(
        run_once(mask, plan, seed, aug_samples, val_samples, "val/augmented"));
  }
  cmp.raw_mean = mean_report(cmp.raw_per_seed);
  cmp.augmented_mean = mean_report(cmp.augmented_per_seed);
  return cmp;
}

std::string report_csv_header() {
  return "model_id,dataset_id,sample_count,eyes_mae_s,foot_mae_s,"
         "hands_mae_s,overall_mae_s,takeover_mae_s";
}

std::string report_csv_row(const MaeReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%ld,%.9g,%.9g,%.9g,%.9g,%.9g",
                r.sample_count, r.eyes_mae_s, r.foot_mae_s, r.hands_mae_s,
                r.overall_mae_s, r.takeover_mae_s);
  return r.model_id + "," + r.dataset_id + "," + buf;
}

void write_report_csv(const std::string& path,
                      std::span<const MaeReport> rows,
                      const std::string& config_json) {
  std::ostringstream os;
  os << "# config: " << config_json << "\n" << report_csv_header() << "\n";
  for (const MaeReport& r : rows) os << report_csv_row(r) << "\n";
  atomic_write_text(path, os.str());
}

}  // namespace tot
