#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tot/augment.hpp"
#include "tot/model.hpp"
#include "tot/split.hpp"
#include "tot/train.hpp"

namespace tot {

// How a multimodal prediction is scored: by its most probable mode, or by
// the best mode per sample and per metric (the oracle upper bound).
enum class EvalMode { MostProbable, BestOfK };

struct MaeReport {
  double eyes_mae_s = 0.0;
  double foot_mae_s = 0.0;
  double hands_mae_s = 0.0;
  double overall_mae_s = 0.0;   // mean of the three component MAEs
  double takeover_mae_s = 0.0;  // max-of-three on both sides
  long sample_count = 0;
  std::string model_id;
  std::string dataset_id;
};

// Mean absolute errors over the samples. BestOfK requires a multimodal
// model and picks, per sample and per column, the mode with the smallest
// error, so its report never exceeds the most-probable report in any
// column. Throws std::invalid_argument on an empty sample set or a
// mode/variant mismatch.
MaeReport evaluate(const Model& model, std::span<const TrainingSample> samples,
                   EvalMode mode = EvalMode::MostProbable,
                   ExecPolicy policy = ExecPolicy::Parallel);

// Shared knobs for the multi-run experiments below. Each listed seed runs
// one full training with ModelConfig.seed = TrainConfig.seed = that seed,
// so runs are reproducible one by one.
struct RunPlan {
  ModelConfig model;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  bool augment = true;
  EvalMode eval_mode = EvalMode::MostProbable;
};

// The standard 11-row mask matrix: F; G; H; H,S; H,O; H,S,O; G,H,O;
// G,H,S,O; F,G,H,S; F,G,H,O; F,G,H,S,O.
std::vector<FeatureMask> default_ablation_masks();

struct AblationSpec {
  std::vector<FeatureMask> masks = default_ablation_masks();
  RunPlan plan;
};

struct AblationRow {
  FeatureMask mask;
  MaeReport mean;                    // fieldwise mean over seeds
  std::vector<MaeReport> per_seed;
};

// Trains plan.model with each mask (input_dim adjusted per mask) for each
// seed on the identical splits and reports validation MAEs.
std::vector<AblationRow> ablate(const AblationSpec& spec,
                                const EventSplits& splits);

struct SweepRow {
  double fraction = 1.0;
  long train_events = 0;  // events kept after subsampling
  MaeReport mean;
  std::vector<MaeReport> per_seed;
};

// Subsamples the train split to round(fraction * |train|) events (seeded
// index choice, original order preserved, so fraction 1.0 is the identity),
// trains, and evaluates on the fixed test split. Fractions must lie in
// (0, 1].
std::vector<SweepRow> fraction_sweep(std::span<const double> fractions,
                                     const FeatureMask& mask,
                                     const RunPlan& plan,
                                     const EventSplits& splits);

struct AugmentationComparison {
  MaeReport raw_mean;
  MaeReport augmented_mean;
  std::vector<MaeReport> raw_per_seed;
  std::vector<MaeReport> augmented_per_seed;
};

// Controlled pair of runs per seed: identical splits and identical model
// initialization; only the training-set construction (raw vs augmented)
// differs. Both sides are evaluated on the untouched validation split.
AugmentationComparison compare_augmentation(const FeatureMask& mask,
                                            const RunPlan& plan,
                                            const EventSplits& splits);

// Report file: "# config: <one-line JSON>" first, then a CSV header
// matching the MaeReport fields, then one row per report. Written via
// write-then-rename.
void write_report_csv(const std::string& path,
                      std::span<const MaeReport> rows,
                      const std::string& config_json);
std::string report_csv_header();
std::string report_csv_row(const MaeReport& r);

}  // namespace tot
