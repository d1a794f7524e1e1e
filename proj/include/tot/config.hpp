#pragma once

#include <cstdint>
#include <string>

#include "tot/decision.hpp"
#include "tot/events.hpp"
#include "tot/features.hpp"
#include "tot/model.hpp"
#include "tot/synth.hpp"
#include "tot/train.hpp"

namespace tot {

// Everything the CLI needs to run an experiment, in one round-trippable
// document: paths, the model/training/split/generator settings, and the
// decision defaults. `config --dump` emits the fully resolved form.
struct ExperimentConfig {
  std::string events_path = "events.jsonl";
  std::string checkpoint_path = "model.ckpt";
  std::string report_dir = "reports";
  std::uint64_t seed = 0;

  FeatureMask mask;  // feature groups visible to the model
  ModelConfig model;
  TrainConfig train;
  SplitSpec split;
  SynthConfig synth;

  double epsilon_s = kDefaultEpsilonS;
  DecisionPolicy policy = DecisionPolicy::MostProbable;
};

ExperimentConfig default_experiment_config();

// Lossless JSON round trip (doubles use shortest round-trip form).
std::string experiment_config_to_json(const ExperimentConfig& cfg,
                                      bool pretty = true);
// Unknown or missing fields raise DataFormatError naming the field.
ExperimentConfig experiment_config_from_json(const std::string& text);

void save_experiment_config(const ExperimentConfig& cfg,
                            const std::string& path);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace tot
