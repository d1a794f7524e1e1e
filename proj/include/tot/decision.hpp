#pragma once

#include <span>
#include <string>
#include <vector>

#include "tot/features.hpp"
#include "tot/model.hpp"

namespace tot {

// Hand control to the driver only when the predicted take-over time plus a
// human-maneuvering margin strictly beats the time to collision; otherwise
// bring the vehicle to a safe stop. The boundary tot + epsilon == ttc is
// deliberately conservative (SafeStop).
enum class Verdict { HandOver, SafeStop };

const char* to_string(Verdict v);

struct ModeDecision {
  int mode = 0;
  double tot_s = 0.0;  // this mode's take-over time (max of its triple)
  double prob = 0.0;
  Verdict verdict = Verdict::SafeStop;
  double margin_s = 0.0;
};

struct Decision {
  Verdict verdict = Verdict::SafeStop;
  double tot_s = 0.0;
  double ttc_s = 0.0;
  double epsilon_s = 0.0;
  double margin_s = 0.0;  // ttc - (tot + epsilon); HandOver iff > 0
  std::vector<ModeDecision> per_mode;  // filled by decide_mm only
};

inline constexpr double kDefaultEpsilonS = 0.5;

// Throws std::invalid_argument when ttc_s <= 0 or epsilon_s < 0 and
// NumericError on non-finite inputs.
Decision decide(double tot_s, double ttc_s, double epsilon_s);

// How a multimodal prediction collapses to the single take-over time that
// enters the handover criterion.
enum class DecisionPolicy {
  MostProbable,  // the argmax-probability mode's take-over time
  Expected,      // probability-weighted mean of the modes' take-over times
  WorstMode,     // the largest take-over time over all modes
};

const char* to_string(DecisionPolicy p);
// Throws DataFormatError listing the valid names.
DecisionPolicy policy_from_string(const std::string& s);

// Applies the chosen policy, and also records each mode's own verdict.
// Throws std::invalid_argument when the prediction is not multimodal.
Decision decide_mm(const Prediction& pred, double ttc_s, double epsilon_s,
                   DecisionPolicy policy);

struct StreamPrediction {
  long window_end = 0;  // index of the window's last frame in the stream
  Prediction prediction;
};

// Slides a 2 s window over the frame stream, advancing by stride_frames,
// and predicts once per position; prediction i depends only on frames up
// to its window end. Output count = floor((len - window) / stride) + 1.
// Throws std::invalid_argument when the stream is shorter than one window
// or stride_frames < 1.
std::vector<StreamPrediction> stream_predict(
    const Model& model, std::span<const FrameFeatures> frames,
    int stride_frames);

}  // namespace tot
