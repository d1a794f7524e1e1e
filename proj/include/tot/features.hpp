#pragma once

#include <array>
#include <string>
#include <vector>

namespace tot {

// Frame-wise driver-state feature schema. Five groups in canonical order
// F (foot), G (gaze), H (hand activity), S (stereo hand distance),
// O (hand-held object). Group sizes are fixed; the full frame is 41-d.
inline constexpr int kFootDim = 5;
inline constexpr int kGazeDim = 8;
inline constexpr int kHandDim = 12;    // 6 per hand, left then right
inline constexpr int kStereoDim = 2;   // left, right wrist distance (m)
inline constexpr int kObjectDim = 14;  // 7 per hand, left then right
inline constexpr int kFullFeatureDim =
    kFootDim + kGazeDim + kHandDim + kStereoDim + kObjectDim;

// Upstream classifiers emit float-rounded softmax outputs; sums are checked
// against 1 within this tolerance.
inline constexpr double kProbSumTol = 1e-6;

// Gaze zones: forward, left mirror, lap, speedometer, infotainment,
// rear-view mirror, right mirror, over the shoulder.
struct GazeFeatures {
  std::array<double, kGazeDim> zone_probs{};
};
enum GazeZone {
  kGazeForward = 0,
  kGazeLeftMirror,
  kGazeLap,
  kGazeSpeedometer,
  kGazeInfotainment,
  kGazeRearviewMirror,
  kGazeRightMirror,
  kGazeOverShoulder
};

// Hand activities per hand: on lap, in air, hovering over wheel, on wheel,
// cupholder, infotainment.
struct HandFeatures {
  std::array<double, 6> activity_probs_left{};
  std::array<double, 6> activity_probs_right{};
};
enum HandActivity {
  kHandOnLap = 0,
  kHandInAir,
  kHandHoverWheel,
  kHandOnWheel,
  kHandCupholder,
  kHandInfotainment
};

// Hand-held object categories per hand: no-object, phone, tablet, food,
// beverage, book, other.
struct HandObjectFeatures {
  std::array<double, 7> object_probs_left{};
  std::array<double, 7> object_probs_right{};
};
enum HandObject {
  kObjectNone = 0,
  kObjectPhone,
  kObjectTablet,
  kObjectFood,
  kObjectBeverage,
  kObjectBook,
  kObjectOther
};

// 3-d distance of each wrist to the steering wheel.
struct StereoHandFeatures {
  double dist_left_m = 0.0;
  double dist_right_m = 0.0;
};

// Foot activities: away from pedal, on brake, on gas, hovering over brake,
// hovering over gas.
struct FootFeatures {
  std::array<double, kFootDim> activity_probs{};
};
enum FootActivity {
  kFootAway = 0,
  kFootOnBrake,
  kFootOnGas,
  kFootHoverBrake,
  kFootHoverGas
};

struct FrameFeatures {
  GazeFeatures gaze;
  HandFeatures hands;
  HandObjectFeatures objects;
  StereoHandFeatures stereo;
  FootFeatures foot;
  double timestamp_s = 0.0;  // relative to the take-over request; negative = before
};

// Which feature groups feed the model. Used by every ablation.
struct FeatureMask {
  bool use_foot = true;
  bool use_gaze = true;
  bool use_hand = true;
  bool use_stereo = true;
  bool use_object = true;

  static FeatureMask all() { return FeatureMask{}; }
  static FeatureMask only_foot() { return {true, false, false, false, false}; }
  static FeatureMask only_gaze() { return {false, true, false, false, false}; }
  static FeatureMask only_hand() { return {false, false, true, false, false}; }
  static FeatureMask only_stereo() { return {false, false, false, true, false}; }
  static FeatureMask only_object() { return {false, false, false, false, true}; }

  bool any() const {
    return use_foot || use_gaze || use_hand || use_stereo || use_object;
  }
  bool operator==(const FeatureMask&) const = default;
};

// Compact label in canonical group order, e.g. "FGHSO", "H", "HS".
std::string mask_label(const FeatureMask& mask);
FeatureMask mask_from_label(const std::string& label);

// Stable text labels for the categorical states, used in config files and
// CLI output. The *_from_string forms throw DataFormatError on unknown
// names, listing the valid ones.
std::string gaze_zone_name(int zone);
int gaze_zone_from_string(const std::string& name);
std::string hand_activity_name(int activity);
int hand_activity_from_string(const std::string& name);
std::string hand_object_name(int object);
int hand_object_from_string(const std::string& name);
std::string foot_activity_name(int activity);
int foot_activity_from_string(const std::string& name);

// Enabled input width. Throws std::invalid_argument on an all-false mask.
int feature_dim(const FeatureMask& mask);

// Writes the enabled groups in canonical F,G,H,S,O order. `out` must hold
// feature_dim(mask) values.
void flatten_into(const FrameFeatures& frame, const FeatureMask& mask,
                  double* out);
std::vector<double> flatten(const FrameFeatures& frame,
                            const FeatureMask& mask);

// Returns one message per violated group invariant; empty means valid.
std::vector<std::string> validate_frame(const FrameFeatures& frame);

}  // namespace tot
