#include "tot/features.hpp"

#include <cmath>
#include <cstring>
#include <sstream>
#include <stdexcept>

#include "tot/common.hpp"

namespace tot {

std::string mask_label(const FeatureMask& mask) {
  std::string s;
  if (mask.use_foot) s += 'F';
  if (mask.use_gaze) s += 'G';
  if (mask.use_hand) s += 'H';
  if (mask.use_stereo) s += 'S';
  if (mask.use_object) s += 'O';
  return s.empty() ? "-" : s;
}

FeatureMask mask_from_label(const std::string& label) {
  if (label.empty()) {
    throw std::invalid_argument("empty feature mask label");
  }
  FeatureMask m{false, false, false, false, false};
  for (char c : label) {
    bool* flag = nullptr;
    switch (c) {
      case 'F': case 'f': flag = &m.use_foot; break;
      case 'G': case 'g': flag = &m.use_gaze; break;
      case 'H': case 'h': flag = &m.use_hand; break;
      case 'S': case 's': flag = &m.use_stereo; break;
      case 'O': case 'o': flag = &m.use_object; break;
      default:
        throw std::invalid_argument("unknown feature group '" +
                                    std::string(1, c) +
                                    "' (expected letters from FGHSO)");
    }
    if (*flag) {
      throw std::invalid_argument("feature group '" + std::string(1, c) +
                                  "' listed twice in \"" + label + "\"");
    }
    *flag = true;
  }
  return m;
}

int feature_dim(const FeatureMask& mask) {
  if (!mask.any()) {
    throw std::invalid_argument("feature mask enables no groups");
  }
  int dim = 0;
  if (mask.use_foot) dim += kFootDim;
  if (mask.use_gaze) dim += kGazeDim;
  if (mask.use_hand) dim += kHandDim;
  if (mask.use_stereo) dim += kStereoDim;
  if (mask.use_object) dim += kObjectDim;
  return dim;
}

void flatten_into(const FrameFeatures& frame, const FeatureMask& mask,
                  double* out) {
  double* p = out;
  if (mask.use_foot) {
    std::memcpy(p, frame.foot.activity_probs.data(), kFootDim * sizeof(double));
    p += kFootDim;
  }
  if (mask.use_gaze) {
    std::memcpy(p, frame.gaze.zone_probs.data(), kGazeDim * sizeof(double));
    p += kGazeDim;
  }
  if (mask.use_hand) {
    std::memcpy(p, frame.hands.activity_probs_left.data(), 6 * sizeof(double));
    p += 6;
    std::memcpy(p, frame.hands.activity_probs_right.data(), 6 * sizeof(double));
    p += 6;
  }
  if (mask.use_stereo) {
    *p++ = frame.stereo.dist_left_m;
    *p++ = frame.stereo.dist_right_m;
  }
  if (mask.use_object) {
    std::memcpy(p, frame.objects.object_probs_left.data(), 7 * sizeof(double));
    p += 7;
    std::memcpy(p, frame.objects.object_probs_right.data(), 7 * sizeof(double));
    p += 7;
  }
}

std::vector<double> flatten(const FrameFeatures& frame,
                            const FeatureMask& mask) {
  std::vector<double> out(static_cast<size_t>(feature_dim(mask)));
  flatten_into(frame, mask, out.data());
  return out;
}

namespace {

constexpr const char* kGazeZoneNames[kGazeDim] = {
    "forward",      "left_mirror",    "lap",          "speedometer",
    "infotainment", "rearview_mirror", "right_mirror", "over_shoulder"};
constexpr const char* kHandActivityNames[6] = {
    "on_lap", "in_air", "hover_wheel", "on_wheel", "cupholder", "infotainment"};
constexpr const char* kHandObjectNames[7] = {
    "none", "phone", "tablet", "food", "beverage", "book", "other"};
constexpr const char* kFootActivityNames[kFootDim] = {
    "away", "on_brake", "on_gas", "hover_brake", "hover_gas"};

template <std::size_t N>
std::string name_from_table(const char* const (&table)[N], int value,
                            const char* what) {
  if (value < 0 || value >= static_cast<int>(N)) {
    std::ostringstream os;
    os << what << " index " << value << " out of range [0," << N << ")";
    throw std::invalid_argument(os.str());
  }
  return table[static_cast<std::size_t>(value)];
}

template <std::size_t N>
int index_from_table(const char* const (&table)[N], const std::string& name,
                     const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (name == table[i]) return static_cast<int>(i);
  }
  std::ostringstream os;
  os << "unknown " << what << " \"" << name << "\" (expected one of:";
  for (std::size_t i = 0; i < N; ++i) os << ' ' << table[i];
  os << ')';
  throw DataFormatError(os.str());
}

void check_prob_group(const double* probs, int n, const char* group,
                      std::vector<std::string>& out) {
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = probs[i];
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      std::ostringstream os;
      os << group << ": entry " << i << " = " << p << " outside [0,1]";
      out.push_back(os.str());
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kProbSumTol) {
    std::ostringstream os;
    os << group << ": probabilities sum to " << sum << ", expected 1 within "
       << kProbSumTol;
    out.push_back(os.str());
  }
}

}  // namespace

std::vector<std::string> validate_frame(const FrameFeatures& frame) {
  std::vector<std::string> violations;
  check_prob_group(frame.foot.activity_probs.data(), kFootDim, "foot",
                   violations);
  check_prob_group(frame.gaze.zone_probs.data(), kGazeDim, "gaze", violations);
  check_prob_group(frame.hands.activity_probs_left.data(), 6, "hand(left)",
                   violations);
  check_prob_group(frame.hands.activity_probs_right.data(), 6, "hand(right)",
                   violations);
  check_prob_group(frame.objects.object_probs_left.data(), 7, "object(left)",
                   violations);
  check_prob_group(frame.objects.object_probs_right.data(), 7, "object(right)",
                   violations);
  for (auto [dist, side] : {std::pair{frame.stereo.dist_left_m, "left"},
                            std::pair{frame.stereo.dist_right_m, "right"}}) {
    if (!std::isfinite(dist) || dist < 0.0) {
      std::ostringstream os;
      os << "stereo: " << side << " wrist distance " << dist
         << " must be finite and >= 0";
      violations.push_back(os.str());
    }
  }
  return violations;
}

std::string gaze_zone_name(int zone) {
  return name_from_table(kGazeZoneNames, zone, "gaze zone");
}
int gaze_zone_from_string(const std::string& name) {
  return index_from_table(kGazeZoneNames, name, "gaze zone");
}
std::string hand_activity_name(int activity) {
  return name_from_table(kHandActivityNames, activity, "hand activity");
}
int hand_activity_from_string(const std::string& name) {
  return index_from_table(kHandActivityNames, name, "hand activity");
}
std::string hand_object_name(int object) {
  return name_from_table(kHandObjectNames, object, "hand object");
}
int hand_object_from_string(const std::string& name) {
  return index_from_table(kHandObjectNames, name, "hand object");
}
std::string foot_activity_name(int activity) {
  return name_from_table(kFootActivityNames, activity, "foot activity");
}
int foot_activity_from_string(const std::string& name) {
  return index_from_table(kFootActivityNames, name, "foot activity");
}

}  // namespace tot
