#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tot/features.hpp"

namespace tot {

// Secondary activity performed before the take-over request.
enum class Activity {
  NoSecondary = 0,
  Talking,
  EyesClosed,
  Texting,
  PhoneCall,
  Infotainment,
  CountingCoins,
  Reading,
};
inline constexpr int kNumActivities = 8;

const char* to_string(Activity a);
// Throws DataFormatError listing the valid labels.
Activity activity_from_string(const std::string& s);
std::vector<Activity> all_activities();

// Recorded span around the take-over request (TOR), seconds.
inline constexpr double kPreTorSpanS = 20.0;
inline constexpr double kPostTorSpanS = 10.0;
inline constexpr double kWindowSpanS = 2.0;
inline constexpr double kDefaultFrameRateHz = 30.0;

// One annotated 30 s take-over episode. Frames are uniformly sampled at
// frame_rate_hz; frame i has timestamp (i - pre_tor_frames) / frame_rate_hz,
// so timestamps run from -20 s up to (but not including) +10 s.
struct TakeoverEvent {
  std::string event_id;
  Activity activity = Activity::NoSecondary;
  double frame_rate_hz = kDefaultFrameRateHz;
  std::vector<FrameFeatures> frames;
  double t_eyes_s = 0.0;   // eyes-on-road time after TOR
  double t_foot_s = 0.0;   // foot-on-pedal time after TOR
  double t_hands_s = 0.0;  // hands-on-wheel time after TOR

  // Take-over time: the last of the three behaviors to complete.
  double t_max_s() const;
  int expected_frame_count() const;
  int pre_tor_frames() const;  // index of the first frame at/after TOR
  int window_frames() const;   // frames per 2 s window
};

// One message per violated invariant; empty means valid.
std::vector<std::string> validate_event(const TakeoverEvent& event);

struct EventSet {
  std::vector<TakeoverEvent> events;
};

struct SplitSpec {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;
};

}  // namespace tot
