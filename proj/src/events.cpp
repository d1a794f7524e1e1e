#include "tot/events.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tot/common.hpp"

namespace tot {

namespace {
constexpr const char* kActivityNames[kNumActivities] = {
    "no_secondary", "talking",      "eyes_closed",    "texting",
    "phone_call",   "infotainment", "counting_coins", "reading",
};
}

const char* to_string(Activity a) {
  return kActivityNames[static_cast<int>(a)];
}

Activity activity_from_string(const std::string& s) {
  for (int i = 0; i < kNumActivities; ++i) {
    if (s == kActivityNames[i]) return static_cast<Activity>(i);
  }
  std::ostringstream os;
  os << "unknown activity label '" << s << "'; valid labels are:";
  for (int i = 0; i < kNumActivities; ++i) os << ' ' << kActivityNames[i];
  throw DataFormatError(os.str());
}

std::vector<Activity> all_activities() {
  std::vector<Activity> out;
  out.reserve(kNumActivities);
  for (int i = 0; i < kNumActivities; ++i) out.push_back(static_cast<Activity>(i));
  return out;
}

double TakeoverEvent::t_max_s() const {
  return std::max({t_eyes_s, t_foot_s, t_hands_s});
}

int TakeoverEvent::expected_frame_count() const {
  return static_cast<int>(
      std::lround((kPreTorSpanS + kPostTorSpanS) * frame_rate_hz));
}

int TakeoverEvent::pre_tor_frames() const {
  return static_cast<int>(std::lround(kPreTorSpanS * frame_rate_hz));
}

int TakeoverEvent::window_frames() const {
  return static_cast<int>(std::lround(kWindowSpanS * frame_rate_hz));
}

std::vector<std::string> validate_event(const TakeoverEvent& event) {
  std::vector<std::string> violations;
  if (!(event.frame_rate_hz > 0.0) || !std::isfinite(event.frame_rate_hz)) {
    violations.push_back("frame_rate_hz must be finite and positive");
    return violations;
  }
  const struct {
    const char* name;
    double value;
  } times[] = {{"t_eyes_s", event.t_eyes_s},
               {"t_foot_s", event.t_foot_s},
               {"t_hands_s", event.t_hands_s}};
  for (const auto& t : times) {
    if (!std::isfinite(t.value) || t.value < 0.0) {
      std::ostringstream os;
      os << t.name << " = " << t.value << " must be finite and >= 0";
      violations.push_back(os.str());
    } else if (t.value > kPostTorSpanS) {
      std::ostringstream os;
      os << t.name << " = " << t.value << " exceeds the recorded "
         << kPostTorSpanS << " s post-TOR span";
      violations.push_back(os.str());
    }
  }
  const int expected = event.expected_frame_count();
  if (static_cast<int>(event.frames.size()) != expected) {
    std::ostringstream os;
    os << "frame count " << event.frames.size() << " != " << expected << " ("
       << kPreTorSpanS + kPostTorSpanS << " s at " << event.frame_rate_hz
       << " Hz)";
    violations.push_back(os.str());
  } else {
    // Timestamps must sit on the uniform grid relative to the TOR.
    const int pre = event.pre_tor_frames();
    for (int i = 0; i < expected; ++i) {
      const double want = (i - pre) / event.frame_rate_hz;
      if (std::abs(event.frames[i].timestamp_s - want) >
          0.5 / event.frame_rate_hz) {
        std::ostringstream os;
        os << "frame " << i << " timestamp " << event.frames[i].timestamp_s
           << " off the uniform grid (expected " << want << ")";
        violations.push_back(os.str());
        break;
      }
    }
  }
  return violations;
}

}  // namespace tot
