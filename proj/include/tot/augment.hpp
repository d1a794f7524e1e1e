#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tot/common.hpp"
#include "tot/events.hpp"
#include "tot/features.hpp"

namespace tot {

struct Provenance {
  enum class Kind { Raw, Augmented };
  Kind kind = Kind::Raw;
  double offset_s = 0.0;  // TOR shift that produced an augmented sample
};

// A 2 s feature window paired with the three component targets.
// `window` is row-major: rows = frames (oldest first), cols = feature_dim.
struct TrainingSample {
  std::vector<double> window;
  int rows = 0;
  int cols = 0;
  std::array<double, 3> targets{};  // t_eyes, t_foot, t_hands (seconds)
  Activity activity = Activity::NoSecondary;
  Provenance provenance;
  std::string event_id;

  double target_takeover_s() const;  // max of the three targets
};

// Number of augmentation offsets for an event: the largest k >= 0 such that
// k / frame_rate_hz <= t_max. Matches floor(t_max * fps) on the reals; the
// fixup keeps it exact when t_max sits within rounding error of the frame
// grid.
long max_offset_frames(const TakeoverEvent& event);

// The raw sample: the 2 s window ending at the TOR, targets unchanged.
TrainingSample make_raw_sample(const TakeoverEvent& event,
                               const FeatureMask& mask);

// One sample per frame-aligned offset k = 1 .. max_offset_frames(event).
// Each sample's window ends at TOR + k/fps and each target is
// max(original - k/fps, 0): a component already in position receives 0.
// The raw (offset 0) sample is not included. Throws DataFormatError naming
// the event if a window would read past the recorded span.
std::vector<TrainingSample> augment_event(const TakeoverEvent& event,
                                          const FeatureMask& mask);

// Raw samples for every event, plus all augmented samples when `augment`.
// Total count with augmentation = sum over events of 1 + max_offset_frames.
// Throws DataFormatError on duplicate event ids.
std::vector<TrainingSample> build_training_set(
    std::span<const TakeoverEvent> events, const FeatureMask& mask,
    bool augment, ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace tot
