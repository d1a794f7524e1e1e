#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tot/common.hpp"
#include "tot/events.hpp"
#include "tot/features.hpp"

namespace tot {

struct ComponentTimeStats {
  double mean_s = 1.0;
  double spread_s = 0.3;
};

// Per-activity generator parameters: how many events, how long each
// component takes, and which off-nominal states the activity occupies
// before the take-over request.
struct ActivityProfile {
  int count = 0;
  ComponentTimeStats t_eyes;
  ComponentTimeStats t_foot;
  ComponentTimeStats t_hands;
  int gaze_offroad_zone = kGazeLap;
  int hand_distracted_state = kHandOnLap;
  int held_object = kObjectNone;
};

// Maps a component time onto a latent distraction intensity in [0,1]:
// intensity = clamp((t - lo_s) / (hi_s - lo_s), 0, 1). Feature streams are
// emitted from the intensity, so longer take-over components look more
// distracted and the targets are recoverable from the features.
struct TimeToIntensity {
  double lo_s = 0.2;
  double hi_s = 3.0;
  double intensity(double t_s) const;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  double frame_rate_hz = kDefaultFrameRateHz;
  std::array<ActivityProfile, kNumActivities> profiles;
  TimeToIntensity eyes_coupling{0.2, 2.0};
  TimeToIntensity foot_coupling{0.3, 2.6};
  TimeToIntensity hands_coupling{0.4, 4.5};
  double emission_noise = 0.25;  // per-frame multiplicative jitter scale

  int total_count() const;
};

// Defaults: study-frequency event counts per activity and component-time
// means where texting / phone call / counting coins / reading take longer
// than the attentive, talking and infotainment activities, and
// hands-on-wheel is the slowest component.
SynthConfig default_synth_config();

// Rescales every activity count proportionally (largest remainder) so the
// total equals `total`. Time parameters are untouched.
SynthConfig with_total_count(SynthConfig cfg, int total);

// One message per violated config invariant (non-positive counts, ordering
// trend between slow and fast activities); empty means valid.
std::vector<std::string> validate_synth_config(const SynthConfig& cfg);

// Deterministic given cfg.seed; events are generated independently per
// index, so generation parallelizes across events. Component times are
// drawn per activity; streams match the activity before the TOR and
// transition to eyes-forward / hands-on-wheel / foot-on-pedal signatures at
// the respective ground-truth times. Every emitted frame passes
// validate_frame. Throws std::invalid_argument on an invalid config.
EventSet synthesize_events(const SynthConfig& cfg,
                           ExecPolicy policy = ExecPolicy::Parallel);

// A 2 s window with a simulated observable-readiness label in [0,1].
struct OriSample {
  std::vector<double> window;  // row-major, rows x cols
  int rows = 0;
  int cols = 0;
  double label = 0.0;
  std::string event_id;
  double window_end_s = 0.0;  // relative to the TOR
};

// Readiness couplings used when reconstructing latent intensity from an
// event's annotated times.
struct OriCouplings {
  TimeToIntensity eyes{0.2, 2.0};
  TimeToIntensity foot{0.3, 2.6};
  TimeToIntensity hands{0.4, 4.5};
};

// Emits one window per `stride_frames` across each event's recorded span.
// The label is 1 minus the mean latent distraction over the window's
// frames (monotonically decreasing in distraction), plus small seeded rater
// noise, clamped to [0,1].
std::vector<OriSample> synthesize_ori_labels(
    std::span<const TakeoverEvent> events, const FeatureMask& mask,
    std::uint64_t seed, int stride_frames = 30,
    const OriCouplings& couplings = {});

// Latent distraction intensity of component c (0=eyes,1=foot,2=hands) at
// time tau relative to the TOR, for an event with the given annotated time:
// constant before the TOR, ramping linearly to zero at the component time.
double latent_intensity(double base_intensity, double component_time_s,
                        double tau_s);

}  // namespace tot
