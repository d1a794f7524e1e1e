#include "tot/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace tot {

double TimeToIntensity::intensity(double t_s) const {
  return std::clamp((t_s - lo_s) / (hi_s - lo_s), 0.0, 1.0);
}

int SynthConfig::total_count() const {
  int total = 0;
  for (const auto& p : profiles) total += p.count;
  return total;
}

SynthConfig default_synth_config() {
  SynthConfig cfg;
  auto& p = cfg.profiles;
  //                         count  eyes          foot          hands
  p[0] = ActivityProfile{308, {0.45, 0.15}, {0.70, 0.20}, {1.10, 0.35},
                         kGazeSpeedometer, kHandOnLap, kObjectNone};
  p[1] = ActivityProfile{182, {0.55, 0.18}, {0.85, 0.25}, {1.40, 0.45},
                         kGazeOverShoulder, kHandInAir, kObjectNone};
  p[2] = ActivityProfile{85, {0.65, 0.20}, {0.90, 0.25}, {1.30, 0.40},
                         kGazeLap, kHandOnLap, kObjectNone};
  p[3] = ActivityProfile{262, {1.10, 0.35}, {1.50, 0.45}, {2.80, 0.80},
                         kGazeLap, kHandInAir, kObjectPhone};
  p[4] = ActivityProfile{42, {0.95, 0.30}, {1.40, 0.40}, {2.60, 0.75},
                         kGazeLap, kHandInAir, kObjectPhone};
  p[5] = ActivityProfile{262, {0.70, 0.22}, {1.00, 0.30}, {1.60, 0.50},
                         kGazeInfotainment, kHandInfotainment, kObjectNone};
  p[6] = ActivityProfile{97, {1.05, 0.33}, {1.50, 0.45}, {2.70, 0.80},
                         kGazeLap, kHandInAir, kObjectOther};
  p[7] = ActivityProfile{100, {1.20, 0.38}, {1.60, 0.50}, {3.00, 0.90},
                         kGazeLap, kHandInAir, kObjectBook};
  return cfg;
}

SynthConfig with_total_count(SynthConfig cfg, int total) {
  if (total <= 0) throw std::invalid_argument("total event count must be > 0");
  const int base = cfg.total_count();
  if (base <= 0) throw std::invalid_argument("config has no events to scale");
  std::array<double, kNumActivities> frac{};
  int assigned = 0;
  for (int i = 0; i < kNumActivities; ++i) {
    const double ideal =
        static_cast<double>(cfg.profiles[i].count) * total / base;
    cfg.profiles[i].count = static_cast<int>(std::floor(ideal));
    frac[i] = ideal - std::floor(ideal);
    assigned += cfg.profiles[i].count;
  }
  std::array<int, kNumActivities> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return frac[a] > frac[b]; });
  for (int i = 0; assigned < total; ++i, ++assigned) {
    ++cfg.profiles[order[static_cast<size_t>(i % kNumActivities)]].count;
  }
  return cfg;
}

std::vector<std::string> validate_synth_config(const SynthConfig& cfg) {
  std::vector<std::string> violations;
  if (!(cfg.frame_rate_hz > 0)) {
    violations.push_back("frame_rate_hz must be positive");
  }
  if (cfg.total_count() <= 0) {
    violations.push_back("config generates no events (all counts are zero)");
  }
  for (int i = 0; i < kNumActivities; ++i) {
    const auto& p = cfg.profiles[i];
    if (p.count < 0) {
      std::ostringstream os;
      os << "activity " << to_string(static_cast<Activity>(i)) << ": count "
         << p.count << " must be >= 0";
      violations.push_back(os.str());
    }
    for (const auto* t : {&p.t_eyes, &p.t_foot, &p.t_hands}) {
      if (!(t->mean_s > 0) || !(t->spread_s >= 0)) {
        std::ostringstream os;
        os << "activity " << to_string(static_cast<Activity>(i))
           << ": time stats must have mean > 0 and spread >= 0";
        violations.push_back(os.str());
        break;
      }
    }
  }
  // Take-over-time ordering trend: the four motor-demanding activities are
  // slower than the attentive / talking / infotainment ones.
  const Activity slow[] = {Activity::Texting, Activity::PhoneCall,
                           Activity::CountingCoins, Activity::Reading};
  const Activity fast[] = {Activity::NoSecondary, Activity::Talking,
                           Activity::Infotainment};
  auto tot_proxy = [&](Activity a) {
    const auto& p = cfg.profiles[static_cast<int>(a)];
    return std::max({p.t_eyes.mean_s, p.t_foot.mean_s, p.t_hands.mean_s});
  };
  for (Activity s : slow) {
    for (Activity f : fast) {
      if (!(tot_proxy(s) > tot_proxy(f))) {
        std::ostringstream os;
        os << "time ordering trend violated: " << to_string(s)
           << " mean take-over proxy " << tot_proxy(s)
           << " must exceed " << to_string(f) << " (" << tot_proxy(f) << ")";
        violations.push_back(os.str());
      }
    }
  }
  return violations;
}

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over seed ^ index stream position
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Multiplies each base probability by exp(noise * N(0,1)) and renormalizes.
template <size_t N>
void emit_categorical(const std::array<double, N>& base, double noise,
                      std::mt19937_64& rng, std::normal_distribution<>& gauss,
                      std::array<double, N>& out) {
  double sum = 0.0;
  for (size_t i = 0; i < N; ++i) {
    out[i] = std::max(base[i], 1e-4) * std::exp(noise * gauss(rng));
    sum += out[i];
  }
  for (size_t i = 0; i < N; ++i) out[i] /= sum;
}

struct LatentState {
  double eyes, foot, hands;  // base intensities in [0,1]
};

FrameFeatures emit_frame(const ActivityProfile& prof, const LatentState& d,
                         const TakeoverEvent& ev, double tau_s, double noise,
                         std::mt19937_64& rng,
                         std::normal_distribution<>& gauss) {
  const double eg = latent_intensity(d.eyes, ev.t_eyes_s, tau_s);
  const double ef = latent_intensity(d.foot, ev.t_foot_s, tau_s);
  const double eh = latent_intensity(d.hands, ev.t_hands_s, tau_s);
  const double eh_left = 0.7 * eh;

  FrameFeatures f;
  f.timestamp_s = tau_s;

  // Gaze: forward unless distracted toward the activity's off-road zone.
  {
    std::array<double, kGazeDim> base{};
    const double off = 0.88 * eg;
    base.fill((0.08 + 0.2 * off) / (kGazeDim - 2));
    base[kGazeForward] = 0.92 - off;
    base[static_cast<size_t>(prof.gaze_offroad_zone)] += 0.8 * off;
    emit_categorical(base, noise, rng, gauss, f.gaze.zone_probs);
  }

  // Hands: on wheel when ready, otherwise in the activity's state.
  auto hand_base = [&](double e) {
    std::array<double, 6> base{};
    const double off = 0.9 * e;
    base.fill((0.06 + 0.2 * off) / 4);
    base[kHandOnWheel] = 0.94 - off;
    base[static_cast<size_t>(prof.hand_distracted_state)] += 0.8 * off;
    return base;
  };
  emit_categorical(hand_base(eh_left), noise, rng, gauss,
                   f.hands.activity_probs_left);
  emit_categorical(hand_base(eh), noise, rng, gauss,
                   f.hands.activity_probs_right);

  // Held objects: tied to the hand component's recovery.
  auto object_base = [&](double e) {
    std::array<double, 7> base{};
    double held = prof.held_object == kObjectNone ? 0.0 : 0.12 + 0.8 * e;
    base.fill(0.03 / 5);
    base[kObjectNone] = 0.97 - held;
    if (prof.held_object != kObjectNone) {
      base[static_cast<size_t>(prof.held_object)] += held;
    }
    return base;
  };
  emit_categorical(object_base(eh), noise, rng, gauss,
                   f.objects.object_probs_right);
  emit_categorical(object_base(0.3 * eh), noise, rng, gauss,
                   f.objects.object_probs_left);

  // Wrist-to-wheel distances grow with hand distraction.
  f.stereo.dist_right_m = std::max(0.0, 0.03 + 0.55 * eh + 0.03 * gauss(rng));
  f.stereo.dist_left_m =
      std::max(0.0, 0.03 + 0.45 * eh_left + 0.03 * gauss(rng));

  // Foot: blend between a ready (on-pedal) and a distracted (away) profile.
  {
    const std::array<double, kFootDim> ready{0.02, 0.18, 0.50, 0.10, 0.20};
    const std::array<double, kFootDim> away{0.70, 0.02, 0.03, 0.10, 0.15};
    std::array<double, kFootDim> base{};
    for (int i = 0; i < kFootDim; ++i) {
      base[static_cast<size_t>(i)] = ef * away[static_cast<size_t>(i)] +
                                     (1.0 - ef) * ready[static_cast<size_t>(i)];
    }
    emit_categorical(base, noise, rng, gauss, f.foot.activity_probs);
  }
  return f;
}

}  // namespace

double latent_intensity(double base_intensity, double component_time_s,
                        double tau_s) {
  if (tau_s < 0.0) return base_intensity;
  if (component_time_s <= 0.0 || tau_s >= component_time_s) return 0.0;
  return base_intensity * (1.0 - tau_s / component_time_s);
}

EventSet synthesize_events(const SynthConfig& cfg, ExecPolicy policy) {
  if (auto violations = validate_synth_config(cfg); !violations.empty()) {
    std::string msg = "invalid synth config:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw std::invalid_argument(msg);
  }

  // Assign (activity, index) per global event up front so generation is
  // independent per event.
  struct Slot {
    Activity activity;
  };
  std::vector<Slot> slots;
  slots.reserve(static_cast<size_t>(cfg.total_count()));
  for (int a = 0; a < kNumActivities; ++a) {
    for (int i = 0; i < cfg.profiles[static_cast<size_t>(a)].count; ++i) {
      slots.push_back({static_cast<Activity>(a)});
    }
  }

  EventSet out;
  out.events.resize(slots.size());
  const auto n = static_cast<long>(slots.size());
  const double fps = cfg.frame_rate_hz;
  const double min_time = 1.5 / fps;
  const double max_time = 0.95 * kPostTorSpanS;

  const bool parallel = policy == ExecPolicy::Parallel;
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
  for (long gi = 0; gi < n; ++gi) {
    const auto idx = static_cast<size_t>(gi);
    const auto& prof = cfg.profiles[static_cast<int>(slots[idx].activity)];
    std::mt19937_64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(gi)));
    std::normal_distribution<> gauss(0.0, 1.0);

    TakeoverEvent ev;
    {
      std::ostringstream os;
      os << "ev-" << std::setw(6) << std::setfill('0') << gi << '-'
         << to_string(slots[idx].activity);
      ev.event_id = os.str();
    }
    ev.activity = slots[idx].activity;
    ev.frame_rate_hz = fps;
    auto draw_time = [&](const ComponentTimeStats& st) {
      return std::clamp(st.mean_s + st.spread_s * gauss(rng), min_time,
                        max_time);
    };
    ev.t_eyes_s = draw_time(prof.t_eyes);
    ev.t_foot_s = draw_time(prof.t_foot);
    ev.t_hands_s = draw_time(prof.t_hands);

    const LatentState d{cfg.eyes_coupling.intensity(ev.t_eyes_s),
                        cfg.foot_coupling.intensity(ev.t_foot_s),
                        cfg.hands_coupling.intensity(ev.t_hands_s)};

    const int total = ev.expected_frame_count();
    const int pre = ev.pre_tor_frames();
    ev.frames.reserve(static_cast<size_t>(total));
    for (int i = 0; i < total; ++i) {
      const double tau = (i - pre) / fps;
      ev.frames.push_back(
          emit_frame(prof, d, ev, tau, cfg.emission_noise, rng, gauss));
    }
    out.events[idx] = std::move(ev);
  }
  return out;
}

std::vector<OriSample> synthesize_ori_labels(
    std::span<const TakeoverEvent> events, const FeatureMask& mask,
    std::uint64_t seed, int stride_frames, const OriCouplings& couplings) {
  if (stride_frames < 1) {
    throw std::invalid_argument("stride_frames must be >= 1");
  }
  const int cols = feature_dim(mask);
  std::vector<OriSample> out;
  std::uint64_t window_index = 0;
  for (const auto& ev : events) {
    const int rows = ev.window_frames();
    const int total = static_cast<int>(ev.frames.size());
    const int pre = ev.pre_tor_frames();
    const LatentState d{couplings.eyes.intensity(ev.t_eyes_s),
                        couplings.foot.intensity(ev.t_foot_s),
                        couplings.hands.intensity(ev.t_hands_s)};
    // Skip the first second so every window has settled emissions.
    for (int end = rows + static_cast<int>(std::lround(ev.frame_rate_hz));
         end <= total; end += stride_frames, ++window_index) {
      OriSample s;
      s.rows = rows;
      s.cols = cols;
      s.window.resize(static_cast<size_t>(rows) * cols);
      double distraction = 0.0;
      for (int r = 0; r < rows; ++r) {
        const int fi = end - rows + r;
        flatten_into(ev.frames[static_cast<size_t>(fi)], mask,
                     s.window.data() + static_cast<size_t>(r) * cols);
        const double tau = (fi - pre) / ev.frame_rate_hz;
        distraction += (latent_intensity(d.eyes, ev.t_eyes_s, tau) +
                        latent_intensity(d.foot, ev.t_foot_s, tau) +
                        latent_intensity(d.hands, ev.t_hands_s, tau)) /
                       3.0;
      }
      distraction /= rows;
      std::mt19937_64 rng(mix_seed(seed ^ 0x5c5c5c5c5c5c5c5cULL, window_index));
      std::normal_distribution<> rater(0.0, 0.02);
      s.label = std::clamp(1.0 - distraction + rater(rng), 0.0, 1.0);
      s.event_id = ev.event_id;
      s.window_end_s = (end - pre) / ev.frame_rate_hz;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace tot
