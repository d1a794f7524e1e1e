#include "tot/augment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace tot {

double TrainingSample::target_takeover_s() const {
  return *std::max_element(targets.begin(), targets.end());
}

long max_offset_frames(const TakeoverEvent& event) {
  const double fps = event.frame_rate_hz;
  const double t_max = event.t_max_s();
  long k = static_cast<long>(std::floor(t_max * fps));
  while (k > 0 && k / fps > t_max) --k;
  while ((k + 1) / fps <= t_max) ++k;
  return k;
}

namespace {

// Window of `window_frames` rows ending just before frame `end` (exclusive).
TrainingSample cut_window(const TakeoverEvent& event, const FeatureMask& mask,
                          int end) {
  const int rows = event.window_frames();
  const int cols = feature_dim(mask);
  TrainingSample s;
  s.rows = rows;
  s.cols = cols;
  s.window.resize(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    flatten_into(event.frames[static_cast<size_t>(end - rows + r)], mask,
                 s.window.data() + static_cast<size_t>(r) * cols);
  }
  s.activity = event.activity;
  s.event_id = event.event_id;
  return s;
}

}  // namespace

TrainingSample make_raw_sample(const TakeoverEvent& event,
                               const FeatureMask& mask) {
  TrainingSample s = cut_window(event, mask, event.pre_tor_frames());
  s.targets = {event.t_eyes_s, event.t_foot_s, event.t_hands_s};
  s.provenance = {Provenance::Kind::Raw, 0.0};
  return s;
}

std::vector<TrainingSample> augment_event(const TakeoverEvent& event,
                                          const FeatureMask& mask) {
  const long k_max = max_offset_frames(event);
  std::vector<TrainingSample> out;
  if (k_max <= 0) return out;

  const int pre = event.pre_tor_frames();
  if (pre + k_max > static_cast<long>(event.frames.size())) {
    std::ostringstream os;
    os << "event '" << event.event_id << "': augmentation offset "
       << k_max / event.frame_rate_hz << " s needs frames past the recorded "
       << kPostTorSpanS << " s post-TOR span";
    throw DataFormatError(os.str());
  }

  out.reserve(static_cast<size_t>(k_max));
  for (long k = 1; k <= k_max; ++k) {
    const double offset_s = k / event.frame_rate_hz;
    TrainingSample s = cut_window(event, mask, pre + static_cast<int>(k));
    s.targets = {std::max(event.t_eyes_s - offset_s, 0.0),
                 std::max(event.t_foot_s - offset_s, 0.0),
                 std::max(event.t_hands_s - offset_s, 0.0)};
    s.provenance = {Provenance::Kind::Augmented, offset_s};
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<TrainingSample> build_training_set(
    std::span<const TakeoverEvent> events, const FeatureMask& mask,
    bool augment, ExecPolicy policy) {
  {
    std::unordered_set<std::string> seen;
    for (const auto& e : events) {
      if (!seen.insert(e.event_id).second) {
        throw DataFormatError("duplicate event_id '" + e.event_id + "'");
      }
    }
  }

  const auto n = static_cast<long>(events.size());
  std::vector<std::vector<TrainingSample>> per_event(events.size());

  // Exceptions must not escape the parallel region; capture the first one.
  std::exception_ptr error;
  const bool parallel = policy == ExecPolicy::Parallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      auto& bucket = per_event[static_cast<size_t>(i)];
      bucket.push_back(make_raw_sample(events[static_cast<size_t>(i)], mask));
      if (augment) {
        auto extra = augment_event(events[static_cast<size_t>(i)], mask);
        bucket.insert(bucket.end(), std::make_move_iterator(extra.begin()),
                      std::make_move_iterator(extra.end()));
      }
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<TrainingSample> out;
  size_t total = 0;
  for (const auto& bucket : per_event) total += bucket.size();
  out.reserve(total);
  for (auto& bucket : per_event) {
    out.insert(out.end(), std::make_move_iterator(bucket.begin()),
               std::make_move_iterator(bucket.end()));
  }
  return out;
}

}  // namespace tot
