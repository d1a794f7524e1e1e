#include "tot/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace tot {

EventSplits split_events(const EventSet& events, const SplitSpec& spec) {
  if (events.events.empty()) {
    throw std::invalid_argument("cannot split an empty event set");
  }
  const std::array<double, 3> ratios{spec.train, spec.val, spec.test};
  for (double r : ratios) {
    if (!(r >= 0.0) || r > 1.0) {
      throw std::invalid_argument("split ratios must lie in [0,1]");
    }
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }

  // Bucket event indices by activity, preserving input order.
  std::array<std::vector<size_t>, kNumActivities> buckets;
  for (size_t i = 0; i < events.events.size(); ++i) {
    buckets[static_cast<int>(events.events[i].activity)].push_back(i);
  }

  std::mt19937_64 rng(spec.seed);
  EventSplits out;
  std::array<std::vector<TakeoverEvent>*, 3> dests{&out.train, &out.val,
                                                   &out.test};
  for (auto& bucket : buckets) {
    std::shuffle(bucket.begin(), bucket.end(), rng);
    const auto n = bucket.size();
    if (n == 0) continue;

    // Largest-remainder apportionment within the activity.
    std::array<size_t, 3> take{};
    std::array<double, 3> frac{};
    size_t assigned = 0;
    for (int s = 0; s < 3; ++s) {
      const double ideal = ratios[s] * static_cast<double>(n);
      take[s] = static_cast<size_t>(std::floor(ideal));
      frac[s] = ideal - std::floor(ideal);
      assigned += take[s];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (int i = 0; assigned < n; ++i) {
      ++take[order[static_cast<size_t>(i % 3)]];
      ++assigned;
    }

    size_t pos = 0;
    for (int s = 0; s < 3; ++s) {
      for (size_t i = 0; i < take[s]; ++i, ++pos) {
        dests[s]->push_back(events.events[bucket[pos]]);
      }
    }
  }
  return out;
}

}  // namespace tot
