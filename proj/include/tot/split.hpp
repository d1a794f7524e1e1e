#pragma once

#include <vector>

#include "tot/events.hpp"

namespace tot {

struct EventSplits {
  std::vector<TakeoverEvent> train;
  std::vector<TakeoverEvent> val;
  std::vector<TakeoverEvent> test;
};

// Deterministic, seeded, stratified by activity: each activity's events are
// shuffled and apportioned by largest remainder, so per-activity proportions
// stay within one event of the global ratios and every split covers all
// activities when counts permit. Splits are disjoint by event_id.
// Throws std::invalid_argument on an empty event set or ratios that do not
// sum to 1.
EventSplits split_events(const EventSet& events, const SplitSpec& spec);

}  // namespace tot
