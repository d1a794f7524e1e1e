#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tot/augment.hpp"
#include "tot/common.hpp"
#include "tot/event_io.hpp"
#include "tot/events.hpp"
#include "tot/split.hpp"
#include "tot/synth.hpp"

namespace {

namespace fs = std::filesystem;

// A degenerate but structurally valid event: correct frame count and
// timestamps, with the frame index planted in gaze slot 0 so window cuts
// are checkable. Frames deliberately skip probability normalization; the
// dataset pipeline treats frames as opaque payload.
tot::TakeoverEvent indexed_event(const std::string& id, double fps,
                                 double t_eyes, double t_foot,
                                 double t_hands) {
  tot::TakeoverEvent ev;
  ev.event_id = id;
  ev.activity = tot::Activity::Texting;
  ev.frame_rate_hz = fps;
  ev.t_eyes_s = t_eyes;
  ev.t_foot_s = t_foot;
  ev.t_hands_s = t_hands;
  const int total = ev.expected_frame_count();
  const int pre = ev.pre_tor_frames();
  ev.frames.resize(static_cast<size_t>(total));
  for (int i = 0; i < total; ++i) {
    ev.frames[static_cast<size_t>(i)].gaze.zone_probs[0] = i;
    ev.frames[static_cast<size_t>(i)].timestamp_s = (i - pre) / fps;
  }
  return ev;
}

// The count definition, transcribed directly: the largest k with
// k / fps <= t_max. Independent of the library's closed form.
long offsets_by_enumeration(double t_max, double fps) {
  long k = 0;
  while ((k + 1) / fps <= t_max) ++k;
  return k;
}

std::string temp_path(const std::string& name) {
  return (fs::temp_directory_path() / ("tot_dataset_test_" + name)).string();
}

std::string event_set_line(const tot::EventSet& set) {
  std::ostringstream os;
  tot::save_events(set, os);
  return os.str();
}

tot::SynthConfig small_synth(int total, std::uint64_t seed, double fps) {
  tot::SynthConfig cfg =
      tot::with_total_count(tot::default_synth_config(), total);
  cfg.seed = seed;
  cfg.frame_rate_hz = fps;
  return cfg;
}

}  // namespace

TEST_CASE("event geometry") {
  const tot::TakeoverEvent ev = indexed_event("e0", 30.0, 0.5, 0.7, 1.0);
  CHECK(ev.expected_frame_count() == 900);
  CHECK(ev.pre_tor_frames() == 600);
  CHECK(ev.window_frames() == 60);
  CHECK(ev.t_max_s() == 1.0);
  CHECK(ev.frames.front().timestamp_s == doctest::Approx(-20.0));
  CHECK(ev.frames[600].timestamp_s == doctest::Approx(0.0));
  CHECK(ev.frames.back().timestamp_s == doctest::Approx(10.0 - 1.0 / 30.0));
  CHECK(tot::validate_event(ev).empty());

  SUBCASE("frame count mismatch is flagged") {
    tot::TakeoverEvent bad = ev;
    bad.frames.pop_back();
    const auto problems = tot::validate_event(bad);
    REQUIRE_FALSE(problems.empty());
    CHECK(problems.front().find("frame count") != std::string::npos);
  }
  SUBCASE("component time past the recorded span is flagged") {
    tot::TakeoverEvent bad = ev;
    bad.t_hands_s = 10.5;
    CHECK_FALSE(tot::validate_event(bad).empty());
  }
  SUBCASE("negative component time is flagged") {
    tot::TakeoverEvent bad = ev;
    bad.t_foot_s = -0.1;
    CHECK_FALSE(tot::validate_event(bad).empty());
  }
  SUBCASE("off-grid timestamps are flagged") {
    tot::TakeoverEvent bad = ev;
    bad.frames[100].timestamp_s += 0.3;
    CHECK_FALSE(tot::validate_event(bad).empty());
  }
}

TEST_CASE("activity labels round-trip") {
  for (tot::Activity a : tot::all_activities()) {
    CHECK(tot::activity_from_string(tot::to_string(a)) == a);
  }
  CHECK(std::string(tot::to_string(tot::Activity::NoSecondary)) ==
        "no_secondary");
  CHECK_THROWS_AS(tot::activity_from_string("juggling"),
                  tot::DataFormatError);
}

TEST_CASE("offset count law at 30 Hz") {
  // Frozen values, worked out by hand on the reals: the largest k with
  // k/30 <= t_max. 4.1*30 rounds to 122.99999999999999 in double, so a
  // naive floor of the product would lose the grid-aligned offset 123.
  const struct {
    double t_max;
    long expect;
  } cases[] = {
      {0.0, 0},   {0.01, 0},  {1.0 / 30.0, 1}, {0.3, 9},  {17.0 / 30.0, 17},
      {0.57, 17}, {0.999, 29}, {1.0, 30},      {2.5, 75}, {4.1, 123},
      {8.2, 246}, {9.5, 285},
  };
  for (const auto& c : cases) {
    CAPTURE(c.t_max);
    const tot::TakeoverEvent ev =
        indexed_event("law", 30.0, 0.0, 0.0, c.t_max);
    CHECK(tot::max_offset_frames(ev) == c.expect);
    CHECK(tot::max_offset_frames(ev) == offsets_by_enumeration(c.t_max, 30.0));
  }
}

TEST_CASE("offset count law tracks the frame rate") {
  for (double fps : {10.0, 15.0, 30.0, 60.0}) {
    for (double t : {0.0, 0.05, 0.1, 0.26, 0.999, 1.0, 1.7, 3.3, 4.1, 7.9}) {
      CAPTURE(fps);
      CAPTURE(t);
      const tot::TakeoverEvent ev = indexed_event("law", fps, t, 0.0, 0.0);
      CHECK(tot::max_offset_frames(ev) == offsets_by_enumeration(t, fps));
    }
  }
}

TEST_CASE("raw sample cuts the window ending at the request") {
  const tot::TakeoverEvent ev = indexed_event("raw", 30.0, 1.0, 0.5, 2.0);
  const tot::TrainingSample s =
      tot::make_raw_sample(ev, tot::FeatureMask::only_gaze());
  CHECK(s.rows == 60);
  CHECK(s.cols == 8);
  CHECK(s.event_id == "raw");
  CHECK(s.provenance.kind == tot::Provenance::Kind::Raw);
  CHECK(s.targets == std::array<double, 3>{1.0, 0.5, 2.0});
  CHECK(s.target_takeover_s() == 2.0);
  // Rows are frames 540..599 (the 2 s ending at the TOR), oldest first.
  for (int r = 0; r < 60; ++r) {
    CHECK(s.window[static_cast<size_t>(r) * 8] == 540.0 + r);
  }
}

TEST_CASE("augmented samples shift the window and clamp the targets") {
  const tot::TakeoverEvent ev = indexed_event("aug", 30.0, 1.0, 0.5, 2.0);
  const auto samples = tot::augment_event(ev, tot::FeatureMask::only_gaze());
  REQUIRE(samples.size() == 60);  // floor(2.0 * 30) offsets

  const tot::TrainingSample& k15 = samples[14];  // offset 0.5 s
  CHECK(k15.provenance.kind == tot::Provenance::Kind::Augmented);
  CHECK(k15.provenance.offset_s == doctest::Approx(0.5));
  CHECK(k15.targets[0] == doctest::Approx(0.5));
  CHECK(k15.targets[1] == doctest::Approx(0.0));
  CHECK(k15.targets[2] == doctest::Approx(1.5));
  // Window slides right by 15 frames: rows are frames 555..614.
  CHECK(k15.window[0] == 555.0);
  CHECK(k15.window[59 * 8] == 614.0);

  const tot::TrainingSample& k30 = samples[29];  // offset 1.0 s
  CHECK(k30.targets[0] == doctest::Approx(0.0));  // eyes done exactly now
  CHECK(k30.targets[2] == doctest::Approx(1.0));

  // Every target stays non-negative out to the last offset.
  for (const auto& s : samples) {
    for (double t : s.targets) CHECK(t >= 0.0);
  }
}

TEST_CASE("training set size follows the per-event law") {
  std::vector<tot::TakeoverEvent> events;
  events.push_back(indexed_event("a", 30.0, 0.4, 0.6, 1.0));   // 30 offsets
  events.push_back(indexed_event("b", 30.0, 0.2, 0.3, 0.55));  // 16 offsets
  events.push_back(indexed_event("c", 30.0, 1.0, 1.5, 2.5));   // 75 offsets
  events.push_back(indexed_event("d", 30.0, 0.0, 0.0, 0.0));   // none

  long expect = 0;
  for (const auto& ev : events) {
    expect += 1 + offsets_by_enumeration(ev.t_max_s(), ev.frame_rate_hz);
  }
  CHECK(expect == 4 + 30 + 16 + 75);

  const auto with_aug = tot::build_training_set(
      events, tot::FeatureMask::all(), true, tot::ExecPolicy::Serial);
  CHECK(static_cast<long>(with_aug.size()) == expect);

  const auto raw_only = tot::build_training_set(
      events, tot::FeatureMask::all(), false, tot::ExecPolicy::Serial);
  CHECK(raw_only.size() == 4);
  for (const auto& s : raw_only) {
    CHECK(s.provenance.kind == tot::Provenance::Kind::Raw);
  }

  SUBCASE("samples stay grouped by event, raw first") {
    CHECK(with_aug[0].event_id == "a");
    CHECK(with_aug[0].provenance.kind == tot::Provenance::Kind::Raw);
    CHECK(with_aug[31].event_id == "b");
    CHECK(with_aug[31].provenance.kind == tot::Provenance::Kind::Raw);
  }
  SUBCASE("duplicate event ids are rejected") {
    events.push_back(indexed_event("a", 30.0, 0.1, 0.1, 0.1));
    CHECK_THROWS_AS(tot::build_training_set(events, tot::FeatureMask::all(),
                                            false, tot::ExecPolicy::Serial),
                    tot::DataFormatError);
  }
}

TEST_CASE("stratified splits") {
  // Fabricated frameless events are fine here: splitting only reads ids
  // and activities.
  const int counts[tot::kNumActivities] = {50, 30, 20, 40, 10, 20, 15, 15};
  tot::EventSet set;
  for (int a = 0; a < tot::kNumActivities; ++a) {
    for (int i = 0; i < counts[a]; ++i) {
      tot::TakeoverEvent ev;
      ev.event_id = std::string(tot::to_string(static_cast<tot::Activity>(a))) +
                    "-" + std::to_string(i);
      ev.activity = static_cast<tot::Activity>(a);
      set.events.push_back(std::move(ev));
    }
  }

  tot::SplitSpec spec;
  spec.seed = 7;
  const tot::EventSplits splits = tot::split_events(set, spec);

  const size_t total =
      splits.train.size() + splits.val.size() + splits.test.size();
  CHECK(total == 200);

  // Disjoint and exhaustive by event id.
  std::set<std::string> seen;
  for (const auto* part : {&splits.train, &splits.val, &splits.test}) {
    for (const auto& ev : *part) CHECK(seen.insert(ev.event_id).second);
  }
  CHECK(seen.size() == 200);

  // Largest-remainder apportionment keeps every activity within one event
  // of its ideal share in every split.
  for (int a = 0; a < tot::kNumActivities; ++a) {
    const auto count_in = [&](const std::vector<tot::TakeoverEvent>& part) {
      return std::count_if(part.begin(), part.end(), [&](const auto& ev) {
        return ev.activity == static_cast<tot::Activity>(a);
      });
    };
    CHECK(std::abs(count_in(splits.train) - 0.8 * counts[a]) < 1.0);
    CHECK(std::abs(count_in(splits.val) - 0.1 * counts[a]) < 1.0);
    CHECK(std::abs(count_in(splits.test) - 0.1 * counts[a]) < 1.0);
  }

  SUBCASE("same seed reproduces the split, different seed reorders it") {
    const tot::EventSplits again = tot::split_events(set, spec);
    REQUIRE(again.train.size() == splits.train.size());
    for (size_t i = 0; i < splits.train.size(); ++i) {
      CHECK(again.train[i].event_id == splits.train[i].event_id);
    }
    tot::SplitSpec other = spec;
    other.seed = 8;
    const tot::EventSplits different = tot::split_events(set, other);
    bool any_moved = false;
    for (size_t i = 0; i < splits.train.size(); ++i) {
      if (different.train[i].event_id != splits.train[i].event_id) {
        any_moved = true;
        break;
      }
    }
    CHECK(any_moved);
  }
  SUBCASE("bad ratios and empty sets are rejected") {
    tot::SplitSpec bad = spec;
    bad.val = 0.3;  // sums to 1.2
    CHECK_THROWS_AS(tot::split_events(set, bad), std::invalid_argument);
    CHECK_THROWS_AS(tot::split_events(tot::EventSet{}, spec),
                    std::invalid_argument);
  }
}

TEST_CASE("synthetic events are valid and reproducible") {
  const tot::SynthConfig cfg = small_synth(48, 123, 10.0);
  const tot::EventSet set =
      tot::synthesize_events(cfg, tot::ExecPolicy::Serial);
  REQUIRE(static_cast<int>(set.events.size()) == 48);

  std::set<std::string> ids;
  int per_activity[tot::kNumActivities] = {};
  for (const auto& ev : set.events) {
    CHECK(ids.insert(ev.event_id).second);
    ++per_activity[static_cast<int>(ev.activity)];
    const auto problems = tot::validate_event(ev);
    CAPTURE(ev.event_id);
    CHECK(problems.empty());
    for (const auto& frame : ev.frames) {
      const auto frame_problems = tot::validate_frame(frame);
      if (!frame_problems.empty()) {
        CAPTURE(frame_problems.front());
        REQUIRE(frame_problems.empty());
      }
    }
  }
  for (int a = 0; a < tot::kNumActivities; ++a) {
    CHECK(per_activity[a] == cfg.profiles[static_cast<size_t>(a)].count);
  }

  SUBCASE("same seed, same bytes") {
    const tot::EventSet again =
        tot::synthesize_events(cfg, tot::ExecPolicy::Serial);
    for (size_t i = 0; i < set.events.size(); ++i) {
      CHECK(std::memcmp(set.events[i].frames.data(),
                        again.events[i].frames.data(),
                        set.events[i].frames.size() *
                            sizeof(tot::FrameFeatures)) == 0);
    }
  }
  SUBCASE("different seed, different draws") {
    tot::SynthConfig other = cfg;
    other.seed = 124;
    const tot::EventSet different =
        tot::synthesize_events(other, tot::ExecPolicy::Serial);
    CHECK(different.events[0].t_hands_s != set.events[0].t_hands_s);
  }
}

TEST_CASE("slower take-overs look more distracted before the request") {
  const tot::SynthConfig cfg = small_synth(80, 5, 10.0);
  const tot::EventSet set =
      tot::synthesize_events(cfg, tot::ExecPolicy::Serial);

  // Mean forward-gaze probability over the final pre-TOR window.
  std::vector<std::pair<double, double>> by_t;  // (t_eyes, mean forward)
  for (const auto& ev : set.events) {
    const int pre = ev.pre_tor_frames();
    const int rows = ev.window_frames();
    double fwd = 0.0;
    for (int i = pre - rows; i < pre; ++i) {
      fwd += ev.frames[static_cast<size_t>(i)].gaze.zone_probs[tot::kGazeForward];
    }
    by_t.emplace_back(ev.t_eyes_s, fwd / rows);
  }
  std::sort(by_t.begin(), by_t.end());
  const size_t half = by_t.size() / 2;
  double low = 0.0, high = 0.0;
  for (size_t i = 0; i < half; ++i) low += by_t[i].second;
  for (size_t i = half; i < by_t.size(); ++i) high += by_t[i].second;
  low /= half;
  high /= static_cast<double>(by_t.size() - half);
  // Short eyes-on-road times must come with more on-road gaze.
  CHECK(low > high + 0.05);
}

TEST_CASE("activity counts rescale by largest remainder") {
  const tot::SynthConfig base = tot::default_synth_config();
  CHECK(base.total_count() == 1338);
  const int defaults[tot::kNumActivities] = {308, 182, 85, 262,
                                             42,  262, 97, 100};
  for (int a = 0; a < tot::kNumActivities; ++a) {
    CHECK(base.profiles[static_cast<size_t>(a)].count == defaults[a]);
  }

  // Identity at the same total.
  const tot::SynthConfig same = tot::with_total_count(base, 1338);
  for (int a = 0; a < tot::kNumActivities; ++a) {
    CHECK(same.profiles[static_cast<size_t>(a)].count == defaults[a]);
  }

  const tot::SynthConfig small = tot::with_total_count(base, 100);
  CHECK(small.total_count() == 100);
  for (int a = 0; a < tot::kNumActivities; ++a) {
    const double ideal = defaults[a] * 100.0 / 1338.0;
    CHECK(std::abs(small.profiles[static_cast<size_t>(a)].count - ideal) <
          1.0);
  }
  CHECK_THROWS_AS(tot::with_total_count(base, 0), std::invalid_argument);
}

TEST_CASE("synth config validation") {
  CHECK(tot::validate_synth_config(tot::default_synth_config()).empty());

  tot::SynthConfig bad = tot::default_synth_config();
  bad.profiles[static_cast<size_t>(tot::Activity::Reading)].t_hands.mean_s =
      0.5;  // now faster than no_secondary: ordering trend broken
  CHECK_FALSE(tot::validate_synth_config(bad).empty());

  // A zero count just skips the activity; negative counts are invalid.
  tot::SynthConfig zero = tot::default_synth_config();
  zero.profiles[0].count = 0;
  CHECK(tot::validate_synth_config(zero).empty());
  tot::SynthConfig negative = tot::default_synth_config();
  negative.profiles[0].count = -1;
  CHECK_FALSE(tot::validate_synth_config(negative).empty());
  CHECK_THROWS_AS(tot::synthesize_events(negative, tot::ExecPolicy::Serial),
                  std::invalid_argument);
}

TEST_CASE("readiness windows") {
  const tot::SynthConfig cfg = small_synth(12, 9, 10.0);
  const tot::EventSet set =
      tot::synthesize_events(cfg, tot::ExecPolicy::Serial);
  const tot::FeatureMask mask = tot::FeatureMask::all();

  const auto windows =
      tot::synthesize_ori_labels(set.events, mask, 42, /*stride_frames=*/20);
  // Per event: window ends run 30, 50, ..., 290 with rows=20 at 10 Hz.
  CHECK(windows.size() == 12 * 14);
  for (const auto& w : windows) {
    CHECK(w.rows == 20);
    CHECK(w.cols == 41);
    CHECK(w.label >= 0.0);
    CHECK(w.label <= 1.0);
  }
  CHECK(windows[0].window_end_s == doctest::Approx(-17.0));
  CHECK(windows[1].window_end_s == doctest::Approx(-15.0));

  const auto again =
      tot::synthesize_ori_labels(set.events, mask, 42, 20);
  for (size_t i = 0; i < windows.size(); ++i) {
    CHECK(windows[i].label == again[i].label);
  }
  const auto reseeded =
      tot::synthesize_ori_labels(set.events, mask, 43, 20);
  bool any_differs = false;
  for (size_t i = 0; i < windows.size(); ++i) {
    if (windows[i].label != reseeded[i].label) {
      any_differs = true;
      break;
    }
  }
  CHECK(any_differs);

  CHECK_THROWS_AS(tot::synthesize_ori_labels(set.events, mask, 42, 0),
                  std::invalid_argument);
}

TEST_CASE("event files round-trip losslessly") {
  const tot::SynthConfig cfg = small_synth(6, 31, 10.0);
  const tot::EventSet set =
      tot::synthesize_events(cfg, tot::ExecPolicy::Serial);

  const std::string path = temp_path("roundtrip.jsonl");
  tot::save_events(set, path);
  const tot::EventSet loaded = tot::load_events(path);
  fs::remove(path);

  REQUIRE(loaded.events.size() == set.events.size());
  for (size_t i = 0; i < set.events.size(); ++i) {
    const auto& a = set.events[i];
    const auto& b = loaded.events[i];
    CHECK(a.event_id == b.event_id);
    CHECK(a.activity == b.activity);
    CHECK(a.frame_rate_hz == b.frame_rate_hz);
    CHECK(a.t_eyes_s == b.t_eyes_s);  // bitwise: shortest round-trip floats
    CHECK(a.t_foot_s == b.t_foot_s);
    CHECK(a.t_hands_s == b.t_hands_s);
    REQUIRE(a.frames.size() == b.frames.size());
    CHECK(std::memcmp(a.frames.data(), b.frames.data(),
                      a.frames.size() * sizeof(tot::FrameFeatures)) == 0);
  }

  SUBCASE("saving never leaves a partial file behind") {
    CHECK_FALSE(fs::exists(path + ".tmp"));
  }
}

TEST_CASE("event file parse errors name the line") {
  tot::EventSet one;
  one.events = tot::synthesize_events(small_synth(8, 2, 5.0),
                                      tot::ExecPolicy::Serial)
                   .events;
  one.events.resize(1);
  const std::string good = event_set_line(one);

  const auto load_text = [](const std::string& text) {
    std::istringstream is(text);
    return tot::load_events(is);
  };
  const auto error_of = [&](const std::string& text) -> std::string {
    try {
      load_text(text);
    } catch (const tot::DataFormatError& e) {
      return e.what();
    }
    return "";
  };

  CHECK(load_text(good).events.size() == 1);
  CHECK(load_text("\n\n" + good + "\n").events.size() == 1);

  SUBCASE("truncated JSON") {
    const std::string msg = error_of(good + good.substr(0, 40) + "\n");
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("not valid JSON") != std::string::npos);
  }
  SUBCASE("not an object") {
    CHECK(error_of("[1,2,3]\n").find("line 1") != std::string::npos);
  }
  SUBCASE("missing field") {
    std::string broken = good;
    const auto pos = broken.find("t_eyes_s");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, 8, "t_ears_s");
    CHECK(error_of(broken).find("t_eyes_s") != std::string::npos);
  }
  SUBCASE("unknown activity") {
    std::string broken = good;
    const std::string key = "\"activity\":\"no_secondary\"";
    const auto pos = broken.find(key);
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, key.size(), "\"activity\":\"juggling\"");
    const std::string msg = error_of(broken);
    CHECK(msg.find("unknown activity") != std::string::npos);
    CHECK(msg.find("line 1") != std::string::npos);
  }
  SUBCASE("frame with the wrong arity") {
    std::string broken = good;
    const auto pos = broken.find("\"frames\":[[");
    REQUIRE(pos != std::string::npos);
    // Drop the first number of the first frame row.
    const auto comma = broken.find(',', pos + 11);
    broken.erase(pos + 11, comma - (pos + 11) + 1);
    const std::string msg = error_of(broken);
    CHECK(msg.find("frame 0") != std::string::npos);
    CHECK(msg.find("42") != std::string::npos);
  }
  SUBCASE("event violating its own geometry") {
    std::string broken = good;
    const auto pos = broken.find("\"t_hands_s\":");
    REQUIRE(pos != std::string::npos);
    broken.replace(pos, 12, "\"t_hands_s\":99 ,\"ignored\":");
    const std::string msg = error_of(broken);
    CHECK(msg.find("post-TOR") != std::string::npos);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(tot::load_events(temp_path("absent.jsonl")),
                    tot::DataFormatError);
  }
}

TEST_CASE("synth config files round-trip") {
  tot::SynthConfig cfg = small_synth(64, 77, 15.0);
  cfg.emission_noise = 0.19;
  cfg.profiles[3].gaze_offroad_zone = tot::kGazeInfotainment;

  const std::string text = tot::synth_config_to_json(cfg);
  const tot::SynthConfig back = tot::synth_config_from_json(text);
  CHECK(back.seed == cfg.seed);
  CHECK(back.frame_rate_hz == cfg.frame_rate_hz);
  CHECK(back.emission_noise == cfg.emission_noise);
  CHECK(back.eyes_coupling.lo_s == cfg.eyes_coupling.lo_s);
  CHECK(back.hands_coupling.hi_s == cfg.hands_coupling.hi_s);
  for (int a = 0; a < tot::kNumActivities; ++a) {
    const auto& p = cfg.profiles[static_cast<size_t>(a)];
    const auto& q = back.profiles[static_cast<size_t>(a)];
    CHECK(p.count == q.count);
    CHECK(p.t_eyes.mean_s == q.t_eyes.mean_s);
    CHECK(p.t_hands.spread_s == q.t_hands.spread_s);
    CHECK(p.gaze_offroad_zone == q.gaze_offroad_zone);
    CHECK(p.hand_distracted_state == q.hand_distracted_state);
    CHECK(p.held_object == q.held_object);
  }

  const std::string path = temp_path("synth.json");
  tot::save_synth_config(cfg, path);
  const tot::SynthConfig from_file = tot::load_synth_config(path);
  fs::remove(path);
  CHECK(from_file.profiles[3].gaze_offroad_zone == tot::kGazeInfotainment);

  CHECK_THROWS_AS(tot::synth_config_from_json("{"), tot::DataFormatError);
  CHECK_THROWS_AS(tot::synth_config_from_json("{\"seed\": 1}"),
                  tot::DataFormatError);
}
