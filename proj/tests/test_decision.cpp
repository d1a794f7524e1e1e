#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "tot/common.hpp"
#include "tot/decision.hpp"
#include "tot/events.hpp"
#include "tot/model.hpp"

namespace {

tot::FrameFeatures plain_frame(double t) {
  tot::FrameFeatures f;
  f.gaze.zone_probs[tot::kGazeForward] = 1.0;
  f.hands.activity_probs_left[tot::kHandOnWheel] = 1.0;
  f.hands.activity_probs_right[tot::kHandOnWheel] = 1.0;
  f.objects.object_probs_left[tot::kObjectNone] = 1.0;
  f.objects.object_probs_right[tot::kObjectNone] = 1.0;
  f.stereo.dist_left_m = 0.04 + 0.01 * std::sin(t);
  f.stereo.dist_right_m = 0.05;
  f.foot.activity_probs[tot::kFootOnGas] = 1.0;
  f.timestamp_s = t;
  return f;
}

std::vector<tot::FrameFeatures> plain_stream(int n) {
  std::vector<tot::FrameFeatures> frames;
  frames.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    frames.push_back(plain_frame(static_cast<double>(i) / 30.0));
  }
  return frames;
}

tot::Prediction mm_pred(std::vector<double> times, std::vector<double> probs) {
  tot::Prediction p;
  p.mode_times = std::move(times);
  p.mode_probs = std::move(probs);
  p.times = p.mode(p.most_probable_mode());
  return p;
}

tot::Model tiny_model(tot::Variant variant) {
  tot::ModelConfig mc;
  mc.variant = variant;
  mc.input_dim = tot::feature_dim(tot::FeatureMask::only_foot());
  mc.hidden_dim = 3;
  mc.seed = 21;
  return tot::make_tot_model(mc, tot::FeatureMask::only_foot());
}

}  // namespace

TEST_CASE("handover criterion") {
  SUBCASE("clear margins") {
    const tot::Decision go = tot::decide(1.0, 2.0, 0.5);
    CHECK(go.verdict == tot::Verdict::HandOver);
    CHECK(go.tot_s == 1.0);
    CHECK(go.ttc_s == 2.0);
    CHECK(go.epsilon_s == 0.5);
    CHECK(go.margin_s == doctest::Approx(0.5).epsilon(1e-15));

    const tot::Decision stop = tot::decide(3.0, 2.0, 0.5);
    CHECK(stop.verdict == tot::Verdict::SafeStop);
    CHECK(stop.margin_s == doctest::Approx(-1.5).epsilon(1e-15));
  }
  SUBCASE("the boundary goes to the safe side") {
    // tot + eps == ttc exactly: not strictly better, so SafeStop.
    const tot::Decision d = tot::decide(1.5, 2.0, 0.5);
    CHECK(d.verdict == tot::Verdict::SafeStop);
    CHECK(d.margin_s == 0.0);
    CHECK(tot::decide(2.0, 2.0, 0.0).verdict == tot::Verdict::SafeStop);
  }
  SUBCASE("zero margin parameter is allowed") {
    CHECK(tot::decide(1.9, 2.0, 0.0).verdict == tot::Verdict::HandOver);
  }
  SUBCASE("default margin") { CHECK(tot::kDefaultEpsilonS == 0.5); }
  SUBCASE("verdict names") {
    CHECK(std::strcmp(tot::to_string(tot::Verdict::HandOver), "hand_over") == 0);
    CHECK(std::strcmp(tot::to_string(tot::Verdict::SafeStop), "safe_stop") == 0);
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(tot::decide(1.0, 0.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tot::decide(1.0, -2.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(tot::decide(1.0, 2.0, -0.1), std::invalid_argument);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(tot::decide(nan, 2.0, 0.5), tot::NumericError);
    CHECK_THROWS_AS(tot::decide(1.0, inf, 0.5), tot::NumericError);
    CHECK_THROWS_AS(tot::decide(1.0, 2.0, -inf), tot::NumericError);
  }
}

TEST_CASE("handover criterion is monotone in every argument") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> time(0.0, 6.0);
  std::uniform_real_distribution<double> pos(0.05, 6.0);
  int handovers = 0;
  for (int i = 0; i < 2000; ++i) {
    const double tot = time(rng);
    const double ttc = pos(rng);
    const double eps = 0.5 * time(rng);
    const tot::Decision d = tot::decide(tot, ttc, eps);
    // Definition check, straight from the inequality.
    CHECK(d.verdict == (tot + eps < ttc ? tot::Verdict::HandOver
                                        : tot::Verdict::SafeStop));
    CHECK(d.margin_s == doctest::Approx(ttc - tot - eps).epsilon(1e-12));
    if (d.verdict == tot::Verdict::HandOver) {
      ++handovers;
      // A faster driver, later collision, or smaller margin can only keep
      // the handover.
      CHECK(tot::decide(tot * 0.5, ttc, eps).verdict ==
            tot::Verdict::HandOver);
      CHECK(tot::decide(tot, ttc + 1.0, eps).verdict ==
            tot::Verdict::HandOver);
      CHECK(tot::decide(tot, ttc, eps * 0.5).verdict ==
            tot::Verdict::HandOver);
    } else {
      // And the reverse directions can only keep the stop.
      CHECK(tot::decide(tot + 1.0, ttc, eps).verdict ==
            tot::Verdict::SafeStop);
      if (ttc > 1.0) {
        CHECK(tot::decide(tot, ttc - 1.0 + 1e-12, eps).verdict ==
              tot::Verdict::SafeStop);
      }
      CHECK(tot::decide(tot, ttc, eps + 1.0).verdict ==
            tot::Verdict::SafeStop);
    }
  }
  // The sampling really exercises both verdicts.
  CHECK(handovers > 200);
  CHECK(handovers < 1800);
}

TEST_CASE("decision policy names") {
  using tot::DecisionPolicy;
  CHECK(tot::policy_from_string("most_probable") ==
        DecisionPolicy::MostProbable);
  CHECK(tot::policy_from_string("expected") == DecisionPolicy::Expected);
  CHECK(tot::policy_from_string("worst_mode") == DecisionPolicy::WorstMode);
  for (auto p : {DecisionPolicy::MostProbable, DecisionPolicy::Expected,
                 DecisionPolicy::WorstMode}) {
    CHECK(tot::policy_from_string(tot::to_string(p)) == p);
  }
  CHECK_THROWS_AS(tot::policy_from_string("median"), tot::DataFormatError);
  CHECK_THROWS_WITH_AS(tot::policy_from_string("median"),
                       doctest::Contains("most_probable"),
                       tot::DataFormatError);
}

TEST_CASE("multimodal decisions") {
  // Mode 0: triple {1.0, 0.5, 2.0} -> tot 2.0, prob 0.6
  // Mode 1: triple {0.5, 0.5, 0.5} -> tot 0.5, prob 0.3
  // Mode 2: triple {4.0, 1.0, 1.0} -> tot 4.0, prob 0.1
  const tot::Prediction p = mm_pred(
      {1.0, 0.5, 2.0, 0.5, 0.5, 0.5, 4.0, 1.0, 1.0}, {0.6, 0.3, 0.1});

  SUBCASE("most probable mode") {
    const tot::Decision d =
        tot::decide_mm(p, 3.0, 0.5, tot::DecisionPolicy::MostProbable);
    CHECK(d.tot_s == 2.0);
    CHECK(d.verdict == tot::Verdict::HandOver);
  }
  SUBCASE("probability-weighted expectation") {
    const tot::Decision d =
        tot::decide_mm(p, 3.0, 0.5, tot::DecisionPolicy::Expected);
    CHECK(d.tot_s ==
          doctest::Approx(0.6 * 2.0 + 0.3 * 0.5 + 0.1 * 4.0).epsilon(1e-15));
    CHECK(d.verdict == tot::Verdict::HandOver);
  }
  SUBCASE("worst mode") {
    const tot::Decision d =
        tot::decide_mm(p, 3.0, 0.5, tot::DecisionPolicy::WorstMode);
    CHECK(d.tot_s == 4.0);
    CHECK(d.verdict == tot::Verdict::SafeStop);
  }
  SUBCASE("per-mode verdicts are recorded for all policies") {
    const tot::Decision d =
        tot::decide_mm(p, 3.0, 0.5, tot::DecisionPolicy::MostProbable);
    REQUIRE(d.per_mode.size() == 3);
    CHECK(d.per_mode[0].mode == 0);
    CHECK(d.per_mode[0].tot_s == 2.0);
    CHECK(d.per_mode[0].prob == 0.6);
    CHECK(d.per_mode[0].verdict == tot::Verdict::HandOver);
    CHECK(d.per_mode[1].tot_s == 0.5);
    CHECK(d.per_mode[1].verdict == tot::Verdict::HandOver);
    CHECK(d.per_mode[2].tot_s == 4.0);
    CHECK(d.per_mode[2].verdict == tot::Verdict::SafeStop);
    CHECK(d.per_mode[2].margin_s == doctest::Approx(-1.5).epsilon(1e-15));
  }
  SUBCASE("point predictions are rejected") {
    tot::Prediction point;
    point.times = {1.0, 1.0, 1.0};
    CHECK_THROWS_AS(
        tot::decide_mm(point, 3.0, 0.5, tot::DecisionPolicy::MostProbable),
        std::invalid_argument);
  }
  SUBCASE("decide() still validates the scalar inputs") {
    CHECK_THROWS_AS(tot::decide_mm(p, -1.0, 0.5,
                                   tot::DecisionPolicy::MostProbable),
                    std::invalid_argument);
  }
}

TEST_CASE("streaming prediction") {
  const tot::Model m = tiny_model(tot::Variant::BaselineLSTM);

  SUBCASE("count law and window ends") {
    const auto frames = plain_stream(150);
    const auto preds = tot::stream_predict(m, frames, 30);
    // floor((150 - 60) / 30) + 1 = 4 positions
    REQUIRE(preds.size() == 4);
    CHECK(preds[0].window_end == 59);
    CHECK(preds[1].window_end == 89);
    CHECK(preds[2].window_end == 119);
    CHECK(preds[3].window_end == 149);
    for (const auto& sp : preds) {
      for (double t : sp.prediction.times) {
        CHECK(std::isfinite(t));
        CHECK(t >= 0.0);
      }
    }
  }
  SUBCASE("count law on random lengths and strides") {
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> len_dist(60, 200);
    std::uniform_int_distribution<int> stride_dist(1, 90);
    for (int i = 0; i < 12; ++i) {
      const int len = len_dist(rng);
      const int stride = stride_dist(rng);
      CAPTURE(len);
      CAPTURE(stride);
      const auto preds = tot::stream_predict(m, plain_stream(len), stride);
      CHECK(static_cast<long>(preds.size()) == (len - 60) / stride + 1);
      CHECK(preds.front().window_end == 59);
      CHECK(preds.back().window_end <= len - 1);
    }
  }
  SUBCASE("a window-sized stream yields exactly one prediction") {
    const auto preds = tot::stream_predict(m, plain_stream(60), 10);
    REQUIRE(preds.size() == 1);
    CHECK(preds[0].window_end == 59);
  }
  SUBCASE("each prediction only sees frames up to its window end") {
    // Changing frames after a window's end must not change that window's
    // prediction.
    auto frames = plain_stream(120);
    const auto before = tot::stream_predict(m, frames, 30);
    for (size_t i = 100; i < frames.size(); ++i) {
      frames[i].stereo.dist_left_m = 0.9;
    }
    const auto after = tot::stream_predict(m, frames, 30);
    REQUIRE(before.size() == 3);
    REQUIRE(after.size() == 3);
    for (int w = 0; w < 2; ++w) {  // window ends 59 and 89 precede frame 100
      for (int c = 0; c < 3; ++c) {
        CHECK(before[static_cast<size_t>(w)].prediction.times[static_cast<size_t>(c)] ==
              after[static_cast<size_t>(w)].prediction.times[static_cast<size_t>(c)]);
      }
    }
  }
  SUBCASE("multimodal models stream too") {
    const tot::Model mm = tiny_model(tot::Variant::BaselineLSTM_MM);
    const auto preds = tot::stream_predict(mm, plain_stream(90), 15);
    REQUIRE(preds.size() == 3);
    for (const auto& sp : preds) {
      CHECK(sp.prediction.multimodal());
      double sum = 0;
      for (double q : sp.prediction.mode_probs) sum += q;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("short streams and bad strides are rejected") {
    CHECK_THROWS_AS(tot::stream_predict(m, plain_stream(59), 30),
                    std::invalid_argument);
    CHECK_THROWS_AS(tot::stream_predict(m, plain_stream(120), 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(tot::stream_predict(m, plain_stream(120), -5),
                    std::invalid_argument);
  }
  SUBCASE("repeated runs are identical") {
    const auto frames = plain_stream(180);
    const auto a = tot::stream_predict(m, frames, 7);
    const auto b = tot::stream_predict(m, frames, 7);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].window_end == b[i].window_end);
      CHECK(std::memcmp(a[i].prediction.times.data(),
                        b[i].prediction.times.data(), 3 * sizeof(double)) == 0);
    }
  }
}
