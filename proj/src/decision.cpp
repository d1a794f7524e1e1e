#include "tot/decision.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tot/common.hpp"
#include "tot/events.hpp"

namespace tot {

const char* to_string(Verdict v) {
  return v == Verdict::HandOver ? "hand_over" : "safe_stop";
}

Decision decide(double tot_s, double ttc_s, double epsilon_s) {
  if (!std::isfinite(tot_s) || !std::isfinite(ttc_s) ||
      !std::isfinite(epsilon_s)) {
    throw NumericError("decide: non-finite input");
  }
  if (ttc_s <= 0.0) throw std::invalid_argument("decide: ttc must be > 0");
  if (epsilon_s < 0.0) {
    throw std::invalid_argument("decide: epsilon must be >= 0");
  }
  Decision d;
  d.tot_s = tot_s;
  d.ttc_s = ttc_s;
  d.epsilon_s = epsilon_s;
  d.margin_s = ttc_s - (tot_s + epsilon_s);
  d.verdict = tot_s + epsilon_s < ttc_s ? Verdict::HandOver : Verdict::SafeStop;
  return d;
}

namespace {
constexpr const char* kPolicyNames[] = {"most_probable", "expected",
                                        "worst_mode"};
}

const char* to_string(DecisionPolicy p) {
  return kPolicyNames[static_cast<int>(p)];
}

DecisionPolicy policy_from_string(const std::string& s) {
  for (int i = 0; i < 3; ++i) {
    if (s == kPolicyNames[i]) return static_cast<DecisionPolicy>(i);
  }
  std::ostringstream os;
  os << "unknown decision policy \"" << s << "\" (expected one of:";
  for (const char* name : kPolicyNames) os << ' ' << name;
  os << ')';
  throw DataFormatError(os.str());
}

Decision decide_mm(const Prediction& pred, double ttc_s, double epsilon_s,
                   DecisionPolicy policy) {
  if (!pred.multimodal()) {
    throw std::invalid_argument(
        "decide_mm: prediction has no modes; use decide() for point "
        "variants");
  }
  const int k = pred.num_modes();
  double tot = 0.0;
  switch (policy) {
    case DecisionPolicy::MostProbable: {
      const std::array<double, 3> t = pred.mode(pred.most_probable_mode());
      tot = std::max({t[0], t[1], t[2]});
      break;
    }
    case DecisionPolicy::Expected: {
      for (int i = 0; i < k; ++i) {
        const std::array<double, 3> t = pred.mode(i);
        tot += pred.mode_probs[static_cast<std::size_t>(i)] *
               std::max({t[0], t[1], t[2]});
      }
      break;
    }
    case DecisionPolicy::WorstMode: {
      for (int i = 0; i < k; ++i) {
        const std::array<double, 3> t = pred.mode(i);
        tot = std::max(tot, std::max({t[0], t[1], t[2]}));
      }
      break;
    }
  }
  Decision d = decide(tot, ttc_s, epsilon_s);
  d.per_mode.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const std::array<double, 3> t = pred.mode(i);
    ModeDecision md;
    md.mode = i;
    md.tot_s = std::max({t[0], t[1], t[2]});
    md.prob = pred.mode_probs[static_cast<std::size_t>(i)];
    md.margin_s = ttc_s - (md.tot_s + epsilon_s);
    md.verdict = md.tot_s + epsilon_s < ttc_s ? Verdict::HandOver
                                              : Verdict::SafeStop;
    d.per_mode.push_back(md);
  }
  return d;
}

std::vector<StreamPrediction> stream_predict(
    const Model& model, std::span<const FrameFeatures> frames,
    int stride_frames) {
  if (stride_frames < 1) {
    throw std::invalid_argument("stream_predict: stride must be >= 1");
  }
  const long window =
      std::lround(kWindowSpanS * kDefaultFrameRateHz);  // 60 at 30 Hz
  const long len = static_cast<long>(frames.size());
  if (len < window) {
    std::ostringstream os;
    os << "stream_predict: stream has " << len << " frames, need at least "
       << window;
    throw std::invalid_argument(os.str());
  }

  const int dim = feature_dim(model.mask);
  if (dim != model.config.input_dim) {
    throw std::invalid_argument(
        "stream_predict: model mask width does not match its input_dim");
  }
  std::vector<double> buf(static_cast<std::size_t>(window) * dim);

  std::vector<StreamPrediction> out;
  out.reserve(static_cast<std::size_t>((len - window) / stride_frames + 1));
  for (long start = 0; start + window <= len; start += stride_frames) {
    for (long t = 0; t < window; ++t) {
      flatten_into(frames[static_cast<std::size_t>(start + t)], model.mask,
                   buf.data() + static_cast<std::size_t>(t) * dim);
    }
    StreamPrediction sp;
    sp.window_end = start + window - 1;
    sp.prediction =
        forward(model, buf.data(), static_cast<int>(window), dim);
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace tot
