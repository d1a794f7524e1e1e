// tot: one executable for the whole take-over-time workflow — synthetic
// data generation, training (with augmentation and readiness transfer),
// evaluation, ablations, training-fraction sweeps, windowed/streaming
// prediction, and the handover decision.
//
// Exit codes: 0 success, 2 usage error, 3 data/format error, 4 numeric
// failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tot/checkpoint.hpp"
#include "tot/common.hpp"
#include "tot/config.hpp"
#include "tot/decision.hpp"
#include "tot/eval.hpp"
#include "tot/event_io.hpp"
#include "tot/grad.hpp"
#include "tot/split.hpp"
#include "tot/train.hpp"

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Shared plumbing

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool serial = false;
  bool verbose = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Experiment config file (see `tot config --dump`)");
  cmd->add_option("--seed", flags.seed,
                  "Master seed: overrides the model, shuffle, split and "
                  "generator seeds together");
  cmd->add_flag("--serial", flags.serial,
                "Run batch kernels serially (results are identical either "
                "way)");
  cmd->add_flag("-v,--verbose", flags.verbose,
                "Per-epoch progress on stderr");
}

tot::ExperimentConfig resolve_config(const CommonFlags& flags) {
  tot::ExperimentConfig cfg = flags.config_path.empty()
                                  ? tot::default_experiment_config()
                                  : tot::load_experiment_config(flags.config_path);
  if (flags.seed) {
    cfg.seed = *flags.seed;
    cfg.model.seed = *flags.seed;
    cfg.train.seed = *flags.seed;
    cfg.split.seed = *flags.seed;
    cfg.synth.seed = *flags.seed;
  }
  if (flags.serial) cfg.train.policy = tot::ExecPolicy::Serial;
  if (flags.verbose) cfg.train.verbose = true;
  if (const char* env = std::getenv("TOT_REPORT_DIR")) {
    if (*env) cfg.report_dir = env;
  }
  return cfg;
}

std::string report_path(const tot::ExperimentConfig& cfg,
                        const std::string& explicit_path,
                        const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  std::filesystem::create_directories(cfg.report_dir);
  return (std::filesystem::path(cfg.report_dir) / default_name).string();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

// One-line JSON used as the "# config:" echo in every report file.
std::string config_echo(const tot::ExperimentConfig& cfg) {
  return tot::experiment_config_to_json(cfg, /*pretty=*/false);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
  CommonFlags common;
  std::string out;
  std::string counts_csv;
  std::optional<int> total;
  std::optional<double> frame_rate;
};

int cmd_gen_data(const GenDataArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  tot::SynthConfig synth = cfg.synth;
  if (!args.counts_csv.empty()) {
    std::vector<int> counts;
    std::stringstream ss(args.counts_csv);
    std::string item;
    while (std::getline(ss, item, ',')) counts.push_back(std::stoi(item));
    if (counts.size() != static_cast<std::size_t>(tot::kNumActivities)) {
      throw std::invalid_argument(
          "--counts needs exactly 8 comma-separated values (one per "
          "activity)");
    }
    for (int a = 0; a < tot::kNumActivities; ++a) {
      synth.profiles[static_cast<std::size_t>(a)].count = counts[static_cast<std::size_t>(a)];
    }
  }
  if (args.total) synth = tot::with_total_count(synth, *args.total);
  if (args.frame_rate) synth.frame_rate_hz = *args.frame_rate;

  const tot::EventSet events = tot::synthesize_events(
      synth, args.common.serial ? tot::ExecPolicy::Serial
                                : tot::ExecPolicy::Parallel);

  // Fig.-2-style summary: per-activity counts and component-time stats.
  std::printf("%-15s %6s  %-16s %-16s %-16s\n", "activity", "count",
              "t_eyes (s)", "t_foot (s)", "t_hands (s)");
  for (int a = 0; a < tot::kNumActivities; ++a) {
    std::vector<double> te, tf, th;
    for (const tot::TakeoverEvent& ev : events.events) {
      if (static_cast<int>(ev.activity) != a) continue;
      te.push_back(ev.t_eyes_s);
      tf.push_back(ev.t_foot_s);
      th.push_back(ev.t_hands_s);
    }
    std::printf("%-15s %6zu  %5.2f +- %-6.2f %5.2f +- %-6.2f %5.2f +- %-6.2f\n",
                tot::to_string(static_cast<tot::Activity>(a)), te.size(),
                mean_of(te), sd_of(te), mean_of(tf), sd_of(tf), mean_of(th),
                sd_of(th));
  }
  std::printf("total events: %zu\n", events.events.size());

  const std::string out = args.out.empty() ? cfg.events_path : args.out;
  tot::save_events(events, out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// train / pretrain

struct TrainArgs {
  CommonFlags common;
  std::string events;
  std::string out;
  std::string history;
  std::string mask;
  std::string variant;
  std::optional<int> hidden;
  std::optional<int> modes;
  std::optional<int> epochs;
  std::optional<int> batch;
  std::optional<double> lr;
  bool augment = false;
  std::string from_ori;
};

void apply_model_flags(tot::ExperimentConfig& cfg, const TrainArgs& args) {
  if (!args.mask.empty()) cfg.mask = tot::mask_from_label(args.mask);
  if (!args.variant.empty()) {
    cfg.model.variant = tot::variant_from_string(args.variant);
  }
  if (args.hidden) cfg.model.hidden_dim = *args.hidden;
  if (args.modes) cfg.model.num_modes = *args.modes;
  if (args.epochs) cfg.train.epochs = *args.epochs;
  if (args.batch) cfg.train.batch_size = *args.batch;
  if (args.lr) cfg.train.adam.lr = *args.lr;
  cfg.model.input_dim = tot::feature_dim(cfg.mask);
}

void write_history_csv(const std::string& path,
                       const std::vector<tot::EpochStats>& history,
                       const std::string& echo) {
  std::ostringstream os;
  os << "# config: " << echo << "\n";
  os << "epoch,train_loss,val_overall_mae_s,val_takeover_mae_s\n";
  char buf[160];
  for (const tot::EpochStats& e : history) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g\n", e.epoch,
                  e.train_loss, e.val_overall_mae_s, e.val_takeover_mae_s);
    os << buf;
  }
  tot::atomic_write_text(path, os.str());
}

int cmd_train(const TrainArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  apply_model_flags(cfg, args);
  const std::string events_path =
      args.events.empty() ? cfg.events_path : args.events;

  const tot::EventSet events = tot::load_events(events_path);
  const tot::EventSplits splits = tot::split_events(events, cfg.split);
  const std::vector<tot::TrainingSample> train_samples =
      tot::build_training_set(splits.train, cfg.mask, args.augment,
                              cfg.train.policy);
  const std::vector<tot::TrainingSample> val_samples = tot::build_training_set(
      splits.val, cfg.mask, false, cfg.train.policy);

  long raw = 0;
  for (const tot::TrainingSample& s : train_samples) {
    if (s.provenance.kind == tot::Provenance::Kind::Raw) ++raw;
  }
  const long augmented = static_cast<long>(train_samples.size()) - raw;
  std::printf("events: %zu train / %zu val / %zu test\n", splits.train.size(),
              splits.val.size(), splits.test.size());
  std::printf("training samples: %ld raw + %ld augmented = %zu\n", raw,
              augmented, train_samples.size());

  tot::TrainResult result;
  if (!args.from_ori.empty()) {
    const tot::Model pretrained = tot::load_checkpoint(args.from_ori);
    tot::Model warm = tot::transfer(pretrained, cfg.model);
    if (!(warm.mask == cfg.mask)) {
      throw std::invalid_argument(
          "pretrained checkpoint was built for mask " +
          tot::mask_label(warm.mask) + ", this run uses " +
          tot::mask_label(cfg.mask));
    }
    result = tot::train_from(std::move(warm), train_samples, val_samples,
                             cfg.train);
  } else {
    result =
        tot::train(train_samples, val_samples, cfg.model, cfg.mask, cfg.train);
  }

  const std::string out = args.out.empty() ? cfg.checkpoint_path : args.out;
  tot::save_checkpoint(result.model, out);
  const std::string history_path =
      report_path(cfg, args.history, "train_history.csv");
  write_history_csv(history_path, result.history, config_echo(cfg));

  if (!result.history.empty()) {
    const tot::EpochStats& last = result.history.back();
    std::printf("final: train loss %.4f, val overall MAE %.4f s, "
                "val takeover MAE %.4f s\n",
                last.train_loss, last.val_overall_mae_s,
                last.val_takeover_mae_s);
  }
  std::printf("wrote %s and %s\n", out.c_str(), history_path.c_str());
  return 0;
}

struct PretrainArgs {
  TrainArgs train;  // reuses events/out/model flags
  int stride = 30;
};

int cmd_pretrain(const PretrainArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.train.common);
  apply_model_flags(cfg, args.train);
  const std::string events_path =
      args.train.events.empty() ? cfg.events_path : args.train.events;

  const tot::EventSet events = tot::load_events(events_path);
  const tot::EventSplits splits = tot::split_events(events, cfg.split);
  const std::vector<tot::OriSample> train_windows = tot::synthesize_ori_labels(
      splits.train, cfg.mask, cfg.seed, args.stride);
  const std::vector<tot::OriSample> val_windows = tot::synthesize_ori_labels(
      splits.val, cfg.mask, cfg.seed + 1, args.stride);
  std::printf("readiness windows: %zu train / %zu val\n", train_windows.size(),
              val_windows.size());

  tot::TrainResult result = tot::pretrain_ori(train_windows, val_windows,
                                              cfg.model, cfg.mask, cfg.train);
  const std::string out =
      args.train.out.empty() ? "ori.ckpt" : args.train.out;
  tot::save_checkpoint(result.model, out);
  const std::string history_path =
      report_path(cfg, args.train.history, "pretrain_history.csv");
  write_history_csv(history_path, result.history, config_echo(cfg));
  if (!result.history.empty()) {
    std::printf("final: train MSE %.5f, val readiness MAE %.5f\n",
                result.history.back().train_loss,
                result.history.back().val_overall_mae_s);
  }
  std::printf("wrote %s and %s\n", out.c_str(), history_path.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  CommonFlags common;
  std::string checkpoint;
  std::string events;
  std::string split = "val";
  bool best_of_k = false;
  std::string report;
};

int cmd_eval(const EvalArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  const tot::Model model = tot::load_checkpoint(
      args.checkpoint.empty() ? cfg.checkpoint_path : args.checkpoint);
  const tot::EventSet events =
      tot::load_events(args.events.empty() ? cfg.events_path : args.events);

  std::vector<tot::TakeoverEvent> subset;
  if (args.split == "all") {
    subset = events.events;
  } else {
    tot::EventSplits splits = tot::split_events(events, cfg.split);
    if (args.split == "train") {
      subset = std::move(splits.train);
    } else if (args.split == "val") {
      subset = std::move(splits.val);
    } else if (args.split == "test") {
      subset = std::move(splits.test);
    } else {
      throw std::invalid_argument("--split must be train, val, test or all");
    }
  }
  const std::vector<tot::TrainingSample> samples = tot::build_training_set(
      subset, model.mask, false, cfg.train.policy);

  tot::MaeReport report = tot::evaluate(
      model, samples,
      args.best_of_k ? tot::EvalMode::BestOfK : tot::EvalMode::MostProbable,
      cfg.train.policy);
  report.model_id = std::string(tot::to_string(model.config.variant)) + "/" +
                    tot::mask_label(model.mask) +
                    (args.best_of_k ? "/best-of-k" : "/most-probable");
  report.dataset_id = args.split;

  std::printf("samples: %ld (%s split)\n", report.sample_count,
              args.split.c_str());
  std::printf("eyes MAE     %.4f s\n", report.eyes_mae_s);
  std::printf("foot MAE     %.4f s\n", report.foot_mae_s);
  std::printf("hands MAE    %.4f s\n", report.hands_mae_s);
  std::printf("overall MAE  %.4f s\n", report.overall_mae_s);
  std::printf("takeover MAE %.4f s\n", report.takeover_mae_s);

  const std::string out = report_path(cfg, args.report, "eval.csv");
  const tot::MaeReport rows[] = {report};
  tot::write_report_csv(out, rows, config_echo(cfg));
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// ablate / sweep

struct AblateArgs {
  CommonFlags common;
  std::string events;
  std::string masks_csv;
  std::string seeds_csv = "1,2,3,4,5";
  std::string variant;
  std::optional<int> hidden;
  std::optional<int> epochs;
  bool raw = false;
  std::string report;
  std::string points;
};

tot::RunPlan make_plan(const tot::ExperimentConfig& cfg,
                       const std::string& seeds_csv, bool augment) {
  tot::RunPlan plan;
  plan.model = cfg.model;
  plan.train = cfg.train;
  plan.seeds = parse_seed_list(seeds_csv);
  plan.augment = augment;
  return plan;
}

int cmd_ablate(const AblateArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  if (!args.variant.empty()) {
    cfg.model.variant = tot::variant_from_string(args.variant);
  }
  if (args.hidden) cfg.model.hidden_dim = *args.hidden;
  if (args.epochs) cfg.train.epochs = *args.epochs;

  tot::AblationSpec spec;
  spec.plan = make_plan(cfg, args.seeds_csv, !args.raw);
  if (!args.masks_csv.empty()) {
    spec.masks.clear();
    std::stringstream ss(args.masks_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) spec.masks.push_back(tot::mask_from_label(item));
    }
  }

  const tot::EventSet events =
      tot::load_events(args.events.empty() ? cfg.events_path : args.events);
  const tot::EventSplits splits = tot::split_events(events, cfg.split);

  const std::vector<tot::AblationRow> rows = tot::ablate(spec, splits);

  std::printf("%-8s %12s %12s\n", "mask", "overall MAE", "takeover MAE");
  std::vector<tot::MaeReport> means;
  std::vector<tot::MaeReport> points;
  for (const tot::AblationRow& row : rows) {
    std::printf("%-8s %12.4f %12.4f\n", tot::mask_label(row.mask).c_str(),
                row.mean.overall_mae_s, row.mean.takeover_mae_s);
    means.push_back(row.mean);
    for (const tot::MaeReport& r : row.per_seed) points.push_back(r);
  }
  const std::string report_out = report_path(cfg, args.report, "ablation.csv");
  tot::write_report_csv(report_out, means, config_echo(cfg));
  const std::string points_out =
      report_path(cfg, args.points, "ablation_points.csv");
  tot::write_report_csv(points_out, points, config_echo(cfg));
  std::printf("wrote %s and %s\n", report_out.c_str(), points_out.c_str());
  return 0;
}

struct SweepArgs {
  CommonFlags common;
  std::string events;
  std::string fractions_csv = "0.75,0.9,1.0";
  std::string seeds_csv = "1,2,3,4,5";
  std::string mask;
  std::optional<int> hidden;
  std::optional<int> epochs;
  bool raw = false;
  std::string report;
  std::string points;
};

int cmd_sweep(const SweepArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  if (!args.mask.empty()) cfg.mask = tot::mask_from_label(args.mask);
  if (args.hidden) cfg.model.hidden_dim = *args.hidden;
  if (args.epochs) cfg.train.epochs = *args.epochs;
  cfg.model.input_dim = tot::feature_dim(cfg.mask);

  std::vector<double> fractions;
  {
    std::stringstream ss(args.fractions_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) fractions.push_back(std::stod(item));
    }
  }

  const tot::EventSet events =
      tot::load_events(args.events.empty() ? cfg.events_path : args.events);
  const tot::EventSplits splits = tot::split_events(events, cfg.split);
  const tot::RunPlan plan = make_plan(cfg, args.seeds_csv, !args.raw);

  const std::vector<tot::SweepRow> rows =
      tot::fraction_sweep(fractions, cfg.mask, plan, splits);

  std::printf("%-10s %12s %12s %12s\n", "fraction", "events", "overall MAE",
              "takeover MAE");
  std::vector<tot::MaeReport> means;
  std::vector<tot::MaeReport> points;
  for (const tot::SweepRow& row : rows) {
    std::printf("%-10.3g %12ld %12.4f %12.4f\n", row.fraction,
                row.train_events, row.mean.overall_mae_s,
                row.mean.takeover_mae_s);
    means.push_back(row.mean);
    for (const tot::MaeReport& r : row.per_seed) points.push_back(r);
  }
  const std::string report_out = report_path(cfg, args.report, "sweep.csv");
  tot::write_report_csv(report_out, means, config_echo(cfg));
  const std::string points_out =
      report_path(cfg, args.points, "sweep_points.csv");
  tot::write_report_csv(points_out, points, config_echo(cfg));
  std::printf("wrote %s and %s\n", report_out.c_str(), points_out.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// predict / decide

tot::FrameFeatures parse_frame_line(const std::string& line, long line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_array() ||
      j.size() != static_cast<std::size_t>(tot::kFrameRowSize)) {
    std::ostringstream os;
    os << "frame line " << line_no << ": expected a JSON array of "
       << tot::kFrameRowSize << " numbers";
    throw tot::DataFormatError(os.str());
  }
  std::array<double, tot::kFrameRowSize> row{};
  for (int i = 0; i < tot::kFrameRowSize; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      std::ostringstream os;
      os << "frame line " << line_no << ": entry " << i << " is not a number";
      throw tot::DataFormatError(os.str());
    }
    row[static_cast<std::size_t>(i)] = j[static_cast<std::size_t>(i)].get<double>();
  }
  tot::FrameFeatures frame = tot::frame_from_row(row.data());
  const std::vector<std::string> problems = tot::validate_frame(frame);
  if (!problems.empty()) {
    std::ostringstream os;
    os << "frame line " << line_no << ": " << problems.front();
    throw tot::DataFormatError(os.str());
  }
  return frame;
}

json prediction_to_json(const tot::Prediction& pred) {
  json j;
  j["times"] = {{"eyes_s", pred.times[0]},
                {"foot_s", pred.times[1]},
                {"hands_s", pred.times[2]}};
  j["takeover_s"] = std::max({pred.times[0], pred.times[1], pred.times[2]});
  if (pred.multimodal()) {
    json modes = json::array();
    for (int k = 0; k < pred.num_modes(); ++k) {
      const std::array<double, 3> t = pred.mode(k);
      modes.push_back({{"eyes_s", t[0]},
                       {"foot_s", t[1]},
                       {"hands_s", t[2]},
                       {"prob", pred.mode_probs[static_cast<std::size_t>(k)]}});
    }
    j["modes"] = std::move(modes);
  }
  return j;
}

json decision_to_json(const tot::Decision& d) {
  json j;
  j["verdict"] = tot::to_string(d.verdict);
  j["tot_s"] = d.tot_s;
  j["ttc_s"] = d.ttc_s;
  j["epsilon_s"] = d.epsilon_s;
  j["margin_s"] = d.margin_s;
  if (!d.per_mode.empty()) {
    json modes = json::array();
    for (const tot::ModeDecision& md : d.per_mode) {
      modes.push_back({{"mode", md.mode},
                       {"tot_s", md.tot_s},
                       {"prob", md.prob},
                       {"verdict", tot::to_string(md.verdict)},
                       {"margin_s", md.margin_s}});
    }
    j["per_mode"] = std::move(modes);
  }
  return j;
}

struct PredictArgs {
  CommonFlags common;
  std::string checkpoint;
  std::string window_file;
  bool stream = false;
  int stride = 1;
  // decide-only extras
  std::optional<double> tot;
  std::optional<double> ttc;
  std::optional<double> epsilon;
  std::string policy;
};

std::vector<tot::FrameFeatures> read_frames(std::istream& is) {
  std::vector<tot::FrameFeatures> frames;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    frames.push_back(parse_frame_line(line, line_no));
  }
  return frames;
}

// Shared by predict and decide: emit one JSON line per window position.
// `decorate` turns a prediction into the final output record.
template <typename Fn>
int run_windows(const PredictArgs& args, const tot::Model& model,
                Fn&& decorate) {
  if (args.stream != args.window_file.empty()) {
    // Exactly one input source must be chosen.
    throw std::invalid_argument("choose exactly one of --stream or --window");
  }
  if (args.stride < 1) throw std::invalid_argument("--stride must be >= 1");
  const int window = static_cast<int>(
      std::lround(tot::kWindowSpanS * tot::kDefaultFrameRateHz));
  const int dim = tot::feature_dim(model.mask);
  std::vector<double> buf(static_cast<std::size_t>(window) * dim);

  if (!args.window_file.empty()) {
    std::ifstream is(args.window_file, std::ios::binary);
    if (!is) throw tot::DataFormatError("cannot open: " + args.window_file);
    const std::vector<tot::FrameFeatures> frames = read_frames(is);
    if (static_cast<int>(frames.size()) != window) {
      std::ostringstream os;
      os << "window file has " << frames.size() << " frames, expected exactly "
         << window;
      throw tot::DataFormatError(os.str());
    }
    for (int t = 0; t < window; ++t) {
      tot::flatten_into(frames[static_cast<std::size_t>(t)], model.mask,
                        buf.data() + static_cast<std::size_t>(t) * dim);
    }
    const tot::Prediction pred = tot::forward(model, buf.data(), window, dim);
    json j = decorate(pred);
    j["window_end"] = window - 1;
    std::cout << j.dump() << "\n";
    return 0;
  }

  // Streaming: keep the last `window` frames; a prediction is emitted the
  // moment its final frame arrives, so output depends only on frames seen
  // so far.
  std::vector<tot::FrameFeatures> ring(static_cast<std::size_t>(window));
  long count = 0;
  long line_no = 0;
  std::string line;
  while (std::getline(std::cin, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ring[static_cast<std::size_t>(count % window)] =
        parse_frame_line(line, line_no);
    ++count;
    if (count < window || (count - window) % args.stride != 0) continue;
    for (int t = 0; t < window; ++t) {
      const long src = count - window + t;
      tot::flatten_into(ring[static_cast<std::size_t>(src % window)],
                        model.mask,
                        buf.data() + static_cast<std::size_t>(t) * dim);
    }
    const tot::Prediction pred = tot::forward(model, buf.data(), window, dim);
    json j = decorate(pred);
    j["window_end"] = count - 1;
    std::cout << j.dump() << "\n";
    std::cout.flush();
  }
  if (count < window) {
    std::ostringstream os;
    os << "stream ended after " << count << " frames, need at least "
       << window << " for one window";
    throw tot::DataFormatError(os.str());
  }
  return 0;
}

int cmd_predict(const PredictArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  const tot::Model model = tot::load_checkpoint(
      args.checkpoint.empty() ? cfg.checkpoint_path : args.checkpoint);
  return run_windows(args, model,
                     [](const tot::Prediction& p) { return prediction_to_json(p); });
}

int cmd_decide(const PredictArgs& args) {
  tot::ExperimentConfig cfg = resolve_config(args.common);
  if (!args.ttc) throw std::invalid_argument("--ttc is required");
  const double ttc = *args.ttc;
  const double eps = args.epsilon.value_or(cfg.epsilon_s);
  const tot::DecisionPolicy policy =
      args.policy.empty() ? cfg.policy : tot::policy_from_string(args.policy);

  if (args.tot) {
    // Direct mode: apply the criterion to a given take-over time.
    const tot::Decision d = tot::decide(*args.tot, ttc, eps);
    std::cout << decision_to_json(d).dump() << "\n";
    return 0;
  }

  const tot::Model model = tot::load_checkpoint(
      args.checkpoint.empty() ? cfg.checkpoint_path : args.checkpoint);
  return run_windows(args, model, [&](const tot::Prediction& p) {
    const tot::Decision d =
        p.multimodal()
            ? tot::decide_mm(p, ttc, eps, policy)
            : tot::decide(std::max({p.times[0], p.times[1], p.times[2]}), ttc,
                          eps);
    json j = decision_to_json(d);
    j["prediction"] = prediction_to_json(p);
    return j;
  });
}

// ---------------------------------------------------------------------------
// config

struct ConfigArgs {
  CommonFlags common;
  bool dump = false;
  std::string out;
};

int cmd_config(const ConfigArgs& args) {
  if (!args.dump) {
    throw std::invalid_argument("config: nothing to do (use --dump)");
  }
  const tot::ExperimentConfig cfg = resolve_config(args.common);
  const std::string text = tot::experiment_config_to_json(cfg) + "\n";
  if (args.out.empty()) {
    std::cout << text;
  } else {
    tot::atomic_write_text(args.out, text);
    std::printf("wrote %s\n", args.out.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Take-over time prediction toolkit"};
  app.require_subcommand(1);

  GenDataArgs gen_args;
  CLI::App* gen = app.add_subcommand(
      "gen-data", "Generate a synthetic take-over event file");
  add_common_flags(gen, gen_args.common);
  gen->add_option("-o,--out", gen_args.out, "Output event file");
  gen->add_option("--counts", gen_args.counts_csv,
                  "Per-activity event counts, 8 comma-separated values");
  gen->add_option("--total", gen_args.total,
                  "Rescale activity counts to this total");
  gen->add_option("--frame-rate", gen_args.frame_rate, "Frames per second");

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Split, optionally augment, train, save a checkpoint");
  add_common_flags(train, train_args.common);
  train->add_option("-e,--events", train_args.events, "Event file");
  train->add_option("-o,--out", train_args.out, "Checkpoint output path");
  train->add_option("--history", train_args.history,
                    "Per-epoch history CSV path");
  train->add_option("--mask", train_args.mask,
                    "Feature groups, letters from FGHSO");
  train->add_option("--variant", train_args.variant,
                    "baseline_lstm | independent_lstms | baseline_lstm_mm | "
                    "independent_lstms_mm");
  train->add_option("--hidden", train_args.hidden, "Hidden state width");
  train->add_option("--modes", train_args.modes, "Mode count K (MM variants)");
  train->add_option("--epochs", train_args.epochs, "Training epochs");
  train->add_option("--batch", train_args.batch, "Minibatch size");
  train->add_option("--lr", train_args.lr, "Adam learning rate");
  train->add_flag("--augment", train_args.augment,
                  "Add TOR-offset samples to the training split");
  train->add_option("--from-ori", train_args.from_ori,
                    "Warm-start the trunk from a readiness checkpoint");

  PretrainArgs pre_args;
  CLI::App* pretrain = app.add_subcommand(
      "pretrain", "Train a readiness model for later transfer");
  add_common_flags(pretrain, pre_args.train.common);
  pretrain->add_option("-e,--events", pre_args.train.events, "Event file");
  pretrain->add_option("-o,--out", pre_args.train.out,
                       "Readiness checkpoint output path");
  pretrain->add_option("--history", pre_args.train.history,
                       "Per-epoch history CSV path");
  pretrain->add_option("--mask", pre_args.train.mask,
                       "Feature groups, letters from FGHSO");
  pretrain->add_option("--variant", pre_args.train.variant, "Trunk variant");
  pretrain->add_option("--hidden", pre_args.train.hidden,
                       "Hidden state width");
  pretrain->add_option("--epochs", pre_args.train.epochs, "Training epochs");
  pretrain->add_option("--batch", pre_args.train.batch, "Minibatch size");
  pretrain->add_option("--lr", pre_args.train.lr, "Adam learning rate");
  pretrain->add_option("--stride", pre_args.stride,
                       "Frames between readiness windows");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Report MAEs for a checkpoint");
  add_common_flags(eval, eval_args.common);
  eval->add_option("-c,--checkpoint", eval_args.checkpoint, "Checkpoint path");
  eval->add_option("-e,--events", eval_args.events, "Event file");
  eval->add_option("--split", eval_args.split, "train | val | test | all");
  eval->add_flag("--best-of-k", eval_args.best_of_k,
                 "Score each sample by its best mode per column (MM only)");
  eval->add_option("--report", eval_args.report, "Report CSV path");

  AblateArgs ablate_args;
  CLI::App* ablate =
      app.add_subcommand("ablate", "Train/evaluate across feature masks");
  add_common_flags(ablate, ablate_args.common);
  ablate->add_option("-e,--events", ablate_args.events, "Event file");
  ablate->add_option("--masks", ablate_args.masks_csv,
                     "Comma-separated mask labels (default: the standard 11)");
  ablate->add_option("--seeds", ablate_args.seeds_csv,
                     "Comma-separated seeds");
  ablate->add_option("--variant", ablate_args.variant, "Model variant");
  ablate->add_option("--hidden", ablate_args.hidden, "Hidden state width");
  ablate->add_option("--epochs", ablate_args.epochs, "Training epochs");
  ablate->add_flag("--raw", ablate_args.raw,
                   "Train on raw samples only (no augmentation)");
  ablate->add_option("--report", ablate_args.report, "Mean report CSV path");
  ablate->add_option("--points", ablate_args.points,
                     "Per-seed points CSV path");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Train/evaluate across training-set fractions");
  add_common_flags(sweep, sweep_args.common);
  sweep->add_option("-e,--events", sweep_args.events, "Event file");
  sweep->add_option("--fractions", sweep_args.fractions_csv,
                    "Comma-separated fractions in (0,1]");
  sweep->add_option("--seeds", sweep_args.seeds_csv, "Comma-separated seeds");
  sweep->add_option("--mask", sweep_args.mask, "Feature mask label");
  sweep->add_option("--hidden", sweep_args.hidden, "Hidden state width");
  sweep->add_option("--epochs", sweep_args.epochs, "Training epochs");
  sweep->add_flag("--raw", sweep_args.raw,
                  "Train on raw samples only (no augmentation)");
  sweep->add_option("--report", sweep_args.report, "Mean report CSV path");
  sweep->add_option("--points", sweep_args.points, "Per-seed points CSV path");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand(
      "predict", "Windowed or streaming take-over-time prediction");
  add_common_flags(predict, predict_args.common);
  predict->add_option("-c,--checkpoint", predict_args.checkpoint,
                      "Checkpoint path");
  predict->add_flag("--stream", predict_args.stream,
                    "Read frame lines from stdin, predict per window");
  predict->add_option("--window", predict_args.window_file,
                      "File with exactly one 2 s window of frame lines");
  predict->add_option("--stride", predict_args.stride,
                      "Frames between predictions in --stream mode");

  PredictArgs decide_args;
  CLI::App* decide =
      app.add_subcommand("decide", "Apply the handover criterion");
  add_common_flags(decide, decide_args.common);
  decide->add_option("-c,--checkpoint", decide_args.checkpoint,
                     "Checkpoint path");
  decide->add_flag("--stream", decide_args.stream,
                   "Read frame lines from stdin, decide per window");
  decide->add_option("--window", decide_args.window_file,
                     "File with exactly one 2 s window of frame lines");
  decide->add_option("--stride", decide_args.stride,
                     "Frames between decisions in --stream mode");
  decide->add_option("--tot", decide_args.tot,
                     "Skip prediction and decide for this take-over time");
  decide->add_option("--ttc", decide_args.ttc, "Time to collision, seconds");
  decide->add_option("--epsilon", decide_args.epsilon,
                     "Maneuvering margin, seconds");
  decide->add_option("--policy", decide_args.policy,
                     "most_probable | expected | worst_mode (MM only)");

  ConfigArgs config_args;
  CLI::App* config = app.add_subcommand("config", "Configuration helpers");
  add_common_flags(config, config_args.common);
  config->add_flag("--dump", config_args.dump,
                   "Print the fully resolved experiment config");
  config->add_option("-o,--out", config_args.out, "Write to a file instead");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (train->parsed()) return cmd_train(train_args);
    if (pretrain->parsed()) return cmd_pretrain(pre_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (ablate->parsed()) return cmd_ablate(ablate_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    if (predict->parsed()) return cmd_predict(predict_args);
    if (decide->parsed()) return cmd_decide(decide_args);
    if (config->parsed()) return cmd_config(config_args);
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return kExitUsage;
  } catch (const tot::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const tot::DataFormatError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
