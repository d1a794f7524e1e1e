#include "tot/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tot/common.hpp"
#include "tot/event_io.hpp"

namespace tot {

using nlohmann::json;

namespace {

const char* policy_name(ExecPolicy p) {
  return p == ExecPolicy::Serial ? "serial" : "parallel";
}

ExecPolicy policy_from_name(const std::string& s) {
  if (s == "serial") return ExecPolicy::Serial;
  if (s == "parallel") return ExecPolicy::Parallel;
  throw DataFormatError("unknown execution policy \"" + s +
                        "\" (expected serial or parallel)");
}

json model_to_json(const ModelConfig& m) {
  return json{{"variant", to_string(m.variant)},
              {"input_dim", m.input_dim},
              {"hidden_dim", m.hidden_dim},
              {"num_modes", m.num_modes},
              {"seed", m.seed}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig m;
  m.variant = variant_from_string(j.at("variant").get<std::string>());
  m.input_dim = j.at("input_dim").get<int>();
  m.hidden_dim = j.at("hidden_dim").get<int>();
  m.num_modes = j.at("num_modes").get<int>();
  m.seed = j.at("seed").get<std::uint64_t>();
  return m;
}

json train_to_json(const TrainConfig& t) {
  return json{{"epochs", t.epochs},
              {"batch_size", t.batch_size},
              {"learning_rate", t.adam.lr},
              {"beta1", t.adam.beta1},
              {"beta2", t.adam.beta2},
              {"adam_eps", t.adam.eps},
              {"seed", t.seed},
              {"execution", policy_name(t.policy)},
              {"verbose", t.verbose}};
}

TrainConfig train_from_json(const json& j) {
  TrainConfig t;
  t.epochs = j.at("epochs").get<int>();
  t.batch_size = j.at("batch_size").get<int>();
  t.adam.lr = j.at("learning_rate").get<double>();
  t.adam.beta1 = j.at("beta1").get<double>();
  t.adam.beta2 = j.at("beta2").get<double>();
  t.adam.eps = j.at("adam_eps").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.policy = policy_from_name(j.at("execution").get<std::string>());
  t.verbose = j.at("verbose").get<bool>();
  return t;
}

json split_to_json(const SplitSpec& s) {
  return json{{"train", s.train},
              {"val", s.val},
              {"test", s.test},
              {"seed", s.seed}};
}

SplitSpec split_from_json(const json& j) {
  SplitSpec s;
  s.train = j.at("train").get<double>();
  s.val = j.at("val").get<double>();
  s.test = j.at("test").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

}  // namespace

ExperimentConfig default_experiment_config() {
  ExperimentConfig cfg;
  cfg.synth = default_synth_config();
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg,
                                      bool pretty) {
  json j;
  j["events_path"] = cfg.events_path;
  j["checkpoint_path"] = cfg.checkpoint_path;
  j["report_dir"] = cfg.report_dir;
  j["seed"] = cfg.seed;
  j["mask"] = mask_label(cfg.mask);
  j["model"] = model_to_json(cfg.model);
  j["train"] = train_to_json(cfg.train);
  j["split"] = split_to_json(cfg.split);
  j["synth"] = json::parse(synth_config_to_json(cfg.synth));
  j["epsilon_s"] = cfg.epsilon_s;
  j["policy"] = to_string(cfg.policy);
  return pretty ? j.dump(2) : j.dump();
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw DataFormatError("experiment config: not valid JSON");
  }
  ExperimentConfig cfg;
  try {
    cfg.events_path = j.at("events_path").get<std::string>();
    cfg.checkpoint_path = j.at("checkpoint_path").get<std::string>();
    cfg.report_dir = j.at("report_dir").get<std::string>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.mask = mask_from_label(j.at("mask").get<std::string>());
    cfg.model = model_from_json(j.at("model"));
    cfg.train = train_from_json(j.at("train"));
    cfg.split = split_from_json(j.at("split"));
    cfg.synth = synth_config_from_json(j.at("synth").dump());
    cfg.epsilon_s = j.at("epsilon_s").get<double>();
    cfg.policy = policy_from_string(j.at("policy").get<std::string>());
  } catch (const json::exception& e) {
    throw DataFormatError(std::string("experiment config: ") + e.what());
  }
  return cfg;
}

void save_experiment_config(const ExperimentConfig& cfg,
                            const std::string& path) {
  atomic_write_text(path, experiment_config_to_json(cfg) + "\n");
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataFormatError("cannot open: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return experiment_config_from_json(buf.str());
}

}  // namespace tot
