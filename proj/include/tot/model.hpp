#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tot/features.hpp"

namespace tot {

// The four recurrent architectures. Baseline variants run one LSTM cell;
// Independent variants run three cells (eyes, foot, hands) over a shared
// input transform. _MM variants emit K candidate triples plus mode
// probabilities instead of a single point estimate.
enum class Variant {
  BaselineLSTM = 0,
  IndependentLSTMs,
  BaselineLSTM_MM,
  IndependentLSTMs_MM,
};

bool is_multimodal(Variant v);
bool is_independent(Variant v);
const char* to_string(Variant v);
// Throws DataFormatError listing the valid names.
Variant variant_from_string(const std::string& s);

// What the output head predicts: the three take-over times, or a scalar
// readiness index in [0,1] used for pretraining.
enum class HeadKind { TakeoverTimes = 0, Readiness };

struct ModelConfig {
  Variant variant = Variant::BaselineLSTM;
  int input_dim = kFullFeatureDim;
  int hidden_dim = 64;
  int num_modes = 3;  // K, MM variants only
  std::uint64_t seed = 0;
};

// One message per violated invariant (hidden_dim >= 1, input_dim >= 1,
// K >= 2 for MM variants); empty means valid.
std::vector<std::string> validate_config(const ModelConfig& cfg);

// A named view into the flat parameter vector. Matrices are stored
// column-major: element (r, c) lives at offset + c*rows + r, so a
// matrix-vector product walks columns with unit stride.
struct TensorSpec {
  std::string name;
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
  int fan_in = 0;  // drives the init bound 1/sqrt(fan_in)

  std::size_t size() const {
    return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  }
};

struct ParamLayout {
  std::vector<TensorSpec> tensors;
  std::size_t total_size = 0;

  const TensorSpec* find(std::string_view name) const;
  // Throws std::out_of_range on unknown names.
  const TensorSpec& at(std::string_view name) const;
};

// Tensor names: "input.w" [h x d] and "input.b" [h x 1] for the shared
// input transform; per cell i (0 = eyes, 1 = foot, 2 = hands for the
// Independent variants; Baseline variants have only cell0) "cell<i>.wx"
// [4h x h], "cell<i>.wh" [4h x h], "cell<i>.b" [4h x 1] with gate rows
// packed i, f, g, o; then the head tensors:
//   point Baseline:      head.time.w [3 x h],  head.time.b [3 x 1]
//   point Independent:   head.time.w [1 x h],  head.time.b [1 x 1]
//                        (one shared transform applied to each cell's state)
//   MM variants:         head.time.w [3K x W], head.time.b [3K x 1],
//                        head.mode.w [K x W],  head.mode.b [K x 1]
//   Readiness:           head.readiness.w [1 x W], head.readiness.b [1 x 1]
// where W = h for Baseline trunks and 3h (the concatenated hidden states)
// for Independent trunks.
ParamLayout make_layout(const ModelConfig& cfg, HeadKind head);

struct Model {
  ModelConfig config;
  HeadKind head_kind = HeadKind::TakeoverTimes;
  FeatureMask mask;  // which feature groups the window columns contain
  ParamLayout layout;
  std::vector<double> params;

  double* tensor(std::string_view name);
  const double* tensor(std::string_view name) const;

  int num_cells() const { return is_independent(config.variant) ? 3 : 1; }
  bool multimodal() const { return is_multimodal(config.variant); }
  // Width of the vector the head consumes: h, or 3h for Independent trunks.
  int head_width() const { return config.hidden_dim * num_cells(); }
};

// Fresh model with parameters drawn from mt19937_64(config.seed): each
// tensor uniform in +-1/sqrt(fan_in) in layout order, then every cell's
// forget-gate bias raised by +1. config.input_dim must equal
// feature_dim(mask); throws std::invalid_argument otherwise or on an
// invalid config.
Model make_tot_model(const ModelConfig& cfg, const FeatureMask& mask);
Model make_ori_model(const ModelConfig& cfg, const FeatureMask& mask);

// One LSTM cell update. wx is [4h x in_dim], wh [4h x h], b [4h], all
// column-major; gate rows are packed i, f, g, o. Gates use sigmoid for
// i/f/o and tanh for the candidate; c' = f*c + i*g, h' = o*tanh(c').
// If gates_out is non-null it receives the 4h post-activation gate values
// (the backward pass replays them). Throws NumericError on non-finite
// x/h/c input.
void lstm_cell_step(const double* wx, const double* wh, const double* b,
                    int in_dim, int hidden_dim, const double* x,
                    const double* h_prev, const double* c_prev, double* h_out,
                    double* c_out, double* gates_out = nullptr);

// Model output for one window. Point variants fill `times`; MM variants
// fill `mode_times` (K triples, mode-major) and `mode_probs` (K, sums to 1)
// and leave `times` at the most probable mode's triple for convenience.
struct Prediction {
  std::array<double, 3> times{};  // eyes, foot, hands (seconds)
  std::vector<double> mode_times;  // MM: K*3, mode k triple at [3k .. 3k+2]
  std::vector<double> mode_probs;  // MM: K

  bool multimodal() const { return !mode_probs.empty(); }
  int num_modes() const { return static_cast<int>(mode_probs.size()); }
  // Argmax of mode_probs; ties resolve to the lowest index.
  int most_probable_mode() const;
  std::array<double, 3> mode(int k) const;
};

// Runs the full recurrence over the window (row-major, rows x cols frames,
// oldest first) and applies the head. cols must equal config.input_dim and
// rows must be >= 1; throws std::invalid_argument on shape mismatch and
// NumericError if any output is non-finite. Deterministic.
Prediction forward(const Model& m, const double* window, int rows, int cols);
Prediction forward(const Model& m, std::span<const double> window, int rows,
                   int cols);

// Readiness-head forward pass; result is in [0,1] (sigmoid output).
double forward_readiness(const Model& m, const double* window, int rows,
                         int cols);

// Numerically safe helpers shared by the forward and backward passes.
double sigmoid(double x);
double softplus(double x);
// In-place stable softmax over n logits.
void softmax_inplace(double* logits, int n);

}  // namespace tot
