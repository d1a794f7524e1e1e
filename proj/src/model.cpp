#include "tot/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <sstream>
#include <stdexcept>

#include "tot/common.hpp"

namespace tot {

bool is_multimodal(Variant v) {
  return v == Variant::BaselineLSTM_MM || v == Variant::IndependentLSTMs_MM;
}

bool is_independent(Variant v) {
  return v == Variant::IndependentLSTMs || v == Variant::IndependentLSTMs_MM;
}

namespace {
constexpr const char* kVariantNames[] = {"baseline_lstm", "independent_lstms",
                                         "baseline_lstm_mm",
                                         "independent_lstms_mm"};
}

const char* to_string(Variant v) {
  return kVariantNames[static_cast<int>(v)];
}

Variant variant_from_string(const std::string& s) {
  for (int i = 0; i < 4; ++i) {
    if (s == kVariantNames[i]) return static_cast<Variant>(i);
  }
  std::ostringstream os;
  os << "unknown model variant \"" << s << "\" (expected one of:";
  for (const char* name : kVariantNames) os << ' ' << name;
  os << ')';
  throw DataFormatError(os.str());
}

std::vector<std::string> validate_config(const ModelConfig& cfg) {
  std::vector<std::string> problems;
  if (cfg.input_dim < 1) problems.push_back("input_dim must be >= 1");
  if (cfg.hidden_dim < 1) problems.push_back("hidden_dim must be >= 1");
  if (is_multimodal(cfg.variant) && cfg.num_modes < 2) {
    problems.push_back("num_modes must be >= 2 for multimodal variants");
  }
  return problems;
}

const TensorSpec* ParamLayout::find(std::string_view name) const {
  for (const TensorSpec& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

const TensorSpec& ParamLayout::at(std::string_view name) const {
  const TensorSpec* t = find(name);
  if (!t) throw std::out_of_range("no tensor named \"" + std::string(name) + "\"");
  return *t;
}

ParamLayout make_layout(const ModelConfig& cfg, HeadKind head) {
  const int d = cfg.input_dim;
  const int h = cfg.hidden_dim;
  const int cells = is_independent(cfg.variant) ? 3 : 1;
  const int width = h * cells;

  ParamLayout layout;
  auto add = [&layout](std::string name, int rows, int cols, int fan_in) {
    TensorSpec t{std::move(name), layout.total_size, rows, cols, fan_in};
    layout.total_size += t.size();
    layout.tensors.push_back(std::move(t));
  };

  add("input.w", h, d, d);
  add("input.b", h, 1, d);
  for (int i = 0; i < cells; ++i) {
    const std::string prefix = "cell" + std::to_string(i);
    add(prefix + ".wx", 4 * h, h, h);
    add(prefix + ".wh", 4 * h, h, h);
    add(prefix + ".b", 4 * h, 1, h);
  }
  if (head == HeadKind::Readiness) {
    add("head.readiness.w", 1, width, width);
    add("head.readiness.b", 1, 1, width);
  } else if (is_multimodal(cfg.variant)) {
    const int k = cfg.num_modes;
    add("head.time.w", 3 * k, width, width);
    add("head.time.b", 3 * k, 1, width);
    add("head.mode.w", k, width, width);
    add("head.mode.b", k, 1, width);
  } else if (is_independent(cfg.variant)) {
    // One shared output transform, applied to each cell's final state.
    add("head.time.w", 1, h, h);
    add("head.time.b", 1, 1, h);
  } else {
    add("head.time.w", 3, h, h);
    add("head.time.b", 3, 1, h);
  }
  return layout;
}

double* Model::tensor(std::string_view name) {
  return params.data() + layout.at(name).offset;
}

const double* Model::tensor(std::string_view name) const {
  return params.data() + layout.at(name).offset;
}

namespace {

Model make_model(const ModelConfig& cfg, const FeatureMask& mask,
                 HeadKind head) {
  std::vector<std::string> problems = validate_config(cfg);
  if (!problems.empty()) {
    throw std::invalid_argument("model config: " + problems.front());
  }
  if (cfg.input_dim != feature_dim(mask)) {
    std::ostringstream os;
    os << "model config input_dim " << cfg.input_dim
       << " does not match feature mask " << mask_label(mask) << " width "
       << feature_dim(mask);
    throw std::invalid_argument(os.str());
  }

  Model m;
  m.config = cfg;
  m.head_kind = head;
  m.mask = mask;
  m.layout = make_layout(cfg, head);
  m.params.resize(m.layout.total_size);

  std::mt19937_64 rng(cfg.seed);
  for (const TensorSpec& t : m.layout.tensors) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    double* p = m.params.data() + t.offset;
    for (std::size_t i = 0; i < t.size(); ++i) p[i] = dist(rng);
  }
  // Bias the forget gates open so early training keeps long-range state.
  const int h = cfg.hidden_dim;
  for (int i = 0; i < m.num_cells(); ++i) {
    double* b = m.tensor("cell" + std::to_string(i) + ".b");
    for (int j = h; j < 2 * h; ++j) b[j] += 1.0;
  }
  return m;
}

}  // namespace

Model make_tot_model(const ModelConfig& cfg, const FeatureMask& mask) {
  return make_model(cfg, mask, HeadKind::TakeoverTimes);
}

Model make_ori_model(const ModelConfig& cfg, const FeatureMask& mask) {
  return make_model(cfg, mask, HeadKind::Readiness);
}

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double softplus(double x) {
  // log(1 + e^x); for large x the linear term dominates and exp overflows.
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

void softmax_inplace(double* logits, int n) {
  double mx = logits[0];
  for (int i = 1; i < n; ++i) mx = std::max(mx, logits[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    logits[i] = std::exp(logits[i] - mx);
    sum += logits[i];
  }
  for (int i = 0; i < n; ++i) logits[i] /= sum;
}

namespace {

// y = W x + b with W [rows x cols] column-major; the column walk makes the
// inner loop a unit-stride axpy.
void matvec(const double* w, int rows, int cols, const double* x,
            const double* b, double* y) {
  if (b) {
    std::memcpy(y, b, static_cast<std::size_t>(rows) * sizeof(double));
  } else {
    std::fill(y, y + rows, 0.0);
  }
  for (int j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = w + static_cast<std::size_t>(j) * rows;
    for (int i = 0; i < rows; ++i) y[i] += col[i] * xj;
  }
}

void check_finite(const double* v, int n, const char* what) {
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(v[i])) {
      std::ostringstream os;
      os << what << " contains non-finite value at index " << i;
      throw NumericError(os.str());
    }
  }
}

}  // namespace

void lstm_cell_step(const double* wx, const double* wh, const double* b,
                    int in_dim, int hidden_dim, const double* x,
                    const double* h_prev, const double* c_prev, double* h_out,
                    double* c_out, double* gates_out) {
  check_finite(x, in_dim, "lstm_cell_step: x");
  check_finite(h_prev, hidden_dim, "lstm_cell_step: h");
  check_finite(c_prev, hidden_dim, "lstm_cell_step: c");

  const int h = hidden_dim;
  double stack_buf[256];
  std::vector<double> heap_buf;
  double* a = stack_buf;
  if (4 * h > 256) {
    heap_buf.resize(static_cast<std::size_t>(4 * h));
    a = heap_buf.data();
  }

  matvec(wx, 4 * h, in_dim, x, b, a);
  // Accumulate the recurrent term on top of the input term.
  for (int j = 0; j < h; ++j) {
    const double hj = h_prev[j];
    const double* col = wh + static_cast<std::size_t>(j) * 4 * h;
    for (int i = 0; i < 4 * h; ++i) a[i] += col[i] * hj;
  }

  double* gi = a;
  double* gf = a + h;
  double* gg = a + 2 * h;
  double* go = a + 3 * h;
  for (int i = 0; i < h; ++i) {
    gi[i] = sigmoid(gi[i]);
    gf[i] = sigmoid(gf[i]);
    gg[i] = std::tanh(gg[i]);
    go[i] = sigmoid(go[i]);
  }
  for (int i = 0; i < h; ++i) {
    const double c_new = gf[i] * c_prev[i] + gi[i] * gg[i];
    c_out[i] = c_new;
    h_out[i] = go[i] * std::tanh(c_new);
  }
  if (gates_out) {
    std::memcpy(gates_out, a, static_cast<std::size_t>(4 * h) * sizeof(double));
  }
}

namespace {

// Shared recurrence: fills final_h with each cell's last hidden state
// (num_cells * h values). Scratch-only; no tape.
void run_trunk(const Model& m, const double* window, int rows, int cols,
               double* final_h) {
  if (cols != m.config.input_dim) {
    std::ostringstream os;
    os << "window has " << cols << " columns, model expects "
       << m.config.input_dim;
    throw std::invalid_argument(os.str());
  }
  if (rows < 1) throw std::invalid_argument("window must have at least 1 row");
  // Reject bad input here: the ReLU on the input transform would otherwise
  // silently map NaN to 0.
  check_finite(window, rows * cols, "forward: window");

  const int h = m.config.hidden_dim;
  const int cells = m.num_cells();
  const double* w_in = m.tensor("input.w");
  const double* b_in = m.tensor("input.b");

  std::vector<double> u(static_cast<std::size_t>(h));
  std::vector<double> hs(static_cast<std::size_t>(cells) * h, 0.0);
  std::vector<double> cs(static_cast<std::size_t>(cells) * h, 0.0);
  std::vector<double> h_next(static_cast<std::size_t>(h));
  std::vector<double> c_next(static_cast<std::size_t>(h));

  struct CellParams {
    const double* wx;
    const double* wh;
    const double* b;
  };
  CellParams cp[3];
  for (int i = 0; i < cells; ++i) {
    const std::string prefix = "cell" + std::to_string(i);
    cp[i] = {m.tensor(prefix + ".wx"), m.tensor(prefix + ".wh"),
             m.tensor(prefix + ".b")};
  }

  for (int t = 0; t < rows; ++t) {
    const double* x = window + static_cast<std::size_t>(t) * cols;
    matvec(w_in, h, cols, x, b_in, u.data());
    for (int i = 0; i < h; ++i) u[static_cast<std::size_t>(i)] = std::max(0.0, u[static_cast<std::size_t>(i)]);
    for (int ci = 0; ci < cells; ++ci) {
      double* hc = hs.data() + static_cast<std::size_t>(ci) * h;
      double* cc = cs.data() + static_cast<std::size_t>(ci) * h;
      lstm_cell_step(cp[ci].wx, cp[ci].wh, cp[ci].b, h, h, u.data(), hc, cc,
                     h_next.data(), c_next.data());
      std::memcpy(hc, h_next.data(), static_cast<std::size_t>(h) * sizeof(double));
      std::memcpy(cc, c_next.data(), static_cast<std::size_t>(h) * sizeof(double));
    }
  }
  std::memcpy(final_h, hs.data(),
              static_cast<std::size_t>(cells) * h * sizeof(double));
}

}  // namespace

int Prediction::most_probable_mode() const {
  int best = 0;
  for (int k = 1; k < num_modes(); ++k) {
    if (mode_probs[static_cast<std::size_t>(k)] >
        mode_probs[static_cast<std::size_t>(best)]) {
      best = k;
    }
  }
  return best;
}

std::array<double, 3> Prediction::mode(int k) const {
  return {mode_times[static_cast<std::size_t>(3 * k)],
          mode_times[static_cast<std::size_t>(3 * k + 1)],
          mode_times[static_cast<std::size_t>(3 * k + 2)]};
}

Prediction forward(const Model& m, const double* window, int rows, int cols) {
  if (m.head_kind != HeadKind::TakeoverTimes) {
    throw std::invalid_argument(
        "forward: model has a readiness head; use forward_readiness");
  }
  const int h = m.config.hidden_dim;
  const int width = m.head_width();
  std::vector<double> final_h(static_cast<std::size_t>(width));
  run_trunk(m, window, rows, cols, final_h.data());

  Prediction pred;
  if (m.multimodal()) {
    const int k = m.config.num_modes;
    pred.mode_times.resize(static_cast<std::size_t>(3 * k));
    pred.mode_probs.resize(static_cast<std::size_t>(k));
    matvec(m.tensor("head.time.w"), 3 * k, width, final_h.data(),
           m.tensor("head.time.b"), pred.mode_times.data());
    for (double& v : pred.mode_times) v = softplus(v);
    matvec(m.tensor("head.mode.w"), k, width, final_h.data(),
           m.tensor("head.mode.b"), pred.mode_probs.data());
    softmax_inplace(pred.mode_probs.data(), k);
    check_finite(pred.mode_times.data(), 3 * k, "forward: mode times");
    check_finite(pred.mode_probs.data(), k, "forward: mode probabilities");
    pred.times = pred.mode(pred.most_probable_mode());
  } else if (is_independent(m.config.variant)) {
    const double* w = m.tensor("head.time.w");
    const double b = m.tensor("head.time.b")[0];
    for (int ci = 0; ci < 3; ++ci) {
      const double* hc = final_h.data() + static_cast<std::size_t>(ci) * h;
      double y = b;
      for (int i = 0; i < h; ++i) y += w[i] * hc[i];
      pred.times[static_cast<std::size_t>(ci)] = softplus(y);
    }
    check_finite(pred.times.data(), 3, "forward: times");
  } else {
    double y[3];
    matvec(m.tensor("head.time.w"), 3, h, final_h.data(),
           m.tensor("head.time.b"), y);
    for (int i = 0; i < 3; ++i) pred.times[static_cast<std::size_t>(i)] = softplus(y[i]);
    check_finite(pred.times.data(), 3, "forward: times");
  }
  return pred;
}

Prediction forward(const Model& m, std::span<const double> window, int rows,
                   int cols) {
  if (window.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("forward: window size != rows * cols");
  }
  return forward(m, window.data(), rows, cols);
}

double forward_readiness(const Model& m, const double* window, int rows,
                         int cols) {
  if (m.head_kind != HeadKind::Readiness) {
    throw std::invalid_argument(
        "forward_readiness: model has a take-over-time head");
  }
  const int width = m.head_width();
  std::vector<double> final_h(static_cast<std::size_t>(width));
  run_trunk(m, window, rows, cols, final_h.data());

  const double* w = m.tensor("head.readiness.w");
  double y = m.tensor("head.readiness.b")[0];
  for (int i = 0; i < width; ++i) y += w[i] * final_h[static_cast<std::size_t>(i)];
  const double r = sigmoid(y);
  if (!std::isfinite(r)) throw NumericError("forward_readiness: non-finite output");
  return r;
}

}  // namespace tot
