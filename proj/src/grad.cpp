#include "tot/grad.hpp"

#include <cmath>
#include <cstring>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "tot/losses.hpp"

namespace tot {

namespace {

double sgn0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Per-timestep activations recorded on the forward pass and replayed
// backward. All matrices are row-per-timestep.
struct Tape {
  int rows = 0;
  int h = 0;
  int cells = 0;
  std::vector<double> u;      // rows x h, post-ReLU transformed input
  std::vector<double> gates;  // cells x rows x 4h, post-activation i,f,g,o
  std::vector<double> c;      // cells x rows x h
  std::vector<double> hid;    // cells x rows x h

  void reset(int rows_, int h_, int cells_) {
    rows = rows_;
    h = h_;
    cells = cells_;
    u.resize(static_cast<std::size_t>(rows) * h);
    const std::size_t per_cell = static_cast<std::size_t>(rows) * h;
    gates.resize(static_cast<std::size_t>(cells) * rows * 4 * h);
    c.resize(static_cast<std::size_t>(cells) * per_cell);
    hid.resize(static_cast<std::size_t>(cells) * per_cell);
  }

  double* u_at(int t) { return u.data() + static_cast<std::size_t>(t) * h; }
  double* gates_at(int ci, int t) {
    return gates.data() +
           (static_cast<std::size_t>(ci) * rows + t) * 4 * h;
  }
  double* c_at(int ci, int t) {
    return c.data() + (static_cast<std::size_t>(ci) * rows + t) * h;
  }
  double* h_at(int ci, int t) {
    return hid.data() + (static_cast<std::size_t>(ci) * rows + t) * h;
  }
};

// y = W x + b, W [rows x cols] column-major.
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

// y += W^T x, W [rows x cols] column-major: one dot product per column.
void matvec_transpose_add(const double* w, int rows, int cols,
                          const double* x, double* y) {
  for (int j = 0; j < cols; ++j) {
    const double* col = w + static_cast<std::size_t>(j) * rows;
    double acc = 0.0;
    for (int i = 0; i < rows; ++i) acc += col[i] * x[i];
    y[j] += acc;
  }
}

// dW += dy (x) x^T, W [rows x cols] column-major: axpy per column.
void outer_add(double* dw, int rows, int cols, const double* dy,
               const double* x) {
  for (int j = 0; j < cols; ++j) {
    const double xj = x[j];
    if (xj == 0.0) continue;
    double* col = dw + static_cast<std::size_t>(j) * rows;
    for (int i = 0; i < rows; ++i) col[i] += dy[i] * xj;
  }
}

struct CellParams {
  const double* wx;
  const double* wh;
  const double* b;
};

struct HeadGradRefs {
  // Offsets into the gradient vector for each tensor, mirroring the layout.
  std::size_t input_w, input_b;
  std::size_t cell_wx[3], cell_wh[3], cell_b[3];
  std::size_t time_w = 0, time_b = 0, mode_w = 0, mode_b = 0;
  std::size_t readiness_w = 0, readiness_b = 0;
};

HeadGradRefs layout_refs(const Model& m) {
  HeadGradRefs r{};
  r.input_w = m.layout.at("input.w").offset;
  r.input_b = m.layout.at("input.b").offset;
  for (int i = 0; i < m.num_cells(); ++i) {
    const std::string prefix = "cell" + std::to_string(i);
    r.cell_wx[i] = m.layout.at(prefix + ".wx").offset;
    r.cell_wh[i] = m.layout.at(prefix + ".wh").offset;
    r.cell_b[i] = m.layout.at(prefix + ".b").offset;
  }
  if (m.head_kind == HeadKind::Readiness) {
    r.readiness_w = m.layout.at("head.readiness.w").offset;
    r.readiness_b = m.layout.at("head.readiness.b").offset;
  } else {
    r.time_w = m.layout.at("head.time.w").offset;
    r.time_b = m.layout.at("head.time.b").offset;
    if (m.multimodal()) {
      r.mode_w = m.layout.at("head.mode.w").offset;
      r.mode_b = m.layout.at("head.mode.b").offset;
    }
  }
  return r;
}

// Forward pass with tape, head evaluation, loss, head backward, then BPTT.
// Accumulates d(sample loss)/d(params) into `acc` and returns the loss.
double sample_gradient(const Model& m, const SampleView& s, LossKind kind,
                       const HeadGradRefs& refs, Tape& tape, double* acc) {
  const int h = m.config.hidden_dim;
  const int cells = m.num_cells();
  const int width = m.head_width();
  const int rows = s.rows;
  const int cols = s.cols;

  const double* w_in = m.tensor("input.w");
  const double* b_in = m.tensor("input.b");
  CellParams cp[3];
  for (int ci = 0; ci < cells; ++ci) {
    const std::string prefix = "cell" + std::to_string(ci);
    cp[ci] = {m.tensor(prefix + ".wx"), m.tensor(prefix + ".wh"),
              m.tensor(prefix + ".b")};
  }

  // Reject bad input up front: the ReLU below would silently map NaN to 0.
  for (long i = 0; i < static_cast<long>(rows) * cols; ++i) {
    if (!std::isfinite(s.window[i])) {
      throw NumericError("gradient: non-finite value in input window");
    }
  }

  tape.reset(rows, h, cells);

  // ---- forward ----
  std::vector<double> zeros(static_cast<std::size_t>(h), 0.0);
  for (int t = 0; t < rows; ++t) {
    const double* x = s.window + static_cast<std::size_t>(t) * cols;
    double* u = tape.u_at(t);
    matvec(w_in, h, cols, x, b_in, u);
    for (int i = 0; i < h; ++i) u[i] = std::max(0.0, u[i]);
    for (int ci = 0; ci < cells; ++ci) {
      const double* h_prev = t > 0 ? tape.h_at(ci, t - 1) : zeros.data();
      const double* c_prev = t > 0 ? tape.c_at(ci, t - 1) : zeros.data();
      lstm_cell_step(cp[ci].wx, cp[ci].wh, cp[ci].b, h, h, u, h_prev, c_prev,
                     tape.h_at(ci, t), tape.c_at(ci, t), tape.gates_at(ci, t));
    }
  }

  // Final hidden states, concatenated for Independent trunks.
  std::vector<double> final_h(static_cast<std::size_t>(width));
  for (int ci = 0; ci < cells; ++ci) {
    std::memcpy(final_h.data() + static_cast<std::size_t>(ci) * h,
                tape.h_at(ci, rows - 1),
                static_cast<std::size_t>(h) * sizeof(double));
  }

  // ---- head forward + loss + head backward ----
  double loss = 0.0;
  std::vector<double> d_final(static_cast<std::size_t>(width), 0.0);

  if (kind == LossKind::Mse) {
    const double* w = m.tensor("head.readiness.w");
    double y = m.tensor("head.readiness.b")[0];
    for (int i = 0; i < width; ++i) y += w[i] * final_h[static_cast<std::size_t>(i)];
    const double r = sigmoid(y);
    const double err = r - s.targets[0];
    loss = err * err;
    const double dy = 2.0 * err * r * (1.0 - r);
    double* dw = acc + refs.readiness_w;
    for (int i = 0; i < width; ++i) {
      dw[i] += dy * final_h[static_cast<std::size_t>(i)];
      d_final[static_cast<std::size_t>(i)] += dy * w[i];
    }
    acc[refs.readiness_b] += dy;
  } else if (kind == LossKind::MinOfK) {
    const int k = m.config.num_modes;
    std::vector<double> yt(static_cast<std::size_t>(3 * k));
    std::vector<double> ot(static_cast<std::size_t>(3 * k));
    std::vector<double> q(static_cast<std::size_t>(k));
    const double* wt = m.tensor("head.time.w");
    const double* wm = m.tensor("head.mode.w");
    matvec(wt, 3 * k, width, final_h.data(), m.tensor("head.time.b"),
           yt.data());
    for (int i = 0; i < 3 * k; ++i) ot[static_cast<std::size_t>(i)] = softplus(yt[static_cast<std::size_t>(i)]);
    matvec(wm, k, width, final_h.data(), m.tensor("head.mode.b"), q.data());
    softmax_inplace(q.data(), k);

    int best = 0;
    double best_err = 0.0;
    for (int mode = 0; mode < k; ++mode) {
      double e = 0.0;
      for (int c = 0; c < 3; ++c) {
        e += std::abs(ot[static_cast<std::size_t>(3 * mode + c)] - s.targets[static_cast<std::size_t>(c)]);
      }
      if (mode == 0 || e < best_err) {
        best_err = e;
        best = mode;
      }
    }
    const double qb = q[static_cast<std::size_t>(best)];
    loss = best_err - std::log(std::max(qb, kModeProbFloor));

    // Regression routes only through the selected mode's three outputs.
    std::vector<double> dyt(static_cast<std::size_t>(3 * k), 0.0);
    for (int c = 0; c < 3; ++c) {
      const std::size_t i = static_cast<std::size_t>(3 * best + c);
      dyt[i] = sgn0(ot[i] - s.targets[static_cast<std::size_t>(c)]) * sigmoid(yt[i]);
    }
    // Softmax cross-entropy against the one-hot indicator. Below the
    // probability floor the loss is the flat constant -log(floor).
    std::vector<double> dym(static_cast<std::size_t>(k), 0.0);
    if (qb >= kModeProbFloor) {
      for (int mode = 0; mode < k; ++mode) dym[static_cast<std::size_t>(mode)] = q[static_cast<std::size_t>(mode)];
      dym[static_cast<std::size_t>(best)] -= 1.0;
    }

    outer_add(acc + refs.time_w, 3 * k, width, dyt.data(), final_h.data());
    for (int i = 0; i < 3 * k; ++i) acc[refs.time_b + static_cast<std::size_t>(i)] += dyt[static_cast<std::size_t>(i)];
    outer_add(acc + refs.mode_w, k, width, dym.data(), final_h.data());
    for (int i = 0; i < k; ++i) acc[refs.mode_b + static_cast<std::size_t>(i)] += dym[static_cast<std::size_t>(i)];
    matvec_transpose_add(wt, 3 * k, width, dyt.data(), d_final.data());
    matvec_transpose_add(wm, k, width, dym.data(), d_final.data());
  } else if (is_independent(m.config.variant)) {
    // Shared scalar output transform applied per branch.
    const double* w = m.tensor("head.time.w");
    const double b = m.tensor("head.time.b")[0];
    for (int ci = 0; ci < 3; ++ci) {
      const double* hc = final_h.data() + static_cast<std::size_t>(ci) * h;
      double y = b;
      for (int i = 0; i < h; ++i) y += w[i] * hc[i];
      const double o = softplus(y);
      loss += std::abs(o - s.targets[static_cast<std::size_t>(ci)]);
      const double dy = sgn0(o - s.targets[static_cast<std::size_t>(ci)]) * sigmoid(y);
      double* dw = acc + refs.time_w;
      double* df = d_final.data() + static_cast<std::size_t>(ci) * h;
      for (int i = 0; i < h; ++i) {
        dw[i] += dy * hc[i];
        df[i] += dy * w[i];
      }
      acc[refs.time_b] += dy;
    }
  } else {
    const double* w = m.tensor("head.time.w");
    double y[3];
    matvec(w, 3, h, final_h.data(), m.tensor("head.time.b"), y);
    double dy[3];
    for (int c = 0; c < 3; ++c) {
      const double o = softplus(y[c]);
      loss += std::abs(o - s.targets[static_cast<std::size_t>(c)]);
      dy[c] = sgn0(o - s.targets[static_cast<std::size_t>(c)]) * sigmoid(y[c]);
    }
    outer_add(acc + refs.time_w, 3, h, dy, final_h.data());
    for (int c = 0; c < 3; ++c) acc[refs.time_b + static_cast<std::size_t>(c)] += dy[c];
    matvec_transpose_add(w, 3, h, dy, d_final.data());
  }

  if (!std::isfinite(loss)) {
    throw NumericError("gradient: non-finite sample loss");
  }

  // ---- backpropagation through time ----
  std::vector<double> dh(static_cast<std::size_t>(cells) * h);
  std::vector<double> dc(static_cast<std::size_t>(cells) * h, 0.0);
  std::memcpy(dh.data(), d_final.data(),
              static_cast<std::size_t>(cells) * h * sizeof(double));

  std::vector<double> da(static_cast<std::size_t>(4 * h));
  std::vector<double> du(static_cast<std::size_t>(h));
  std::vector<double> dh_prev(static_cast<std::size_t>(h));

  for (int t = rows - 1; t >= 0; --t) {
    std::fill(du.begin(), du.end(), 0.0);
    const double* u = tape.u_at(t);
    for (int ci = 0; ci < cells; ++ci) {
      const double* g = tape.gates_at(ci, t);
      const double* gi = g;
      const double* gf = g + h;
      const double* gg = g + 2 * h;
      const double* go = g + 3 * h;
      const double* ct = tape.c_at(ci, t);
      const double* c_prev = t > 0 ? tape.c_at(ci, t - 1) : zeros.data();
      const double* h_prev = t > 0 ? tape.h_at(ci, t - 1) : zeros.data();
      double* dhc = dh.data() + static_cast<std::size_t>(ci) * h;
      double* dcc = dc.data() + static_cast<std::size_t>(ci) * h;

      for (int i = 0; i < h; ++i) {
        const double tc = std::tanh(ct[i]);
        const double do_ = dhc[i] * tc;
        const double dct = dcc[i] + dhc[i] * go[i] * (1.0 - tc * tc);
        const double di = dct * gg[i];
        const double df = dct * c_prev[i];
        const double dg = dct * gi[i];
        da[static_cast<std::size_t>(i)] = di * gi[i] * (1.0 - gi[i]);
        da[static_cast<std::size_t>(h + i)] = df * gf[i] * (1.0 - gf[i]);
        da[static_cast<std::size_t>(2 * h + i)] = dg * (1.0 - gg[i] * gg[i]);
        da[static_cast<std::size_t>(3 * h + i)] = do_ * go[i] * (1.0 - go[i]);
        dcc[i] = dct * gf[i];  // becomes dc_{t-1}
      }

      outer_add(acc + refs.cell_wx[ci], 4 * h, h, da.data(), u);
      outer_add(acc + refs.cell_wh[ci], 4 * h, h, da.data(), h_prev);
      double* db = acc + refs.cell_b[ci];
      for (int i = 0; i < 4 * h; ++i) db[i] += da[static_cast<std::size_t>(i)];

      std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
      matvec_transpose_add(cp[ci].wh, 4 * h, h, da.data(), dh_prev.data());
      std::memcpy(dhc, dh_prev.data(), static_cast<std::size_t>(h) * sizeof(double));
      matvec_transpose_add(cp[ci].wx, 4 * h, h, da.data(), du.data());
    }

    // Through the shared input transform's rectifier.
    const double* x = s.window + static_cast<std::size_t>(t) * cols;
    double* din_b = acc + refs.input_b;
    double* din_w = acc + refs.input_w;
    for (int i = 0; i < h; ++i) {
      if (u[i] <= 0.0) du[static_cast<std::size_t>(i)] = 0.0;
      din_b[i] += du[static_cast<std::size_t>(i)];
    }
    // dW_in += du (x) x^T, [h x cols] column-major.
    for (int j = 0; j < cols; ++j) {
      const double xj = x[j];
      if (xj == 0.0) continue;
      double* col = din_w + static_cast<std::size_t>(j) * h;
      for (int i = 0; i < h; ++i) col[i] += du[static_cast<std::size_t>(i)] * xj;
    }
  }

  return loss;
}

}  // namespace

GradResult batch_gradient(const Model& m, std::span<const SampleView> batch,
                          LossKind kind, ExecPolicy policy) {
  if (batch.empty()) {
    throw std::invalid_argument("batch_gradient: empty batch");
  }
  const bool want_readiness = kind == LossKind::Mse;
  if (want_readiness != (m.head_kind == HeadKind::Readiness)) {
    throw std::invalid_argument(
        "batch_gradient: loss kind does not match the model head");
  }
  if (kind == LossKind::L1 && m.multimodal()) {
    throw std::invalid_argument(
        "batch_gradient: L1 loss requires a point variant");
  }
  if (kind == LossKind::MinOfK && !m.multimodal()) {
    throw std::invalid_argument(
        "batch_gradient: min-of-K loss requires a multimodal variant");
  }
  for (const SampleView& s : batch) {
    if (s.cols != m.config.input_dim || s.rows < 1 || !s.window) {
      throw std::invalid_argument(
          "batch_gradient: sample shape does not match model input_dim");
    }
  }

  const HeadGradRefs refs = layout_refs(m);
  const std::size_t nparams = m.layout.total_size;
  const long n = static_cast<long>(batch.size());
  const long nblocks = (n + kGradBlockSamples - 1) / kGradBlockSamples;

  std::vector<std::vector<double>> block_grads(
      static_cast<std::size_t>(nblocks));
  std::vector<double> block_loss(static_cast<std::size_t>(nblocks), 0.0);

  std::exception_ptr error;
  const bool parallel = policy == ExecPolicy::Parallel && nblocks > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long bi = 0; bi < nblocks; ++bi) {
    try {
      auto& acc = block_grads[static_cast<std::size_t>(bi)];
      acc.assign(nparams, 0.0);
      Tape tape;
      double loss = 0.0;
      const long lo = bi * kGradBlockSamples;
      const long hi = std::min(n, lo + kGradBlockSamples);
      for (long i = lo; i < hi; ++i) {
        loss += sample_gradient(m, batch[static_cast<std::size_t>(i)], kind,
                                refs, tape, acc.data());
      }
      block_loss[static_cast<std::size_t>(bi)] = loss;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  GradResult result;
  result.grad.assign(nparams, 0.0);
  for (long bi = 0; bi < nblocks; ++bi) {
    const auto& acc = block_grads[static_cast<std::size_t>(bi)];
    for (std::size_t i = 0; i < nparams; ++i) result.grad[i] += acc[i];
    result.loss += block_loss[static_cast<std::size_t>(bi)];
  }
  const double inv = 1.0 / static_cast<double>(n);
  result.loss *= inv;
  for (double& g : result.grad) g *= inv;
  if (!std::isfinite(result.loss)) {
    throw NumericError("batch_gradient: non-finite batch loss");
  }
  return result;
}

}  // namespace tot
