// Serial vs parallel timing for the batch kernels. Also asserts that the
// two execution policies agree bitwise, which is the whole point of the
// deterministic reduction scheme.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "tot/augment.hpp"
#include "tot/eval.hpp"
#include "tot/grad.hpp"
#include "tot/model.hpp"
#include "tot/synth.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  int events = 64;
  int hidden = 32;
  int reps = 3;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--events") == 0 && i + 1 < argc) {
      events = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--hidden") == 0 && i + 1 < argc) {
      hidden = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--reps") == 0 && i + 1 < argc) {
      reps = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr,
                   "usage: tot_bench [--events N] [--hidden H] [--reps R]\n");
      return 2;
    }
  }

  tot::SynthConfig synth = tot::with_total_count(tot::default_synth_config(),
                                                 events);
  synth.seed = 7;

  std::printf("generating %d events...\n", events);
  const auto t_synth_serial = time_best_of(reps, [&] {
    (void)tot::synthesize_events(synth, tot::ExecPolicy::Serial);
  });
  const auto t_synth_par = time_best_of(reps, [&] {
    (void)tot::synthesize_events(synth, tot::ExecPolicy::Parallel);
  });
  const tot::EventSet set =
      tot::synthesize_events(synth, tot::ExecPolicy::Parallel);
  {
    const tot::EventSet check =
        tot::synthesize_events(synth, tot::ExecPolicy::Serial);
    for (std::size_t i = 0; i < set.events.size(); ++i) {
      const auto& a = set.events[i].frames;
      const auto& b = check.events[i].frames;
      if (std::memcmp(a.data(), b.data(),
                      a.size() * sizeof(tot::FrameFeatures)) != 0) {
        std::fprintf(stderr, "synthesize: serial/parallel mismatch!\n");
        return 1;
      }
    }
  }

  const tot::FeatureMask mask;  // all feature groups
  std::vector<tot::TrainingSample> samples;
  const auto t_aug_serial = time_best_of(reps, [&] {
    samples = tot::build_training_set(set.events, mask, true,
                                      tot::ExecPolicy::Serial);
  });
  const auto t_aug_par = time_best_of(reps, [&] {
    samples = tot::build_training_set(set.events, mask, true,
                                      tot::ExecPolicy::Parallel);
  });
  std::printf("training samples: %zu\n", samples.size());

  tot::ModelConfig mc;
  mc.variant = tot::Variant::IndependentLSTMs_MM;
  mc.hidden_dim = hidden;
  mc.seed = 11;
  const tot::Model model = tot::make_tot_model(mc, mask);

  std::vector<tot::SampleView> views;
  views.reserve(samples.size());
  for (const tot::TrainingSample& s : samples) {
    views.push_back(tot::SampleView{s.window.data(), s.rows, s.cols,
                                    {s.targets[0], s.targets[1], s.targets[2]}});
  }

  tot::GradResult g_serial, g_par;
  const auto t_grad_serial = time_best_of(reps, [&] {
    g_serial = tot::batch_gradient(model, views, tot::LossKind::MinOfK,
                                   tot::ExecPolicy::Serial);
  });
  const auto t_grad_par = time_best_of(reps, [&] {
    g_par = tot::batch_gradient(model, views, tot::LossKind::MinOfK,
                                tot::ExecPolicy::Parallel);
  });
  if (std::memcmp(g_serial.grad.data(), g_par.grad.data(),
                  g_serial.grad.size() * sizeof(double)) != 0 ||
      g_serial.loss != g_par.loss) {
    std::fprintf(stderr, "gradient: serial/parallel mismatch!\n");
    return 1;
  }

  tot::MaeReport r_serial, r_par;
  const auto t_eval_serial = time_best_of(reps, [&] {
    r_serial = tot::evaluate(model, samples, tot::EvalMode::MostProbable,
                             tot::ExecPolicy::Serial);
  });
  const auto t_eval_par = time_best_of(reps, [&] {
    r_par = tot::evaluate(model, samples, tot::EvalMode::MostProbable,
                          tot::ExecPolicy::Parallel);
  });
  if (r_serial.overall_mae_s != r_par.overall_mae_s) {
    std::fprintf(stderr, "evaluate: serial/parallel mismatch!\n");
    return 1;
  }

  std::printf("\n%-22s %10s %10s %8s\n", "kernel", "serial", "parallel",
              "speedup");
  const auto row = [](const char* name, double s, double p) {
    std::printf("%-22s %9.3fs %9.3fs %7.2fx\n", name, s, p, s / p);
  };
  row("synthesize_events", t_synth_serial, t_synth_par);
  row("build_training_set", t_aug_serial, t_aug_par);
  row("batch_gradient", t_grad_serial, t_grad_par);
  row("evaluate", t_eval_serial, t_eval_par);
  std::printf("\nserial and parallel results are bitwise identical.\n");
  return 0;
}
