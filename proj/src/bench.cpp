#include "dahar/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <deque>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dahar/random.hpp"

namespace dahar {

std::string BenchReport::record() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "spf=%.9g fps=%.9g warmup=%zu timed=%zu threads=%zu", spf, fps,
                warmup_frames, timed_frames, threads);
  return buf;
}

std::string BenchReport::text() const {
  char buf[640];
  std::snprintf(buf, sizeof(buf),
                "input %zux%zu, %zu thread(s): %zu warm-up frames excluded, %zu timed frames\n"
                "  seconds per frame: %.6f\n"
                "  frames per second: %.2f\n"
                "  wall clock, steady clock; backbone per frame plus 1/16 of one recurrent "
                "stack pass per frame; excludes I/O and preprocessing\n"
                "  published CPU reference (other hardware): %.4f SPF / %.0f FPS\n",
                height, width, threads, warmup_frames, timed_frames, spf, fps, kReferenceCpuSpf,
                kReferenceCpuFps);
  return buf;
}

namespace {

using Clock = std::chrono::steady_clock;

class FrameRunner {
 public:
  FrameRunner(const ModelBundle& bundle, const ModelConfig& config, std::size_t threads)
      : bundle_(bundle), config_(config), threads_(threads) {}

  /// Backbone features for `frames`, possibly in parallel.
  std::vector<Tensor<float>> features(const std::vector<const Tensor<float>*>& frames) const {
    std::vector<Tensor<float>> out(frames.size());
    auto work = [&](std::size_t first) {
      for (std::size_t i = first; i < frames.size(); i += threads_) {
        out[i] = backbone_features(*frames[i], bundle_.params.backbone, config_.backbone);
      }
    };
    if (threads_ <= 1) {
      work(0);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < threads_; ++t) pool.emplace_back(work, t);
    }
    return out;
  }

  void stack(const std::deque<Tensor<float>>& window) const {
    Graph<float> g(false);
    const auto bound = bind(g, bundle_.params.recurrent);
    std::vector<Var<float>> seq;
    for (const auto& f : window) seq.push_back(g.constant(f));
    classify(stack_forward(seq, bound, config_.recurrent), bound.classifier);
  }

 private:
  const ModelBundle& bundle_;
  const ModelConfig& config_;
  std::size_t threads_;
};

}  // namespace

BenchReport bench(const ModelBundle& bundle, const BenchOptions& options) {
  if (options.timed == 0) throw std::invalid_argument("bench needs at least one timed frame");
  if (options.threads == 0) throw std::invalid_argument("bench needs at least one thread");
  ModelConfig config = bundle.config;
  config.backbone.input_height = options.height;
  config.backbone.input_width = options.width;
  config.validate();

  const std::size_t seq_len = config.recurrent.sequence_length;
  Rng rng(options.seed);
  std::vector<Tensor<float>> frames;
  for (std::size_t i = 0; i < seq_len; ++i) {
    Tensor<float> f({options.height, options.width, config.backbone.input_channels});
    for (float& v : f.data()) v = static_cast<float>(rng.uniform());
    frames.push_back(std::move(f));
  }

  const FrameRunner runner(bundle, config, options.threads);
  std::deque<Tensor<float>> window(seq_len, Tensor<float>({config.backbone.feature_size()}));
  std::size_t cursor = 0;

  // Runs `count` frames; returns elapsed seconds with the stack charged pro rata.
  auto run = [&](std::size_t count) {
    double seconds = 0;
    while (count > 0) {
      const std::size_t group = std::min(count, seq_len);
      std::vector<const Tensor<float>*> batch;
      for (std::size_t i = 0; i < group; ++i) batch.push_back(&frames[(cursor + i) % seq_len]);
      cursor += group;

      const auto t0 = Clock::now();
      std::vector<Tensor<float>> feats = runner.features(batch);
      const auto t1 = Clock::now();
      for (auto& f : feats) {
        window.pop_front();
        window.push_back(std::move(f));
      }
      const auto t2 = Clock::now();
      runner.stack(window);
      const auto t3 = Clock::now();

      seconds += std::chrono::duration<double>(t1 - t0).count();
      seconds += std::chrono::duration<double>(t3 - t2).count() * static_cast<double>(group) /
                 static_cast<double>(seq_len);
      count -= group;
    }
    return seconds;
  };

  run(options.warmup);
  const double total = run(options.timed);

  BenchReport report;
  report.total_seconds = total;
  report.timed_frames = options.timed;
  report.warmup_frames = options.warmup;
  report.threads = options.threads;
  report.height = options.height;
  report.width = options.width;
  report.spf = total / static_cast<double>(options.timed);
  report.fps = static_cast<double>(options.timed) / total;
  return report;
}

}  // namespace dahar
