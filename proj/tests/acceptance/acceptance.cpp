// Acceptance runner. Prints one PASS/FAIL line per criterion; pass criterion
// numbers as arguments to run a subset. Exit status is non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "dahar/attention.hpp"
#include "dahar/backbone.hpp"
#include "dahar/bench.hpp"
#include "dahar/data.hpp"
#include "dahar/io.hpp"
#include "dahar/model_io.hpp"
#include "dahar/recurrent.hpp"
#include "dahar/training.hpp"
#include "support/extract.hpp"
#include "support/gradcheck.hpp"
#include "support/tempdir.hpp"

using namespace dahar;

namespace {

// Tolerances.
constexpr double kGradTolerance = 1e-4;
constexpr double kGradStep = 1e-5;
constexpr std::size_t kGradSamples = 20;
constexpr double kGradMaxSeconds = 120;
constexpr double kOracleTolerance = 1e-6;
constexpr std::size_t kOracleInstances = 100;
constexpr double kOracleMaxSeconds = 60;
constexpr double kAttentionTolerance = 1e-6;
constexpr double kGruLimitTolerance = 1e-6;
constexpr double kGruTraceTolerance = 1e-10;
constexpr double kTrainAccuracy = 0.95;
constexpr double kValAccuracy = 0.80;
constexpr std::size_t kOverfitEpochs = 200;
constexpr double kOverfitMaxSeconds = 600;
constexpr double kAblationGap = 0.20;
constexpr std::size_t kRoundTripClips = 10;
constexpr double kReciprocalTolerance = 1e-9;
constexpr double kStabilityTolerance = 0.05;

// Frozen from tests/oracles/count_params.py for 3 classes.
constexpr std::size_t kOracleParameterCount = 182712;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

Tensor<double> uniform_tensor(Shape s, Rng& rng, double lo = 0, double hi = 1) {
  Tensor<double> t(std::move(s));
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

/// One tensor picked uniformly, then one element of it, so every parameter
/// group (conv, attention, GRU, classifier) is reachable.
std::vector<gradcheck::Entry> stratified_entries(const std::vector<Tensor<double>>& inputs,
                                                 std::size_t first, std::size_t count, Rng& rng) {
  std::vector<gradcheck::Entry> out;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t t = first + rng.below(inputs.size() - first);
    out.emplace_back(t, rng.below(inputs[t].size()));
  }
  return out;
}

// ---------------------------------------------------------------------------

Outcome gradient_fidelity() {
  const auto start = Clock::now();
  Rng rng(101);
  ModelConfig cfg;
  cfg.backbone.input_height = cfg.backbone.input_width = 32;
  const auto params = build_model<double>(cfg, 102);
  std::vector<Tensor<double>> frames;
  for (int t = 0; t < 16; ++t) frames.push_back(uniform_tensor({32, 32, 3}, rng));
  std::vector<Tensor<double>> inputs;
  gradcheck::flatten_into(params, inputs);
  const auto entries = stratified_entries(inputs, 0, kGradSamples, rng);
  const auto r = gradcheck::check_entries(
      inputs,
      [&](Graph<double>& g, const std::vector<Var<double>>& v) {
        return model_forward(g, gradcheck::unflatten(params, v, 0), cfg, frames);
      },
      entries, 103, kGradStep);
  const double secs = seconds_since(start);
  return {r.checked == kGradSamples && r.max_error < kGradTolerance && secs < kGradMaxSeconds,
          "checked=" + std::to_string(r.checked) + " max_rel_err=" + fmt("%.3e", r.max_error) +
              " (tol 1e-4) time=" + fmt("%.1f", secs) + "s (limit 120s)"};
}

Outcome oracle_equivalence() {
  const auto start = Clock::now();
  Rng rng(201);
  double conv = 0, pool = 0, bcast = 0, resize = 0;
  for (std::size_t trial = 0; trial < kOracleInstances; ++trial) {
    {
      const std::size_t h = 1 + rng.below(7), w = 1 + rng.below(7);
      const std::size_t cin = 1 + rng.below(4), cout = 1 + rng.below(4);
      const auto in = oracle::random_vec(h * w * cin, rng);
      const auto k = oracle::random_vec(9 * cin * cout, rng);
      Graph<double> g(false);
      const auto out = conv2d(g.constant(oracle::to_tensor<double>(in, {h, w, cin})),
                              g.constant(oracle::to_tensor<double>(k, {3, 3, cin, cout})));
      const auto want = oracle::conv3x3(in, h, w, cin, k, cout);
      for (std::size_t i = 0; i < want.size(); ++i)
        conv = std::max(conv, std::abs(out.value()[i] - want[i]));
    }
    {
      const std::size_t h = 2 + rng.below(9), w = 2 + rng.below(9), c = 1 + rng.below(4);
      const auto in = oracle::random_vec(h * w * c, rng);
      Graph<double> g(false);
      const auto out = maxpool2d(g.constant(oracle::to_tensor<double>(in, {h, w, c})));
      const auto want = oracle::maxpool2x2(in, h, w, c);
      for (std::size_t i = 0; i < want.size(); ++i)
        pool = std::max(pool, std::abs(out.value()[i] - want[i]));
    }
    {
      Shape full{1 + rng.below(4), 1 + rng.below(4), 1 + rng.below(4)};
      Shape sa = full, sb = full;
      for (std::size_t i = 0; i < 3; ++i) {
        const auto pick = rng.below(3);
        if (pick == 1) sa[i] = 1;
        if (pick == 2) sb[i] = 1;
      }
      const Binary kind = static_cast<Binary>(trial % 3);
      const auto a = oracle::random_vec(shape_size(sa), rng);
      const auto b = oracle::random_vec(shape_size(sb), rng);
      Shape shape;
      const auto want = oracle::broadcast(
          a, sa, b, sb,
          [kind](double p, double q) {
            return kind == Binary::add ? p + q : kind == Binary::sub ? p - q : p * q;
          },
          shape);
      Graph<double> g(false);
      const auto out = elementwise(g.constant(oracle::to_tensor<double>(a, sa)),
                                   g.constant(oracle::to_tensor<double>(b, sb)), kind);
      if (out.value().shape() != shape) bcast = INFINITY;
      for (std::size_t i = 0; i < want.size(); ++i)
        bcast = std::max(bcast, std::abs(out.value()[i] - want[i]));
    }
    {
      const std::size_t h = 1 + rng.below(12), w = 1 + rng.below(12), c = 1 + rng.below(3);
      const std::size_t oh = 1 + rng.below(20), ow = 1 + rng.below(20);
      std::vector<std::uint8_t> px(h * w * c);
      for (auto& b : px) b = static_cast<std::uint8_t>(rng.below(256));
      const auto got = resize_bilinear(px, h, w, c, oh, ow);
      const auto want = oracle::bilinear(px, h, w, c, oh, ow);
      // Compared on the normalised [0, 1] scale the pipeline feeds the model.
      for (std::size_t i = 0; i < want.size(); ++i)
        resize = std::max(resize, std::abs(got[i] - want[i]) / 255.0);
    }
  }
  const double secs = seconds_since(start);
  const double worst = std::max({conv, pool, bcast, resize});
  return {worst < kOracleTolerance && secs < kOracleMaxSeconds,
          std::to_string(kOracleInstances) + " instances each: conv=" + fmt("%.1e", conv) +
              " maxpool=" + fmt("%.1e", pool) + " broadcast=" + fmt("%.1e", bcast) +
              " bilinear=" + fmt("%.1e", resize) + " (tol 1e-6) time=" + fmt("%.2f", secs) +
              "s (limit 60s)"};
}

Outcome attention_smoke() {
  Rng rng(301);
  double worst = 0;
  std::size_t cases = 0;
  for (std::size_t c : {16u, 32u, 64u, 1u, 5u}) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t h = 1 + rng.below(16), w = 1 + rng.below(16);
      const auto f = uniform_tensor({h, w, c}, rng, -3, 3);
      Graph<double> g(false);
      const auto t = dual_attention(g.constant(f), bind(g, make_attention_block<double>(c, 128)));
      for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(t.f_rm.value()[i] - 1.25 * f[i]));
      ++cases;
    }
  }
  return {worst < kAttentionTolerance, std::to_string(cases) + " inputs max|f_rm - 1.25 f|=" +
                                           fmt("%.1e", worst) + " (tol 1e-6)"};
}

Outcome gru_algebra() {
  Rng rng(401);
  std::ostringstream detail;
  bool pass = true;

  // (a) closed update gate
  double limit = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto cell = make_gru_cell<double>(4, 8);
    cell.for_each([&](Tensor<double>& t) {
      for (double& v : t.data()) v = rng.uniform(-0.7, 0.7);
    });
    cell.w_mu.fill(-30.0 / 4.0);
    cell.u_mu.fill(0);
    const auto h_prev = uniform_tensor({8}, rng, -1, 1);
    Graph<double> g(false);
    const auto s = gru_step(g.constant(Tensor<double>({4}, 1.0)), g.constant(h_prev), bind(g, cell));
    for (std::size_t j = 0; j < 8; ++j) limit = std::max(limit, std::abs(s.h.value()[j] - h_prev[j]));
  }
  pass &= limit < kGruLimitTolerance;
  detail << "(a) max|h-h_prev|=" << fmt("%.1e", limit) << " (tol 1e-6)";

  // (b) frozen high-precision hand trace
  double trace = 0;
  {
    auto cell = make_gru_cell<double>(1, 1);
    cell.for_each([](Tensor<double>& t) { t.fill(0.1); });
    Graph<double> g(false);
    const auto s = gru_step(g.constant(Tensor<double>({1}, {1.0})),
                            g.constant(Tensor<double>({1}, {0.5})), bind(g, cell));
    trace = std::max({std::abs(s.r.value()[0] - 0.53742984534374954945),
                      std::abs(s.mu.value()[0] - 0.53742984534374954945),
                      std::abs(s.h_tilde.value()[0] - 0.12619512304214159777),
                      std::abs(s.h.value()[0] - 0.29910610278779882933)});
    auto seq_cell = make_gru_cell<double>(1, 1);
    seq_cell.w_r[0] = 0.3;
    seq_cell.u_r[0] = -0.2;
    seq_cell.w_mu[0] = 0.5;
    seq_cell.u_mu[0] = 0.4;
    seq_cell.w[0] = -0.7;
    seq_cell.u[0] = 0.6;
    std::vector<Var<double>> seq;
    for (double x : {1.0, -2.0, 0.5}) seq.push_back(g.constant(Tensor<double>({1}, {x})));
    const auto states = gru_layer(seq, bind(g, seq_cell));
    const std::array<double, 3> want{-0.37619436234430109306, -0.077614523150494138257,
                                     -0.23339236226945502907};
    for (std::size_t t = 0; t < 3; ++t)
      trace = std::max(trace, std::abs(states[t].value()[0] - want[t]));
  }
  pass &= trace < kGruTraceTolerance;
  detail << " (b) max trace err=" << fmt("%.1e", trace) << " (tol 1e-10)";

  // (c) reversal identity, exact
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto p = make_gru_cell<double>(5, 6), q = make_gru_cell<double>(5, 6);
    for (auto* cell : {&p, &q})
      cell->for_each([&](Tensor<double>& t) {
        for (double& v : t.data()) v = rng.uniform(-0.7, 0.7);
      });
    std::vector<Tensor<double>> seq;
    for (std::size_t t = 0; t < 16; ++t) seq.push_back(uniform_tensor({5}, rng, -1, 1));
    Graph<double> g(false);
    std::vector<Var<double>> fwd, rev;
    for (const auto& x : seq) fwd.push_back(g.constant(x));
    rev.assign(fwd.rbegin(), fwd.rend());
    const auto bp = bind(g, p), bq = bind(g, q);
    const auto a = bigru_layer(rev, bp, bq);
    const auto b = bigru_layer(fwd, bq, bp);
    for (std::size_t t = 0; t < 16; ++t)
      for (std::size_t j = 0; j < 6; ++j) {
        mismatches += a[15 - t].value()[j] != b[t].value()[j + 6];
        mismatches += a[15 - t].value()[j + 6] != b[t].value()[j];
      }
  }
  pass &= mismatches == 0;
  detail << " (c) reversal mismatches=" << mismatches;

  // (d) BPTT through the default stack on a 16-step sequence
  RecurrentConfig cfg;
  const auto stack = build_stack<double>(cfg, 402);
  std::vector<Tensor<double>> inputs;
  for (std::size_t t = 0; t < cfg.sequence_length; ++t)
    inputs.push_back(uniform_tensor({cfg.input_size}, rng, -1, 1));
  gradcheck::flatten_into(stack, inputs);
  const auto entries = stratified_entries(inputs, 0, kGradSamples, rng);
  const auto r = gradcheck::check_entries(
      inputs,
      [&](Graph<double>&, const std::vector<Var<double>>& v) {
        const std::vector<Var<double>> seq(v.begin(), v.begin() + 16);
        const auto bound = gradcheck::unflatten(stack, v, 16);
        return classify(stack_forward(seq, bound, cfg), bound.classifier);
      },
      entries, 403, kGradStep);
  pass &= r.max_error < kGradTolerance;
  detail << " (d) bptt max_rel_err=" << fmt("%.2e", r.max_error) << " over " << r.checked
         << " entries (tol 1e-4)";
  return {pass, detail.str()};
}

struct RunSummary {
  std::size_t first_hit = 0;  // first epoch meeting both thresholds, 0 if none
  double best_val = 0;
  double best_train = 0;
  double seconds = 0;
  EpochRecord last;
};

RunSummary overfit_run(const std::vector<ClipRecord>& train_set,
                       const std::vector<ClipRecord>& val_set, const std::vector<std::string>& labels,
                       const char* tag) {
  ModelConfig cfg;
  cfg.backbone.input_height = cfg.backbone.input_width = 32;
  cfg.recurrent.num_classes = labels.size();
  TrainConfig tc;
  tc.epochs = kOverfitEpochs;
  tc.seed = 502;
  RunSummary s;
  const auto start = Clock::now();
  const auto result = train(make_bundle(cfg, labels, 503), train_set, val_set, tc,
                            [&](const EpochRecord& r) {
                              s.best_val = std::max(s.best_val, r.val_accuracy);
                              s.best_train = std::max(s.best_train, r.train_accuracy);
                              if (!s.first_hit && r.train_accuracy >= kTrainAccuracy &&
                                  r.val_accuracy >= kValAccuracy)
                                s.first_hit = r.epoch;
                              if (r.epoch % 20 == 0) {
                                std::cerr << "  [" << tag << "] epoch " << r.epoch << " loss "
                                          << fmt("%.4f", r.train_loss) << " train "
                                          << fmt("%.3f", r.train_accuracy) << " val "
                                          << fmt("%.3f", r.val_accuracy) << "\n";
                              }
                            });
  s.seconds = seconds_since(start);
  s.last = result.history.epochs.back();
  return s;
}

Outcome temporal_learning() {
  testdata::TempDir dir;
  const SynthSpec spec;
  const auto manifest = synth_dataset(spec, 501, dir.path());
  const auto m = read_manifest(dir / "manifest.csv");
  const auto labels = m.classes();
  auto train_set = load_split(m, Split::train, labels, 32, 32, 16);
  auto val_set = load_split(m, Split::val, labels, 32, 32, 16);

  const auto temporal = overfit_run(train_set, val_set, labels, "temporal");
  shuffle_frame_order(train_set, 504);
  shuffle_frame_order(val_set, 505);
  const auto shuffled = overfit_run(train_set, val_set, labels, "shuffled");

  const bool reached = temporal.first_hit != 0;
  const bool fast = temporal.seconds < kOverfitMaxSeconds;
  const double gap = temporal.best_val - shuffled.best_val;
  std::ostringstream d;
  d << m.rows.size() << " clips (" << train_set.size() << " train/" << val_set.size()
    << " val); temporal: first epoch with train>=0.95 and val>=0.80 = "
    << (reached ? std::to_string(temporal.first_hit) : std::string("none")) << ", final train "
    << fmt("%.3f", temporal.last.train_accuracy) << " val " << fmt("%.3f", temporal.last.val_accuracy)
    << ", " << fmt("%.0f", temporal.seconds) << "s for " << kOverfitEpochs
    << " epochs (limit 600s); shuffled ablation: best val " << fmt("%.3f", shuffled.best_val)
    << " vs temporal best val " << fmt("%.3f", temporal.best_val) << ", gap "
    << fmt("%.3f", gap) << " (need >= 0.20)";
  return {reached && fast && gap >= kAblationGap, d.str()};
}

Outcome determinism() {
  testdata::TempDir a, b;
  SynthSpec spec;
  spec.clips_per_class = 4;
  spec.size = 16;
  synth_dataset(spec, 601, a.path());
  synth_dataset(spec, 601, b.path());
  std::size_t files = 0, differing = 0;
  for (const auto& e : std::filesystem::directory_iterator(a / "clips")) {
    ++files;
    differing += read_file(e.path()) != read_file(b / "clips" / e.path().filename().string());
  }
  differing += read_file(a / "manifest.csv") != read_file(b / "manifest.csv");

  const auto m = read_manifest(a / "manifest.csv");
  ModelConfig cfg;
  cfg.backbone.input_height = cfg.backbone.input_width = 16;
  TrainConfig tc;
  tc.epochs = 3;
  tc.batch_size = 4;
  tc.seed = 602;
  const auto run = [&] { return train(make_bundle(cfg, m.classes(), 603), m, tc).history; };
  const auto h1 = run(), h2 = run();
  const bool same_trace = h1.epochs == h2.epochs && h1.to_csv() == h2.to_csv();
  std::ostringstream d;
  d << "loss traces " << (same_trace ? "bit-identical" : "DIFFER") << " over " << h1.epochs.size()
    << " epochs; " << files << " clip files + manifest, " << differing << " differing";
  return {same_trace && differing == 0 && files > 0, d.str()};
}

template <typename E>
bool throws_as(const std::function<void()>& f) {
  try {
    f();
  } catch (const E&) {
    return true;
  } catch (...) {
    return false;
  }
  return false;
}

Outcome serialization() {
  testdata::TempDir dir;
  ModelConfig cfg;
  cfg.backbone.input_height = cfg.backbone.input_width = 32;
  const auto bundle = make_bundle(cfg, {"a", "b", "c"}, 701);
  save_model(bundle, dir / "m.damb");
  const auto loaded = load_model(dir / "m.damb");
  Rng rng(702);
  std::size_t identical = 0;
  for (std::size_t i = 0; i < kRoundTripClips; ++i) {
    SpriteStyle style;
    style.offset = rng.below(25);
    style.noise_seed = rng.next();
    const auto clip = render_synthetic_clip(static_cast<Motion>(rng.below(3)), style, 16, 32);
    const auto windows = make_sequences(preprocess(clip, 32, 32));
    identical += predict_windows(bundle.params, bundle.config, windows) ==
                 predict_windows(loaded.params, loaded.config, windows);
  }

  const auto bytes = read_file(dir / "m.damb");
  auto magic = bytes;
  magic[0] = 'X';
  write_file_atomic(dir / "magic.damb", magic);
  auto version = bytes;
  version[4] = 99;
  write_file_atomic(dir / "version.damb", version);
  const std::vector<std::uint8_t> cut(bytes.begin(), bytes.begin() + bytes.size() / 2);
  write_file_atomic(dir / "cut.damb", cut);
  auto trailing = bytes;
  trailing.push_back(0);
  write_file_atomic(dir / "trailing.damb", trailing);
  const bool e_magic = throws_as<BadMagicError>([&] { load_model(dir / "magic.damb"); });
  const bool e_version =
      throws_as<UnsupportedVersionError>([&] { load_model(dir / "version.damb"); });
  const bool e_cut = throws_as<TruncatedError>([&] { load_model(dir / "cut.damb"); });
  const bool e_trailing = throws_as<CorruptError>([&] { load_model(dir / "trailing.damb"); });

  std::ostringstream d;
  d << identical << "/" << kRoundTripClips << " clips bit-identical; errors: magic "
    << (e_magic ? "ok" : "MISSING") << ", version " << (e_version ? "ok" : "MISSING")
    << ", truncated " << (e_cut ? "ok" : "MISSING") << ", trailing "
    << (e_trailing ? "ok" : "MISSING");
  return {identical == kRoundTripClips && e_magic && e_version && e_cut && e_trailing, d.str()};
}

constexpr std::size_t kStabilityRepeats = 5;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

/// Median spf of `timed` and `2 * timed` runs, interleaved so slow drifts in
/// machine load hit both sides alike.
std::pair<double, double> doubling_medians(const ModelBundle& bundle, const BenchOptions& base) {
  BenchOptions doubled = base;
  doubled.timed *= 2;
  std::vector<double> a, b;
  for (std::size_t i = 0; i < kStabilityRepeats; ++i) {
    a.push_back(bench(bundle, base).spf);
    b.push_back(bench(bundle, doubled).spf);
  }
  return {median(a), median(b)};
}

Outcome bench_harness() {
  const auto bundle = make_bundle(ModelConfig{}, {"a", "b", "c"}, 801);
  const BenchOptions opts;
  const auto report = bench(bundle, opts);
  const double reciprocal = std::abs(report.fps * report.spf - 1.0);
  const std::regex record(R"(spf=[0-9.eE+-]+ fps=[0-9.eE+-]+ warmup=\d+ timed=\d+ threads=\d+)");
  const bool format = std::regex_match(report.record(), record);
  const bool single = report.threads == 1 && report.height == 64 && report.width == 64;

  const auto [base, twice] = doubling_medians(bundle, opts);
  const double drift = std::abs(twice - base) / base;

  std::cout << report.text();
  std::ostringstream d;
  d << report.record() << "; |fps*spf-1|=" << fmt("%.1e", reciprocal) << " (tol 1e-9); format "
    << (format ? "ok" : "BAD") << "; doubling timed frames changes median-of-5 spf by "
    << fmt("%.2f", 100 * drift) << "% (tol 5%); reference CPU figures "
    << kReferenceCpuSpf << " spf / " << kReferenceCpuFps << " fps are from other hardware";
  return {reciprocal < kReciprocalTolerance && format && single && drift < kStabilityTolerance,
          d.str()};
}

Outcome parameter_accounting() {
  testdata::TempDir dir;
  const auto bundle = make_bundle(ModelConfig{}, {"a", "b", "c"}, 901);
  const std::size_t params = parameter_count(bundle.params);
  save_model(bundle, dir / "m.damb");
  const auto measured = std::filesystem::file_size(dir / "m.damb");
  std::size_t formula = 4 + 4 + kModelConfigBlockSize + 4 + 4;  // magic, version, config, counts
  for (const auto& l : bundle.labels) formula += 4 + l.size();
  bundle.params.for_each([&](const Tensor<float>& t) { formula += 4 + 4 * t.rank() + 4 * t.size(); });
  std::ostringstream d;
  d << "parameters " << params << " (oracle " << kOracleParameterCount << "); file " << measured
    << " bytes (" << fmt("%.3f", static_cast<double>(measured) / 1e6) << " MB), closed form "
    << formula << ", model_file_size " << model_file_size(bundle);
  return {params == kOracleParameterCount && measured == formula &&
              measured == model_file_size(bundle),
          d.str()};
}

Outcome saliency_export() {
  Rng rng(1001);
  std::size_t bad_range = 0, bad_shape = 0, not_half = 0, inputs = 0;
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{64, 64}, {32, 48}, {96, 96}, {16, 16}}) {
    BackboneConfig cfg;
    cfg.input_height = h;
    cfg.input_width = w;
    const auto p = build_backbone<float>(cfg, rng.next());
    for (int trial = 0; trial < 3; ++trial) {
      const auto frame = uniform_tensor({h, w, 3}, rng).cast<float>();
      const auto maps = saliency_maps(frame, p, cfg);
      const auto zero = saliency_maps(frame, zero_backbone<float>(cfg), cfg);
      for (std::size_t s = 0; s < kStages; ++s) {
        const Shape want{h >> (s + 1), w >> (s + 1), 1};
        bad_shape += maps[s].shape() != want;
        bad_shape += zero[s].shape() != want;
        for (float v : maps[s].data()) bad_range += !(v > 0.0f && v < 1.0f);
        for (float v : zero[s].data()) not_half += v != 0.5f;
      }
      ++inputs;
    }
  }
  std::ostringstream d;
  d << inputs << " inputs at 4 resolutions: out-of-range values " << bad_range
    << ", wrong shapes " << bad_shape << ", zero-model values != 0.5: " << not_half;
  return {bad_range == 0 && bad_shape == 0 && not_half == 0, d.str()};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"gradient-fidelity", gradient_fidelity},
    {"oracle-equivalence", oracle_equivalence},
    {"attention-smoke", attention_smoke},
    {"gru-algebra", gru_algebra},
    {"temporal-learning", temporal_learning},
    {"determinism", determinism},
    {"serialization", serialization},
    {"bench-harness", bench_harness},
    {"parameter-accounting", parameter_accounting},
    {"saliency-export", saliency_export},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int n = std::atoi(argv[i]);
    if (n < 1 || n > 10) {
      std::cerr << "usage: " << argv[0] << " [criterion 1..10 ...]\n";
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(n));
  }
  if (selected.empty())
    for (std::size_t n = 1; n <= 10; ++n) selected.push_back(n);

  int failures = 0;
  for (std::size_t n : selected) {
    const auto& c = kCriteria[n - 1];
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << n << " " << c.name << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
