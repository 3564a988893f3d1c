#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <sstream>

#include "dahar/bench.hpp"
#include "dahar/data.hpp"
#include "dahar/io.hpp"
#include "dahar/model_io.hpp"
#include "dahar/training.hpp"

namespace dahar::cli {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Settings for the random model used when no --model is given.
struct ModelSource {
  std::string path;
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t classes = 3;

  void add_to(CLI::App* app) {
    app->add_option("--model", path, "Model file (default: randomly initialised model)");
    app->add_option("--height", height, "Input height of the random model")
        ->check(CLI::PositiveNumber);
    app->add_option("--width", width, "Input width of the random model")
        ->check(CLI::PositiveNumber);
    app->add_option("--classes", classes, "Class count of the random model")
        ->check(CLI::PositiveNumber);
  }

  ModelBundle load(std::uint64_t seed) const {
    if (!path.empty()) return load_model(path);
    ModelConfig config;
    config.backbone.input_height = height;
    config.backbone.input_width = width;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < classes; ++i) labels.push_back("class" + std::to_string(i));
    return make_bundle(config, std::move(labels), seed);
  }
};

/// Frames of a clip, resized to the model input.
std::vector<Tensor<float>> clip_frames(const std::string& path, const ModelBundle& model) {
  const auto& bb = model.config.backbone;
  return preprocess(load_clip(path), bb.input_height, bb.input_width);
}

// Adds the shared --config and --seed options to a subcommand.
void common(CLI::App* app, std::uint64_t& seed) {
  app->add_option("--config", "key = value settings file; flags take precedence");
  app->add_option("--seed", seed, "Random seed");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

/// `key = value` lines as `--key value` arguments; `#` starts a comment.
/// Boolean keys become bare flags when true and vanish when false.
std::vector<std::string> config_arguments(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  std::istringstream in(std::string(bytes.begin(), bytes.end()));
  std::vector<std::string> out;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) +
                                  ": expected key = value");
    }
    const std::string value = trim(line.substr(eq + 1));
    if (value == "false") continue;
    out.push_back("--" + key);
    if (value != "true") out.push_back(value);
  }
  return out;
}

/// Inserts the contents of any --config file directly after the subcommand
/// name, so explicit flags (parsed later, last value wins) take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::string config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) config = args[i].substr(9);
  }
  if (config.empty() || args.empty()) return args;
  std::vector<std::string> out{args.front()};
  for (auto& a : config_arguments(config)) out.push_back(std::move(a));
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-attention CNN + Bi-GRU action recognition", "dahar"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::uint64_t seed = 0;
  std::function<void()> action;

  // synth-data
  SynthSpec synth;
  std::string synth_out;
  {
    auto* sub = app.add_subcommand("synth-data", "Generate the synthetic motion dataset");
    common(sub, seed);
    sub->add_option("--out", synth_out, "Output directory")->required();
    sub->add_option("--classes", synth.num_classes, "Number of motion classes")
        ->check(CLI::Range(std::size_t{2}, kMaxSynthClasses));
    sub->add_option("--clips-per-class", synth.clips_per_class, "Clips per class");
    sub->add_option("--frames", synth.frames, "Frames per clip");
    sub->add_option("--size", synth.size, "Frame side length in pixels");
    sub->add_option("--train-fraction", synth.train_fraction, "Share of each class for training")
        ->check(CLI::Range(0.0, 1.0));
    sub->callback([&] {
      action = [&] {
        const Manifest m = synth_dataset(synth, seed, synth_out);
        out << "wrote " << m.rows.size() << " clips and "
            << (fs::path(synth_out) / "manifest.csv").string() << "\n";
      };
    });
  }

  // import-frames
  std::string frames_dir, clip_out;
  {
    auto* sub = app.add_subcommand("import-frames", "Pack a directory of P6 frames into a clip");
    common(sub, seed);
    sub->add_option("--frames-dir", frames_dir, "Directory of .ppm frames")->required();
    sub->add_option("--out", clip_out, "Output clip file")->required();
    sub->callback([&] {
      action = [&] {
        const RawClip clip = import_frames(frames_dir);
        save_clip(clip_out, clip);
        out << "wrote " << clip.frame_count << " frames of " << clip.height << "x" << clip.width
            << " to " << clip_out << "\n";
      };
    });
  }

  // train
  TrainConfig train_config;
  std::string manifest_path, model_out, history_out, keep = "best";
  std::size_t train_h = 64, train_w = 64;
  bool unidirectional = false;
  {
    auto* sub = app.add_subcommand("train", "Train a model on a manifest");
    common(sub, seed);
    sub->add_option("--manifest", manifest_path, "Manifest CSV")->required();
    sub->add_option("--out", model_out, "Output model file")->required();
    sub->add_option("--history", history_out, "Write per-epoch metrics as CSV");
    sub->add_option("--height", train_h, "Model input height (multiple of 16)");
    sub->add_option("--width", train_w, "Model input width (multiple of 16)");
    sub->add_option("--lr", train_config.learning_rate, "Adam learning rate");
    sub->add_option("--batch-size", train_config.batch_size, "Windows per mini-batch");
    sub->add_option("--epochs", train_config.epochs, "Training epochs");
    sub->add_option("--keep", keep, "Which weights to save")
        ->check(CLI::IsMember({"best", "final"}));
    sub->add_flag("--unidirectional", unidirectional, "Forward-only GRU layers");
    sub->callback([&] {
      action = [&] {
        const Manifest manifest = read_manifest(manifest_path);
        ModelConfig config;
        config.backbone.input_height = train_h;
        config.backbone.input_width = train_w;
        config.recurrent.bidirectional = !unidirectional;
        train_config.seed = seed;
        const ModelBundle initial = make_bundle(config, manifest.classes(), seed);
        TrainResult result = train(initial, manifest, train_config, [&](const EpochRecord& r) {
          out << "epoch " << r.epoch << " loss " << fixed(r.train_loss) << " train_acc "
              << fixed(r.train_accuracy, 4) << " val_acc " << fixed(r.val_accuracy, 4) << "\n";
        });
        if (!history_out.empty()) result.history.save(history_out);
        const ModelBundle& chosen = keep == "best" ? result.best_model : result.final_model;
        save_model(chosen, model_out);
        out << "saved " << keep << " model";
        if (keep == "best") out << " (epoch " << result.best_epoch << ")";
        out << " to " << model_out << "\n";
      };
    });
  }

  // eval
  std::string eval_model, eval_manifest, eval_split = "val";
  {
    auto* sub = app.add_subcommand("eval", "Clip-level accuracy on a manifest split");
    common(sub, seed);
    sub->add_option("--model", eval_model, "Model file")->required();
    sub->add_option("--manifest", eval_manifest, "Manifest CSV")->required();
    sub->add_option("--split", eval_split, "Split to evaluate")
        ->check(CLI::IsMember({"train", "val", "test"}));
    sub->callback([&] {
      action = [&] {
        const ModelBundle model = load_model(eval_model);
        const EvalResult r =
            evaluate(model, read_manifest(eval_manifest), parse_split(eval_split));
        out << "accuracy " << fixed(r.accuracy, 4) << " (" << r.correct << "/" << r.total
            << ")\nconfusion (rows true, columns predicted):\n";
        for (std::size_t t = 0; t < r.confusion.size(); ++t) {
          out << "  " << model.labels[t];
          for (std::size_t n : r.confusion[t]) out << " " << n;
          out << "\n";
        }
      };
    });
  }

  // predict
  ModelSource predict_source;
  std::string predict_clip;
  {
    auto* sub = app.add_subcommand("predict", "Class probabilities for one clip");
    common(sub, seed);
    predict_source.add_to(sub);
    sub->add_option("--clip", predict_clip, "Clip file")->required();
    sub->callback([&] {
      action = [&] {
        const ModelBundle model = predict_source.load(seed);
        const auto windows =
            make_sequences(clip_frames(predict_clip, model), model.config.recurrent.sequence_length,
                           model.config.recurrent.sequence_length);
        const std::vector<float> probs = predict_windows(model.params, model.config, windows);
        const std::vector<double> p(probs.begin(), probs.end());
        for (std::size_t k = 0; k < p.size(); ++k) {
          out << model.labels[k] << " " << fixed(p[k], 6) << "\n";
        }
        const std::size_t best = argmax(p);
        out << "predicted " << model.labels[best] << " " << fixed(p[best], 6) << "\n";
      };
    });
  }

  // saliency
  ModelSource saliency_source;
  std::string saliency_clip, saliency_dir;
  std::size_t saliency_frame = 0;
  {
    auto* sub = app.add_subcommand("saliency", "Write the four spatial attention maps as P5 files");
    common(sub, seed);
    saliency_source.add_to(sub);
    sub->add_option("--clip", saliency_clip, "Clip file")->required();
    sub->add_option("--frame", saliency_frame, "Frame index within the clip");
    sub->add_option("--out-dir", saliency_dir, "Output directory")->required();
    sub->callback([&] {
      action = [&] {
        const ModelBundle model = saliency_source.load(seed);
        const auto frames = clip_frames(saliency_clip, model);
        if (saliency_frame >= frames.size()) {
          throw std::out_of_range("frame " + std::to_string(saliency_frame) + " outside a " +
                                  std::to_string(frames.size()) + "-frame clip");
        }
        const auto maps =
            saliency_maps(frames[saliency_frame], model.params.backbone, model.config.backbone);
        fs::create_directories(saliency_dir);
        for (std::size_t s = 0; s < maps.size(); ++s) {
          const fs::path path =
              fs::path(saliency_dir) / ("saliency_block" + std::to_string(s + 1) + ".pgm");
          write_pgm(path, maps[s]);
          out << path.string() << " " << maps[s].dim(0) << "x" << maps[s].dim(1) << "\n";
        }
      };
    });
  }

  // bench
  ModelSource bench_source;
  BenchOptions bench_options;
  {
    auto* sub = app.add_subcommand("bench", "Per-frame inference throughput");
    common(sub, seed);
    bench_source.add_to(sub);
    sub->add_option("--warmup", bench_options.warmup, "Untimed warm-up frames");
    sub->add_option("--timed", bench_options.timed, "Timed frames")->check(CLI::PositiveNumber);
    sub->add_option("--threads", bench_options.threads,
                    "Worker threads for the multi-threaded run (1 = single-threaded only)")
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      action = [&] {
        const ModelBundle model = bench_source.load(seed);
        BenchOptions opts = bench_options;
        opts.height = model.config.backbone.input_height;
        opts.width = model.config.backbone.input_width;
        opts.seed = seed;
        std::vector<std::size_t> modes{1};
        if (bench_options.threads > 1) modes.push_back(bench_options.threads);
        for (std::size_t threads : modes) {
          opts.threads = threads;
          const BenchReport report = bench(model, opts);
          out << report.text() << report.record() << "\n";
        }
      };
    });
  }

  if (!args.empty() && args.front().rfind('-', 0) != 0 &&
      app.get_subcommand_no_throw(args.front()) == nullptr) {
    err << "dahar: unknown subcommand '" << args.front() << "'\n\n" << app.help();
    return 2;
  }

  try {
    const std::vector<std::string> expanded = expand_config(args);
    std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;
    err << "dahar: " << e.what() << "\n\n";
    CLI::App* shown = &app;
    for (CLI::App* sub : app.get_subcommands()) shown = sub;
    err << shown->help();
    return e.get_exit_code();
  } catch (const std::exception& e) {
    err << "dahar: error: " << e.what() << "\n";
    return 1;
  }

  try {
    action();
  } catch (const std::exception& e) {
    err << "dahar: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace dahar::cli
