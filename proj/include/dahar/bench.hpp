#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dahar/model.hpp"

namespace dahar {

struct BenchOptions {
  std::size_t height = 64;
  std::size_t width = 64;
  std::size_t warmup = 50;
  std::size_t timed = 500;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
};

/// Published CPU figures for this architecture, quoted in reports for context
/// only; they come from different hardware.
inline constexpr double kReferenceCpuSpf = 0.0049;
inline constexpr double kReferenceCpuFps = 250.0;

struct BenchReport {
  double spf = 0;
  double fps = 0;
  double total_seconds = 0;
  std::size_t warmup_frames = 0;
  std::size_t timed_frames = 0;
  std::size_t threads = 1;
  std::size_t height = 0;
  std::size_t width = 0;

  /// `spf=<float> fps=<float> warmup=<int> timed=<int> threads=<int>`
  std::string record() const;
  std::string text() const;
};

/// Per-frame inference throughput. Each frame is one backbone pass; every
/// 16 frames (or fewer at the end) one recurrent stack pass is timed and
/// charged pro rata, so each frame carries 1/16 of the stack cost. Frame
/// synthesis, I/O and preprocessing are outside the timed region. With
/// threads > 1 the backbone passes of a group run concurrently.
BenchReport bench(const ModelBundle& bundle, const BenchOptions& options);

}  // namespace dahar
