#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pwvcast/time_series.hpp"

namespace pwvcast {

inline constexpr std::size_t kWindowWidth = 48;

struct Window {
  std::vector<double> inputs;
  double label = 0.0;
  std::int64_t label_epoch_s = 0;

  friend bool operator==(const Window&, const Window&) = default;
};

// Sliding windows with next-step labels. Every window's inputs and label are
// width + 1 consecutive present samples; windows are ordered by label time.
struct WindowSet {
  std::vector<Window> windows;
  std::size_t width = kWindowWidth;

  std::size_t size() const noexcept { return windows.size(); }
  bool empty() const noexcept { return windows.empty(); }
  friend bool operator==(const WindowSet&, const WindowSet&) = default;
};

struct SplitSet {
  WindowSet train;
  WindowSet test;
  double train_fraction = 0.8;
  std::vector<std::string> warnings;
};

// Unit stride; a segment of length L yields max(0, L - width) windows.
WindowSet make_windows(const TimeSeries& series, std::size_t width = kWindowWidth);

// First floor(fraction * N) windows go to train. With purge set, the first
// `width` test windows (whose inputs overlap train labels) are dropped.
SplitSet chrono_split(const WindowSet& windows, double train_fraction = 0.8, bool purge = false);

}  // namespace pwvcast
