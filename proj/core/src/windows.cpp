#include "pwvcast/windows.hpp"

#include <algorithm>
#include <cmath>

#include "pwvcast/errors.hpp"

namespace pwvcast {

WindowSet make_windows(const TimeSeries& series, std::size_t width) {
  if (width == 0) throw ConfigError("window width must be at least 1");
  WindowSet set;
  set.width = width;

  // Scan once, tracking the length of the current gap-free run ending at i.
  std::size_t run = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series[i]) {
      run = 0;
      continue;
    }
    ++run;
    if (run <= width) continue;
    Window w;
    w.inputs.reserve(width);
    for (std::size_t j = i - width; j < i; ++j) w.inputs.push_back(*series[j]);
    w.label = *series[i];
    w.label_epoch_s = series.epoch_at(i);
    set.windows.push_back(std::move(w));
  }
  return set;
}

SplitSet chrono_split(const WindowSet& windows, double train_fraction, bool purge) {
  if (windows.empty()) throw DomainError("cannot split an empty window set");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DomainError("train fraction must lie in (0, 1)");
  }
  const std::size_t n = windows.size();
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));

  SplitSet split;
  split.train_fraction = train_fraction;
  split.train.width = windows.width;
  split.test.width = windows.width;
  const auto first = windows.windows.begin();
  split.train.windows.assign(first, first + static_cast<std::ptrdiff_t>(n_train));

  std::size_t test_begin = n_train;
  if (purge && n_train > 0) test_begin = std::min(n, n_train + windows.width);
  split.test.windows.assign(first + static_cast<std::ptrdiff_t>(test_begin), windows.windows.end());

  if (split.train.empty()) {
    split.warnings.push_back("train split is empty: floor(" + std::to_string(train_fraction) +
                             " * " + std::to_string(n) + ") = 0");
  }
  if (split.test.empty()) split.warnings.push_back("test split is empty");
  return split;
}

}  // namespace pwvcast
