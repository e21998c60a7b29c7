#pragma once

// Minimal SVG figures. Output depends only on the inputs, so identical
// scores or reports give byte-identical files.

#include "drens/bench.hpp"
#include "drens/numcore.hpp"
#include "drens/preprocess.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drens {

enum class PlotKind { scatter2d, accuracy_bars, importance_bars };

std::string_view to_string(PlotKind k);
std::optional<PlotKind> parse_plot_kind(std::string_view name);

/// Two score columns; points colored by outcome when `y` is given.
std::string scatter_svg(const Matrix& scores, const Labels* y, std::string_view title);

struct Bar {
  std::string label;
  double value = 0.0;
  std::optional<double> low;   // whisker range, e.g. min/max over repetitions
  std::optional<double> high;
};

std::string bar_chart_svg(const std::vector<Bar>& bars, std::string_view title, std::string_view axis_label,
                          double axis_min, double axis_max);

/// Mean accuracy per model with min/max whiskers.
std::string accuracy_bars_svg(const ExperimentReport& r);
/// Mean of per-condition means per model.
std::string accuracy_bars_svg(const GridReport& g);
/// Mean full-data importance per feature, sorted descending.
std::string importance_bars_svg(const ExperimentReport& r);

}  // namespace drens
