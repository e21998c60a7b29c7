#include "drens/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace drens {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(int width, int height, std::string_view title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(width / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
       escape(title) + "</text>\n";
  return s;
}

constexpr const char* kClassColors[2] = {"#1f77b4", "#d62728"};

}  // namespace

std::string_view to_string(PlotKind k) {
  switch (k) {
    case PlotKind::scatter2d: return "scatter2d";
    case PlotKind::accuracy_bars: return "accuracy_bars";
    case PlotKind::importance_bars: return "importance_bars";
  }
  return "?";
}

std::optional<PlotKind> parse_plot_kind(std::string_view name) {
  for (PlotKind k : {PlotKind::scatter2d, PlotKind::accuracy_bars, PlotKind::importance_bars})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string scatter_svg(const Matrix& scores, const Labels* y, std::string_view title) {
  if (scores.cols() != 2) throw std::invalid_argument("scatter_svg: need exactly 2 score columns");
  if (scores.rows() == 0) throw std::invalid_argument("scatter_svg: no points");
  if (y && static_cast<Index>(y->size()) != scores.rows())
    throw std::invalid_argument("scatter_svg: label count does not match the scores");
  if (!all_finite(scores)) throw std::invalid_argument("scatter_svg: non-finite scores");

  const int size = 480, margin = 40;
  const double plot = size - 2 * margin;
  auto scale = [&](Index c) {
    const double lo = scores.col(c).minCoeff();
    const double hi = scores.col(c).maxCoeff();
    const double span = hi > lo ? hi - lo : 1.0;
    return std::pair{lo, span};
  };
  const auto [x0, xs] = scale(0);
  const auto [y0, ys] = scale(1);

  std::string s = header(size, size, title);
  s += "<rect x=\"" + std::to_string(margin) + "\" y=\"" + std::to_string(margin) + "\" width=\"" +
       fmt(plot) + "\" height=\"" + fmt(plot) + "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (Index i = 0; i < scores.rows(); ++i) {
    const double px = margin + plot * (scores(i, 0) - x0) / xs;
    const double py = margin + plot * (1.0 - (scores(i, 1) - y0) / ys);
    const char* color = y ? kClassColors[(*y)[static_cast<std::size_t>(i)] == 1 ? 1 : 0] : "#444";
    s += "<circle cx=\"" + fmt(px) + "\" cy=\"" + fmt(py) + "\" r=\"2\" fill=\"" + color +
         "\" fill-opacity=\"0.6\"/>\n";
  }
  if (y) {
    for (int c = 0; c < 2; ++c) {
      const int ly = size - 12;
      const int lx = margin + 90 * c;
      s += "<circle cx=\"" + std::to_string(lx) + "\" cy=\"" + std::to_string(ly - 4) + "\" r=\"4\" fill=\"" +
           kClassColors[c] + "\"/>\n";
      s += "<text x=\"" + std::to_string(lx + 8) + "\" y=\"" + std::to_string(ly) + "\">outcome " +
           std::to_string(c) + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

std::string bar_chart_svg(const std::vector<Bar>& bars, std::string_view title, std::string_view axis_label,
                          double axis_min, double axis_max) {
  if (bars.empty()) throw std::invalid_argument("bar_chart_svg: no bars");
  if (!(axis_max > axis_min)) throw std::invalid_argument("bar_chart_svg: empty axis range");
  const int label_width = 170, right = 60, row = 22, top = 40;
  const int width = 640;
  const int height = top + row * static_cast<int>(bars.size()) + 40;
  const double plot = width - label_width - right;
  auto px = [&](double v) {
    const double t = std::clamp((v - axis_min) / (axis_max - axis_min), 0.0, 1.0);
    return label_width + plot * t;
  };

  std::string s = header(width, height, title);
  for (std::size_t b = 0; b < bars.size(); ++b) {
    const double y = top + row * static_cast<double>(b);
    const Bar& bar = bars[b];
    s += "<text x=\"" + std::to_string(label_width - 6) + "\" y=\"" + fmt(y + 14) +
         "\" text-anchor=\"end\">" + escape(bar.label) + "</text>\n";
    s += "<rect x=\"" + std::to_string(label_width) + "\" y=\"" + fmt(y + 3) + "\" width=\"" +
         fmt(px(bar.value) - label_width) + "\" height=\"" + std::to_string(row - 6) +
         "\" fill=\"#4c72b0\"/>\n";
    if (bar.low && bar.high)
      s += "<line x1=\"" + fmt(px(*bar.low)) + "\" x2=\"" + fmt(px(*bar.high)) + "\" y1=\"" + fmt(y + 11) +
           "\" y2=\"" + fmt(y + 11) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt(px(bar.value) + 4) + "\" y=\"" + fmt(y + 14) + "\">" +
         fmt(bar.value * 100.0) + "</text>\n";
  }
  const int axis_y = top + row * static_cast<int>(bars.size()) + 4;
  s += "<line x1=\"" + std::to_string(label_width) + "\" x2=\"" + fmt(label_width + plot) + "\" y1=\"" +
       std::to_string(axis_y) + "\" y2=\"" + std::to_string(axis_y) + "\" stroke=\"#888\"/>\n";
  s += "<text x=\"" + std::to_string(label_width) + "\" y=\"" + std::to_string(axis_y + 16) + "\">" +
       fmt(axis_min) + "</text>\n";
  s += "<text x=\"" + fmt(label_width + plot) + "\" y=\"" + std::to_string(axis_y + 16) +
       "\" text-anchor=\"end\">" + fmt(axis_max) + "</text>\n";
  s += "<text x=\"" + fmt(label_width + plot / 2) + "\" y=\"" + std::to_string(axis_y + 30) +
       "\" text-anchor=\"middle\">" + escape(axis_label) + "</text>\n";
  s += "</svg>\n";
  return s;
}

std::string accuracy_bars_svg(const ExperimentReport& r) {
  std::vector<Bar> bars;
  for (const auto& m : r.models) {
    const auto mean = m.mean();
    if (!mean) continue;
    Bar bar{m.name, *mean, {}, {}};
    for (const auto& a : m.accuracies)
      if (a) {
        bar.low = std::min(bar.low.value_or(*a), *a);
        bar.high = std::max(bar.high.value_or(*a), *a);
      }
    bars.push_back(std::move(bar));
  }
  return bar_chart_svg(bars, "Test accuracy: " + r.dataset, "accuracy", 0.0, 1.0);
}

std::string accuracy_bars_svg(const GridReport& g) {
  std::vector<Bar> bars;
  for (const auto& name : g.model_names()) {
    const auto mean = g.overall_mean(name);
    if (!mean) continue;
    Bar bar{name, *mean, {}, {}};
    for (const auto& c : g.conditions)
      if (const auto v = c.find(name)->mean()) {
        bar.low = std::min(bar.low.value_or(*v), *v);
        bar.high = std::max(bar.high.value_or(*v), *v);
      }
    bars.push_back(std::move(bar));
  }
  return bar_chart_svg(bars, "Test accuracy over the simulation grid", "accuracy", 0.0, 1.0);
}

std::string importance_bars_svg(const ExperimentReport& r) {
  const Vector mean = r.mean_importance();
  if (mean.size() == 0) throw std::invalid_argument("importance_bars_svg: report has no features");
  std::vector<std::size_t> order(static_cast<std::size_t>(mean.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mean[static_cast<Index>(a)] > mean[static_cast<Index>(b)];
  });
  std::vector<Bar> bars;
  for (std::size_t i : order) bars.push_back({r.feature_names[i], mean[static_cast<Index>(i)], {}, {}});
  const double top = std::max(mean.maxCoeff(), 1e-12);
  return bar_chart_svg(bars, "Feature importance: " + r.dataset, "mean decrease in Gini impurity (normalized)",
                       0.0, top);
}

}  // namespace drens
