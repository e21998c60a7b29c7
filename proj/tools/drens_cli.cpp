// drens: simulate data, fit embeddings, build ensembles, run benchmarks and
// draw SVG figures from saved outputs.

#include "drens/bench.hpp"
#include "drens/ensemble.hpp"
#include "drens/ingest.hpp"
#include "drens/methods.hpp"
#include "drens/parallel.hpp"
#include "drens/rng.hpp"
#include "drens/simgen.hpp"
#include "drens/svg.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace drens;

namespace {

struct CommonOptions {
  std::uint64_t seed = 1;
  std::string out;
  int jobs = 1;
};

struct MethodOptions {
  Index k = 12;
  double kpar = 0.2;
  double perplexity = 80.0;
  Index ndim = 2;
  double lle_reg = 1e-3;
  std::optional<double> le_t;
  int tsne_iters = 1000;
};

struct ForestOptions {
  int trees = 500;
  int mtry = 0;
  int min_node_size = 1;
};

struct DataOptions {
  std::string in;
  std::string dataset;
  std::string data;
  std::string substance = "cocaine";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool out_required = false) {
  cmd->add_option("--seed", o.seed, "Master seed")->capture_default_str();
  auto* out = cmd->add_option("--out", o.out, "Output file or directory");
  if (out_required) out->required();
  cmd->add_option("--jobs", o.jobs, "Worker threads (results do not depend on it)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_method_flags(CLI::App* cmd, MethodOptions& o) {
  cmd->add_option("--k", o.k, "Neighbours for LLE, ISOMAP, HLLE and LE")->capture_default_str();
  cmd->add_option("--kpar", o.kpar, "RBF kernel parameter for kPCA")->capture_default_str();
  cmd->add_option("--perplexity", o.perplexity, "t-SNE perplexity")->capture_default_str();
  cmd->add_option("--ndim", o.ndim, "Output dimensions")->capture_default_str();
  cmd->add_option("--lle-reg", o.lle_reg, "LLE regularization, as a fraction of the local trace")
      ->capture_default_str();
  cmd->add_option("--le-t", o.le_t, "LE heat-kernel width (default: mean squared neighbour distance)");
  cmd->add_option("--tsne-iters", o.tsne_iters, "t-SNE iterations")->capture_default_str();
}

void add_forest_flags(CLI::App* cmd, ForestOptions& o) {
  cmd->add_option("--trees", o.trees, "Trees per forest")->capture_default_str();
  cmd->add_option("--mtry", o.mtry, "Features tried per split (0 = floor(sqrt(p)))")->capture_default_str();
  cmd->add_option("--min-node-size", o.min_node_size, "Minimum node size")->capture_default_str();
}

void add_data_flags(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--in", o.in, "Table CSV (as written by 'simulate')");
  cmd->add_option("--dataset", o.dataset, "Named dataset: breast_cancer or drug");
  cmd->add_option("--data", o.data, "Raw file for --dataset (default: bundled data directory)");
  cmd->add_option("--substance", o.substance, "Drug outcome: cocaine, crack or heroin")->capture_default_str();
}

MethodSettings method_settings(const MethodOptions& o, int jobs) {
  MethodSettings s;
  s.spectral.output_dims = o.ndim;
  s.spectral.kpca_sigma = o.kpar;
  s.spectral.isomap_k = o.k;
  s.spectral.jobs = jobs;
  s.local.output_dims = o.ndim;
  s.local.k = o.k;
  s.local.lle_reg_tol = o.lle_reg;
  s.local.le_heat_t = o.le_t;
  s.local.tsne_perplexity = o.perplexity;
  s.local.tsne_iters = o.tsne_iters;
  s.spectral.validate();
  s.local.validate();
  return s;
}

ForestParams forest_params(const ForestOptions& o) {
  ForestParams p;
  p.n_trees = o.trees;
  p.mtry = o.mtry;
  p.min_node_size = o.min_node_size;
  return p;
}

fs::path default_data_path(DatasetName name) {
  const fs::path dir = DRENS_DEFAULT_DATA_DIR;
  return name == DatasetName::breast_cancer ? dir / "breast-cancer-wisconsin.data"
                                            : dir / "drug_consumption.data";
}

Substance substance_or_throw(const std::string& text) {
  const auto s = parse_substance(text);
  if (!s) throw std::invalid_argument("unknown substance '" + text + "'; expected cocaine, crack or heroin");
  return *s;
}

// Returns the table and a short dataset label.
std::pair<DataTable, std::string> load_input(const DataOptions& o) {
  if (!o.in.empty() && !o.dataset.empty()) throw std::invalid_argument("give either --in or --dataset, not both");
  if (!o.in.empty()) {
    if (!fs::exists(o.in)) throw std::runtime_error("input file not found: " + o.in);
    return {read_table_csv(fs::path(o.in)), fs::path(o.in).stem().string()};
  }
  if (o.dataset.empty()) throw std::invalid_argument("an input is required: --in FILE or --dataset NAME");
  DatasetSpec spec;
  std::string label = o.dataset;
  if (o.dataset == "breast_cancer") {
    spec.name = DatasetName::breast_cancer;
  } else if (o.dataset == "drug") {
    spec.name = DatasetName::drug;
    spec.substance = substance_or_throw(o.substance);
    label += "_" + o.substance;
  } else {
    throw std::invalid_argument("unknown dataset '" + o.dataset + "'; expected breast_cancer or drug");
  }
  spec.path = o.data.empty() ? default_data_path(spec.name) : fs::path(o.data);
  if (!fs::exists(spec.path)) throw std::runtime_error("dataset file not found: " + spec.path.string());
  return {load_dataset(spec), label};
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const auto& name : names) {
    if (name == "all") return {kAllMethods.begin(), kAllMethods.end()};
    const auto m = parse_method(name);
    if (!m) throw std::invalid_argument("unknown method '" + name + "'; valid methods: " + method_names());
    out.push_back(*m);
  }
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_file(out, text);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_noise(double noise) {
  for (double allowed : kNoiseVariances)
    if (std::abs(noise - allowed) < 1e-12) return allowed;
  std::ostringstream os;
  os << "noise variance " << noise << " is not in the allowed set {0.25, 0.5, 0.75}";
  throw std::invalid_argument(os.str());
}

std::string table_csv(const DataTable& t) {
  std::ostringstream os;
  write_table_csv(os, t);
  return os.str();
}

// ---- simulate --------------------------------------------------------------

struct SimulateOptions {
  CommonOptions common;
  bool all = false;
  std::string relationship = "main_effects";
  double noise = 0.25;
  Index n = 2000;
};

int run_simulate(const SimulateOptions& o) {
  if (o.all) {
    if (o.common.out.empty()) throw std::invalid_argument("--all needs --out DIR");
    const fs::path dir = o.common.out;
    fs::create_directories(dir);
    const auto cells = simulation_grid(o.common.seed);
    std::vector<std::pair<fs::path, SimConfig>> jobs;
    for (const auto& cell : cells)
      for (std::size_t rep = 0; rep < cell.repetition_seeds.size(); ++rep) {
        const std::string name = cell_label(cell.relationship, cell.noise_variance) + "_rep" +
                                 (rep < 9 ? "0" : "") + std::to_string(rep + 1) + ".csv";
        jobs.push_back({dir / name, {cell.relationship, cell.noise_variance, o.n, cell.repetition_seeds[rep]}});
      }
    std::vector<std::string> errors(jobs.size());
    parallel_for(jobs.size(), o.common.jobs, [&](std::size_t i) {
      try {
        write_file(jobs[i].first, table_csv(simulate_dataset(jobs[i].second)));
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (const auto& e : errors)
      if (!e.empty()) throw std::runtime_error(e);
    std::cerr << "wrote " << jobs.size() << " files to " << dir.string() << "\n";
    return 0;
  }
  const auto rel = parse_relationship(o.relationship);
  if (!rel)
    throw std::invalid_argument("unknown relationship '" + o.relationship +
                                "'; expected main_effects, interactions or mixed");
  SimConfig cfg{*rel, parse_noise(o.noise), o.n, o.common.seed};
  emit(o.common.out, table_csv(simulate_dataset(cfg)));
  return 0;
}

// ---- embed -----------------------------------------------------------------

struct EmbedOptions {
  CommonOptions common;
  DataOptions data;
  MethodOptions method;
  std::vector<std::string> methods{"pca"};
  std::string svg;
};

std::string scores_csv(const std::vector<EmbeddingResult>& results, const Labels& y) {
  std::ostringstream os;
  for (const auto& r : results)
    for (Index c = 0; c < r.dims(); ++c) os << to_string(r.method) << '_' << c + 1 << ',';
  os << "outcome\n";
  for (std::size_t row = 0; row < y.size(); ++row) {
    for (const auto& r : results)
      for (Index c = 0; c < r.dims(); ++c) os << format_number(r.scores(static_cast<Index>(row), c)) << ',';
    os << y[row] << '\n';
  }
  return os.str();
}

fs::path suffixed(const fs::path& path, std::string_view suffix) {
  fs::path out = path;
  out.replace_filename(path.stem().string() + "_" + std::string(suffix) + path.extension().string());
  return out;
}

int run_embed(const EmbedOptions& o) {
  const auto methods = parse_methods(o.methods);
  if (methods.empty()) throw std::invalid_argument("no method given");
  const auto [table, label] = load_input(o.data);
  const FeatureMatrix fm = standardize(encode(complete_cases(table)));
  const MethodSettings settings = method_settings(o.method, 1);

  std::vector<std::optional<EmbeddingResult>> results(methods.size());
  std::vector<std::string> errors(methods.size());
  parallel_for(methods.size(), o.common.jobs, [&](std::size_t i) {
    try {
      results[i] = embed(methods[i], fm.x, settings, derive_seed(o.common.seed, 100));
    } catch (const std::exception& e) {
      errors[i] = std::string(to_string(methods[i])) + ": " + e.what();
    }
  });
  std::vector<EmbeddingResult> ok;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error(errors[i]);
    for (const auto& d : results[i]->diagnostics) std::cerr << "note: " << d << "\n";
    ok.push_back(std::move(*results[i]));
  }
  emit(o.common.out, scores_csv(ok, fm.y));
  if (!o.svg.empty())
    for (const auto& r : ok) {
      if (r.dims() != 2) throw std::invalid_argument("--svg needs --ndim 2");
      const fs::path path = ok.size() == 1 ? fs::path(o.svg) : suffixed(o.svg, to_string(r.method));
      write_file(path, scatter_svg(r.scores, &fm.y, std::string(to_string(r.method)) + ": " + label));
    }
  return 0;
}

// ---- ensemble --------------------------------------------------------------

struct EnsembleOptions {
  CommonOptions common;
  DataOptions data;
  MethodOptions method;
  std::string kind = "small";
  std::vector<std::string> methods;
};

int run_ensemble(const EnsembleOptions& o) {
  EnsembleSelection selection;
  if (o.kind == "large") {
    selection = EnsembleSelection::large();
  } else if (o.kind == "small") {
    selection = EnsembleSelection::small();
  } else if (o.kind == "custom") {
    if (o.methods.empty()) throw std::invalid_argument("--kind custom needs --method");
    selection = EnsembleSelection::custom(parse_methods(o.methods));
  } else {
    throw std::invalid_argument("unknown ensemble kind '" + o.kind + "'; expected large, small or custom");
  }
  const auto methods = selection.resolved();
  const auto [table, label] = load_input(o.data);
  const FeatureMatrix fm = standardize(encode(complete_cases(table)));
  const MethodSettings settings = method_settings(o.method, 1);

  std::vector<std::optional<EmbeddingResult>> results(methods.size());
  std::vector<std::string> errors(methods.size());
  parallel_for(methods.size(), o.common.jobs, [&](std::size_t i) {
    try {
      results[i] = embed(methods[i], fm.x, settings, derive_seed(o.common.seed, 100));
    } catch (const std::exception& e) {
      errors[i] = std::string(to_string(methods[i])) + ": " + e.what();
    }
  });
  std::vector<EmbeddingResult> ok;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (!errors[i].empty()) throw std::runtime_error(errors[i]);
    ok.push_back(std::move(*results[i]));
  }
  std::ostringstream os;
  write_ensemble_csv(os, build_ensemble(ok, selection, fm.y));
  emit(o.common.out, os.str());
  return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchOptions {
  CommonOptions common;
  DataOptions data;
  MethodOptions method;
  ForestOptions forest;
  bool simulated = false;
  Index n = 2000;
  int reps = 10;
  bool stratify = false;
};

int run_bench(const BenchOptions& o) {
  if (o.common.out.empty()) throw std::invalid_argument("bench needs --out DIR");
  const fs::path dir = o.common.out;
  ExperimentPlan plan;
  plan.settings = method_settings(o.method, 1);
  plan.forest = forest_params(o.forest);
  plan.jobs = o.common.jobs;
  plan.stratify = o.stratify;

  if (o.simulated) {
    const GridReport grid = run_simulation_grid(plan, o.common.seed, o.n);
    write_file(dir / "grid_report.json", grid_report_to_json(grid));
    std::ostringstream csv;
    write_grid_accuracy_csv(csv, grid);
    write_file(dir / "accuracy.csv", csv.str());
    write_file(dir / "accuracy.svg", accuracy_bars_svg(grid));
    for (const auto& name : grid.model_names())
      if (const auto m = grid.overall_mean(name)) std::cout << name << ' ' << format_number(*m) << '\n';
    return 0;
  }

  auto [table, label] = load_input(o.data);
  plan.dataset = label;
  plan.source = TableSource{std::move(table)};
  plan.repetitions = o.reps;
  plan.seed = o.common.seed;
  const ExperimentReport report = run_experiment(plan);
  write_file(dir / "report.json", report_to_json(report));
  std::ostringstream csv;
  write_accuracy_csv(csv, report);
  write_file(dir / "accuracy.csv", csv.str());
  write_file(dir / "accuracy.svg", accuracy_bars_svg(report));
  if (!report.importances.empty()) write_file(dir / "importance.svg", importance_bars_svg(report));
  for (const auto& m : report.models) {
    std::cout << m.name << ' ';
    if (const auto v = m.mean())
      std::cout << format_number(*v);
    else
      std::cout << "failed";
    std::cout << '\n';
    for (const auto& e : m.errors) std::cerr << "error: " << m.name << ' ' << e << '\n';
  }
  return 0;
}

// ---- plot ------------------------------------------------------------------

struct PlotOptions {
  CommonOptions common;
  std::string kind;
  std::string in;
  std::string method;
  bool color = true;
};

// Scatter input is a scores CSV from 'embed'; `method` picks one method's
// columns when the file holds several.
int plot_scatter(const PlotOptions& o) {
  std::ifstream in(o.in);
  if (!in) throw std::runtime_error("cannot open " + o.in);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty scores file " + o.in);
  const auto header = split_csv_line(line);
  std::vector<std::size_t> picked;
  std::optional<std::size_t> outcome;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "outcome") {
      outcome = c;
    } else if (o.method.empty() || header[c].rfind(o.method + "_", 0) == 0) {
      picked.push_back(c);
    }
  }
  if (picked.size() != 2) {
    std::ostringstream os;
    os << "scatter2d needs exactly 2 score columns, found " << picked.size();
    if (o.method.empty()) os << "; use --method to pick one method";
    throw std::invalid_argument(os.str());
  }
  std::vector<std::array<double, 2>> points;
  Labels y;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::invalid_argument("ragged row in " + o.in);
    points.push_back({std::stod(cells[picked[0]]), std::stod(cells[picked[1]])});
    if (outcome) y.push_back(std::stoi(cells[*outcome]));
  }
  Matrix scores(static_cast<Index>(points.size()), 2);
  for (std::size_t r = 0; r < points.size(); ++r) {
    scores(static_cast<Index>(r), 0) = points[r][0];
    scores(static_cast<Index>(r), 1) = points[r][1];
  }
  const bool color = o.color && outcome.has_value();
  const std::string title = header[picked[0]].substr(0, header[picked[0]].rfind('_'));
  emit(o.common.out, scatter_svg(scores, color ? &y : nullptr, title));
  return 0;
}

int run_plot(const PlotOptions& o) {
  const auto kind = parse_plot_kind(o.kind);
  if (!kind)
    throw std::invalid_argument("unknown plot kind '" + o.kind +
                                "'; expected scatter2d, accuracy_bars or importance_bars");
  if (*kind == PlotKind::scatter2d) return plot_scatter(o);
  const std::string text = read_file(o.in);
  const bool is_grid = text.find("\"drens-grid-report\"") != std::string::npos;
  if (*kind == PlotKind::accuracy_bars) {
    emit(o.common.out, is_grid ? accuracy_bars_svg(grid_report_from_json(text))
                               : accuracy_bars_svg(report_from_json(text)));
  } else {
    if (is_grid) throw std::invalid_argument("importance_bars needs a single-dataset report");
    emit(o.common.out, importance_bars_svg(report_from_json(text)));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensionality-reduction ensembles for random-forest classification"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Write simulated datasets as table CSV");
  add_common(simulate, sim.common);
  simulate->add_flag("--all", sim.all, "Write the full 9-condition x 10-repetition grid to --out DIR");
  simulate->add_option("--relationship", sim.relationship, "main_effects, interactions or mixed")
      ->capture_default_str();
  simulate->add_option("--noise", sim.noise, "Noise variance: 0.25, 0.5 or 0.75")->capture_default_str();
  simulate->add_option("--n", sim.n, "Rows per dataset")->capture_default_str();

  EmbedOptions emb;
  auto* embed_cmd = app.add_subcommand("embed", "Fit embeddings and write a scores CSV");
  add_common(embed_cmd, emb.common);
  add_data_flags(embed_cmd, emb.data);
  add_method_flags(embed_cmd, emb.method);
  embed_cmd->add_option("--method", emb.methods, "Method name(s), or 'all'")->capture_default_str();
  embed_cmd->add_option("--svg", emb.svg, "Scatter plot path (one file per method)");

  EnsembleOptions ens;
  auto* ensemble_cmd = app.add_subcommand("ensemble", "Write an ensemble feature CSV");
  add_common(ensemble_cmd, ens.common);
  add_data_flags(ensemble_cmd, ens.data);
  add_method_flags(ensemble_cmd, ens.method);
  ensemble_cmd->add_option("--kind", ens.kind, "large, small or custom")->capture_default_str();
  ensemble_cmd->add_option("--method", ens.methods, "Methods for --kind custom");

  BenchOptions ben;
  auto* bench = app.add_subcommand("bench", "Run the classification benchmark");
  add_common(bench, ben.common, true);
  add_data_flags(bench, ben.data);
  add_method_flags(bench, ben.method);
  add_forest_flags(bench, ben.forest);
  bench->add_flag("--simulated", ben.simulated, "Run the 9-condition simulation grid");
  bench->add_option("--n", ben.n, "Rows per simulated dataset")->capture_default_str();
  bench->add_option("--reps", ben.reps, "Repetitions for a named dataset")->capture_default_str();
  bench->add_flag("--stratify", ben.stratify, "Stratify the train/test split by outcome");

  PlotOptions plt;
  auto* plot = app.add_subcommand("plot", "Draw an SVG from a scores CSV or a report JSON");
  add_common(plot, plt.common);
  plot->add_option("--kind", plt.kind, "scatter2d, accuracy_bars or importance_bars")->required();
  plot->add_option("--in", plt.in, "Scores CSV or report JSON")->required();
  plot->add_option("--method", plt.method, "Method columns to plot (scatter2d)");
  plot->add_flag("!--no-color", plt.color, "Do not color points by outcome");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (embed_cmd->parsed()) return run_embed(emb);
    if (ensemble_cmd->parsed()) return run_ensemble(ens);
    if (bench->parsed()) return run_bench(ben);
    if (plot->parsed()) return run_plot(plt);
  } catch (const std::exception& e) {
    std::cerr << "drens: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
