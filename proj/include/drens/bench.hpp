#pragma once

// Head-to-head protocol: embed the full dataset with every method, assemble
// the ensembles, split 70/30, train one forest per feature set on the same
// training rows and score each on the same test rows.

#include "drens/embedding.hpp"
#include "drens/ensemble.hpp"
#include "drens/forest.hpp"
#include "drens/methods.hpp"
#include "drens/preprocess.hpp"
#include "drens/simgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace drens {

struct SplitIndices {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Uniform random partition with |train| = round(fraction * n). With
/// `stratify_by`, the rounding is applied per class.
SplitIndices train_test_split(Index n, double fraction, std::uint64_t seed,
                              const Labels* stratify_by = nullptr);

/// Fresh data for every repetition.
struct SimulatedSource {
  Relationship relationship = Relationship::main_effects;
  double noise_variance = 0.25;
  Index n = 2000;
  std::vector<std::uint64_t> repetition_seeds;
};

/// One fixed table; embedded once, re-split per repetition.
struct TableSource {
  DataTable table;
};

struct ExperimentPlan {
  std::string dataset;
  std::variant<SimulatedSource, TableSource> source;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  bool large_ensemble = true;
  bool small_ensemble = true;
  bool full_data_baseline = true;
  int repetitions = 10;
  double split_fraction = 0.7;
  bool stratify = false;
  std::uint64_t seed = 1;
  MethodSettings settings;
  ForestParams forest;
  int jobs = 1;

  void validate() const;
};

struct ModelResult {
  std::string name;
  std::vector<std::optional<double>> accuracies;  // per repetition; empty if the cell failed
  std::vector<Labels> predictions;                // test-row predictions per repetition
  std::vector<std::string> errors;

  /// Mean over repetitions that produced a value.
  std::optional<double> mean() const;
};

struct ExperimentReport {
  std::string dataset;
  int repetitions = 0;
  double split_fraction = 0.7;
  std::uint64_t seed = 0;
  std::string embedding_protocol;  // "per_repetition" or "shared"
  std::vector<ModelResult> models;
  std::vector<std::vector<Index>> test_indices;
  std::vector<Labels> test_truth;
  std::vector<std::string> feature_names;
  std::vector<Vector> importances;  // full-data model, per repetition
  std::vector<std::string> diagnostics;

  const ModelResult* find(std::string_view name) const;
  Vector mean_importance() const;
};

ExperimentReport run_experiment(const ExperimentPlan& plan);

/// Aggregate over several conditions (the simulation grid).
struct GridReport {
  std::vector<ExperimentReport> conditions;

  /// Model names shared by every condition, in report order.
  std::vector<std::string> model_names() const;
  /// Mean of per-condition means.
  std::optional<double> overall_mean(std::string_view model) const;
};

/// Runs every grid cell with the given template plan (methods, forest,
/// settings, jobs). `n` overrides the simulated sample size.
GridReport run_simulation_grid(const ExperimentPlan& base, std::uint64_t master_seed, Index n);

std::string report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(std::string_view text);
std::string grid_report_to_json(const GridReport& g);
GridReport grid_report_from_json(std::string_view text);

/// Flat "dataset,model,repetition,accuracy" rows.
void write_accuracy_csv(std::ostream& os, const ExperimentReport& r, bool header = true);
void write_grid_accuracy_csv(std::ostream& os, const GridReport& g);

inline constexpr std::string_view kLargeEnsembleName = "large_ensemble";
inline constexpr std::string_view kSmallEnsembleName = "small_ensemble";
inline constexpr std::string_view kFullDataName = "full_data";

}  // namespace drens
