#include "drens/bench.hpp"

#include "drens/parallel.hpp"
#include "drens/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace drens {

using Json = nlohmann::ordered_json;

namespace {

// Stable per-model identifiers, so forest seeds do not depend on which
// other models are enabled.
constexpr std::uint64_t kLargeId = 8;
constexpr std::uint64_t kSmallId = 9;
constexpr std::uint64_t kFullId = 10;

constexpr std::uint64_t kEmbedStream = 100;
constexpr std::uint64_t kSplitStream = 10'000;
constexpr std::uint64_t kForestStream = 20'000;
constexpr std::uint64_t kDataStream = 30'000;

struct ModelSpec {
  std::string name;
  std::uint64_t id;
  std::optional<Method> method;
  std::optional<EnsembleSelection> ensemble;
};

struct CellResult {
  std::optional<double> accuracy;
  Labels predictions;
  std::string error;
  std::optional<Vector> importance;
};

Matrix take_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = x.row(rows[r]);
  return out;
}

Labels take(const Labels& y, const std::vector<Index>& rows) {
  Labels out;
  out.reserve(rows.size());
  for (Index r : rows) out.push_back(y[static_cast<std::size_t>(r)]);
  return out;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

SplitIndices train_test_split(Index n, double fraction, std::uint64_t seed, const Labels* stratify_by) {
  if (n < 2) throw std::invalid_argument("train_test_split: need at least 2 rows");
  if (!(fraction > 0.0 && fraction < 1.0))
    throw std::invalid_argument("train_test_split: fraction must lie in (0, 1)");
  Rng rng(seed);
  auto shuffle = [&](std::vector<Index>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
  };

  SplitIndices out;
  auto assign = [&](std::vector<Index> pool) {
    shuffle(pool);
    const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(pool.size())));
    out.train.insert(out.train.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(cut));
    out.test.insert(out.test.end(), pool.begin() + static_cast<std::ptrdiff_t>(cut), pool.end());
  };
  if (stratify_by) {
    if (static_cast<Index>(stratify_by->size()) != n)
      throw std::invalid_argument("train_test_split: stratification labels have the wrong length");
    for (int cls : {0, 1}) {
      std::vector<Index> pool;
      for (Index i = 0; i < n; ++i)
        if ((*stratify_by)[static_cast<std::size_t>(i)] == cls) pool.push_back(i);
      assign(std::move(pool));
    }
  } else {
    std::vector<Index> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), Index{0});
    assign(std::move(all));
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

void ExperimentPlan::validate() const {
  if (repetitions < 1) throw std::invalid_argument("ExperimentPlan: repetitions must be >= 1");
  if (!(split_fraction > 0.0 && split_fraction < 1.0))
    throw std::invalid_argument("ExperimentPlan: split_fraction must lie in (0, 1)");
  if (methods.empty() && !full_data_baseline)
    throw std::invalid_argument("ExperimentPlan: nothing to run");
}

std::optional<double> ModelResult::mean() const {
  double sum = 0.0;
  int count = 0;
  for (const auto& a : accuracies)
    if (a) {
      sum += *a;
      ++count;
    }
  if (count == 0) return std::nullopt;
  return sum / count;
}

const ModelResult* ExperimentReport::find(std::string_view name) const {
  for (const auto& m : models)
    if (m.name == name) return &m;
  return nullptr;
}

Vector ExperimentReport::mean_importance() const {
  Vector sum = Vector::Zero(static_cast<Index>(feature_names.size()));
  int count = 0;
  for (const auto& v : importances)
    if (v.size() == sum.size()) {
      sum += v;
      ++count;
    }
  return count > 0 ? Vector(sum / count) : sum;
}

ExperimentReport run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  const bool simulated = std::holds_alternative<SimulatedSource>(plan.source);
  const int reps = plan.repetitions;

  // Datasets: one per repetition for simulated sources, one shared otherwise.
  std::vector<FeatureMatrix> data;
  if (simulated) {
    const auto& src = std::get<SimulatedSource>(plan.source);
    for (int rep = 0; rep < reps; ++rep) {
      SimConfig cfg{src.relationship, src.noise_variance, src.n,
                    static_cast<std::size_t>(rep) < src.repetition_seeds.size()
                        ? src.repetition_seeds[static_cast<std::size_t>(rep)]
                        : derive_seed(plan.seed, kDataStream + static_cast<std::uint64_t>(rep))};
      data.push_back(standardize(encode(simulate_dataset(cfg))));
    }
  } else {
    data.push_back(standardize(encode(complete_cases(std::get<TableSource>(plan.source).table))));
  }

  std::vector<Method> methods;
  for (Method m : kAllMethods)
    if (std::find(plan.methods.begin(), plan.methods.end(), m) != plan.methods.end()) methods.push_back(m);

  const std::size_t method_count = methods.size();
  std::vector<std::optional<EmbeddingResult>> embeddings(data.size() * method_count);
  std::vector<std::string> embed_errors(embeddings.size());
  parallel_for(embeddings.size(), plan.jobs, [&](std::size_t t) {
    const std::size_t d = t / method_count;
    const Method method = methods[t % method_count];
    try {
      embeddings[t] = embed(method, data[d].x, plan.settings,
                            derive_seed(plan.seed, kEmbedStream + d));
    } catch (const std::exception& e) {
      embed_errors[t] = std::string(to_string(method)) + " failed: " + e.what();
    }
  });

  std::vector<ModelSpec> specs;
  for (Method m : methods) specs.push_back({std::string(to_string(m)), static_cast<std::uint64_t>(m), m, {}});
  if (plan.large_ensemble)
    specs.push_back({std::string(kLargeEnsembleName), kLargeId, {}, EnsembleSelection::large()});
  if (plan.small_ensemble)
    specs.push_back({std::string(kSmallEnsembleName), kSmallId, {}, EnsembleSelection::small()});
  if (plan.full_data_baseline) specs.push_back({std::string(kFullDataName), kFullId, {}, {}});

  ExperimentReport report;
  report.dataset = plan.dataset;
  report.repetitions = reps;
  report.split_fraction = plan.split_fraction;
  report.seed = plan.seed;
  report.embedding_protocol = simulated ? "per_repetition" : "shared";
  for (const auto& c : data.front().columns) report.feature_names.push_back(c.name);

  std::vector<SplitIndices> splits;
  for (int rep = 0; rep < reps; ++rep) {
    const FeatureMatrix& fm = data[simulated ? static_cast<std::size_t>(rep) : 0];
    splits.push_back(train_test_split(fm.rows(), plan.split_fraction,
                                      derive_seed(plan.seed, kSplitStream + static_cast<std::uint64_t>(rep)),
                                      plan.stratify ? &fm.y : nullptr));
    report.test_indices.push_back(splits.back().test);
    report.test_truth.push_back(take(fm.y, splits.back().test));
  }

  for (std::size_t d = 0; d < data.size(); ++d)
    for (std::size_t m = 0; m < method_count; ++m) {
      const std::string prefix = simulated ? "[rep " + std::to_string(d) + "] " : "";
      const auto& e = embeddings[d * method_count + m];
      if (e)
        for (const auto& msg : e->diagnostics) report.diagnostics.push_back(prefix + msg);
      if (!embed_errors[d * method_count + m].empty())
        report.diagnostics.push_back(prefix + embed_errors[d * method_count + m]);
    }

  const std::size_t model_count = specs.size();
  std::vector<CellResult> cells(static_cast<std::size_t>(reps) * model_count);
  parallel_for(cells.size(), plan.jobs, [&](std::size_t t) {
    const auto rep = t / model_count;
    const ModelSpec& spec = specs[t % model_count];
    const std::size_t d = simulated ? rep : 0;
    const FeatureMatrix& fm = data[d];
    CellResult& cell = cells[t];
    try {
      Matrix features;
      if (spec.method) {
        const std::size_t m = static_cast<std::size_t>(
            std::find(methods.begin(), methods.end(), *spec.method) - methods.begin());
        const auto& e = embeddings[d * method_count + m];
        if (!e) throw std::runtime_error(embed_errors[d * method_count + m]);
        features = e->scores.leftCols(std::min<Index>(2, e->dims()));
      } else if (spec.ensemble) {
        std::vector<EmbeddingResult> available;
        for (std::size_t m = 0; m < method_count; ++m)
          if (const auto& e = embeddings[d * method_count + m]) available.push_back(*e);
        features = build_ensemble(available, *spec.ensemble, fm.y).x;
      } else {
        features = fm.x;
      }
      const SplitIndices& split = splits[rep];
      ForestParams fp = plan.forest;
      fp.jobs = 1;
      fp.seed = derive_seed(plan.seed, kForestStream + 16 * rep + spec.id);
      const ForestModel model = rf_train(take_rows(features, split.train), take(fm.y, split.train), fp);
      cell.predictions = rf_predict(model, take_rows(features, split.test));
      cell.accuracy = accuracy(cell.predictions, report.test_truth[rep]);
      if (!spec.method && !spec.ensemble) {
        FeatureImportance imp = rf_importance(model);
        cell.importance = std::move(imp.values);
      }
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  });

  for (std::size_t s = 0; s < model_count; ++s) {
    ModelResult mr;
    mr.name = specs[s].name;
    for (int rep = 0; rep < reps; ++rep) {
      CellResult& cell = cells[static_cast<std::size_t>(rep) * model_count + s];
      mr.accuracies.push_back(cell.accuracy);
      mr.predictions.push_back(std::move(cell.predictions));
      if (!cell.error.empty())
        mr.errors.push_back("rep " + std::to_string(rep) + ": " + cell.error);
      if (cell.importance) report.importances.push_back(std::move(*cell.importance));
    }
    report.models.push_back(std::move(mr));
  }
  return report;
}

std::vector<std::string> GridReport::model_names() const {
  std::vector<std::string> names;
  if (conditions.empty()) return names;
  for (const auto& m : conditions.front().models) {
    const bool everywhere = std::all_of(conditions.begin(), conditions.end(),
                                        [&](const ExperimentReport& r) { return r.find(m.name) != nullptr; });
    if (everywhere) names.push_back(m.name);
  }
  return names;
}

std::optional<double> GridReport::overall_mean(std::string_view model) const {
  double sum = 0.0;
  int count = 0;
  for (const auto& r : conditions)
    if (const auto* m = r.find(model))
      if (const auto v = m->mean()) {
        sum += *v;
        ++count;
      }
  if (count == 0) return std::nullopt;
  return sum / count;
}

GridReport run_simulation_grid(const ExperimentPlan& base, std::uint64_t master_seed, Index n) {
  GridReport grid;
  const auto cells = simulation_grid(master_seed);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    ExperimentPlan plan = base;
    plan.dataset = cell_label(cells[c].relationship, cells[c].noise_variance);
    plan.source = SimulatedSource{cells[c].relationship, cells[c].noise_variance, n, cells[c].repetition_seeds};
    plan.repetitions = static_cast<int>(cells[c].repetition_seeds.size());
    plan.seed = derive_seed(master_seed, 1'000 + c);
    grid.conditions.push_back(run_experiment(plan));
  }
  return grid;
}

namespace {

Json report_json(const ExperimentReport& r) {
  Json j;
  j["schema"] = "drens-report";
  j["version"] = 1;
  j["dataset"] = r.dataset;
  j["repetitions"] = r.repetitions;
  j["split_fraction"] = r.split_fraction;
  j["seed"] = r.seed;
  j["embedding_protocol"] = r.embedding_protocol;
  Json models = Json::array();
  for (const auto& m : r.models) {
    Json jm;
    jm["name"] = m.name;
    jm["mean_accuracy"] = optional_number(m.mean());
    Json acc = Json::array();
    for (const auto& a : m.accuracies) acc.push_back(optional_number(a));
    jm["accuracies"] = std::move(acc);
    jm["predictions"] = m.predictions;
    jm["errors"] = m.errors;
    models.push_back(std::move(jm));
  }
  j["models"] = std::move(models);
  j["test_indices"] = r.test_indices;
  j["test_truth"] = r.test_truth;
  Json imp;
  imp["features"] = r.feature_names;
  Json per = Json::array();
  for (const auto& v : r.importances) per.push_back(std::vector<double>(v.begin(), v.end()));
  imp["per_repetition"] = std::move(per);
  const Vector mean = r.mean_importance();
  imp["mean"] = std::vector<double>(mean.begin(), mean.end());
  j["importance"] = std::move(imp);
  j["diagnostics"] = r.diagnostics;
  return j;
}

ExperimentReport report_from(const Json& j) {
  if (j.at("schema") != "drens-report" || j.at("version") != 1)
    throw std::invalid_argument("report_from_json: unsupported schema or version");
  ExperimentReport r;
  r.dataset = j.at("dataset");
  r.repetitions = j.at("repetitions");
  r.split_fraction = j.at("split_fraction");
  r.seed = j.at("seed");
  r.embedding_protocol = j.at("embedding_protocol");
  for (const auto& jm : j.at("models")) {
    ModelResult m;
    m.name = jm.at("name");
    for (const auto& a : jm.at("accuracies"))
      m.accuracies.push_back(a.is_null() ? std::nullopt : std::optional<double>(a.get<double>()));
    m.predictions = jm.at("predictions").get<std::vector<Labels>>();
    m.errors = jm.at("errors").get<std::vector<std::string>>();
    r.models.push_back(std::move(m));
  }
  r.test_indices = j.at("test_indices").get<std::vector<std::vector<Index>>>();
  r.test_truth = j.at("test_truth").get<std::vector<Labels>>();
  const auto& imp = j.at("importance");
  r.feature_names = imp.at("features").get<std::vector<std::string>>();
  for (const auto& v : imp.at("per_repetition")) {
    const auto values = v.get<std::vector<double>>();
    r.importances.emplace_back(Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size())));
  }
  r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  return r;
}

}  // namespace

std::string report_to_json(const ExperimentReport& r) { return report_json(r).dump(1); }

ExperimentReport report_from_json(std::string_view text) { return report_from(Json::parse(text)); }

std::string grid_report_to_json(const GridReport& g) {
  Json j;
  j["schema"] = "drens-grid-report";
  j["version"] = 1;
  Json summary = Json::array();
  for (const auto& name : g.model_names())
    summary.push_back({{"name", name}, {"mean_accuracy", optional_number(g.overall_mean(name))}});
  j["summary"] = std::move(summary);
  Json conditions = Json::array();
  for (const auto& r : g.conditions) conditions.push_back(report_json(r));
  j["conditions"] = std::move(conditions);
  return j.dump(1);
}

GridReport grid_report_from_json(std::string_view text) {
  const Json j = Json::parse(text);
  if (j.at("schema") != "drens-grid-report" || j.at("version") != 1)
    throw std::invalid_argument("grid_report_from_json: unsupported schema or version");
  GridReport g;
  for (const auto& c : j.at("conditions")) g.conditions.push_back(report_from(c));
  return g;
}

void write_accuracy_csv(std::ostream& os, const ExperimentReport& r, bool header) {
  if (header) os << "dataset,model,repetition,accuracy\n";
  for (const auto& m : r.models)
    for (std::size_t rep = 0; rep < m.accuracies.size(); ++rep) {
      os << r.dataset << ',' << m.name << ',' << rep << ',';
      if (m.accuracies[rep]) os << format_number(*m.accuracies[rep]);
      os << '\n';
    }
}

void write_grid_accuracy_csv(std::ostream& os, const GridReport& g) {
  os << "dataset,model,repetition,accuracy\n";
  for (const auto& r : g.conditions) write_accuracy_csv(os, r, false);
}

}  // namespace drens
