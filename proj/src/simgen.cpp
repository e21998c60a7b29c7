#include "drens/simgen.hpp"

#include "drens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace drens {

std::string_view to_string(Relationship r) {
  switch (r) {
    case Relationship::main_effects: return "main_effects";
    case Relationship::interactions: return "interactions";
    case Relationship::mixed: return "mixed";
  }
  return "main_effects";
}

std::optional<Relationship> parse_relationship(std::string_view text) {
  for (Relationship r : kRelationships)
    if (text == to_string(r)) return r;
  return std::nullopt;
}

void SimConfig::validate() const {
  if (!(noise_variance > 0.0)) throw std::invalid_argument("SimConfig: noise_variance must be > 0");
  if (n < 100) throw std::invalid_argument("SimConfig: n must be >= 100");
}

DataTable simulate_dataset(const SimConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n);
  Rng rng(cfg.seed);

  std::vector<Column> cols;
  for (int i = 1; i <= 4; ++i) cols.push_back({"c" + std::to_string(i), ColumnKind::continuous, {}});
  for (int i = 1; i <= 4; ++i) cols.push_back({"o" + std::to_string(i), ColumnKind::ordinal, {}});
  for (int i = 1; i <= 5; ++i) cols.push_back({"b" + std::to_string(i), ColumnKind::binary, {}});
  for (auto& c : cols) c.cells.reserve(n);

  std::vector<double> score(n);
  const double noise_sd = std::sqrt(cfg.noise_variance);
  for (std::size_t r = 0; r < n; ++r) {
    double v[13];
    for (int i = 0; i < 4; ++i) v[i] = rng.normal();
    for (int i = 4; i < 8; ++i) v[i] = 1.0 + static_cast<double>(rng.below(5));
    for (int i = 8; i < 13; ++i) v[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
    for (int i = 0; i < 13; ++i) cols[static_cast<std::size_t>(i)].cells.emplace_back(v[i]);

    const double x1 = v[0], x2 = v[1];
    const double x3 = (v[4] - 3.0) / std::sqrt(2.0);
    const double x4 = v[8];
    double eta = 0.0;
    switch (cfg.relationship) {
      case Relationship::main_effects: eta = x1 + x2 + x3 + x4; break;
      case Relationship::interactions: eta = x1 * x2 + x3 * x4; break;
      case Relationship::mixed: eta = x1 + x2 + x3 * x4; break;
    }
    score[r] = eta + noise_sd * rng.normal();
  }

  std::vector<double> sorted = score;
  const std::size_t half = n / 2;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half), sorted.end());
  double median = sorted[half];
  if (n % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(half));
    median = 0.5 * (median + lower);
  }
  Column outcome{"y", ColumnKind::outcome, {}};
  outcome.cells.reserve(n);
  for (double s : score) outcome.cells.emplace_back(s > median ? 1.0 : 0.0);
  cols.push_back(std::move(outcome));
  return DataTable(std::move(cols));
}

std::vector<SimCell> simulation_grid(std::uint64_t master_seed) {
  std::vector<SimCell> grid;
  std::uint64_t stream = 0;
  for (Relationship r : kRelationships)
    for (double noise : kNoiseVariances) {
      SimCell cell{r, noise, {}};
      for (int rep = 0; rep < kSimulationRepetitions; ++rep)
        cell.repetition_seeds.push_back(derive_seed(master_seed, stream++));
      grid.push_back(std::move(cell));
    }
  return grid;
}

std::string cell_label(Relationship r, double noise_variance) {
  std::ostringstream os;
  os << to_string(r) << '_' << noise_variance;
  return os.str();
}

}  // namespace drens
