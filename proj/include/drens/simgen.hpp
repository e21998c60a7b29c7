#pragma once

// Synthetic benchmark conditions: 13 mixed-type predictors (4 continuous,
// 4 ordinal, 5 binary), four of which drive a binary outcome through main
// effects, interactions, or a mix of both, under three noise levels.

#include "drens/preprocess.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace drens {

enum class Relationship { main_effects, interactions, mixed };

inline constexpr std::array<Relationship, 3> kRelationships = {
    Relationship::main_effects, Relationship::interactions, Relationship::mixed};
inline constexpr std::array<double, 3> kNoiseVariances = {0.25, 0.5, 0.75};
inline constexpr int kSimulationRepetitions = 10;

std::string_view to_string(Relationship r);
std::optional<Relationship> parse_relationship(std::string_view text);

struct SimConfig {
  Relationship relationship = Relationship::main_effects;
  double noise_variance = 0.25;
  Index n = 2000;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Columns c1..c4 (continuous), o1..o4 (ordinal 1..5), b1..b5 (binary), y.
/// Predictive set: c1, c2, o1 (centered and scaled to unit variance), b1.
DataTable simulate_dataset(const SimConfig& cfg);

struct SimCell {
  Relationship relationship;
  double noise_variance;
  std::vector<std::uint64_t> repetition_seeds;
};

/// Cross product of relationships and noise levels, each with 10 seeds.
std::vector<SimCell> simulation_grid(std::uint64_t master_seed);

/// "main_effects_0.25" style label.
std::string cell_label(Relationship r, double noise_variance);

}  // namespace drens
