#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfrec/dataset.hpp"
#include "cfrec/predict.hpp"
#include "cfrec/similarity.hpp"

namespace cfrec {

enum class Algo { BCF, MCF };

std::string_view to_string(Algo algo);

/// Train/test selection: one of the dataset's pre-made fold file pairs
/// (u1..u5, ua, ub) or a seeded random split of u.data.
struct SplitSpec {
  enum class Type { OfficialFold, Random };
  Type type = Type::OfficialFold;
  std::string fold = "u1";
  double test_fraction = 0.2;

  static SplitSpec official(std::string fold_name) { return {Type::OfficialFold, std::move(fold_name), 0.0}; }
  static SplitSpec random(double fraction) { return {Type::Random, {}, fraction}; }

  std::string label() const;
};

struct ExperimentConfig {
  Algo algo = Algo::BCF;
  std::optional<int> record_cap;  // the cold-start cap; absent = full history
  SplitSpec split;
  std::uint64_t seed = 42;
  PredictorConfig predictor;
  McfDomain mcf_domain = McfDomain::CommonEncountered;
};

/// One experiment-grid cell worth of results.
struct EvaluationReport {
  std::string algorithm;
  std::optional<int> record_cap;
  std::string split;
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double coverage = 0.0;  // fraction predicted at neighborhood level
  std::size_t prediction_count = 0;
  double wall_time_s = 0.0;
};

using SplitData = std::pair<std::vector<RatingEvent>, std::vector<RatingEvent>>;  // (train, test)

/// Disjoint seeded partition of the dataset's ratings; deterministic per seed.
SplitData split_random(const Dataset& dataset, double test_fraction, std::uint64_t seed);

/// Loads <fold>.base / <fold>.test and verifies pair-level disjointness.
SplitData load_official_split(const std::filesystem::path& dir, const std::string& fold);

/// Cold-start simulation: per user, keep at most `cap` training ratings,
/// sampled uniformly without replacement. Deterministic per (seed, user).
std::vector<RatingEvent> cap_user_records(std::span<const RatingEvent> train, int cap, std::uint64_t seed);

double rmse(std::span<const std::pair<double, double>> actual_predicted);
double mae(std::span<const std::pair<double, double>> actual_predicted);

/// Full pipeline for one config: split -> optional cap -> profiles/index ->
/// similarity matrix -> predict every test pair -> metrics. Deterministic per
/// (config, dataset) and independent of thread count.
EvaluationReport run_experiment(const Dataset& dataset, const std::filesystem::path& data_dir,
                                const ExperimentConfig& config);

/// The four-cell experiment grid plus improvement ratios.
struct Table3Result {
  std::array<EvaluationReport, 4> cells;  // BCF, MCF, BCF@cap, MCF@cap
  double overall_improvement = 0.0;       // (BCF - MCF) / BCF
  double cold_start_improvement = 0.0;    // (BCF@cap - MCF@cap) / BCF@cap
};

Table3Result run_table3(const Dataset& dataset, const std::filesystem::path& data_dir,
                        const SplitSpec& split, std::uint64_t seed, int cap = 5,
                        const PredictorConfig& predictor = {},
                        McfDomain mcf_domain = McfDomain::CommonEncountered);

/// Machine CSV: algorithm,cap,split,seed,rmse,mae,coverage,wall_time_s.
void write_reports_csv(std::ostream& out, std::span<const EvaluationReport> reports);

/// Human-readable grid plus the improvement lines.
void print_table3(std::ostream& out, const Table3Result& result);

}  // namespace cfrec
