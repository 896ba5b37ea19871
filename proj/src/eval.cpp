#include "cfrec/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "cfrec/profile.hpp"
#include "cfrec/rng.hpp"
#include "cfrec/util.hpp"

namespace cfrec {

namespace {

std::int64_t pair_key(const RatingEvent& ev) {
  return (static_cast<std::int64_t>(ev.user_id) << 32) | static_cast<std::uint32_t>(ev.item_id);
}

// Seed salts per randomized stage; keeps split and cap streams independent.
constexpr std::uint64_t kSplitSalt = 0x53504c49;  // "SPLI"
constexpr std::uint64_t kCapSalt = 0x434150;      // "CAP"

}  // namespace

std::string_view to_string(Algo algo) { return algo == Algo::BCF ? "BCF" : "MCF"; }

std::string SplitSpec::label() const {
  if (type == Type::OfficialFold) return fold;
  return "random" + fmt_fixed(test_fraction, 2);
}

SplitData split_random(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie strictly between 0 and 1");
  }
  const std::size_t n = dataset.ratings.size();
  const std::size_t test_size = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, kSplitSalt));
  rng.shuffle(order);

  std::vector<std::size_t> test_idx(order.begin(), order.begin() + test_size);
  std::vector<std::size_t> train_idx(order.begin() + test_size, order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  SplitData out;
  out.first.reserve(train_idx.size());
  out.second.reserve(test_idx.size());
  for (std::size_t i : train_idx) out.first.push_back(dataset.ratings[i]);
  for (std::size_t i : test_idx) out.second.push_back(dataset.ratings[i]);
  return out;
}

SplitData load_official_split(const std::filesystem::path& dir, const std::string& fold) {
  auto train = load_ratings_file(dir / (fold + ".base"));
  auto test = load_ratings_file(dir / (fold + ".test"));

  std::unordered_set<std::int64_t> train_pairs;
  train_pairs.reserve(train.size());
  for (const RatingEvent& ev : train) train_pairs.insert(pair_key(ev));
  for (const RatingEvent& ev : test) {
    if (train_pairs.contains(pair_key(ev))) {
      throw IntegrityError("fold " + fold + ": pair (" + std::to_string(ev.user_id) + "," +
                           std::to_string(ev.item_id) + ") appears in both base and test");
    }
  }
  return {std::move(train), std::move(test)};
}

std::vector<RatingEvent> cap_user_records(std::span<const RatingEvent> train, int cap, std::uint64_t seed) {
  if (cap < 1) throw std::invalid_argument("record cap must be >= 1");

  std::unordered_map<std::int32_t, std::vector<std::size_t>> by_user;
  for (std::size_t i = 0; i < train.size(); ++i) by_user[train[i].user_id].push_back(i);

  std::vector<std::uint8_t> keep(train.size(), 0);
  for (auto& [user_id, indices] : by_user) {
    if (static_cast<int>(indices.size()) <= cap) {
      for (std::size_t i : indices) keep[i] = 1;
      continue;
    }
    // Per-user RNG stream so the result is independent of map iteration
    // order and of other users' history sizes.
    Rng rng(derive_seed(seed, kCapSalt, static_cast<std::uint64_t>(user_id)));
    for (int k = 0; k < cap; ++k) {
      std::size_t j = k + static_cast<std::size_t>(rng.below(indices.size() - k));
      std::swap(indices[k], indices[j]);
      keep[indices[k]] = 1;
    }
  }

  std::vector<RatingEvent> capped;
  capped.reserve(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (keep[i]) capped.push_back(train[i]);
  }
  return capped;
}

double rmse(std::span<const std::pair<double, double>> actual_predicted) {
  if (actual_predicted.empty()) throw std::domain_error("rmse of an empty list");
  double sum = 0.0;
  for (const auto& [actual, predicted] : actual_predicted) {
    const double e = actual - predicted;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(actual_predicted.size()));
}

double mae(std::span<const std::pair<double, double>> actual_predicted) {
  if (actual_predicted.empty()) throw std::domain_error("mae of an empty list");
  double sum = 0.0;
  for (const auto& [actual, predicted] : actual_predicted) {
    sum += std::abs(actual - predicted);
  }
  return sum / static_cast<double>(actual_predicted.size());
}

EvaluationReport run_experiment(const Dataset& dataset, const std::filesystem::path& data_dir,
                                const ExperimentConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();

  SplitData split = config.split.type == SplitSpec::Type::OfficialFold
                        ? load_official_split(data_dir, config.split.fold)
                        : split_random(dataset, config.split.test_fraction, config.seed);
  std::vector<RatingEvent>& train = split.first;
  const std::vector<RatingEvent>& test = split.second;

  if (config.record_cap) {
    train = cap_user_records(train, *config.record_cap, config.seed);
  }

  // Leakage guard: no test pair may reach profile or similarity construction.
  {
    std::unordered_set<std::int64_t> train_pairs;
    train_pairs.reserve(train.size());
    for (const RatingEvent& ev : train) train_pairs.insert(pair_key(ev));
    for (const RatingEvent& ev : test) {
      if (train_pairs.contains(pair_key(ev))) {
        throw IntegrityError("train/test leakage at pair (" + std::to_string(ev.user_id) + "," +
                             std::to_string(ev.item_id) + ")");
      }
    }
  }

  TrainingIndex index(dataset, train);

  std::vector<std::int32_t> user_ids(dataset.users.size());
  for (std::size_t u = 0; u < dataset.users.size(); ++u) user_ids[u] = dataset.users[u].user_id;

  SimilarityMatrix sims;
  if (config.algo == Algo::MCF) {
    auto profiles = build_all_profiles(dataset, train);
    sims = build_mcf_matrix(profiles, user_ids, config.mcf_domain);
  } else {
    sims = build_bcf_matrix(index.histories(), user_ids);
  }

  auto predictions = predict_all(test, sims, index, config.predictor);

  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(predictions.size());
  std::size_t covered = 0;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    pairs.emplace_back(static_cast<double>(test[k].rating), predictions[k].predicted_rating);
    if (predictions[k].fallback == FallbackLevel::Neighborhood) ++covered;
  }

  EvaluationReport report;
  report.algorithm = std::string(to_string(config.algo));
  report.record_cap = config.record_cap;
  report.split = config.split.label();
  report.seed = config.seed;
  report.rmse = rmse(pairs);
  report.mae = mae(pairs);
  report.coverage = predictions.empty() ? 0.0 : static_cast<double>(covered) / predictions.size();
  report.prediction_count = predictions.size();
  report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

Table3Result run_table3(const Dataset& dataset, const std::filesystem::path& data_dir,
                        const SplitSpec& split, std::uint64_t seed, int cap,
                        const PredictorConfig& predictor, McfDomain mcf_domain) {
  ExperimentConfig base;
  base.split = split;
  base.seed = seed;
  base.predictor = predictor;
  base.mcf_domain = mcf_domain;

  Table3Result result;
  const std::array<std::pair<Algo, std::optional<int>>, 4> grid = {{
      {Algo::BCF, std::nullopt},
      {Algo::MCF, std::nullopt},
      {Algo::BCF, cap},
      {Algo::MCF, cap},
  }};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ExperimentConfig cell = base;
    cell.algo = grid[i].first;
    cell.record_cap = grid[i].second;
    result.cells[i] = run_experiment(dataset, data_dir, cell);
  }

  const double bcf = result.cells[0].rmse;
  const double mcf = result.cells[1].rmse;
  const double bcf_cap = result.cells[2].rmse;
  const double mcf_cap = result.cells[3].rmse;
  result.overall_improvement = bcf > 0.0 ? (bcf - mcf) / bcf : 0.0;
  result.cold_start_improvement = bcf_cap > 0.0 ? (bcf_cap - mcf_cap) / bcf_cap : 0.0;
  return result;
}

void write_reports_csv(std::ostream& out, std::span<const EvaluationReport> reports) {
  out << "algorithm,cap,split,seed,rmse,mae,coverage,wall_time_s\n";
  for (const EvaluationReport& r : reports) {
    out << r.algorithm << ',';
    if (r.record_cap) out << *r.record_cap;
    out << ',' << r.split << ',' << r.seed << ',' << fmt_full(r.rmse) << ',' << fmt_full(r.mae) << ','
        << fmt_full(r.coverage) << ',' << fmt_full(r.wall_time_s) << '\n';
  }
}

void print_table3(std::ostream& out, const Table3Result& result) {
  out << "algorithm            rmse     mae      coverage  predictions\n";
  for (const EvaluationReport& r : result.cells) {
    std::string name = r.algorithm;
    if (r.record_cap) name += " (cap " + std::to_string(*r.record_cap) + ")";
    out << name;
    for (std::size_t pad = name.size(); pad < 21; ++pad) out << ' ';
    out << fmt_fixed(r.rmse, 4) << "   " << fmt_fixed(r.mae, 4) << "   " << fmt_fixed(r.coverage, 4)
        << "    " << r.prediction_count << '\n';
  }
  out << "overall improvement (full history):   " << fmt_fixed(100.0 * result.overall_improvement, 2)
      << "%\n";
  out << "cold-start improvement (capped runs): " << fmt_fixed(100.0 * result.cold_start_improvement, 2)
      << "%\n";
}

}  // namespace cfrec
