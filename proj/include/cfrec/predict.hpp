#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cfrec/dataset.hpp"
#include "cfrec/similarity.hpp"

namespace cfrec {

enum class Centering { MeanCentered, Raw };
enum class FallbackLevel { Neighborhood, UserMean, GlobalMean };

std::string_view to_string(FallbackLevel level);

struct PredictorConfig {
  Centering centering = Centering::MeanCentered;
  bool use_negative = false;  // negative similarities excluded by default
  int k_neighbors = 0;        // 0 = all qualifying neighbors
};

struct Prediction {
  std::int32_t user_id = 0;
  std::int32_t item_id = 0;
  double predicted_rating = 0.0;
  int support = 0;  // neighbors that contributed
  FallbackLevel fallback = FallbackLevel::GlobalMean;
};

/// Read-only index over a training rating set: per-user histories (sorted by
/// item index), per-item rater lists (sorted by user index), user means and
/// the global mean. Build once, share across threads.
class TrainingIndex {
 public:
  TrainingIndex(const Dataset& dataset, std::span<const RatingEvent> train);

  const Dataset& dataset() const { return *dataset_; }

  std::span<const ItemRating> ratings_of(int user_idx) const { return histories_[user_idx]; }
  const std::vector<std::vector<ItemRating>>& histories() const { return histories_; }

  /// (user index, rating) pairs for everyone who rated the item in training.
  std::span<const std::pair<std::int32_t, double>> raters_of(int item_idx) const { return raters_[item_idx]; }

  bool has_ratings(int user_idx) const { return !histories_[user_idx].empty(); }

  /// Training mean of the user; global mean when the user has no training
  /// ratings.
  double user_mean(int user_idx) const { return user_means_[user_idx]; }

  double global_mean() const { return global_mean_; }
  std::size_t rating_count() const { return rating_count_; }

 private:
  const Dataset* dataset_;
  std::vector<std::vector<ItemRating>> histories_;
  std::vector<std::vector<std::pair<std::int32_t, double>>> raters_;
  std::vector<double> user_means_;
  double global_mean_ = 3.0;  // scale midpoint when training is empty
  std::size_t rating_count_ = 0;
};

/// Weighted-average rating prediction from the similarity matrix.
///
/// Mean-centered form (default):
///   p(u,i) = mean_u + sum_v sim(u,v) * (r_vi - mean_v) / sum_v |sim(u,v)|
/// over training raters v of i with sim(u,v) > 0 (optionally top-k). Raw form
/// drops the mean offsets. Results are clamped to [1,5]. Fallbacks: no
/// qualifying neighbor -> user training mean -> global mean.
Prediction predict_rating(std::int32_t user_id, std::int32_t item_id, const SimilarityMatrix& sims,
                          const TrainingIndex& index, const PredictorConfig& config = {});

/// The n items the target has not rated in training, ordered by predicted
/// rating descending, ties broken by ascending item id.
std::vector<std::pair<std::int32_t, double>> recommend_top_n(std::int32_t user_id, int n,
                                                             const SimilarityMatrix& sims,
                                                             const TrainingIndex& index,
                                                             const PredictorConfig& config = {});

/// Predicts every (user,item) pair of `pairs` in order; pair-parallel.
std::vector<Prediction> predict_all(std::span<const RatingEvent> pairs, const SimilarityMatrix& sims,
                                    const TrainingIndex& index, const PredictorConfig& config = {});

/// CSV dump: user_id,item_id,actual,predicted,support,fallback.
void write_predictions_csv(std::ostream& out, std::span<const RatingEvent> actual,
                           std::span<const Prediction> predicted);

}  // namespace cfrec
