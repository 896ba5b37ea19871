#include "cfrec/predict.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "cfrec/util.hpp"

namespace cfrec {

std::string_view to_string(FallbackLevel level) {
  switch (level) {
    case FallbackLevel::Neighborhood: return "neighborhood";
    case FallbackLevel::UserMean: return "user_mean";
    case FallbackLevel::GlobalMean: return "global_mean";
  }
  return "?";
}

TrainingIndex::TrainingIndex(const Dataset& dataset, std::span<const RatingEvent> train)
    : dataset_(&dataset),
      histories_(dataset.users.size()),
      raters_(dataset.movies.size()),
      user_means_(dataset.users.size(), 0.0),
      rating_count_(train.size()) {
  double total = 0.0;
  for (const RatingEvent& ev : train) {
    const int u = dataset.user_index(ev.user_id);
    const int i = dataset.item_index(ev.item_id);
    histories_[u].emplace_back(i, static_cast<double>(ev.rating));
    raters_[i].emplace_back(u, static_cast<double>(ev.rating));
    total += ev.rating;
  }
  global_mean_ = train.empty() ? 3.0 : total / static_cast<double>(train.size());
  for (std::size_t u = 0; u < histories_.size(); ++u) {
    auto& h = histories_[u];
    std::sort(h.begin(), h.end());
    double sum = 0.0;
    for (const auto& [item, r] : h) sum += r;
    user_means_[u] = h.empty() ? global_mean_ : sum / static_cast<double>(h.size());
  }
  for (auto& r : raters_) std::sort(r.begin(), r.end());
}

namespace {

struct Neighbor {
  double sim;
  double rating;
  double rater_mean;
  std::int32_t user_idx;
};

Prediction predict_indexed(int user_idx, int item_idx, std::int32_t user_id, std::int32_t item_id,
                           const SimilarityMatrix& sims, const TrainingIndex& index,
                           const PredictorConfig& config) {
  std::vector<Neighbor> neighbors;
  for (const auto& [v, rating] : index.raters_of(item_idx)) {
    if (v == user_idx) continue;
    const double s = sims.at(user_idx, v);
    const bool qualifies = config.use_negative ? s != 0.0 : s > 0.0;
    if (!qualifies) continue;
    neighbors.push_back({s, rating, index.user_mean(v), v});
  }

  if (config.k_neighbors > 0 && static_cast<int>(neighbors.size()) > config.k_neighbors) {
    auto stronger = [](const Neighbor& a, const Neighbor& b) {
      const double ma = std::abs(a.sim), mb = std::abs(b.sim);
      if (ma != mb) return ma > mb;
      return a.user_idx < b.user_idx;
    };
    std::nth_element(neighbors.begin(), neighbors.begin() + config.k_neighbors, neighbors.end(), stronger);
    neighbors.resize(config.k_neighbors);
    std::sort(neighbors.begin(), neighbors.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.user_idx < b.user_idx; });
  }

  Prediction p;
  p.user_id = user_id;
  p.item_id = item_id;
  p.support = static_cast<int>(neighbors.size());

  double num = 0.0, den = 0.0;
  for (const Neighbor& nb : neighbors) {
    num += config.centering == Centering::MeanCentered ? nb.sim * (nb.rating - nb.rater_mean)
                                                       : nb.sim * nb.rating;
    den += std::abs(nb.sim);
  }

  if (p.support > 0 && den > 0.0) {
    const double base = config.centering == Centering::MeanCentered ? index.user_mean(user_idx) : 0.0;
    p.predicted_rating = base + num / den;
    p.fallback = FallbackLevel::Neighborhood;
  } else {
    p.support = 0;
    if (index.has_ratings(user_idx)) {
      p.predicted_rating = index.user_mean(user_idx);
      p.fallback = FallbackLevel::UserMean;
    } else {
      p.predicted_rating = index.global_mean();
      p.fallback = FallbackLevel::GlobalMean;
    }
  }
  p.predicted_rating = std::clamp(p.predicted_rating, 1.0, 5.0);
  return p;
}

}  // namespace

Prediction predict_rating(std::int32_t user_id, std::int32_t item_id, const SimilarityMatrix& sims,
                          const TrainingIndex& index, const PredictorConfig& config) {
  const Dataset& ds = index.dataset();
  auto item_idx = ds.find_item(item_id);
  if (!item_idx) throw std::domain_error("unknown item id " + std::to_string(item_id));
  auto user_idx = ds.find_user(user_id);
  if (!user_idx) throw std::domain_error("unknown user id " + std::to_string(user_id));
  return predict_indexed(*user_idx, *item_idx, user_id, item_id, sims, index, config);
}

std::vector<std::pair<std::int32_t, double>> recommend_top_n(std::int32_t user_id, int n,
                                                             const SimilarityMatrix& sims,
                                                             const TrainingIndex& index,
                                                             const PredictorConfig& config) {
  if (n < 1) throw std::domain_error("top-n size must be >= 1");
  const Dataset& ds = index.dataset();
  const int user_idx = ds.user_index(user_id);

  std::vector<std::uint8_t> rated(ds.movies.size(), 0);
  for (const auto& [item, r] : index.ratings_of(user_idx)) rated[item] = 1;

  const int item_count = ds.movie_count();
  std::vector<double> predicted(ds.movies.size(), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
  for (int i = 0; i < item_count; ++i) {
    if (rated[i]) continue;
    predicted[i] = predict_indexed(user_idx, i, user_id, ds.movies[i].item_id, sims, index, config)
                       .predicted_rating;
  }

  std::vector<std::pair<std::int32_t, double>> candidates;
  candidates.reserve(ds.movies.size());
  for (int i = 0; i < item_count; ++i) {
    if (!rated[i]) candidates.emplace_back(ds.movies[i].item_id, predicted[i]);
  }
  std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(candidates.size()) > n) candidates.resize(n);
  return candidates;
}

std::vector<Prediction> predict_all(std::span<const RatingEvent> pairs, const SimilarityMatrix& sims,
                                    const TrainingIndex& index, const PredictorConfig& config) {
  const Dataset& ds = index.dataset();
  // Resolve ids up front; lookups can throw and must not do so inside the
  // parallel region.
  std::vector<std::pair<int, int>> indexed(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    indexed[k] = {ds.user_index(pairs[k].user_id), ds.item_index(pairs[k].item_id)};
  }

  std::vector<Prediction> out(pairs.size());
  const std::int64_t n = static_cast<std::int64_t>(pairs.size());
#pragma omp parallel for schedule(dynamic, 256)
  for (std::int64_t k = 0; k < n; ++k) {
    out[k] = predict_indexed(indexed[k].first, indexed[k].second, pairs[k].user_id, pairs[k].item_id,
                             sims, index, config);
  }
  return out;
}

void write_predictions_csv(std::ostream& out, std::span<const RatingEvent> actual,
                           std::span<const Prediction> predicted) {
  out << "user_id,item_id,actual,predicted,support,fallback\n";
  for (std::size_t k = 0; k < predicted.size(); ++k) {
    const Prediction& p = predicted[k];
    out << p.user_id << ',' << p.item_id << ',';
    if (k < actual.size()) out << actual[k].rating;
    out << ',' << fmt_full(p.predicted_rating) << ',' << p.support << ',' << to_string(p.fallback) << '\n';
  }
}

}  // namespace cfrec
