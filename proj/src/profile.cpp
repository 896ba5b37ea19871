#include "cfrec/profile.hpp"

#include <ostream>
#include <stdexcept>

#include "cfrec/util.hpp"

namespace cfrec {

double FeatureProfile::mean_encountered_score() const {
  double sum = 0.0;
  int n = 0;
  for (int g = 0; g < kGenreCount; ++g) {
    if (encounters[g] > 0) {
      sum += scores[g];
      ++n;
    }
  }
  return n > 0 ? sum / n : 0.0;
}

ScoreUpdate update_feature_score(double current_score, std::int32_t encounter_count, int flag, int rating) {
  if (flag != 0 && flag != 1) {
    throw std::domain_error("genre flag must be 0 or 1, got " + std::to_string(flag));
  }
  if (encounter_count < 0) {
    throw std::domain_error("encounter count must be non-negative");
  }
  if (rating < 1 || rating > 5) {
    throw std::domain_error("rating " + std::to_string(rating) + " outside [1,5]");
  }
  if (flag == 0) {
    // (score*count)/count = score; count 0 would be 0/0, so short-circuit.
    return {current_score, encounter_count};
  }
  const double base = encounter_count == 0 ? 0.0 : current_score * encounter_count;
  return {(rating + base) / (encounter_count + 1), encounter_count + 1};
}

FeatureProfile build_profile(std::int32_t user_id, std::span<const RatingEvent> user_ratings,
                             const Dataset& dataset) {
  FeatureProfile p;
  p.user_id = user_id;
  for (const RatingEvent& ev : user_ratings) {
    const Movie& movie = dataset.movies[dataset.item_index(ev.item_id)];
    for (int g = 0; g < kGenreCount; ++g) {
      ScoreUpdate u = update_feature_score(p.scores[g], p.encounters[g], movie.genre_flags[g], ev.rating);
      p.scores[g] = u.score;
      p.encounters[g] = u.count;
    }
  }
  return p;
}

std::vector<FeatureProfile> build_all_profiles(const Dataset& dataset, std::span<const RatingEvent> train) {
  // Bucket training ratings by user index first so profile builds are
  // independent per user. Both id lookups happen here, outside the parallel
  // region, so bad references surface as exceptions rather than aborts.
  std::vector<std::vector<RatingEvent>> per_user(dataset.users.size());
  for (const RatingEvent& ev : train) {
    dataset.item_index(ev.item_id);
    per_user[dataset.user_index(ev.user_id)].push_back(ev);
  }

  std::vector<FeatureProfile> profiles(dataset.users.size());
  const int n = dataset.user_count();
#pragma omp parallel for schedule(dynamic, 16)
  for (int u = 0; u < n; ++u) {
    profiles[u] = build_profile(dataset.users[u].user_id, per_user[u], dataset);
  }
  return profiles;
}

void write_profiles_csv(std::ostream& out, std::span<const FeatureProfile> profiles,
                        std::span<const std::string> genre_names) {
  out << "user_id,genre,score,encounters\n";
  for (const FeatureProfile& p : profiles) {
    for (int g = 0; g < kGenreCount; ++g) {
      out << p.user_id << ',' << genre_names[g] << ',';
      if (p.encountered(g)) out << fmt_full(p.scores[g]);
      out << ',' << p.encounters[g] << '\n';
    }
  }
}

}  // namespace cfrec
