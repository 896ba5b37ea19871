#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cfrec/dataset.hpp"

namespace cfrec {

/// Per-user genre preference state: a running-mean score and an encounter
/// count per genre. A genre with encounters == 0 is "unencountered" and its
/// score slot carries no information (callers must check encountered()).
struct FeatureProfile {
  std::int32_t user_id = 0;
  std::array<double, kGenreCount> scores{};
  std::array<std::int32_t, kGenreCount> encounters{};

  bool encountered(int genre) const { return encounters[static_cast<std::size_t>(genre)] > 0; }

  /// Mean score over encountered genres; 0 when nothing was encountered.
  double mean_encountered_score() const;

  bool operator==(const FeatureProfile&) const = default;
};

struct ScoreUpdate {
  double score = 0.0;
  std::int32_t count = 0;
};

/// Core incremental update: folds one rating into a genre's running state.
///
///   new_score = (flag*rating + score*count) / (count + flag)
///
/// With flag=1 this is the running-mean recurrence; with flag=0 the state is
/// returned unchanged (count 0 included, avoiding the 0/0 case). The rating
/// must lie in [1,5] and flag in {0,1}.
ScoreUpdate update_feature_score(double current_score, std::int32_t encounter_count, int flag, int rating);

/// Folds all of one user's ratings through update_feature_score, one update
/// per flagged genre of each rated movie.
FeatureProfile build_profile(std::int32_t user_id, std::span<const RatingEvent> user_ratings,
                             const Dataset& dataset);

/// One profile per dataset user, built from the given (training) ratings
/// only. Users without training ratings get an all-unencountered profile.
/// Indexed by Dataset user index; computed user-parallel.
std::vector<FeatureProfile> build_all_profiles(const Dataset& dataset, std::span<const RatingEvent> train);

/// CSV dump: user_id,genre,score,encounters (score empty when unencountered).
void write_profiles_csv(std::ostream& out, std::span<const FeatureProfile> profiles,
                        std::span<const std::string> genre_names);

}  // namespace cfrec
