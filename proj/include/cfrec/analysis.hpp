#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cfrec/dataset.hpp"

namespace cfrec {

/// Cumulative genre-encounter counts per occupation: value(o,g) counts the
/// flagged genres across all ratings made by users of occupation o.
struct EncounterMatrix {
  std::vector<std::string> occupations;  // sorted
  std::vector<std::string> genres;
  std::vector<std::int64_t> values;  // row-major occupations x genres

  std::int64_t at(int occupation, int genre) const {
    return values[static_cast<std::size_t>(occupation) * genres.size() + genre];
  }
  std::int64_t row_sum(int occupation) const;
};

/// User counts per age bin; keys are bin lower bounds (bin_width-aligned).
std::map<int, int> age_histogram(const Dataset& dataset, int bin_width = 1);

std::map<std::string, int> occupation_counts(const Dataset& dataset);

EncounterMatrix occupation_genre_encounters(const Dataset& dataset);

/// Minimum pairwise cosine similarity between occupation genre-count rows,
/// restricted to occupations with at least `min_users` users. Returns 1.0
/// when fewer than two occupations qualify.
double min_occupation_genre_cosine(const Dataset& dataset, int min_users = 10);

void write_age_histogram_csv(std::ostream& out, const std::map<int, int>& hist);
void write_occupation_counts_csv(std::ostream& out, const std::map<std::string, int>& counts);
void write_encounter_matrix_csv(std::ostream& out, const EncounterMatrix& matrix);

}  // namespace cfrec
