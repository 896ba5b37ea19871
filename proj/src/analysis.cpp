#include "cfrec/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cfrec {

std::int64_t EncounterMatrix::row_sum(int occupation) const {
  std::int64_t sum = 0;
  for (std::size_t g = 0; g < genres.size(); ++g) sum += at(occupation, static_cast<int>(g));
  return sum;
}

std::map<int, int> age_histogram(const Dataset& dataset, int bin_width) {
  if (bin_width < 1) throw std::invalid_argument("bin width must be >= 1");
  std::map<int, int> hist;
  for (const UserDemographics& u : dataset.users) {
    hist[(u.age / bin_width) * bin_width] += 1;
  }
  return hist;
}

std::map<std::string, int> occupation_counts(const Dataset& dataset) {
  std::map<std::string, int> counts;
  for (const UserDemographics& u : dataset.users) counts[u.occupation] += 1;
  return counts;
}

EncounterMatrix occupation_genre_encounters(const Dataset& dataset) {
  EncounterMatrix m;
  m.genres = dataset.genre_names;
  for (const auto& [occupation, count] : occupation_counts(dataset)) m.occupations.push_back(occupation);
  m.values.assign(m.occupations.size() * m.genres.size(), 0);

  std::map<std::string, int> occupation_row;
  for (std::size_t o = 0; o < m.occupations.size(); ++o) occupation_row[m.occupations[o]] = static_cast<int>(o);

  for (const RatingEvent& ev : dataset.ratings) {
    const UserDemographics& user = dataset.users[dataset.user_index(ev.user_id)];
    const Movie& movie = dataset.movies[dataset.item_index(ev.item_id)];
    const int row = occupation_row.at(user.occupation);
    for (int g = 0; g < kGenreCount; ++g) {
      if (movie.genre_flags[g]) m.values[static_cast<std::size_t>(row) * m.genres.size() + g] += 1;
    }
  }
  return m;
}

double min_occupation_genre_cosine(const Dataset& dataset, int min_users) {
  const EncounterMatrix m = occupation_genre_encounters(dataset);
  const auto user_counts = occupation_counts(dataset);

  std::vector<int> rows;
  for (std::size_t o = 0; o < m.occupations.size(); ++o) {
    if (user_counts.at(m.occupations[o]) >= min_users) rows.push_back(static_cast<int>(o));
  }

  double min_cos = 1.0;
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int g = 0; g < kGenreCount; ++g) {
        const double xa = static_cast<double>(m.at(rows[a], g));
        const double xb = static_cast<double>(m.at(rows[b], g));
        dot += xa * xb;
        na += xa * xa;
        nb += xb * xb;
      }
      if (na == 0.0 || nb == 0.0) continue;
      min_cos = std::min(min_cos, dot / (std::sqrt(na) * std::sqrt(nb)));
    }
  }
  return min_cos;
}

void write_age_histogram_csv(std::ostream& out, const std::map<int, int>& hist) {
  out << "age,count\n";
  for (const auto& [age, count] : hist) out << age << ',' << count << '\n';
}

void write_occupation_counts_csv(std::ostream& out, const std::map<std::string, int>& counts) {
  out << "occupation,count\n";
  for (const auto& [occupation, count] : counts) out << occupation << ',' << count << '\n';
}

void write_encounter_matrix_csv(std::ostream& out, const EncounterMatrix& matrix) {
  out << "occupation,genre,encounters\n";
  for (std::size_t o = 0; o < matrix.occupations.size(); ++o) {
    for (std::size_t g = 0; g < matrix.genres.size(); ++g) {
      out << matrix.occupations[o] << ',' << matrix.genres[g] << ','
          << matrix.at(static_cast<int>(o), static_cast<int>(g)) << '\n';
    }
  }
}

}  // namespace cfrec
