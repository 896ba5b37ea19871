#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "cfrec/analysis.hpp"
#include "cfrec/synth.hpp"
#include "helpers.hpp"

using namespace cfrec;

namespace {

Dataset toy() {
  std::vector<UserDemographics> users = {
      testutil::make_user(1, 23, "student"),
      testutil::make_user(2, 30, "student"),
      testutil::make_user(3, 47, "engineer"),
  };
  std::vector<Movie> movies = {
      testutil::make_movie(1, {"Action", "Comedy", "Drama"}),
      testutil::make_movie(2, {"Drama"}),
  };
  std::vector<RatingEvent> ratings = {
      testutil::rate(1, 1, 4),
      testutil::rate(2, 2, 3),
      testutil::rate(3, 2, 5),
  };
  return assemble_dataset(users, movies, ratings, testutil::default_genres());
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("age histogram partitions all users") {
  Dataset ds = toy();
  auto hist = age_histogram(ds, 1);
  int total = 0;
  for (const auto& [age, count] : hist) total += count;
  CHECK(total == 3);
  CHECK(hist.at(23) == 1);
  CHECK(hist.at(30) == 1);
  CHECK(hist.at(47) == 1);

  auto wide = age_histogram(ds, 100);
  REQUIRE(wide.size() == 1);
  CHECK(wide.begin()->second == 3);

  CHECK_THROWS_AS(age_histogram(ds, 0), std::invalid_argument);
}

TEST_CASE("occupation counts partition users") {
  Dataset ds = toy();
  auto counts = occupation_counts(ds);
  CHECK(counts.size() == 2);
  CHECK(counts.at("student") == 2);
  CHECK(counts.at("engineer") == 1);
}

TEST_CASE("encounter matrix sums flags per occupation") {
  Dataset ds = toy();
  auto m = occupation_genre_encounters(ds);
  const auto student = std::find(m.occupations.begin(), m.occupations.end(), "student");
  REQUIRE(student != m.occupations.end());
  const int srow = static_cast<int>(student - m.occupations.begin());
  // student watched a 3-genre movie once and a 1-genre movie once
  CHECK(m.row_sum(srow) == 4);

  const int erow = srow == 0 ? 1 : 0;
  CHECK(m.row_sum(erow) == 1);  // engineer watched one drama

  std::int64_t total = std::accumulate(m.values.begin(), m.values.end(), std::int64_t{0});
  CHECK(total == 5);  // 3 + 1 + 1 flags over all ratings
}

TEST_CASE("encounter matrix ignores rating order") {
  Dataset ds = toy();
  auto reversed_ratings = ds.ratings;
  std::reverse(reversed_ratings.begin(), reversed_ratings.end());
  Dataset ds2 = assemble_dataset(ds.users, ds.movies, reversed_ratings, ds.genre_names);
  auto a = occupation_genre_encounters(ds);
  auto b = occupation_genre_encounters(ds2);
  CHECK(a.values == b.values);
  CHECK(a.occupations == b.occupations);
}

TEST_CASE("synthetic demographics reproduce the documented shape") {
  SynthSpec spec;
  spec.user_count = 300;
  spec.movie_count = 200;
  spec.rating_count = 9000;
  Dataset ds = make_synthetic_dataset(spec);

  auto hist = age_histogram(ds, 1);
  auto modal = std::max_element(hist.begin(), hist.end(),
                                [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(modal->first == 30);

  auto counts = occupation_counts(ds);
  auto top = std::max_element(counts.begin(), counts.end(),
                              [](const auto& a, const auto& b) { return a.second < b.second; });
  CHECK(top->first == "student");

  const double min_cos = min_occupation_genre_cosine(ds, 10);
  CHECK(min_cos > 0.0);
  CHECK(min_cos <= 1.0);
}

}  // TEST_SUITE
