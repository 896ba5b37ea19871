#include <doctest.h>

#include <cmath>

#include "cfrec/predict.hpp"
#include "cfrec/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cfrec;

namespace {

// Four users, four drama movies. User 1 is the prediction target.
Dataset toy_dataset() {
  std::vector<UserDemographics> users;
  for (int u = 1; u <= 4; ++u) users.push_back(testutil::make_user(u));
  std::vector<Movie> movies;
  for (int i = 1; i <= 4; ++i) movies.push_back(testutil::make_movie(i, {"Drama"}));
  return assemble_dataset(users, movies, {}, testutil::default_genres());
}

SimilarityMatrix matrix_for(const Dataset& ds, const std::vector<std::tuple<int, int, double>>& entries) {
  std::vector<std::int32_t> ids;
  for (const auto& u : ds.users) ids.push_back(u.user_id);
  SimilarityMatrix m(SimilarityKind::MCF, ids);
  for (int i = 0; i < m.size(); ++i) m.set_pair(i, i, 1.0);
  for (const auto& [a, b, v] : entries) m.set_pair(a, b, v);
  return m;
}

}  // namespace

TEST_SUITE("predict") {

TEST_CASE("single unit-similarity neighbor moves the prediction by their offset") {
  Dataset ds = toy_dataset();
  // target (user 1) mean 3; neighbor (user 2) mean 3, rated item 1 at 4
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 3),
      testutil::rate(2, 1, 4), testutil::rate(2, 2, 2), testutil::rate(2, 3, 3),
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 1.0}});

  auto p = predict_rating(1, 1, sims, index);
  CHECK(p.predicted_rating == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(p.support == 1);
  CHECK(p.fallback == FallbackLevel::Neighborhood);
}

TEST_CASE("no qualifying neighbor falls back to the user's training mean") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 4), testutil::rate(1, 4, 3),
      testutil::rate(2, 2, 5),
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {});  // all off-diagonal similarities zero

  auto p = predict_rating(1, 1, sims, index);  // nobody rated item 1
  CHECK(p.predicted_rating == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
  CHECK(p.support == 0);
  CHECK(p.fallback == FallbackLevel::UserMean);
}

TEST_CASE("user absent from training falls back to the global mean") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {testutil::rate(2, 1, 4), testutil::rate(2, 2, 2)};
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {});

  auto p = predict_rating(3, 4, sims, index);
  CHECK(p.fallback == FallbackLevel::GlobalMean);
  CHECK(p.predicted_rating == doctest::Approx(3.0).epsilon(1e-12));

  TrainingIndex empty_index(ds, {});
  auto q = predict_rating(3, 4, sims, empty_index);
  CHECK(q.predicted_rating == doctest::Approx(3.0).epsilon(1e-12));  // scale midpoint
  CHECK(q.fallback == FallbackLevel::GlobalMean);
}

TEST_CASE("three mixed-similarity neighbors match the direct formula") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      // target user 1: mean 3.5
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 4),
      // neighbors rated item 1
      testutil::rate(2, 1, 4), testutil::rate(2, 2, 2),                          // mean 3
      testutil::rate(3, 1, 5), testutil::rate(3, 2, 4), testutil::rate(3, 3, 3), // mean 4
      testutil::rate(4, 1, 2), testutil::rate(4, 4, 4),                          // mean 3
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 0.9}, {0, 2, 0.5}, {0, 3, 0.2}});

  const std::array<std::array<double, 3>, 3> neighbors = {{
      {0.9, 4.0, 3.0},
      {0.5, 5.0, 4.0},
      {0.2, 2.0, 3.0},
  }};
  const double expected = oracle::weighted_average(3.5, neighbors);

  auto p = predict_rating(1, 1, sims, index);
  CHECK(p.support == 3);
  CHECK(p.predicted_rating == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("predictions are clamped to the rating scale") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 5), testutil::rate(1, 3, 5),  // target mean 5
      testutil::rate(2, 1, 5), testutil::rate(2, 2, 1),  // neighbor offset +2
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 1.0}});
  auto p = predict_rating(1, 1, sims, index);
  CHECK(p.predicted_rating == 5.0);
}

TEST_CASE("scaling all similarities by a positive constant changes nothing") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 4),
      testutil::rate(2, 1, 4), testutil::rate(2, 2, 2),
      testutil::rate(3, 1, 5), testutil::rate(3, 2, 4), testutil::rate(3, 3, 3),
  };
  TrainingIndex index(ds, train);
  auto base = matrix_for(ds, {{0, 1, 0.8}, {0, 2, 0.4}});
  auto scaled = matrix_for(ds, {{0, 1, 0.8 * 0.311}, {0, 2, 0.4 * 0.311}});

  auto p = predict_rating(1, 1, base, index);
  auto q = predict_rating(1, 1, scaled, index);
  CHECK(std::abs(p.predicted_rating - q.predicted_rating) < 1e-9);
}

TEST_CASE("zero-similarity and negative-similarity users contribute nothing") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 4),
      testutil::rate(2, 1, 4), testutil::rate(2, 2, 2),
      testutil::rate(3, 1, 1), testutil::rate(3, 2, 1),
  };
  TrainingIndex index(ds, train);
  auto without = matrix_for(ds, {{0, 1, 0.7}});
  auto with_zero = matrix_for(ds, {{0, 1, 0.7}, {0, 2, 0.0}});
  auto with_negative = matrix_for(ds, {{0, 1, 0.7}, {0, 2, -0.9}});

  auto base = predict_rating(1, 1, without, index);
  CHECK(predict_rating(1, 1, with_zero, index).predicted_rating == base.predicted_rating);
  CHECK(predict_rating(1, 1, with_negative, index).predicted_rating == base.predicted_rating);

  PredictorConfig use_neg;
  use_neg.use_negative = true;
  CHECK(predict_rating(1, 1, with_negative, index, use_neg).predicted_rating != base.predicted_rating);
}

TEST_CASE("k_neighbors keeps only the strongest, ties by lower index") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3), testutil::rate(1, 3, 3),
      testutil::rate(2, 1, 5), testutil::rate(2, 2, 3),  // mean 4, offset +1
      testutil::rate(3, 1, 1), testutil::rate(3, 2, 3),  // mean 2, offset -1
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 0.6}, {0, 2, 0.6}});

  PredictorConfig top1;
  top1.k_neighbors = 1;
  auto p = predict_rating(1, 1, sims, index, top1);
  CHECK(p.support == 1);
  // tie on |sim|: user index 1 (id 2) wins, contributing +1
  CHECK(p.predicted_rating == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("raw centering averages ratings directly") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 2, 3),
      testutil::rate(2, 1, 4), testutil::rate(2, 2, 2),
      testutil::rate(3, 1, 2), testutil::rate(3, 2, 4),
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 0.5}, {0, 2, 0.25}});

  PredictorConfig raw;
  raw.centering = Centering::Raw;
  auto p = predict_rating(1, 1, sims, index, raw);
  CHECK(p.predicted_rating == doctest::Approx((0.5 * 4 + 0.25 * 2) / 0.75).epsilon(1e-12));
}

TEST_CASE("unknown ids are domain errors") {
  Dataset ds = toy_dataset();
  TrainingIndex index(ds, {});
  auto sims = matrix_for(ds, {});
  CHECK_THROWS_AS(predict_rating(1, 999, sims, index), std::domain_error);
  CHECK_THROWS_AS(predict_rating(999, 1, sims, index), std::domain_error);
}

TEST_CASE("top-n recommendations") {
  Dataset ds = toy_dataset();
  std::vector<RatingEvent> train = {
      testutil::rate(1, 4, 3),
      testutil::rate(2, 1, 5), testutil::rate(2, 2, 3), testutil::rate(2, 3, 4),
      testutil::rate(2, 4, 3),
  };
  TrainingIndex index(ds, train);
  auto sims = matrix_for(ds, {{0, 1, 1.0}});

  SUBCASE("n=1 returns the argmax over unrated items") {
    auto recs = recommend_top_n(1, 1, sims, index);
    REQUIRE(recs.size() == 1);
    double best = -1.0;
    std::int32_t best_item = 0;
    for (std::int32_t item : {1, 2, 3}) {
      const double v = predict_rating(1, item, sims, index).predicted_rating;
      if (v > best) {
        best = v;
        best_item = item;
      }
    }
    CHECK(recs[0].first == best_item);
    CHECK(recs[0].second == doctest::Approx(best).epsilon(1e-12));
  }

  SUBCASE("a user who rated everything gets an empty list") {
    std::vector<RatingEvent> all_rated = {
        testutil::rate(1, 1, 3), testutil::rate(1, 2, 3), testutil::rate(1, 3, 3),
        testutil::rate(1, 4, 3)};
    TrainingIndex full(ds, all_rated);
    CHECK(recommend_top_n(1, 3, sims, full).empty());
  }

  SUBCASE("ties order by ascending item id") {
    // user 3 has no similarities: every unrated item predicts the same mean
    std::vector<RatingEvent> t = {testutil::rate(3, 1, 4)};
    TrainingIndex idx(ds, t);
    auto recs = recommend_top_n(3, 3, sims, idx);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].first == 2);
    CHECK(recs[1].first == 3);
    CHECK(recs[2].first == 4);
  }
}

TEST_CASE("predict_all is deterministic and order-preserving") {
  SynthSpec spec;
  spec.user_count = 40;
  spec.movie_count = 100;
  spec.rating_count = 1200;
  Dataset ds = make_synthetic_dataset(spec);

  std::vector<RatingEvent> train(ds.ratings.begin(), ds.ratings.end() - 200);
  std::vector<RatingEvent> test(ds.ratings.end() - 200, ds.ratings.end());
  TrainingIndex index(ds, train);
  auto profiles = build_all_profiles(ds, train);
  std::vector<std::int32_t> ids;
  for (const auto& u : ds.users) ids.push_back(u.user_id);
  auto sims = build_mcf_matrix(profiles, ids);

  auto a = predict_all(test, sims, index);
  auto b = predict_all(test, sims, index);
  REQUIRE(a.size() == test.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].predicted_rating == b[k].predicted_rating);
    CHECK(a[k].user_id == test[k].user_id);
    CHECK(a[k].item_id == test[k].item_id);
    CHECK(a[k].predicted_rating >= 1.0);
    CHECK(a[k].predicted_rating <= 5.0);
    CHECK((a[k].support == 0) == (a[k].fallback != FallbackLevel::Neighborhood));
  }
}

}  // TEST_SUITE
