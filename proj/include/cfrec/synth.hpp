#pragma once

#include <cstdint>
#include <filesystem>

#include "cfrec/dataset.hpp"

namespace cfrec {

/// Marker file written into generated dataset directories so tooling can
/// tell fixtures apart from the published dataset.
inline constexpr const char* kSyntheticMarker = "SYNTHETIC";

/// Parameters for the synthetic dataset generator. Defaults mirror the
/// published 100k corpus shape: 943 users, 1682 movies, 100000 unique
/// ratings, 19 genres, demographics dense around age 30 with students the
/// most frequent occupation.
struct SynthSpec {
  int user_count = 943;
  int movie_count = 1682;
  int rating_count = 100000;
  std::uint64_t seed = 1337;
};

/// Deterministic synthetic dataset. Ratings follow a latent model (user
/// baseline + movie quality + per-user genre affinity + noise) so that genre
/// profiles carry real signal; every user has at least 20 ratings.
Dataset make_synthetic_dataset(const SynthSpec& spec = {});

/// Writes u.data / u.item / u.user / u.genre / u.occupation / u.info, the
/// five-fold split files u1..u5 and the per-user holdout splits ua/ub (all in
/// the published formats), plus the SYNTHETIC marker.
void write_ml100k_dir(const Dataset& dataset, const std::filesystem::path& dir, const SynthSpec& spec);

bool is_synthetic_dir(const std::filesystem::path& dir);

/// Generates the fixture into `dir` unless a matching one is already there.
/// Returns `dir`.
std::filesystem::path ensure_fixture_dir(const std::filesystem::path& dir, const SynthSpec& spec = {});

}  // namespace cfrec
