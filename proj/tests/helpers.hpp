#pragma once

#include <unistd.h>

#include <filesystem>
#include <string>
#include <vector>

#include "cfrec/dataset.hpp"

namespace testutil {

/// Unique scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("cfrec_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

inline std::vector<std::string> default_genres() {
  return {"unknown",  "Action",  "Adventure", "Animation", "Children's", "Comedy",  "Crime",
          "Documentary", "Drama", "Fantasy",  "Film-Noir", "Horror",     "Musical", "Mystery",
          "Romance",  "Sci-Fi",  "Thriller",  "War",       "Western"};
}

inline int genre_index(const std::string& name) {
  auto genres = default_genres();
  for (std::size_t i = 0; i < genres.size(); ++i) {
    if (genres[i] == name) return static_cast<int>(i);
  }
  return -1;
}

inline cfrec::Movie make_movie(std::int32_t id, const std::vector<std::string>& genres) {
  cfrec::Movie m;
  m.item_id = id;
  m.title = "Movie " + std::to_string(id);
  m.genre_flags.assign(cfrec::kGenreCount, 0);
  for (const auto& g : genres) m.genre_flags[genre_index(g)] = 1;
  return m;
}

inline cfrec::UserDemographics make_user(std::int32_t id, int age = 25,
                                         const std::string& occupation = "student") {
  cfrec::UserDemographics u;
  u.user_id = id;
  u.age = age;
  u.gender = 'F';
  u.occupation = occupation;
  u.zip_code = "00000";
  return u;
}

inline cfrec::RatingEvent rate(std::int32_t user, std::int32_t item, int rating,
                               std::int64_t timestamp = 0) {
  return {user, item, rating, timestamp};
}

}  // namespace testutil
