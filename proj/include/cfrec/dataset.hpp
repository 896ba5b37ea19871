#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cfrec {

inline constexpr int kGenreCount = 19;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One user -> item rating. The atomic input record (`u.data` row).
struct RatingEvent {
  std::int32_t user_id = 0;
  std::int32_t item_id = 0;
  std::int32_t rating = 0;  // stars, 1..5
  std::int64_t timestamp = 0;

  bool operator==(const RatingEvent&) const = default;
};

/// Item metadata plus the 19 binary genre flags (`u.item` row).
/// Titles and dates are kept as the file's literal bytes (the published
/// dataset contains Latin-1 characters; no transcoding happens anywhere).
struct Movie {
  std::int32_t item_id = 0;
  std::string title;
  std::string release_date;        // may be empty
  std::string video_release_date;  // may be empty, preserved for round-trips
  std::string imdb_url;            // preserved for round-trips
  std::vector<std::uint8_t> genre_flags;  // length 19, values 0/1

  bool operator==(const Movie&) const = default;
};

struct UserDemographics {
  std::int32_t user_id = 0;
  std::int32_t age = 0;
  char gender = '?';
  std::string occupation;
  std::string zip_code;

  bool operator==(const UserDemographics&) const = default;
};

/// Integrity-checked in-memory dataset. Immutable once assembled; safe to
/// share across threads.
class Dataset {
 public:
  std::vector<UserDemographics> users;
  std::vector<Movie> movies;
  std::vector<RatingEvent> ratings;
  std::vector<std::string> genre_names;  // 19 labels, file order

  int user_count() const { return static_cast<int>(users.size()); }
  int movie_count() const { return static_cast<int>(movies.size()); }

  std::optional<int> find_user(std::int32_t user_id) const;
  std::optional<int> find_item(std::int32_t item_id) const;

  /// Index lookups that throw IntegrityError for unknown ids.
  int user_index(std::int32_t user_id) const;
  int item_index(std::int32_t item_id) const;

  friend Dataset assemble_dataset(std::vector<UserDemographics> users, std::vector<Movie> movies,
                                  std::vector<RatingEvent> ratings, std::vector<std::string> genre_names);

 private:
  std::unordered_map<std::int32_t, int> user_index_;
  std::unordered_map<std::int32_t, int> item_index_;
};

// --- parsers (line-oriented; byte-preserving; errors carry line numbers) ---

std::vector<RatingEvent> parse_ratings(std::istream& in, std::string_view source_name = "ratings");
std::vector<Movie> parse_movies(std::istream& in, int genre_count = kGenreCount,
                                std::string_view source_name = "movies");
std::vector<UserDemographics> parse_users(std::istream& in, std::string_view source_name = "users");
std::vector<std::string> parse_genres(std::istream& in, std::string_view source_name = "genres");

/// Referential-integrity check + index build. Rejects duplicate ids,
/// duplicate (user,item) rating pairs and dangling references.
Dataset assemble_dataset(std::vector<UserDemographics> users, std::vector<Movie> movies,
                         std::vector<RatingEvent> ratings, std::vector<std::string> genre_names);

/// Loads u.data / u.item / u.user / u.genre from `dir` and assembles.
Dataset load_dataset(const std::filesystem::path& dir);

/// Parses one rating file in u.data format (used for split files).
std::vector<RatingEvent> load_ratings_file(const std::filesystem::path& file);

// --- writers (exact inverse of the parsers) ---

void write_ratings(std::ostream& out, std::span<const RatingEvent> ratings);
void write_movies(std::ostream& out, std::span<const Movie> movies);
void write_users(std::ostream& out, std::span<const UserDemographics> users);
void write_genres(std::ostream& out, std::span<const std::string> genre_names);

/// FNV-1a digest over the four core files of a dataset directory.
std::uint64_t dataset_dir_digest(const std::filesystem::path& dir);

}  // namespace cfrec
