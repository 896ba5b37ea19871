#include "cfrec/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cfrec/util.hpp"

namespace cfrec {

namespace {

std::string where(std::string_view source, std::size_t line_no) {
  return std::string(source) + ":" + std::to_string(line_no);
}

// Splits on a single-character delimiter, keeping empty fields.
std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

template <typename Int>
Int parse_int(std::string_view field, std::string_view source, std::size_t line_no, std::string_view what) {
  Int value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    throw ParseError(where(source, line_no) + ": non-integer " + std::string(what) + " field '" +
                     std::string(field) + "'");
  }
  return value;
}

// Strips one trailing '\r' so CRLF inputs parse identically.
std::string_view chomp(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace

std::vector<RatingEvent> parse_ratings(std::istream& in, std::string_view source_name) {
  std::vector<RatingEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = chomp(line);
    if (sv.empty()) continue;
    auto fields = split(sv, '\t');
    if (fields.size() != 4) {
      throw ParseError(where(source_name, line_no) + ": expected 4 tab-separated fields, got " +
                       std::to_string(fields.size()));
    }
    RatingEvent ev;
    ev.user_id = parse_int<std::int32_t>(fields[0], source_name, line_no, "user id");
    ev.item_id = parse_int<std::int32_t>(fields[1], source_name, line_no, "item id");
    ev.rating = parse_int<std::int32_t>(fields[2], source_name, line_no, "rating");
    ev.timestamp = parse_int<std::int64_t>(fields[3], source_name, line_no, "timestamp");
    if (ev.user_id <= 0 || ev.item_id <= 0) {
      throw ValidationError(where(source_name, line_no) + ": ids must be positive");
    }
    if (ev.rating < 1 || ev.rating > 5) {
      throw ValidationError(where(source_name, line_no) + ": rating " + std::to_string(ev.rating) +
                            " outside [1,5]");
    }
    out.push_back(ev);
  }
  return out;
}

std::vector<Movie> parse_movies(std::istream& in, int genre_count, std::string_view source_name) {
  std::vector<Movie> out;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t expected_fields = 5 + static_cast<std::size_t>(genre_count);
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = chomp(line);
    if (sv.empty()) continue;
    auto fields = split(sv, '|');
    if (fields.size() != expected_fields) {
      throw ParseError(where(source_name, line_no) + ": expected " + std::to_string(expected_fields) +
                       " pipe-separated fields, got " + std::to_string(fields.size()));
    }
    Movie m;
    m.item_id = parse_int<std::int32_t>(fields[0], source_name, line_no, "item id");
    if (m.item_id <= 0) throw ValidationError(where(source_name, line_no) + ": item id must be positive");
    m.title = std::string(fields[1]);
    m.release_date = std::string(fields[2]);
    m.video_release_date = std::string(fields[3]);
    m.imdb_url = std::string(fields[4]);
    m.genre_flags.reserve(genre_count);
    for (int g = 0; g < genre_count; ++g) {
      std::string_view f = fields[5 + g];
      if (f == "0") {
        m.genre_flags.push_back(0);
      } else if (f == "1") {
        m.genre_flags.push_back(1);
      } else {
        throw ValidationError(where(source_name, line_no) + ": genre flag '" + std::string(f) +
                              "' is not 0/1");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<UserDemographics> parse_users(std::istream& in, std::string_view source_name) {
  std::vector<UserDemographics> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = chomp(line);
    if (sv.empty()) continue;
    auto fields = split(sv, '|');
    if (fields.size() != 5) {
      throw ParseError(where(source_name, line_no) + ": expected 5 pipe-separated fields, got " +
                       std::to_string(fields.size()));
    }
    UserDemographics u;
    u.user_id = parse_int<std::int32_t>(fields[0], source_name, line_no, "user id");
    u.age = parse_int<std::int32_t>(fields[1], source_name, line_no, "age");
    if (u.user_id <= 0) throw ValidationError(where(source_name, line_no) + ": user id must be positive");
    if (u.age <= 0) throw ValidationError(where(source_name, line_no) + ": age must be positive");
    if (fields[2].size() != 1) {
      throw ParseError(where(source_name, line_no) + ": gender must be a single character");
    }
    u.gender = fields[2][0];
    u.occupation = std::string(fields[3]);
    u.zip_code = std::string(fields[4]);
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<std::string> parse_genres(std::istream& in, std::string_view source_name) {
  std::vector<std::pair<int, std::string>> indexed;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = chomp(line);
    if (sv.empty()) continue;
    auto fields = split(sv, '|');
    if (fields.size() != 2) {
      throw ParseError(where(source_name, line_no) + ": expected name|index, got " +
                       std::to_string(fields.size()) + " fields");
    }
    int idx = parse_int<int>(fields[1], source_name, line_no, "genre index");
    indexed.emplace_back(idx, std::string(fields[0]));
  }
  std::vector<std::string> names(indexed.size());
  for (auto& [idx, name] : indexed) {
    if (idx < 0 || idx >= static_cast<int>(indexed.size()) || !names[idx].empty()) {
      throw ValidationError(std::string(source_name) + ": genre indices must be a permutation of 0.." +
                            std::to_string(indexed.size() - 1));
    }
    names[idx] = std::move(name);
  }
  return names;
}

std::optional<int> Dataset::find_user(std::int32_t user_id) const {
  auto it = user_index_.find(user_id);
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Dataset::find_item(std::int32_t item_id) const {
  auto it = item_index_.find(item_id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

int Dataset::user_index(std::int32_t user_id) const {
  auto idx = find_user(user_id);
  if (!idx) throw IntegrityError("unknown user id " + std::to_string(user_id));
  return *idx;
}

int Dataset::item_index(std::int32_t item_id) const {
  auto idx = find_item(item_id);
  if (!idx) throw IntegrityError("unknown item id " + std::to_string(item_id));
  return *idx;
}

Dataset assemble_dataset(std::vector<UserDemographics> users, std::vector<Movie> movies,
                         std::vector<RatingEvent> ratings, std::vector<std::string> genre_names) {
  if (genre_names.size() != static_cast<std::size_t>(kGenreCount)) {
    throw ValidationError("expected " + std::to_string(kGenreCount) + " genre names, got " +
                          std::to_string(genre_names.size()));
  }
  Dataset ds;
  ds.users = std::move(users);
  ds.movies = std::move(movies);
  ds.ratings = std::move(ratings);
  ds.genre_names = std::move(genre_names);

  ds.user_index_.reserve(ds.users.size());
  for (std::size_t i = 0; i < ds.users.size(); ++i) {
    auto [it, inserted] = ds.user_index_.emplace(ds.users[i].user_id, static_cast<int>(i));
    if (!inserted) throw IntegrityError("duplicate user id " + std::to_string(ds.users[i].user_id));
  }
  ds.item_index_.reserve(ds.movies.size());
  for (std::size_t i = 0; i < ds.movies.size(); ++i) {
    if (ds.movies[i].genre_flags.size() != static_cast<std::size_t>(kGenreCount)) {
      throw ValidationError("movie " + std::to_string(ds.movies[i].item_id) + " has " +
                            std::to_string(ds.movies[i].genre_flags.size()) + " genre flags, expected " +
                            std::to_string(kGenreCount));
    }
    auto [it, inserted] = ds.item_index_.emplace(ds.movies[i].item_id, static_cast<int>(i));
    if (!inserted) throw IntegrityError("duplicate item id " + std::to_string(ds.movies[i].item_id));
  }

  std::unordered_map<std::int64_t, bool> seen_pairs;
  seen_pairs.reserve(ds.ratings.size());
  for (const RatingEvent& ev : ds.ratings) {
    if (!ds.user_index_.contains(ev.user_id)) {
      throw IntegrityError("rating (" + std::to_string(ev.user_id) + "," + std::to_string(ev.item_id) +
                           ") references unknown user " + std::to_string(ev.user_id));
    }
    if (!ds.item_index_.contains(ev.item_id)) {
      throw IntegrityError("rating (" + std::to_string(ev.user_id) + "," + std::to_string(ev.item_id) +
                           ") references unknown item " + std::to_string(ev.item_id));
    }
    std::int64_t key = (static_cast<std::int64_t>(ev.user_id) << 32) | static_cast<std::uint32_t>(ev.item_id);
    auto [it, inserted] = seen_pairs.emplace(key, true);
    if (!inserted) {
      throw IntegrityError("duplicate rating pair (" + std::to_string(ev.user_id) + "," +
                           std::to_string(ev.item_id) + ")");
    }
  }
  return ds;
}

namespace {

std::ifstream open_or_throw(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  return in;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
  auto data = open_or_throw(dir / "u.data");
  auto item = open_or_throw(dir / "u.item");
  auto user = open_or_throw(dir / "u.user");
  auto genre = open_or_throw(dir / "u.genre");
  auto ratings = parse_ratings(data, "u.data");
  auto movies = parse_movies(item, kGenreCount, "u.item");
  auto users = parse_users(user, "u.user");
  auto genres = parse_genres(genre, "u.genre");
  return assemble_dataset(std::move(users), std::move(movies), std::move(ratings), std::move(genres));
}

std::vector<RatingEvent> load_ratings_file(const std::filesystem::path& file) {
  auto in = open_or_throw(file);
  return parse_ratings(in, file.filename().string());
}

void write_ratings(std::ostream& out, std::span<const RatingEvent> ratings) {
  for (const RatingEvent& ev : ratings) {
    out << ev.user_id << '\t' << ev.item_id << '\t' << ev.rating << '\t' << ev.timestamp << '\n';
  }
}

void write_movies(std::ostream& out, std::span<const Movie> movies) {
  for (const Movie& m : movies) {
    out << m.item_id << '|' << m.title << '|' << m.release_date << '|' << m.video_release_date << '|'
        << m.imdb_url;
    for (std::uint8_t f : m.genre_flags) out << '|' << static_cast<int>(f);
    out << '\n';
  }
}

void write_users(std::ostream& out, std::span<const UserDemographics> users) {
  for (const UserDemographics& u : users) {
    out << u.user_id << '|' << u.age << '|' << u.gender << '|' << u.occupation << '|' << u.zip_code << '\n';
  }
}

void write_genres(std::ostream& out, std::span<const std::string> genre_names) {
  for (std::size_t i = 0; i < genre_names.size(); ++i) {
    out << genre_names[i] << '|' << i << '\n';
  }
}

std::uint64_t dataset_dir_digest(const std::filesystem::path& dir) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* name : {"u.data", "u.item", "u.user", "u.genre"}) {
    std::ifstream in(dir / name, std::ios::binary);
    if (!in) throw IoError("cannot open " + (dir / name).string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    h = fnv1a64(bytes, h);
  }
  return h;
}

}  // namespace cfrec
