#include "cfrec/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "cfrec/rng.hpp"
#include "cfrec/util.hpp"

namespace cfrec {

namespace {

// Vocabulary of the published dataset files (u.genre / u.occupation).
constexpr std::array<const char*, kGenreCount> kGenreNames = {
    "unknown",  "Action",    "Adventure", "Animation", "Children's", "Comedy",  "Crime",
    "Documentary", "Drama",  "Fantasy",   "Film-Noir", "Horror",     "Musical", "Mystery",
    "Romance",  "Sci-Fi",    "Thriller",  "War",       "Western"};

struct OccupationWeight {
  const char* name;
  int weight;
};

// Occupation mix with students clearly the most frequent group.
constexpr std::array<OccupationWeight, 21> kOccupations = {{
    {"administrator", 79}, {"artist", 28},     {"doctor", 7},    {"educator", 95}, {"engineer", 67},
    {"entertainment", 18}, {"executive", 32},  {"healthcare", 16}, {"homemaker", 7}, {"lawyer", 12},
    {"librarian", 51},     {"marketing", 26},  {"none", 9},      {"other", 105},   {"programmer", 66},
    {"retired", 14},       {"salesman", 12},   {"scientist", 31}, {"student", 196}, {"technician", 27},
    {"writer", 45},
}};

// Relative genre frequency for movie flag generation (drama/comedy heavy).
constexpr std::array<double, kGenreCount> kGenrePopularity = {
    0.000, 0.090, 0.045, 0.013, 0.040, 0.170, 0.035, 0.015, 0.250, 0.007,
    0.008, 0.030, 0.018, 0.020, 0.075, 0.033, 0.080, 0.023, 0.009};

constexpr std::array<const char*, 24> kTitleHeads = {
    "Midnight", "Silver",  "Crimson", "Golden",  "Silent",  "Electric", "Paper",   "Winter",
    "Broken",   "Hidden",  "Iron",    "Scarlet", "Hollow",  "Distant",  "Wild",    "Lonely",
    "Burning",  "Frozen",  "Velvet",  "Rising",  "Falling", "Lost",     "Last",    "First"};

constexpr std::array<const char*, 24> kTitleTails = {
    "Station", "Harbor",  "Horizon", "Letters", "Garden",  "Voyage", "Memory", "Circus",
    "Bridge",  "Orchard", "Signal",  "Mirror",  "Highway", "Island", "Parade", "Shadow",
    "Currents", "Window", "Journey", "Fortune", "Lantern", "Canyon", "Summer", "Harvest"};

constexpr std::array<const char*, 12> kMonthNames = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                     "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};

// Largest-remainder allocation of `total` across weights.
std::vector<int> allocate_counts(const std::vector<double>& weights, int total) {
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> counts(weights.size(), 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / wsum * total;
    counts[i] = static_cast<int>(exact);
    assigned += counts[i];
    remainders.emplace_back(exact - counts[i], i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int k = 0; k < total - assigned; ++k) counts[remainders[k % remainders.size()].second] += 1;
  return counts;
}

std::vector<UserDemographics> make_users(const SynthSpec& spec, Rng& rng) {
  // Occupation counts scaled from the weight table, student kept strictly modal.
  std::vector<double> occ_weights;
  for (const auto& ow : kOccupations) occ_weights.push_back(static_cast<double>(ow.weight));
  std::vector<int> occ_counts = allocate_counts(occ_weights, spec.user_count);
  const std::size_t student = 18;  // index in kOccupations
  for (std::size_t i = 0; i < occ_counts.size(); ++i) {
    while (i != student && occ_counts[i] >= occ_counts[student] && occ_counts[i] > 0) {
      occ_counts[i] -= 1;
      occ_counts[student] += 1;
    }
  }

  std::vector<std::string> occupations;
  occupations.reserve(spec.user_count);
  for (std::size_t i = 0; i < occ_counts.size(); ++i) {
    for (int k = 0; k < occ_counts[i]; ++k) occupations.emplace_back(kOccupations[i].name);
  }
  rng.shuffle(occupations);

  // Age mass concentrated near 30, modal age exactly 30.
  std::vector<double> age_weights;
  const int age_lo = 7, age_hi = 73;
  for (int a = age_lo; a <= age_hi; ++a) {
    const double z = (a - 30.0) / 11.0;
    age_weights.push_back(std::exp(-0.5 * z * z) + 0.05);
  }
  std::vector<int> age_counts = allocate_counts(age_weights, spec.user_count);
  // Make age 30 the strict mode.
  const std::size_t thirty = 30 - age_lo;
  for (std::size_t i = 0; i < age_counts.size(); ++i) {
    while (i != thirty && age_counts[i] >= age_counts[thirty] && age_counts[i] > 1) {
      age_counts[i] -= 1;
      age_counts[thirty] += 1;
    }
  }
  std::vector<int> ages;
  ages.reserve(spec.user_count);
  for (std::size_t i = 0; i < age_counts.size(); ++i) {
    for (int k = 0; k < age_counts[i]; ++k) ages.push_back(age_lo + static_cast<int>(i));
  }
  rng.shuffle(ages);

  std::vector<UserDemographics> users(spec.user_count);
  for (int u = 0; u < spec.user_count; ++u) {
    users[u].user_id = u + 1;
    users[u].age = ages[u];
    users[u].gender = rng.uniform() < 0.71 ? 'M' : 'F';
    users[u].occupation = occupations[u];
    users[u].zip_code = std::to_string(10000 + rng.below(90000));
  }
  return users;
}

std::vector<Movie> make_movies(const SynthSpec& spec, Rng& rng) {
  std::vector<double> genre_weights(kGenrePopularity.begin(), kGenrePopularity.end());
  const double genre_total = std::accumulate(genre_weights.begin(), genre_weights.end(), 0.0);

  std::vector<Movie> movies(spec.movie_count);
  for (int i = 0; i < spec.movie_count; ++i) {
    Movie& m = movies[i];
    m.item_id = i + 1;
    const int year = 1930 + static_cast<int>(rng.below(69));
    const int day = 1 + static_cast<int>(rng.below(28));
    const char* month = kMonthNames[rng.below(12)];
    m.title = std::string(kTitleHeads[rng.below(kTitleHeads.size())]) + " " +
              kTitleTails[rng.below(kTitleTails.size())] + " #" + std::to_string(i + 1) + " (" +
              std::to_string(year) + ")";
    char datebuf[16];
    std::snprintf(datebuf, sizeof(datebuf), "%02d-%s-%d", day, month, year);
    m.release_date = datebuf;
    m.imdb_url = "http://films.example/title/" + std::to_string(i + 1);
    m.genre_flags.assign(kGenreCount, 0);

    if (i == 0) continue;  // one all-zero-flag movie (admitted edge case)
    if (i == 1 || i == 2) {
      m.genre_flags[0] = 1;  // the "unknown" genre
      continue;
    }
    const double p = rng.uniform();
    const int flag_count = p < 0.45 ? 1 : (p < 0.80 ? 2 : 3);
    int placed = 0;
    while (placed < flag_count) {
      const std::size_t g = rng.weighted_pick(genre_weights, genre_total);
      if (m.genre_flags[g]) continue;
      m.genre_flags[g] = 1;
      ++placed;
    }
  }
  // A Latin-1 byte in one title; ingestion must pass bytes through unchanged.
  if (spec.movie_count > 3) {
    movies[3].title = std::string("Caf") + static_cast<char>(0xE9) + " Lumi" + static_cast<char>(0xE8) +
                      "re #4 (" + movies[3].release_date.substr(7) + ")";
  }
  return movies;
}

struct UserTaste {
  double baseline = 3.6;
  std::array<double, kGenreCount> affinity{};
};

std::vector<int> make_rating_counts(const SynthSpec& spec, Rng& rng) {
  const int floor_count = 20;
  std::vector<double> raw(spec.user_count);
  for (int u = 0; u < spec.user_count; ++u) {
    raw[u] = std::min(600.0, std::exp(rng.gaussian(3.95, 1.0)));
  }
  const double raw_sum = std::accumulate(raw.begin(), raw.end(), 0.0);
  const int budget = spec.rating_count - floor_count * spec.user_count;
  if (budget < 0) throw ValidationError("rating count too small for the 20-per-user floor");

  std::vector<int> counts(spec.user_count, floor_count);
  int assigned = 0;
  std::vector<std::pair<double, int>> remainders;
  for (int u = 0; u < spec.user_count; ++u) {
    const double exact = raw[u] / raw_sum * budget;
    const int extra = std::min(static_cast<int>(exact), spec.movie_count - floor_count);
    counts[u] += extra;
    assigned += extra;
    remainders.emplace_back(exact - extra, u);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  int deficit = budget - assigned;
  std::size_t cursor = 0;
  while (deficit > 0) {
    const int u = remainders[cursor % remainders.size()].second;
    if (counts[u] < spec.movie_count) {
      counts[u] += 1;
      --deficit;
    }
    ++cursor;
  }
  return counts;
}

std::vector<RatingEvent> make_ratings(const SynthSpec& spec, const std::vector<Movie>& movies,
                                      std::uint64_t seed) {
  Rng setup_rng(derive_seed(seed, 0x5441535445));  // taste setup stream

  // Item popularity: Zipf-like over a random permutation of items.
  std::vector<int> pop_rank(spec.movie_count);
  std::iota(pop_rank.begin(), pop_rank.end(), 0);
  setup_rng.shuffle(pop_rank);
  std::vector<double> popularity(spec.movie_count);
  for (int i = 0; i < spec.movie_count; ++i) {
    popularity[i] = 1.0 / std::pow(pop_rank[i] + 15.0, 1.0);
  }
  const double pop_total = std::accumulate(popularity.begin(), popularity.end(), 0.0);

  std::vector<double> quality(spec.movie_count);
  for (int i = 0; i < spec.movie_count; ++i) {
    quality[i] = std::clamp(setup_rng.gaussian(0.0, 0.9), -2.0, 2.0);
  }

  std::vector<int> counts = make_rating_counts(spec, setup_rng);

  std::vector<RatingEvent> ratings;
  ratings.reserve(spec.rating_count);
  for (int u = 0; u < spec.user_count; ++u) {
    Rng rng(derive_seed(seed, 0x55534552, static_cast<std::uint64_t>(u)));  // per-user stream

    UserTaste taste;
    taste.baseline = std::clamp(rng.gaussian(3.6, 0.35), 2.5, 4.5);
    const int loved = 3 + static_cast<int>(rng.below(3));
    const int disliked = 1 + static_cast<int>(rng.below(2));
    for (int k = 0; k < loved + disliked; ++k) {
      std::size_t g;
      do {
        g = 1 + rng.below(kGenreCount - 1);  // never the "unknown" genre
      } while (taste.affinity[g] != 0.0);
      const double amp = rng.uniform(0.9, 1.4);
      taste.affinity[g] = k < loved ? amp : -amp;
    }

    std::unordered_set<int> chosen;
    chosen.reserve(counts[u] * 2);
    int attempts = 0;
    const int max_attempts = counts[u] * 400;
    while (static_cast<int>(chosen.size()) < counts[u]) {
      int item;
      if (attempts++ < max_attempts) {
        item = static_cast<int>(rng.weighted_pick(popularity, pop_total));
        if (chosen.contains(item)) continue;
        // Exposure bias: users pick movies in genres they love more often.
        double best_affinity = 0.0;
        for (int g = 0; g < kGenreCount; ++g) {
          if (movies[item].genre_flags[g]) best_affinity = std::max(best_affinity, taste.affinity[g]);
        }
        const double accept = (1.0 + 1.2 * best_affinity) / 2.68;
        if (rng.uniform() > accept) continue;
      } else {
        item = static_cast<int>(rng.below(spec.movie_count));  // safety valve
        if (chosen.contains(item)) continue;
      }
      chosen.insert(item);

      double affinity_sum = 0.0;
      int flagged = 0;
      for (int g = 0; g < kGenreCount; ++g) {
        if (movies[item].genre_flags[g]) {
          affinity_sum += taste.affinity[g];
          ++flagged;
        }
      }
      const double affinity = flagged > 0 ? affinity_sum / flagged : 0.0;
      const double value = taste.baseline + quality[item] + affinity + rng.gaussian(0.0, 0.40);
      RatingEvent ev;
      ev.user_id = u + 1;
      ev.item_id = item + 1;
      ev.rating = std::clamp(static_cast<int>(std::lround(value)), 1, 5);
      ev.timestamp = 874000000 + static_cast<std::int64_t>(rng.below(25000000));
      ratings.push_back(ev);
    }
  }
  return ratings;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
}

template <typename WriteFn>
void write_with(const std::filesystem::path& path, WriteFn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  fn(out);
}

}  // namespace

Dataset make_synthetic_dataset(const SynthSpec& spec) {
  Rng rng(derive_seed(spec.seed, 0x53594e5448));  // demographics stream
  auto users = make_users(spec, rng);
  auto movies = make_movies(spec, rng);
  auto ratings = make_ratings(spec, movies, spec.seed);
  std::vector<std::string> genres(kGenreNames.begin(), kGenreNames.end());
  return assemble_dataset(std::move(users), std::move(movies), std::move(ratings), std::move(genres));
}

void write_ml100k_dir(const Dataset& dataset, const std::filesystem::path& dir, const SynthSpec& spec) {
  std::filesystem::create_directories(dir);

  write_with(dir / "u.data", [&](std::ostream& out) { write_ratings(out, dataset.ratings); });
  write_with(dir / "u.item", [&](std::ostream& out) { write_movies(out, dataset.movies); });
  write_with(dir / "u.user", [&](std::ostream& out) { write_users(out, dataset.users); });
  write_with(dir / "u.genre", [&](std::ostream& out) { write_genres(out, dataset.genre_names); });

  {
    std::string occupations;
    for (const auto& ow : kOccupations) occupations += std::string(ow.name) + "\n";
    write_file(dir / "u.occupation", occupations);
  }
  write_file(dir / "u.info", std::to_string(dataset.users.size()) + " users\n" +
                                 std::to_string(dataset.movies.size()) + " items\n" +
                                 std::to_string(dataset.ratings.size()) + " ratings\n");

  // Five disjoint folds in the published uX.base/uX.test layout.
  const std::size_t n = dataset.ratings.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng fold_rng(derive_seed(spec.seed, 0x464f4c44));
  fold_rng.shuffle(order);

  std::vector<int> fold_of(n, 0);
  for (std::size_t k = 0; k < n; ++k) fold_of[order[k]] = static_cast<int>(k % 5);
  for (int fold = 0; fold < 5; ++fold) {
    std::vector<RatingEvent> base, test;
    base.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
      (fold_of[k] == fold ? test : base).push_back(dataset.ratings[k]);
    }
    const std::string name = "u" + std::to_string(fold + 1);
    write_with(dir / (name + ".base"), [&](std::ostream& out) { write_ratings(out, base); });
    write_with(dir / (name + ".test"), [&](std::ostream& out) { write_ratings(out, test); });
  }

  // Per-user holdouts: 10 test ratings per user in ua, a disjoint 10 in ub.
  std::unordered_map<std::int32_t, std::vector<std::size_t>> by_user;
  for (std::size_t k = 0; k < n; ++k) by_user[dataset.ratings[k].user_id].push_back(k);
  std::vector<std::uint8_t> in_ua(n, 0), in_ub(n, 0);
  for (auto& [user_id, indices] : by_user) {
    Rng user_rng(derive_seed(spec.seed, 0x75616222, static_cast<std::uint64_t>(user_id)));
    if (indices.size() < 20) throw ValidationError("user " + std::to_string(user_id) + " has fewer than 20 ratings");
    for (std::size_t k = 0; k < 20; ++k) {
      std::size_t j = k + static_cast<std::size_t>(user_rng.below(indices.size() - k));
      std::swap(indices[k], indices[j]);
      (k < 10 ? in_ua : in_ub)[indices[k]] = 1;
    }
  }
  for (const char* name : {"ua", "ub"}) {
    const auto& mask = name[1] == 'a' ? in_ua : in_ub;
    std::vector<RatingEvent> base, test;
    for (std::size_t k = 0; k < n; ++k) (mask[k] ? test : base).push_back(dataset.ratings[k]);
    write_with(dir / (std::string(name) + ".base"), [&](std::ostream& out) { write_ratings(out, base); });
    write_with(dir / (std::string(name) + ".test"), [&](std::ostream& out) { write_ratings(out, test); });
  }

  write_file(dir / kSyntheticMarker,
             "Synthetic dataset in MovieLens 100k file format, generated by cfrec synth.\n"
             "seed=" + std::to_string(spec.seed) + " users=" + std::to_string(spec.user_count) +
                 " movies=" + std::to_string(spec.movie_count) +
                 " ratings=" + std::to_string(spec.rating_count) + "\nNot GroupLens data.\n");
}

bool is_synthetic_dir(const std::filesystem::path& dir) {
  return std::filesystem::exists(dir / kSyntheticMarker);
}

std::filesystem::path ensure_fixture_dir(const std::filesystem::path& dir, const SynthSpec& spec) {
  const std::filesystem::path marker = dir / kSyntheticMarker;
  if (std::filesystem::exists(dir / "u.data") && std::filesystem::exists(marker)) {
    std::ifstream in(marker);
    std::string line, want = "seed=" + std::to_string(spec.seed);
    while (std::getline(in, line)) {
      if (line.rfind(want, 0) == 0) return dir;
    }
  }
  Dataset ds = make_synthetic_dataset(spec);
  write_ml100k_dir(ds, dir, spec);
  return dir;
}

}  // namespace cfrec
