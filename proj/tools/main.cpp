#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfrec/analysis.hpp"
#include "cfrec/dataset.hpp"
#include "cfrec/eval.hpp"
#include "cfrec/predict.hpp"
#include "cfrec/profile.hpp"
#include "cfrec/similarity.hpp"
#include "cfrec/synth.hpp"
#include "cfrec/util.hpp"

namespace {

using nlohmann::json;

struct CommonOptions {
  std::string data_dir = "data/ml-100k";
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  std::string split = "u1";
  double test_fraction = 0.2;
  std::string format = "csv";
  int threads = 0;
  bool no_timing = false;

  // predictor / variant flags
  std::string algo = "bcf";
  int cap = 0;  // 0 = no cap
  std::string mcf_domain = "common";
  std::string centering = "mean";
  std::string k_neighbors = "all";
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--data-dir", opt.data_dir, "dataset directory (u.data, u.item, u.user, u.genre, splits)");
  cmd->add_option("--out-dir", opt.out_dir, "artifact output root");
  cmd->add_option("--seed", opt.seed, "RNG seed; the only entropy source");
  cmd->add_option("--split", opt.split, "u1..u5, ua, ub, or 'random'");
  cmd->add_option("--test-fraction", opt.test_fraction, "test fraction for --split random");
  cmd->add_option("--format", opt.format, "machine report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", opt.threads, "max stage parallelism (0 = runtime default)");
  cmd->add_flag("--no-timing", opt.no_timing, "zero wall-time fields and pin the manifest timestamp");
}

void add_variant_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--algo", opt.algo, "similarity source: bcf or mcf")->check(CLI::IsMember({"bcf", "mcf"}));
  cmd->add_option("--cap", opt.cap, "max training records per user (0 = unlimited)");
  cmd->add_option("--mcf-domain", opt.mcf_domain, "genre domain for profile similarity")
      ->check(CLI::IsMember({"common", "imputed"}));
  cmd->add_option("--centering", opt.centering, "weighted average form: mean or raw")
      ->check(CLI::IsMember({"mean", "raw"}));
  cmd->add_option("--k-neighbors", opt.k_neighbors, "neighborhood cutoff: positive integer or 'all'");
}

cfrec::SplitSpec parse_split(const CommonOptions& opt) {
  if (opt.split == "random") return cfrec::SplitSpec::random(opt.test_fraction);
  for (const char* fold : {"u1", "u2", "u3", "u4", "u5", "ua", "ub"}) {
    if (opt.split == fold) return cfrec::SplitSpec::official(opt.split);
  }
  throw CLI::ValidationError("--split", "expected u1..u5, ua, ub or random");
}

cfrec::PredictorConfig parse_predictor(const CommonOptions& opt) {
  cfrec::PredictorConfig cfg;
  cfg.centering = opt.centering == "raw" ? cfrec::Centering::Raw : cfrec::Centering::MeanCentered;
  if (opt.k_neighbors != "all") cfg.k_neighbors = std::stoi(opt.k_neighbors);
  return cfg;
}

cfrec::McfDomain parse_mcf_domain(const CommonOptions& opt) {
  return opt.mcf_domain == "imputed" ? cfrec::McfDomain::ImputedUnion : cfrec::McfDomain::CommonEncountered;
}

void apply_threads(const CommonOptions& opt) {
#ifdef _OPENMP
  if (opt.threads > 0) omp_set_num_threads(opt.threads);
#else
  (void)opt;
#endif
}

std::string iso_timestamp(bool no_timing) {
  if (no_timing) return "1970-01-01T00:00:00Z";
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Resolved-run provenance record; the run directory is named after its
/// digest so distinct configs never overwrite each other.
struct Manifest {
  json body;
  std::string digest;

  static Manifest make(const std::string& command, const CommonOptions& opt, const json& config,
                       std::uint64_t dataset_digest) {
    Manifest m;
    m.body["tool"] = std::string(cfrec::kToolName);
    m.body["version"] = std::string(cfrec::kToolVersion);
    m.body["command"] = command;
    m.body["config"] = config;
    m.body["data_dir"] = opt.data_dir;
    m.body["dataset_digest"] = cfrec::hex64(dataset_digest);
    m.digest = cfrec::hex64(cfrec::fnv1a64(m.body.dump()));
    m.body["timestamp"] = iso_timestamp(opt.no_timing);
    return m;
  }
};

std::filesystem::path prepare_run_dir(const CommonOptions& opt, const Manifest& manifest) {
  const std::filesystem::path dir = std::filesystem::path(opt.out_dir) / manifest.digest;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  out << manifest.body.dump(2) << '\n';
  return dir;
}

json config_json(const CommonOptions& opt, bool with_variant) {
  json c;
  c["seed"] = opt.seed;
  c["split"] = opt.split;
  if (opt.split == "random") c["test_fraction"] = opt.test_fraction;
  c["format"] = opt.format;
  c["threads"] = opt.threads;
  if (with_variant) {
    c["algo"] = opt.algo;
    c["cap"] = opt.cap;
    c["mcf_domain"] = opt.mcf_domain;
    c["centering"] = opt.centering;
    c["k_neighbors"] = opt.k_neighbors;
  }
  return c;
}

json report_json(const cfrec::EvaluationReport& r, const std::string& manifest_digest) {
  json j;
  j["algorithm"] = r.algorithm;
  if (r.record_cap) {
    j["cap"] = *r.record_cap;
  } else {
    j["cap"] = nullptr;
  }
  j["split"] = r.split;
  j["seed"] = r.seed;
  j["rmse"] = r.rmse;
  j["mae"] = r.mae;
  j["coverage"] = r.coverage;
  j["prediction_count"] = r.prediction_count;
  j["wall_time_s"] = r.wall_time_s;
  j["manifest"] = manifest_digest;
  return j;
}

void zero_timing(cfrec::EvaluationReport& r, bool no_timing) {
  if (no_timing) r.wall_time_s = 0.0;
}

int cmd_validate(const CommonOptions& opt) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  std::cout << ds.users.size() << " users, " << ds.movies.size() << " movies, " << ds.ratings.size()
            << " ratings, " << ds.genre_names.size() << " genres, OK\n";
  return 0;
}

// Train portion selection shared by profiles/similarity dumps: the full
// rating set unless a split is requested explicitly.
std::vector<cfrec::RatingEvent> select_train(const cfrec::Dataset& ds, const CommonOptions& opt,
                                             bool use_split) {
  if (!use_split) return ds.ratings;
  auto split = parse_split(opt);
  if (split.type == cfrec::SplitSpec::Type::OfficialFold) {
    return cfrec::load_official_split(opt.data_dir, split.fold).first;
  }
  return cfrec::split_random(ds, split.test_fraction, opt.seed).first;
}

int cmd_profiles(const CommonOptions& opt, bool use_split, int cap) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  auto train = select_train(ds, opt, use_split);
  if (cap > 0) train = cfrec::cap_user_records(train, cap, opt.seed);
  const auto profiles = cfrec::build_all_profiles(ds, train);

  Manifest manifest = Manifest::make("profiles", opt, config_json(opt, true), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);
  std::ofstream out(dir / "profiles.csv", std::ios::binary);
  cfrec::write_profiles_csv(out, profiles, ds.genre_names);
  std::cout << profiles.size() << " profiles -> " << (dir / "profiles.csv").string() << '\n';
  return 0;
}

int cmd_similarity(const CommonOptions& opt, bool use_split, int cap) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  auto train = select_train(ds, opt, use_split);
  if (cap > 0) train = cfrec::cap_user_records(train, cap, opt.seed);

  std::vector<std::int32_t> user_ids(ds.users.size());
  for (std::size_t u = 0; u < ds.users.size(); ++u) user_ids[u] = ds.users[u].user_id;

  cfrec::SimilarityMatrix matrix;
  if (opt.algo == "mcf") {
    const auto profiles = cfrec::build_all_profiles(ds, train);
    matrix = cfrec::build_mcf_matrix(profiles, user_ids, parse_mcf_domain(opt));
  } else {
    const cfrec::TrainingIndex index(ds, train);
    matrix = cfrec::build_bcf_matrix(index.histories(), user_ids);
  }

  Manifest manifest = Manifest::make("similarity", opt, config_json(opt, true), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);
  std::ofstream out(dir / "similarity.csv", std::ios::binary);
  cfrec::write_similarity_csv(out, matrix);
  std::cout << matrix.size() << "x" << matrix.size() << " " << opt.algo << " matrix -> "
            << (dir / "similarity.csv").string() << '\n';
  return 0;
}

int cmd_predict(const CommonOptions& opt, std::int32_t rec_user, int top_n) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  const auto split = parse_split(opt);
  auto [train, test] = split.type == cfrec::SplitSpec::Type::OfficialFold
                           ? cfrec::load_official_split(opt.data_dir, split.fold)
                           : cfrec::split_random(ds, split.test_fraction, opt.seed);
  if (opt.cap > 0) train = cfrec::cap_user_records(train, opt.cap, opt.seed);

  std::vector<std::int32_t> user_ids(ds.users.size());
  for (std::size_t u = 0; u < ds.users.size(); ++u) user_ids[u] = ds.users[u].user_id;

  const cfrec::TrainingIndex index(ds, train);
  cfrec::SimilarityMatrix matrix;
  if (opt.algo == "mcf") {
    const auto profiles = cfrec::build_all_profiles(ds, train);
    matrix = cfrec::build_mcf_matrix(profiles, user_ids, parse_mcf_domain(opt));
  } else {
    matrix = cfrec::build_bcf_matrix(index.histories(), user_ids);
  }
  const auto predictor = parse_predictor(opt);

  Manifest manifest = Manifest::make("predict", opt, config_json(opt, true), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);

  if (rec_user > 0) {
    const auto recs = cfrec::recommend_top_n(rec_user, top_n, matrix, index, predictor);
    std::ofstream out(dir / "recommendations.csv", std::ios::binary);
    out << "item_id,predicted\n";
    for (const auto& [item_id, value] : recs) out << item_id << ',' << cfrec::fmt_full(value) << '\n';
    std::cout << "top-" << top_n << " for user " << rec_user << ":\n";
    for (const auto& [item_id, value] : recs) {
      std::cout << "  " << item_id << "  " << cfrec::fmt_fixed(value, 4) << '\n';
    }
    return 0;
  }

  const auto predictions = cfrec::predict_all(test, matrix, index, predictor);
  std::ofstream out(dir / "predictions.csv", std::ios::binary);
  cfrec::write_predictions_csv(out, test, predictions);
  std::cout << predictions.size() << " predictions -> " << (dir / "predictions.csv").string() << '\n';
  return 0;
}

int cmd_evaluate(const CommonOptions& opt) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  cfrec::ExperimentConfig config;
  config.algo = opt.algo == "mcf" ? cfrec::Algo::MCF : cfrec::Algo::BCF;
  if (opt.cap > 0) config.record_cap = opt.cap;
  config.split = parse_split(opt);
  config.seed = opt.seed;
  config.predictor = parse_predictor(opt);
  config.mcf_domain = parse_mcf_domain(opt);

  cfrec::EvaluationReport report = cfrec::run_experiment(ds, opt.data_dir, config);
  zero_timing(report, opt.no_timing);

  Manifest manifest = Manifest::make("evaluate", opt, config_json(opt, true), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);

  if (opt.format == "json") {
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << report_json(report, manifest.digest).dump(2) << '\n';
  } else {
    std::ofstream out(dir / "report.csv", std::ios::binary);
    cfrec::write_reports_csv(out, {&report, 1});
  }
  std::cout << report.algorithm << (report.record_cap ? " (cap " + std::to_string(*report.record_cap) + ")" : "")
            << " on " << report.split << " seed " << report.seed << ": rmse " << cfrec::fmt_fixed(report.rmse, 4)
            << ", mae " << cfrec::fmt_fixed(report.mae, 4) << ", coverage "
            << cfrec::fmt_fixed(report.coverage, 4) << '\n';
  std::cout << "report -> " << dir.string() << '\n';
  return 0;
}

int cmd_table3(const CommonOptions& opt) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  const int cap = opt.cap > 0 ? opt.cap : 5;
  cfrec::Table3Result result = cfrec::run_table3(ds, opt.data_dir, parse_split(opt), opt.seed, cap,
                                                 parse_predictor(opt), parse_mcf_domain(opt));
  for (auto& cell : result.cells) zero_timing(cell, opt.no_timing);

  Manifest manifest = Manifest::make("table3", opt, config_json(opt, true), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);

  if (opt.format == "json") {
    json j;
    for (const auto& cell : result.cells) j["cells"].push_back(report_json(cell, manifest.digest));
    j["overall_improvement"] = result.overall_improvement;
    j["cold_start_improvement"] = result.cold_start_improvement;
    j["manifest"] = manifest.digest;
    std::ofstream out(dir / "report.json", std::ios::binary);
    out << j.dump(2) << '\n';
  } else {
    std::ofstream out(dir / "report.csv", std::ios::binary);
    cfrec::write_reports_csv(out, result.cells);
  }
  cfrec::print_table3(std::cout, result);
  std::cout << "report -> " << dir.string() << '\n';
  return 0;
}

int cmd_analyze(const CommonOptions& opt, int bin_width) {
  const cfrec::Dataset ds = cfrec::load_dataset(opt.data_dir);
  const auto hist = cfrec::age_histogram(ds, bin_width);
  const auto occupations = cfrec::occupation_counts(ds);
  const auto matrix = cfrec::occupation_genre_encounters(ds);

  Manifest manifest = Manifest::make("analyze", opt, config_json(opt, false), cfrec::dataset_dir_digest(opt.data_dir));
  const auto dir = prepare_run_dir(opt, manifest);
  {
    std::ofstream out(dir / "age_histogram.csv", std::ios::binary);
    cfrec::write_age_histogram_csv(out, hist);
  }
  {
    std::ofstream out(dir / "occupation_counts.csv", std::ios::binary);
    cfrec::write_occupation_counts_csv(out, occupations);
  }
  {
    std::ofstream out(dir / "occupation_genre.csv", std::ios::binary);
    cfrec::write_encounter_matrix_csv(out, matrix);
  }

  auto modal_bin = hist.begin();
  for (auto it = hist.begin(); it != hist.end(); ++it) {
    if (it->second > modal_bin->second) modal_bin = it;
  }
  auto top_occupation = occupations.begin();
  for (auto it = occupations.begin(); it != occupations.end(); ++it) {
    if (it->second > top_occupation->second) top_occupation = it;
  }
  std::cout << "modal age bin: " << modal_bin->first << " (" << modal_bin->second << " users)\n";
  std::cout << "top occupation: " << top_occupation->first << " (" << top_occupation->second << " users)\n";
  std::cout << "min occupation genre cosine (>=10 users): "
            << cfrec::fmt_fixed(cfrec::min_occupation_genre_cosine(ds), 4) << '\n';
  std::cout << "tables -> " << dir.string() << '\n';
  return 0;
}

int cmd_synth(const std::string& out, const cfrec::SynthSpec& spec) {
  const cfrec::Dataset ds = cfrec::make_synthetic_dataset(spec);
  cfrec::write_ml100k_dir(ds, out, spec);
  std::cout << "synthetic dataset (" << ds.users.size() << " users, " << ds.movies.size() << " movies, "
            << ds.ratings.size() << " ratings) -> " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collaborative-filtering engine and evaluation harness for MovieLens 100k-format data"};
  app.require_subcommand(1);
  app.set_config("--config", "", "optional key=value config file; explicit flags win");

  CommonOptions opt;

  auto* validate = app.add_subcommand("validate", "parse a dataset directory and report integrity");
  add_common_flags(validate, opt);

  auto* profiles = app.add_subcommand("profiles", "build per-user genre feature profiles");
  add_common_flags(profiles, opt);
  add_variant_flags(profiles, opt);
  bool profiles_use_split = false;
  profiles->add_flag("--train-only", profiles_use_split, "build from the --split training portion only");

  auto* similarity = app.add_subcommand("similarity", "build and dump a user-user similarity matrix");
  add_common_flags(similarity, opt);
  add_variant_flags(similarity, opt);
  bool similarity_use_split = false;
  similarity->add_flag("--train-only", similarity_use_split, "build from the --split training portion only");

  auto* predict = app.add_subcommand("predict", "predict the test pairs of a split (or top-n for --user)");
  add_common_flags(predict, opt);
  add_variant_flags(predict, opt);
  std::int32_t rec_user = 0;
  int top_n = 10;
  predict->add_option("--user", rec_user, "emit top-n recommendations for this user instead");
  predict->add_option("--top-n", top_n, "recommendation list length");

  auto* evaluate = app.add_subcommand("evaluate", "run one experiment cell and report rmse/mae/coverage");
  add_common_flags(evaluate, opt);
  add_variant_flags(evaluate, opt);

  auto* table3 = app.add_subcommand("table3", "run the 4-cell grid: BCF/MCF x full/capped");
  add_common_flags(table3, opt);
  add_variant_flags(table3, opt);

  auto* analyze = app.add_subcommand("analyze", "descriptive statistics tables");
  add_common_flags(analyze, opt);
  int bin_width = 1;
  analyze->add_option("--bin-width", bin_width, "age histogram bin width");

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset directory in ml-100k format");
  std::string synth_out = "data/synthetic";
  cfrec::SynthSpec synth_spec;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--seed", synth_spec.seed, "generator seed");
  synth->add_option("--users", synth_spec.user_count, "user count");
  synth->add_option("--movies", synth_spec.movie_count, "movie count");
  synth->add_option("--ratings", synth_spec.rating_count, "rating count");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_threads(opt);
    if (app.got_subcommand(validate)) return cmd_validate(opt);
    if (app.got_subcommand(profiles)) return cmd_profiles(opt, profiles_use_split, opt.cap);
    if (app.got_subcommand(similarity)) return cmd_similarity(opt, similarity_use_split, opt.cap);
    if (app.got_subcommand(predict)) return cmd_predict(opt, rec_user, top_n);
    if (app.got_subcommand(evaluate)) return cmd_evaluate(opt);
    if (app.got_subcommand(table3)) return cmd_table3(opt);
    if (app.got_subcommand(analyze)) return cmd_analyze(opt, bin_width);
    if (app.got_subcommand(synth)) return cmd_synth(synth_out, synth_spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
