// Compares the serial reference similarity kernels with the OpenMP ones on a
// full-size dataset and verifies they produce identical matrices.
//
//   ./bench_similarity [dataset-dir] [reps]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cfrec/dataset.hpp"
#include "cfrec/predict.hpp"
#include "cfrec/profile.hpp"
#include "cfrec/similarity.hpp"
#include "cfrec/synth.hpp"

using namespace cfrec;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  Dataset ds = argc > 1 ? load_dataset(argv[1]) : make_synthetic_dataset(SynthSpec{});
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;

  std::vector<std::int32_t> user_ids(ds.users.size());
  for (std::size_t u = 0; u < ds.users.size(); ++u) user_ids[u] = ds.users[u].user_id;

  const auto profiles = build_all_profiles(ds, ds.ratings);
  const TrainingIndex index(ds, ds.ratings);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("%zu users, %zu ratings, %d thread(s), best of %d\n\n", ds.users.size(),
              ds.ratings.size(), threads, reps);

  SimilarityMatrix serial_m, parallel_m;
  const double mcf_serial = time_ms([&] { serial_m = build_mcf_matrix_serial(profiles, user_ids); }, reps);
  const double mcf_parallel = time_ms([&] { parallel_m = build_mcf_matrix(profiles, user_ids); }, reps);
  const bool mcf_equal = serial_m.values() == parallel_m.values();
  std::printf("MCF matrix   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n", mcf_serial,
              mcf_parallel, mcf_serial / mcf_parallel, mcf_equal ? "identical" : "MISMATCH");

  const double bcf_serial =
      time_ms([&] { serial_m = build_bcf_matrix_serial(index.histories(), user_ids); }, reps);
  const double bcf_parallel = time_ms([&] { parallel_m = build_bcf_matrix(index.histories(), user_ids); }, reps);
  const bool bcf_equal = serial_m.values() == parallel_m.values();
  std::printf("BCF matrix   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   %s\n", bcf_serial,
              bcf_parallel, bcf_serial / bcf_parallel, bcf_equal ? "identical" : "MISMATCH");

  return (mcf_equal && bcf_equal) ? 0 : 1;
}
