#include "cfrec/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cfrec/util.hpp"

namespace cfrec {

namespace {

// Relative tolerance for declaring a variance term zero. n*Sxx - Sx^2 is an
// exact zero in real arithmetic for constant input; rounding leaves residue
// on the order of eps * n * Sxx.
constexpr double kVarianceEps = 1e-12;

}  // namespace

std::optional<double> PearsonAccumulator::value() const {
  if (n < 2) return std::nullopt;
  const double nd = static_cast<double>(n);
  const double num = nd * sxy - sx * sy;
  const double den_x = nd * sxx - sx * sx;
  const double den_y = nd * syy - sy * sy;
  const double floor_x = kVarianceEps * std::max(nd * sxx, sx * sx);
  const double floor_y = kVarianceEps * std::max(nd * syy, sy * sy);
  if (den_x <= floor_x || den_y <= floor_y) return std::nullopt;
  const double r = num / (std::sqrt(den_x) * std::sqrt(den_y));
  return std::clamp(r, -1.0, 1.0);
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) return std::nullopt;
  PearsonAccumulator acc;
  for (std::size_t i = 0; i < x.size(); ++i) acc.add(x[i], y[i]);
  return acc.value();
}

double mcf_similarity(const FeatureProfile& a, const FeatureProfile& b, McfDomain domain) {
  PearsonAccumulator acc;
  if (domain == McfDomain::CommonEncountered) {
    for (int g = 0; g < kGenreCount; ++g) {
      if (a.encounters[g] > 0 && b.encounters[g] > 0) acc.add(a.scores[g], b.scores[g]);
    }
  } else {
    const double fill_a = a.mean_encountered_score();
    const double fill_b = b.mean_encountered_score();
    bool a_any = false, b_any = false;
    for (int g = 0; g < kGenreCount; ++g) {
      a_any = a_any || a.encounters[g] > 0;
      b_any = b_any || b.encounters[g] > 0;
    }
    if (!a_any || !b_any) return 0.0;
    for (int g = 0; g < kGenreCount; ++g) {
      if (a.encounters[g] > 0 || b.encounters[g] > 0) {
        acc.add(a.encounters[g] > 0 ? a.scores[g] : fill_a, b.encounters[g] > 0 ? b.scores[g] : fill_b);
      }
    }
  }
  return acc.value().value_or(0.0);
}

double bcf_similarity(std::span<const ItemRating> a, std::span<const ItemRating> b) {
  PearsonAccumulator acc;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (b[j].first < a[i].first) {
      ++j;
    } else {
      acc.add(a[i].second, b[j].second);
      ++i;
      ++j;
    }
  }
  return acc.value().value_or(0.0);
}

namespace {

template <typename PairSim>
SimilarityMatrix build_matrix_omp(SimilarityKind kind, std::span<const std::int32_t> user_ids,
                                  PairSim&& sim) {
  SimilarityMatrix m(kind, {user_ids.begin(), user_ids.end()});
  const int n = m.size();
#pragma omp parallel for schedule(dynamic, 8)
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m.set_pair(i, j, sim(i, j));
    }
  }
  return m;
}

template <typename PairSim>
SimilarityMatrix build_matrix_serial(SimilarityKind kind, std::span<const std::int32_t> user_ids,
                                     PairSim&& sim) {
  SimilarityMatrix m(kind, {user_ids.begin(), user_ids.end()});
  const int n = m.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m.set_pair(i, j, sim(i, j));
    }
  }
  return m;
}

}  // namespace

SimilarityMatrix build_mcf_matrix(std::span<const FeatureProfile> profiles,
                                  std::span<const std::int32_t> user_ids, McfDomain domain) {
  return build_matrix_omp(SimilarityKind::MCF, user_ids,
                          [&](int i, int j) { return mcf_similarity(profiles[i], profiles[j], domain); });
}

SimilarityMatrix build_mcf_matrix_serial(std::span<const FeatureProfile> profiles,
                                         std::span<const std::int32_t> user_ids, McfDomain domain) {
  return build_matrix_serial(SimilarityKind::MCF, user_ids,
                             [&](int i, int j) { return mcf_similarity(profiles[i], profiles[j], domain); });
}

SimilarityMatrix build_bcf_matrix(const std::vector<std::vector<ItemRating>>& histories,
                                  std::span<const std::int32_t> user_ids) {
  return build_matrix_omp(SimilarityKind::BCF, user_ids,
                          [&](int i, int j) { return bcf_similarity(histories[i], histories[j]); });
}

SimilarityMatrix build_bcf_matrix_serial(const std::vector<std::vector<ItemRating>>& histories,
                                         std::span<const std::int32_t> user_ids) {
  return build_matrix_serial(SimilarityKind::BCF, user_ids,
                             [&](int i, int j) { return bcf_similarity(histories[i], histories[j]); });
}

void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix) {
  out << "user_a,user_b,similarity\n";
  const int n = matrix.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out << matrix.user_ids()[i] << ',' << matrix.user_ids()[j] << ',' << fmt_full(matrix.at(i, j))
          << '\n';
    }
  }
}

}  // namespace cfrec
