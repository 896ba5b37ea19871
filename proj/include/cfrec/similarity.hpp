#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cfrec/profile.hpp"

namespace cfrec {

enum class SimilarityKind { MCF, BCF };

/// Which genres feed the MCF Pearson vectors.
///   CommonEncountered: only genres encountered by both users (default).
///   ImputedUnion: union of encountered genres; a genre missing on one side
///   is imputed with that user's mean encountered score.
enum class McfDomain { CommonEncountered, ImputedUnion };

/// (item index, rating), sorted ascending by item index.
using ItemRating = std::pair<std::int32_t, double>;

/// Streaming accumulator for the sum-product Pearson form:
///   r = (n*Sxy - Sx*Sy) / sqrt((n*Sxx - Sx^2) * (n*Syy - Sy^2))
/// value() is empty when n < 2 or either side has (numerically) zero
/// variance; finished values are clamped to [-1, 1].
struct PearsonAccumulator {
  std::int64_t n = 0;
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;

  void add(double x, double y) {
    ++n;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }

  std::optional<double> value() const;
};

/// Sample Pearson correlation of two equal-length vectors. Empty result
/// signals an undefined correlation (length < 2 or zero variance); callers
/// that need a total function map it to 0.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Profile-feature similarity (MCF): Pearson over genre score vectors.
/// Total via the 0 convention.
double mcf_similarity(const FeatureProfile& a, const FeatureProfile& b,
                      McfDomain domain = McfDomain::CommonEncountered);

/// Co-rating similarity (BCF): Pearson over ratings of co-rated items.
/// Total via the 0 convention.
double bcf_similarity(std::span<const ItemRating> a, std::span<const ItemRating> b);

/// Dense symmetric user-user similarity matrix.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(SimilarityKind kind, std::vector<std::int32_t> user_ids)
      : kind_(kind), user_ids_(std::move(user_ids)), values_(user_ids_.size() * user_ids_.size(), 0.0) {}

  SimilarityKind kind() const { return kind_; }
  int size() const { return static_cast<int>(user_ids_.size()); }
  const std::vector<std::int32_t>& user_ids() const { return user_ids_; }

  double at(int i, int j) const { return values_[static_cast<std::size_t>(i) * user_ids_.size() + j]; }

  void set_pair(int i, int j, double v) {
    values_[static_cast<std::size_t>(i) * user_ids_.size() + j] = v;
    values_[static_cast<std::size_t>(j) * user_ids_.size() + i] = v;
  }

  const std::vector<double>& values() const { return values_; }

 private:
  SimilarityKind kind_ = SimilarityKind::MCF;
  std::vector<std::int32_t> user_ids_;
  std::vector<double> values_;
};

// Matrix builders compute the upper triangle (diagonal included) and mirror
// it. The OpenMP versions parallelize over rows; every entry is computed
// independently, so parallel and serial results are bit-identical. The
// *_serial variants are the reference implementations kept for testing and
// benchmarking.

SimilarityMatrix build_mcf_matrix(std::span<const FeatureProfile> profiles,
                                  std::span<const std::int32_t> user_ids,
                                  McfDomain domain = McfDomain::CommonEncountered);
SimilarityMatrix build_mcf_matrix_serial(std::span<const FeatureProfile> profiles,
                                         std::span<const std::int32_t> user_ids,
                                         McfDomain domain = McfDomain::CommonEncountered);

SimilarityMatrix build_bcf_matrix(const std::vector<std::vector<ItemRating>>& histories,
                                  std::span<const std::int32_t> user_ids);
SimilarityMatrix build_bcf_matrix_serial(const std::vector<std::vector<ItemRating>>& histories,
                                         std::span<const std::int32_t> user_ids);

/// Upper-triangle CSV dump: user_a,user_b,similarity (full precision).
void write_similarity_csv(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace cfrec
