#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace sketch {

using Vector = std::vector<double>;

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Eigenvalues come
/// back in descending order; eigenvectors[j] pairs with eigenvalues[j].
struct SymmetricEigen {
  Vector eigenvalues;
  std::vector<Vector> eigenvectors;
};
SymmetricEigen jacobi_eigen(std::vector<Vector> matrix, double tolerance = 1e-14,
                            std::size_t max_sweeps = 100);

struct PcaModel {
  Vector mean;
  /// k rows of length d, orthonormal, ordered by decreasing variance.
  std::vector<Vector> components;
  /// Sample-covariance variance along each component.
  Vector variances;

  std::size_t k() const { return components.size(); }
  std::size_t dimension() const { return mean.size(); }
  Vector project(std::span<const double> sample) const;
  Vector reconstruct(std::span<const double> coefficients) const;
};

/// Top-k principal components of the samples. Each component's first
/// coefficient with magnitude above 1e-12 is made positive.
/// Requires 2 <= samples and 1 <= k <= min(samples - 1, dimension).
PcaModel pca_fit(std::span<const Vector> samples, std::size_t k);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Gallery indices by descending cosine similarity to the query, ties by index.
std::vector<std::size_t> cosine_match(std::span<const double> query,
                                      std::span<const Vector> gallery);

struct CmsCurve {
  /// rates[n - 1] is the fraction of queries matched within the top n.
  Vector rates;

  double at_rank(std::size_t n) const { return rates.at(n - 1); }
  void write_csv(const std::filesystem::path& path) const;
};

/// true_ids[q] is the gallery index holding the identity of query q.
CmsCurve cms(std::span<const Vector> queries, std::span<const Vector> gallery,
             std::span<const std::size_t> true_ids, std::size_t max_rank);

}  // namespace sketch
