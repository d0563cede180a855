#include "sketch/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sketch {

SymmetricEigen jacobi_eigen(std::vector<Vector> a, double tolerance, std::size_t max_sweeps) {
  const std::size_t n = a.size();
  for (const auto& row : a) {
    if (row.size() != n) throw std::invalid_argument("jacobi_eigen: matrix is not square");
  }
  std::vector<Vector> v(n, Vector(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) v[i][i] = 1.0;

  auto off_norm = [&] {
    double s = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        total += a[i][j] * a[i][j];
        if (i != j) s += a[i][j] * a[i][j];
      }
    return std::pair{std::sqrt(s), std::sqrt(total)};
  };

  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    const auto [off, total] = off_norm();
    if (off <= tolerance * std::max(total, 1e-300)) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
  SymmetricEigen out;
  for (std::size_t idx : order) {
    out.eigenvalues.push_back(a[idx][idx]);
    Vector col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v[k][idx];
    out.eigenvectors.push_back(std::move(col));
  }
  return out;
}

Vector PcaModel::project(std::span<const double> sample) const {
  if (sample.size() != dimension()) {
    throw std::invalid_argument("PcaModel::project: sample length " +
                                std::to_string(sample.size()) + " vs dimension " +
                                std::to_string(dimension()));
  }
  Vector out(k(), 0.0);
  for (std::size_t j = 0; j < k(); ++j)
    for (std::size_t i = 0; i < dimension(); ++i)
      out[j] += components[j][i] * (sample[i] - mean[i]);
  return out;
}

Vector PcaModel::reconstruct(std::span<const double> coefficients) const {
  if (coefficients.size() != k()) throw std::invalid_argument("PcaModel::reconstruct: bad length");
  Vector out = mean;
  for (std::size_t j = 0; j < k(); ++j)
    for (std::size_t i = 0; i < dimension(); ++i) out[i] += coefficients[j] * components[j][i];
  return out;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

PcaModel pca_fit(std::span<const Vector> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 samples");
  const std::size_t d = samples.front().size();
  for (const auto& s : samples) {
    if (s.size() != d) throw std::invalid_argument("pca_fit: samples differ in length");
  }
  if (k == 0 || k > std::min(n - 1, d)) {
    throw std::invalid_argument("pca_fit: k=" + std::to_string(k) + " outside [1, " +
                                std::to_string(std::min(n - 1, d)) + "]");
  }
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (const auto& s : samples)
    for (std::size_t i = 0; i < d; ++i) model.mean[i] += s[i];
  for (double& m : model.mean) m /= static_cast<double>(n);
  std::vector<Vector> centered(samples.begin(), samples.end());
  for (auto& s : centered)
    for (std::size_t i = 0; i < d; ++i) s[i] -= model.mean[i];

  const double denom = static_cast<double>(n - 1);
  if (n <= d) {
    // Eigenvectors of the n x n Gram matrix map to covariance eigenvectors
    // through the data: v = X^T u / |X^T u|.
    std::vector<Vector> gram(n, Vector(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) gram[i][j] = gram[j][i] = dot(centered[i], centered[j]);
    const SymmetricEigen eig = jacobi_eigen(std::move(gram));
    for (std::size_t j = 0; j < k; ++j) {
      Vector comp(d, 0.0);
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t i = 0; i < d; ++i) comp[i] += eig.eigenvectors[j][s] * centered[s][i];
      model.components.push_back(std::move(comp));
      model.variances.push_back(eig.eigenvalues[j] / denom);
    }
  } else {
    std::vector<Vector> cov(d, Vector(d, 0.0));
    for (const auto& s : centered)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) cov[i][j] += s[i] * s[j];
    for (auto& row : cov)
      for (double& v : row) v /= denom;
    const SymmetricEigen eig = jacobi_eigen(std::move(cov));
    for (std::size_t j = 0; j < k; ++j) {
      model.components.push_back(eig.eigenvectors[j]);
      model.variances.push_back(eig.eigenvalues[j]);
    }
  }

  // Modified Gram-Schmidt tidies round-off, then the sign convention.
  for (std::size_t j = 0; j < k; ++j) {
    auto& c = model.components[j];
    for (std::size_t m = 0; m < j; ++m) {
      const double proj = dot(c, model.components[m]);
      for (std::size_t i = 0; i < d; ++i) c[i] -= proj * model.components[m][i];
    }
    const double len = norm(c);
    if (len < 1e-12) throw std::domain_error("pca_fit: data rank is below k");
    for (double& v : c) v /= len;
    const auto lead = std::find_if(c.begin(), c.end(), [](double v) { return std::abs(v) > 1e-12; });
    if (lead != c.end() && *lead < 0.0)
      for (double& v : c) v = -v;
  }
  return model;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  return dot(a, b) / (na * nb);
}

std::vector<std::size_t> cosine_match(std::span<const double> query,
                                      std::span<const Vector> gallery) {
  if (norm(query) == 0.0) throw std::invalid_argument("cosine_match: zero query vector");
  Vector sim(gallery.size());
  for (std::size_t g = 0; g < gallery.size(); ++g) sim[g] = cosine_similarity(query, gallery[g]);
  std::vector<std::size_t> order(gallery.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sim[a] > sim[b]; });
  return order;
}

CmsCurve cms(std::span<const Vector> queries, std::span<const Vector> gallery,
             std::span<const std::size_t> true_ids, std::size_t max_rank) {
  if (max_rank == 0) throw std::invalid_argument("cms: max_rank must be positive");
  if (queries.empty()) throw std::invalid_argument("cms: no queries");
  if (true_ids.size() != queries.size()) {
    throw std::invalid_argument("cms: " + std::to_string(queries.size()) + " queries but " +
                                std::to_string(true_ids.size()) + " identities");
  }
  std::vector<std::size_t> hits(max_rank, 0);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    if (true_ids[q] >= gallery.size()) {
      throw std::invalid_argument("cms: query " + std::to_string(q) + " has no identity in the gallery");
    }
    const auto ranking = cosine_match(queries[q], gallery);
    const auto pos = static_cast<std::size_t>(
        std::find(ranking.begin(), ranking.end(), true_ids[q]) - ranking.begin());
    for (std::size_t r = pos; r < max_rank; ++r) ++hits[r];
  }
  CmsCurve curve;
  for (std::size_t h : hits)
    curve.rates.push_back(static_cast<double>(h) / static_cast<double>(queries.size()));
  return curve;
}

void CmsCurve::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "rank,score\n";
  char line[64];
  for (std::size_t r = 0; r < rates.size(); ++r) {
    std::snprintf(line, sizeof line, "%zu,%.6f\n", r + 1, rates[r]);
    out << line;
  }
}

}  // namespace sketch
