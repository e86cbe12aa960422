#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "cop/shared_mutex.hpp"

namespace cop::similarity {

struct FeatureMetadata {
  std::string detection_id;
  std::string class_label;
  double timestamp = 0.0;
};

struct FeatureVector {
  std::string feature_id;
  std::vector<double> values;  // unit L2 norm
  FeatureMetadata metadata;
  std::uint64_t version = 1;
};

struct SearchHit {
  std::string feature_id;
  double similarity = 0.0;
};

/// Unit-normalizes `values`; throws ZeroVector / NonFiniteEntry.
std::vector<double> normalized(std::span<const double> values);

/// Exact cosine store. Reads may run concurrently; writes are exclusive.
class VectorStore {
 public:
  /// A dimension of 0 is fixed by the first vector added.
  explicit VectorStore(std::size_t dim = 0) : dim_(dim) {}

  /// Stores a normalized copy; re-adding an id replaces it and bumps the
  /// version. Returns the stored version.
  std::uint64_t add_vector(const std::string& feature_id, std::span<const double> values,
                           FeatureMetadata metadata = {});

  /// Descending cosine similarity, ties by feature_id ascending.
  std::vector<SearchHit> search_topk(std::span<const double> query, std::size_t k) const;
  std::vector<SearchHit> search_topk(const std::string& feature_id, std::size_t k,
                                     bool exclude_self = true) const;

  std::optional<FeatureVector> get(const std::string& feature_id) const;
  /// Copy of every vector in insertion order.
  std::vector<FeatureVector> copy_all() const;
  std::size_t size() const;
  std::size_t dim() const;

 private:
  std::vector<SearchHit> scan(std::span<const double> unit_query, std::size_t k,
                              std::optional<std::size_t> skip) const;

  mutable SharedMutex mu_;
  std::size_t dim_;
  std::vector<double> matrix_;  // row-major, one row per vector
  std::vector<FeatureVector> rows_;
  std::map<std::string, std::size_t> index_;
};

struct ProjectionConfig {
  int k_neighbors = 15;
  int n_epochs = 200;
  double learning_rate = 1.0;
  int negative_samples = 5;
  std::uint64_t seed = 0;

  void validate() const;
};

using Layout = std::vector<std::array<double, 2>>;

/// Neighbourhood-preserving 2D layout of unit vectors (simplified UMAP with
/// the 1/(1+d^2) kernel). Bit-reproducible for a fixed seed and input order.
/// Throws TooFewPoints for fewer than 3 rows.
Layout project_2d(const std::vector<std::vector<double>>& unit_rows, const ProjectionConfig& config);

struct ProjectedPoint {
  std::string feature_id;
  std::string class_label;
  double x = 0.0;
  double y = 0.0;
};

std::vector<ProjectedPoint> project_2d(std::span<const FeatureVector> vectors, const ProjectionConfig& config);

/// Exact k-NN graph as (index, cosine distance) ascending, self excluded,
/// ties by index.
std::vector<std::vector<std::pair<std::size_t, double>>> knn_cosine(
    const std::vector<std::vector<double>>& unit_rows, std::size_t k);

}  // namespace cop::similarity
