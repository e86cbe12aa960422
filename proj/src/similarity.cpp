#include "cop/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <tuple>

#include "cop/error.hpp"

namespace cop::similarity {

std::vector<double> normalized(std::span<const double> values) {
  double sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw Error(Errc::NonFiniteEntry, "vector has a non-finite entry");
    sq += v * v;
  }
  if (!(sq > 0.0)) throw Error(Errc::ZeroVector, "vector has zero norm");
  const double inv = 1.0 / std::sqrt(sq);
  std::vector<double> out(values.begin(), values.end());
  for (double& v : out) v *= inv;
  return out;
}

std::uint64_t VectorStore::add_vector(const std::string& feature_id, std::span<const double> values,
                                      FeatureMetadata metadata) {
  if (feature_id.empty()) throw Error(Errc::InvalidArgument, "empty feature_id");
  std::unique_lock lock(mu_);
  if (dim_ != 0 && values.size() != dim_)
    throw Error(Errc::DimensionMismatch,
                "expected " + std::to_string(dim_) + " values, got " + std::to_string(values.size()));
  auto unit = normalized(values);
  if (dim_ == 0) dim_ = values.size();

  if (auto it = index_.find(feature_id); it != index_.end()) {
    auto& row = rows_[it->second];
    std::copy(unit.begin(), unit.end(), matrix_.begin() + static_cast<std::ptrdiff_t>(it->second * dim_));
    row.values = std::move(unit);
    row.metadata = std::move(metadata);
    return ++row.version;
  }
  index_[feature_id] = rows_.size();
  matrix_.insert(matrix_.end(), unit.begin(), unit.end());
  rows_.push_back({feature_id, std::move(unit), std::move(metadata), 1});
  return 1;
}

std::vector<SearchHit> VectorStore::scan(std::span<const double> q, std::size_t k,
                                         std::optional<std::size_t> skip) const {
  struct Scored {
    double sim;
    std::size_t row;
  };
  std::vector<Scored> scored;
  scored.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (skip && *skip == r) continue;
    const double* row = matrix_.data() + r * dim_;
    double dot = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) dot += row[i] * q[i];
    scored.push_back({std::clamp(dot, -1.0, 1.0), r});
  }
  auto better = [this](const Scored& a, const Scored& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return rows_[a.row].feature_id < rows_[b.row].feature_id;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), better);
  std::vector<SearchHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) hits.push_back({rows_[scored[i].row].feature_id, scored[i].sim});
  return hits;
}

std::vector<SearchHit> VectorStore::search_topk(std::span<const double> query, std::size_t k) const {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  std::shared_lock lock(mu_);
  if (rows_.empty()) return {};
  if (query.size() != dim_)
    throw Error(Errc::DimensionMismatch,
                "expected " + std::to_string(dim_) + " values, got " + std::to_string(query.size()));
  const auto unit = normalized(query);
  return scan(unit, k, std::nullopt);
}

std::vector<SearchHit> VectorStore::search_topk(const std::string& feature_id, std::size_t k,
                                                bool exclude_self) const {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  std::shared_lock lock(mu_);
  auto it = index_.find(feature_id);
  if (it == index_.end()) throw Error(Errc::UnknownFeatureId, feature_id);
  const auto& q = rows_[it->second].values;
  return scan(q, k, exclude_self ? std::optional<std::size_t>(it->second) : std::nullopt);
}

std::optional<FeatureVector> VectorStore::get(const std::string& feature_id) const {
  std::shared_lock lock(mu_);
  auto it = index_.find(feature_id);
  if (it == index_.end()) return std::nullopt;
  return rows_[it->second];
}

std::vector<FeatureVector> VectorStore::copy_all() const {
  std::shared_lock lock(mu_);
  return rows_;
}

std::size_t VectorStore::size() const {
  std::shared_lock lock(mu_);
  return rows_.size();
}

std::size_t VectorStore::dim() const {
  std::shared_lock lock(mu_);
  return dim_;
}

void ProjectionConfig::validate() const {
  if (k_neighbors < 2) throw Error(Errc::InvalidConfig, "k_neighbors must be >= 2");
  if (n_epochs < 1) throw Error(Errc::InvalidConfig, "n_epochs must be >= 1");
  if (!(learning_rate > 0)) throw Error(Errc::InvalidConfig, "learning_rate must be > 0");
  if (negative_samples < 0) throw Error(Errc::InvalidConfig, "negative_samples must be >= 0");
}

std::vector<std::vector<std::pair<std::size_t, double>>> knn_cosine(
    const std::vector<std::vector<double>>& rows, std::size_t k) {
  const std::size_t n = rows.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> out(n);
  std::vector<std::pair<std::size_t, double>> all;
  for (std::size_t i = 0; i < n; ++i) {
    all.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      double dot = 0.0;
      for (std::size_t d = 0; d < rows[i].size(); ++d) dot += rows[i][d] * rows[j][d];
      all.emplace_back(j, std::clamp(1.0 - dot, 0.0, 2.0));
    }
    const std::size_t kk = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk), all.end(),
                      [](const auto& a, const auto& b) {
                        if (a.second != b.second) return a.second < b.second;
                        return a.first < b.first;
                      });
    out[i].assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(kk));
  }
  return out;
}

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double clip(double v) { return std::clamp(v, -4.0, 4.0); }

}  // namespace

Layout project_2d(const std::vector<std::vector<double>>& rows, const ProjectionConfig& config) {
  config.validate();
  const std::size_t n = rows.size();
  if (n < 3) throw Error(Errc::TooFewPoints, "projection needs at least 3 vectors");
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(config.k_neighbors), n - 1);
  const auto knn = knn_cosine(rows, k);

  // Fuzzy membership strengths per point.
  const double target = std::log2(static_cast<double>(k));
  std::map<std::pair<std::size_t, std::size_t>, double> directed;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = knn[i].front().second;
    auto mass = [&](double sigma) {
      double s = 0.0;
      for (const auto& [j, d] : knn[i]) s += std::exp(-std::max(0.0, d - rho) / sigma);
      return s;
    };
    double lo = 1e-6, hi = 1e3, sigma = 1.0;
    for (int it = 0; it < 64; ++it) {
      sigma = 0.5 * (lo + hi);
      if (mass(sigma) > target) hi = sigma;
      else lo = sigma;
    }
    for (const auto& [j, d] : knn[i]) directed[{i, j}] = std::exp(-std::max(0.0, d - rho) / sigma);
  }

  struct Edge {
    std::size_t a, b;
    double w;
  };
  std::vector<Edge> edges;
  for (const auto& [key, u] : directed) {
    const auto [i, j] = key;
    if (i < j) {
      auto rev = directed.find({j, i});
      const double v = rev == directed.end() ? 0.0 : rev->second;
      edges.push_back({i, j, u + v - u * v});
    } else if (!directed.count({j, i})) {
      edges.push_back({j, i, u});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  double w_max = 0.0;
  for (const auto& e : edges) w_max = std::max(w_max, e.w);

  std::mt19937_64 rng(config.seed);
  Layout y(n);
  for (auto& p : y) {
    p[0] = -10.0 + 20.0 * uniform01(rng);
    p[1] = -10.0 + 20.0 * uniform01(rng);
  }
  if (w_max <= 0.0) return y;

  for (int epoch = 0; epoch < config.n_epochs; ++epoch) {
    const double alpha = config.learning_rate * (1.0 - static_cast<double>(epoch) / config.n_epochs);
    for (const auto& e : edges) {
      if (uniform01(rng) >= e.w / w_max) continue;
      auto& yi = y[e.a];
      auto& yj = y[e.b];
      const double dx = yi[0] - yj[0];
      const double dy = yi[1] - yj[1];
      const double d2 = dx * dx + dy * dy;
      // d/dy_i of -log(1/(1+d^2))
      const double coeff = 2.0 / (1.0 + d2);
      const double gx = clip(coeff * dx);
      const double gy = clip(coeff * dy);
      yi[0] -= alpha * gx;
      yi[1] -= alpha * gy;
      yj[0] += alpha * gx;
      yj[1] += alpha * gy;

      for (int s = 0; s < config.negative_samples; ++s) {
        const std::size_t other = static_cast<std::size_t>(rng() % n);
        if (other == e.a) continue;
        const auto& yk = y[other];
        const double nx = yi[0] - yk[0];
        const double ny = yi[1] - yk[1];
        const double nd2 = nx * nx + ny * ny;
        // d/dy_i of -log(1 - 1/(1+d^2)), with a small floor on d^2
        const double rc = -2.0 / ((0.001 + nd2) * (1.0 + nd2));
        yi[0] -= alpha * clip(rc * nx);
        yi[1] -= alpha * clip(rc * ny);
      }
    }
  }
  return y;
}

std::vector<ProjectedPoint> project_2d(std::span<const FeatureVector> vectors, const ProjectionConfig& config) {
  std::vector<std::vector<double>> rows;
  rows.reserve(vectors.size());
  for (const auto& v : vectors) rows.push_back(v.values);
  const auto layout = project_2d(rows, config);
  std::vector<ProjectedPoint> out;
  out.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i)
    out.push_back({vectors[i].feature_id, vectors[i].metadata.class_label, layout[i][0], layout[i][1]});
  return out;
}

}  // namespace cop::similarity
