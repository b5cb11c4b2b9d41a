#include "glance/cluster.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "glance/error.hpp"
#include "glance/rng.hpp"

namespace glance {

namespace {

double sq_dist(const Tensor& a, int row_a, const Tensor& b, int row_b) {
  const double* x = &a.values[static_cast<std::size_t>(row_a) * a.cols];
  const double* y = &b.values[static_cast<std::size_t>(row_b) * b.cols];
  double acc = 0.0;
  for (int c = 0; c < a.cols; ++c) {
    const double d = x[c] - y[c];
    acc += d * d;
  }
  return acc;
}

// k-means++: first centroid uniform, then proportional to squared distance
// from the nearest chosen centroid.
Tensor plus_plus_init(const Tensor& x, int k, Rng& rng) {
  const int n = x.rows, f = x.cols;
  Tensor centroids(k, f);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.next_below(n));
  for (int c = 0; c < f; ++c) centroids.at(0, c) = x.at(first, c);
  for (int t = 1; t < k; ++t) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sq_dist(x, i, centroids, t - 1));
      total += d2[i];
    }
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.next_below(n));
    } else {
      const double u = rng.next_double() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    }
    for (int c = 0; c < f; ++c) centroids.at(t, c) = x.at(pick, c);
  }
  return centroids;
}

}  // namespace

Clustering kmeans(const Tensor& features, int k, std::uint64_t seed, int max_iter, double tol) {
  const int n = features.rows, f = features.cols;
  if (k < 1 || k > n) {
    throw validation_error("kmeans k=" + std::to_string(k) + " must lie in [1, " +
                           std::to_string(n) + "]");
  }
  if (max_iter < 1) throw validation_error("kmeans max_iter must be at least 1");
  if (tol < 0.0) throw validation_error("kmeans tol must be non-negative");
  if (!features.all_finite()) throw validation_error("kmeans features must be finite");

  Rng rng(seed);
  Clustering result;
  result.k = k;
  result.centroids = plus_plus_init(features, k, rng);
  result.assignment.assign(n, 0);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assignment step; ties go to the lowest cluster index.
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(features, i, result.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(features, i, result.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) changed = true;
      result.assignment[i] = best;
    }

    // Update step.
    Tensor new_centroids(k, f);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      const int c = result.assignment[i];
      ++counts[c];
      for (int j = 0; j < f; ++j) new_centroids.at(c, j) += features.at(i, j);
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (int j = 0; j < f; ++j) new_centroids.at(c, j) /= counts[c];
      } else {
        // Keep position for now; repaired below.
        for (int j = 0; j < f; ++j) new_centroids.at(c, j) = result.centroids.at(c, j);
      }
    }

    // Empty-cluster repair: reseed to the point farthest from its assigned
    // centroid. Sequential repairs cannot pick the same point twice because
    // a moved point sits at distance zero.
    bool repaired = false;
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (counts[result.assignment[i]] <= 1) continue;  // do not empty another cluster
        const double d = sq_dist(features, i, new_centroids, result.assignment[i]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) continue;  // all clusters singletons; nothing to take
      --counts[result.assignment[far]];
      result.assignment[far] = c;
      counts[c] = 1;
      for (int j = 0; j < f; ++j) new_centroids.at(c, j) = features.at(far, j);
      repaired = true;
    }

    double movement = 0.0;
    for (int c = 0; c < k; ++c) movement = std::max(movement, sq_dist(new_centroids, c, result.centroids, c));
    result.centroids = std::move(new_centroids);

    double inertia = 0.0;
    for (int i = 0; i < n; ++i) inertia += sq_dist(features, i, result.centroids, result.assignment[i]);
    result.inertia_trace.push_back(inertia);
    result.inertia = inertia;
    result.iterations_run = iter + 1;

    if (std::sqrt(movement) < tol && !repaired) break;
    if (!changed && !repaired && movement == 0.0) break;  // exact fixed point
  }
  return result;
}

Tensor cluster_features(const Tensor& features, const Clustering& c) {
  if (static_cast<int>(c.assignment.size()) != features.rows) {
    throw validation_error("clustering covers " + std::to_string(c.assignment.size()) +
                           " rows but features have " + std::to_string(features.rows));
  }
  Tensor out(features.rows, c.centroids.cols);
  for (int i = 0; i < features.rows; ++i) {
    const int cluster = c.assignment[i];
    for (int j = 0; j < out.cols; ++j) out.at(i, j) = c.centroids.at(cluster, j);
  }
  return out;
}

}  // namespace glance
