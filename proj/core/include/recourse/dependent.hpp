#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/model.hpp"
#include "recourse/problem.hpp"

namespace recourse {

// --- REVISE ----------------------------------------------------------------------

struct ReviseParams {
  double learning_rate = 0.1;
  double lambda = 0.5;
  int max_iters = 1500;

  void validate() const;
};

// Adam in latent space on BCE(f(g(z)), 1) + lambda * ||g(z) - x||_1 starting at
// encode(x), z clamped to the latent box. Each iterate is decoded and binary
// coordinates rounded; the first strict crossing is returned.
CounterfactualResult revise(const LatentProblem& lp, const ReviseParams& params = {});

// --- CLUE ------------------------------------------------------------------------

struct ClueParams {
  double uncertainty_weight = 1.0;
  // <= 0 selects 1 / d.
  double distance_weight = 0.0;
  double validity_weight = 5.0;
  // The validity weight is multiplied by validity_growth after `patience` steps
  // without a 1e-3 gain in f.
  double validity_growth = 2.0;
  int patience = 50;
  double margin = 0.05;
  double learning_rate = 0.05;
  int max_iters = 1000;

  void validate() const;
};

// Gradient of binary_entropy(f(g(z))) with respect to z.
Vector entropy_latent_gradient(const Classifier& model, const Vae& vae, const Vector& z);

// Adam in latent space on uncertainty_weight * H(f(g(z))) + validity hinge at
// max(theta, 1 - f(x)) + margin +
// distance_weight * ||g(z) - x||_1. Stops at the first decoded iterate that
// crosses the threshold with entropy below the factual's.
CounterfactualResult clue_lite(const LatentProblem& lp, const ClueParams& params = {});

// --- FACE ------------------------------------------------------------------------

enum class FaceMode { Knn, Eps };

struct FaceParams {
  FaceMode mode = FaceMode::Knn;
  std::size_t k = 50;
  double radius = 0.25;
  // <= 0 selects Scott's rule on the KDE reference sample.
  double density_bandwidth = 0.0;
  std::size_t max_graph_nodes = 2000;
  std::size_t kde_reference_size = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Edge {
  std::size_t to;
  double weight;
};

using Adjacency = std::vector<std::vector<Edge>>;

// Gaussian kernel density estimate over a fixed reference sample.
class DensityEstimate {
 public:
  DensityEstimate() = default;
  DensityEstimate(Matrix reference, double bandwidth);

  // Unnormalized: mean of exp(-||x - r||^2 / (2 h^2)).
  double operator()(const Vector& x) const;
  double bandwidth() const noexcept { return bandwidth_; }

 private:
  Matrix reference_;
  double bandwidth_ = 1.0;
};

// Scott's rule n^(-1/(d+4)) times the mean per-coordinate standard deviation.
double scott_bandwidth(const Matrix& sample);

class RecourseGraph {
 public:
  RecourseGraph(std::vector<std::size_t> source_rows, Matrix points, Vector predictions,
                Adjacency adjacency, std::vector<bool> immutable_binary, DensityEstimate density,
                double density_peak, FaceParams params);

  std::size_t size() const noexcept { return source_rows_.size(); }
  // Row indices of the nodes in the data the graph was built from.
  const std::vector<std::size_t>& source_rows() const noexcept { return source_rows_; }
  const Matrix& points() const noexcept { return points_; }
  Vector point(std::size_t node) const { return points_.row(static_cast<Eigen::Index>(node)).transpose(); }
  const Vector& predictions() const noexcept { return predictions_; }
  const Adjacency& adjacency() const noexcept { return adjacency_; }
  const FaceParams& params() const noexcept { return params_; }
  const std::vector<bool>& immutable_binary() const noexcept { return immutable_binary_; }
  std::size_t edge_count() const;

  // dist(a, b) * clip(1 - log(density(midpoint) / peak), 1, 10).
  double edge_weight(const Vector& a, const Vector& b) const;
  // False when a and b differ in an immutable binary feature.
  bool compatible(const Vector& a, const Vector& b) const;

 private:
  std::vector<std::size_t> source_rows_;
  Matrix points_;
  Vector predictions_;
  Adjacency adjacency_;
  std::vector<bool> immutable_binary_;
  DensityEstimate density_;
  double density_peak_;
  FaceParams params_;
};

// Graph over the given rows (all of them become nodes).
RecourseGraph build_graph(const Matrix& points, const Schema& schema, const Classifier& model,
                          const FaceParams& params);
// Graph over a seeded subsample of at most max_graph_nodes training rows.
RecourseGraph build_graph(const EncodedDataset& data, const Classifier& model,
                          const FaceParams& params);

struct ShortestPaths {
  std::vector<double> distance;
  // npos marks the source and unreachable nodes.
  std::vector<std::size_t> predecessor;
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
};

ShortestPaths dijkstra(const Adjacency& adjacency, std::size_t source);

// Connects the factual to its mode-appropriate neighbours, then returns the
// positive node with the smallest path cost. The counterfactual is a verbatim row.
CounterfactualResult face(const RecourseProblem& p, const RecourseGraph& g);

}  // namespace recourse
