#include "recourse/dependent.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "math.hpp"
#include "optim.hpp"
#include "timing.hpp"

namespace recourse {

// Smallest gain in f that resets the validity-weight patience counter.
constexpr double kMinProgress = 1e-3;

// --- REVISE ----------------------------------------------------------------------------

void ReviseParams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("revise learning_rate must be > 0");
  if (!(lambda >= 0.0)) throw ConfigError("revise lambda must be >= 0");
  if (max_iters < 1) throw ConfigError("revise max_iters must be >= 1");
}

CounterfactualResult revise(const LatentProblem& lp, const ReviseParams& params) {
  params.validate();
  detail::Stopwatch sw;
  const RecourseProblem& p = lp.problem();
  const Classifier& f = p.model();
  const Vae& vae = lp.vae();
  const Vector& x0 = p.factual();
  Vector z = lp.initial_latent();
  detail::Adam opt(params.learning_rate, {static_cast<std::size_t>(z.size())});
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    // Loss is taken at the rounded decoder output; rounding passes gradients straight through.
    const Vector xg = round_binary(p, vae.decode(z));
    const double fx = f.predict_proba(xg);
    const Vector grad_x = -(1.0 - fx) * f.logit_gradient(xg) + params.lambda * detail::sign(xg - x0);
    const Vector grad_z = vae.decode_vjp(z, grad_x);
    opt.tick();
    opt.step(0, z.data(), grad_z.data());
    z = lp.clamp_latent(z);
    Vector candidate = round_binary(p, vae.decode(z));
    if (p.theta().accepts(f.predict_proba(candidate))) {
      return detail::stamped(finalize(p, std::move(candidate), "revise", iter), sw);
    }
  }
  return detail::stamped(finalize(p, std::nullopt, "revise", params.max_iters, kBudgetExhausted), sw);
}

// --- CLUE -------------------------------------------------------------------------------

void ClueParams::validate() const {
  if (!(uncertainty_weight > 0.0)) throw ConfigError("clue uncertainty_weight must be > 0");
  if (!(validity_weight > 0.0)) throw ConfigError("clue validity_weight must be > 0");
  if (!(validity_growth > 1.0)) throw ConfigError("clue validity_growth must be > 1");
  if (!(learning_rate > 0.0)) throw ConfigError("clue learning_rate must be > 0");
  if (max_iters < 1 || patience < 1) throw ConfigError("clue budgets must be >= 1");
  if (margin < 0.0) throw ConfigError("clue margin must be >= 0");
}

namespace {

// dH(f(x))/dx for binary entropy H in nats.
Vector entropy_input_gradient(const Classifier& model, const Vector& x) {
  const double p = std::clamp(model.predict_proba(x), 1e-12, 1.0 - 1e-12);
  return std::log((1.0 - p) / p) * p * (1.0 - p) * model.logit_gradient(x);
}

}  // namespace

Vector entropy_latent_gradient(const Classifier& model, const Vae& vae, const Vector& z) {
  return vae.decode_vjp(z, entropy_input_gradient(model, vae.decode(z)));
}

CounterfactualResult clue_lite(const LatentProblem& lp, const ClueParams& params) {
  params.validate();
  detail::Stopwatch sw;
  const RecourseProblem& p = lp.problem();
  const Classifier& f = p.model();
  const Vae& vae = lp.vae();
  const Vector& x0 = p.factual();
  const double distance_weight =
      params.distance_weight > 0.0 ? params.distance_weight : 1.0 / static_cast<double>(p.dim());
  // Success needs H(f) below the factual's, i.e. f above 1 - f(x).
  const double target = std::max(p.theta().value(), 1.0 - p.factual_proba()) + params.margin;
  const double factual_entropy = detail::binary_entropy(p.factual_proba());
  double validity = params.validity_weight;
  double best_f = p.factual_proba();
  int stall = 0;
  Vector z = lp.initial_latent();
  detail::Adam opt(params.learning_rate, {static_cast<std::size_t>(z.size())});
  for (int iter = 1; iter <= params.max_iters; ++iter) {
    const Vector xg = round_binary(p, vae.decode(z));
    const double fx = f.predict_proba(xg);
    Vector grad_x = params.uncertainty_weight * entropy_input_gradient(f, xg) +
                    distance_weight * detail::sign(xg - x0);
    if (fx < target) grad_x -= validity * f.input_gradient(xg);
    const Vector grad_z = vae.decode_vjp(z, grad_x);
    opt.tick();
    opt.step(0, z.data(), grad_z.data());
    z = lp.clamp_latent(z);
    Vector candidate = round_binary(p, vae.decode(z));
    const double fc = f.predict_proba(candidate);
    if (p.theta().accepts(fc) && detail::binary_entropy(fc) < factual_entropy) {
      return detail::stamped(finalize(p, std::move(candidate), "clue", iter), sw);
    }
    if (fc > best_f + kMinProgress) {
      best_f = fc;
      stall = 0;
    } else if (++stall >= params.patience) {
      validity *= params.validity_growth;
      stall = 0;
    }
  }
  return detail::stamped(finalize(p, std::nullopt, "clue", params.max_iters, kBudgetExhausted), sw);
}

// --- FACE -------------------------------------------------------------------------------

void FaceParams::validate() const {
  if (k < 1) throw ConfigError("face k must be >= 1");
  if (!(radius > 0.0)) throw ConfigError("face radius must be > 0");
  if (max_graph_nodes < 1) throw ConfigError("face max_graph_nodes must be >= 1");
  if (kde_reference_size < 1) throw ConfigError("face kde_reference_size must be >= 1");
}

DensityEstimate::DensityEstimate(Matrix reference, double bandwidth)
    : reference_(std::move(reference)), bandwidth_(bandwidth) {
  if (reference_.rows() == 0) throw Error("density estimate needs reference points");
  if (!(bandwidth_ > 0.0)) throw Error("density bandwidth must be > 0");
}

double DensityEstimate::operator()(const Vector& x) const {
  const double scale = -1.0 / (2.0 * bandwidth_ * bandwidth_);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < reference_.rows(); ++i) {
    sum += std::exp(scale * (reference_.row(i).transpose() - x).squaredNorm());
  }
  return sum / static_cast<double>(reference_.rows());
}

double scott_bandwidth(const Matrix& sample) {
  const auto n = static_cast<double>(sample.rows());
  const auto d = static_cast<double>(sample.cols());
  if (sample.rows() < 2) return 1.0;
  const Eigen::RowVectorXd mean = sample.colwise().mean();
  const Eigen::RowVectorXd var = (sample.rowwise() - mean).array().square().colwise().sum() / (n - 1.0);
  const double sd = var.array().sqrt().mean();
  const double h = std::pow(n, -1.0 / (d + 4.0)) * sd;
  return h > 0.0 ? h : 1.0;
}

namespace {

double weight_between(const Vector& a, const Vector& b, const DensityEstimate& density, double peak) {
  const double dist = (a - b).norm();
  if (dist == 0.0) return 0.0;
  const double rho = density(0.5 * (a + b));
  const double penalty = rho > 0.0 ? 1.0 - std::log(rho / peak) : 10.0;
  return dist * std::clamp(penalty, 1.0, 10.0);
}

bool same_immutables(const Vector& a, const Vector& b, const std::vector<bool>& immutable_binary) {
  for (std::size_t j = 0; j < immutable_binary.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    if (immutable_binary[j] && a[i] != b[i]) return false;
  }
  return true;
}

// Nodes a point links to: compatible nodes within the radius (eps) or the k
// nearest compatible ones (knn), excluding `self`. Sorted by index.
std::vector<std::size_t> neighbours(const Matrix& points, const Vector& x, std::size_t self,
                                    const FaceParams& params, const std::vector<bool>& immutable_binary) {
  std::vector<std::pair<double, std::size_t>> cand;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto node = static_cast<std::size_t>(i);
    if (node == self) continue;
    const Vector y = points.row(i).transpose();
    if (!same_immutables(x, y, immutable_binary)) continue;
    const double dist = (y - x).norm();
    if (params.mode == FaceMode::Eps && dist > params.radius) continue;
    cand.emplace_back(dist, node);
  }
  if (params.mode == FaceMode::Knn && cand.size() > params.k) {
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(params.k), cand.end());
    cand.resize(params.k);
  }
  std::vector<std::size_t> out;
  out.reserve(cand.size());
  for (const auto& c : cand) out.push_back(c.second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> immutable_binary_mask(const Schema& schema) {
  std::vector<bool> mask(schema.size());
  for (std::size_t j = 0; j < schema.size(); ++j) mask[j] = schema[j].immutable && schema[j].is_binary();
  return mask;
}

RecourseGraph assemble(std::vector<std::size_t> rows, Matrix points, const Schema& schema,
                       const Classifier& model, const FaceParams& params) {
  params.validate();
  const auto n = static_cast<std::size_t>(points.rows());
  if (n == 0) throw Error("cannot build a graph over empty data");
  check_dim(schema.size(), static_cast<std::size_t>(points.cols()));
  auto immutable_binary = immutable_binary_mask(schema);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(params.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t m = std::min(n, params.kde_reference_size);
  Matrix reference(static_cast<Eigen::Index>(m), points.cols());
  for (std::size_t i = 0; i < m; ++i) {
    reference.row(static_cast<Eigen::Index>(i)) = points.row(static_cast<Eigen::Index>(order[i]));
  }
  const double bandwidth = params.density_bandwidth > 0.0 ? params.density_bandwidth : scott_bandwidth(reference);
  DensityEstimate density(std::move(reference), bandwidth);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    peak = std::max(peak, density(points.row(static_cast<Eigen::Index>(i)).transpose()));
  }
  if (!(peak > 0.0)) peak = 1.0;

  std::vector<std::vector<std::size_t>> linked(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vector x = points.row(static_cast<Eigen::Index>(i)).transpose();
    for (std::size_t j : neighbours(points, x, i, params, immutable_binary)) {
      linked[i].push_back(j);
      linked[j].push_back(i);
    }
  }
  Adjacency adjacency(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& l = linked[i];
    std::sort(l.begin(), l.end());
    l.erase(std::unique(l.begin(), l.end()), l.end());
    const Vector a = points.row(static_cast<Eigen::Index>(i)).transpose();
    for (std::size_t j : l) {
      double w;
      if (j < i) {
        const auto& back = adjacency[j];
        w = std::find_if(back.begin(), back.end(), [i](const Edge& e) { return e.to == i; })->weight;
      } else {
        w = weight_between(a, points.row(static_cast<Eigen::Index>(j)).transpose(), density, peak);
      }
      adjacency[i].push_back({j, w});
    }
  }
  Vector predictions = model.predict_proba(points);
  return RecourseGraph(std::move(rows), std::move(points), std::move(predictions), std::move(adjacency),
                       std::move(immutable_binary), std::move(density), peak, params);
}

}  // namespace

RecourseGraph::RecourseGraph(std::vector<std::size_t> source_rows, Matrix points, Vector predictions,
                             Adjacency adjacency, std::vector<bool> immutable_binary, DensityEstimate density,
                             double density_peak, FaceParams params)
    : source_rows_(std::move(source_rows)),
      points_(std::move(points)),
      predictions_(std::move(predictions)),
      adjacency_(std::move(adjacency)),
      immutable_binary_(std::move(immutable_binary)),
      density_(std::move(density)),
      density_peak_(density_peak),
      params_(params) {
  const auto n = source_rows_.size();
  if (n == 0) throw Error("recourse graph has no nodes");
  check_dim(n, static_cast<std::size_t>(points_.rows()));
  check_dim(n, static_cast<std::size_t>(predictions_.size()));
  check_dim(n, adjacency_.size());
  check_dim(static_cast<std::size_t>(points_.cols()), immutable_binary_.size());
  if (!(density_peak_ > 0.0)) throw Error("density peak must be > 0");
}

std::size_t RecourseGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& edges : adjacency_) total += edges.size();
  return total / 2;
}

double RecourseGraph::edge_weight(const Vector& a, const Vector& b) const {
  return weight_between(a, b, density_, density_peak_);
}

bool RecourseGraph::compatible(const Vector& a, const Vector& b) const {
  return same_immutables(a, b, immutable_binary_);
}

RecourseGraph build_graph(const Matrix& points, const Schema& schema, const Classifier& model,
                          const FaceParams& params) {
  std::vector<std::size_t> rows(static_cast<std::size_t>(points.rows()));
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return assemble(std::move(rows), points, schema, model, params);
}

RecourseGraph build_graph(const EncodedDataset& data, const Classifier& model, const FaceParams& params) {
  params.validate();
  const std::size_t n = data.rows();
  if (n == 0) throw Error("cannot build a graph over empty data");
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  if (n > params.max_graph_nodes) {
    std::mt19937_64 rng(params.seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(params.max_graph_nodes);
    std::sort(rows.begin(), rows.end());
  }
  Matrix points(static_cast<Eigen::Index>(rows.size()), data.matrix().cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = data.matrix().row(static_cast<Eigen::Index>(rows[i]));
  }
  return assemble(std::move(rows), std::move(points), data.schema(), model, params);
}

namespace {

// Dijkstra from a virtual source whose out-edges are `initial`.
ShortestPaths shortest_paths(const Adjacency& adjacency, const std::vector<Edge>& initial,
                             std::size_t source_marker) {
  const std::size_t n = adjacency.size();
  ShortestPaths sp;
  sp.distance.assign(n, std::numeric_limits<double>::infinity());
  sp.predecessor.assign(n, ShortestPaths::npos);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& e : initial) {
    if (e.weight < sp.distance[e.to]) {
      sp.distance[e.to] = e.weight;
      sp.predecessor[e.to] = source_marker;
      heap.push({e.weight, e.to});
    }
  }
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > sp.distance[u]) continue;
    for (const auto& e : adjacency[u]) {
      const double nd = d + e.weight;
      if (nd < sp.distance[e.to]) {
        sp.distance[e.to] = nd;
        sp.predecessor[e.to] = u;
        heap.push({nd, e.to});
      }
    }
  }
  return sp;
}

}  // namespace

ShortestPaths dijkstra(const Adjacency& adjacency, std::size_t source) {
  if (source >= adjacency.size()) throw Error("dijkstra source out of range");
  auto sp = shortest_paths(adjacency, {{source, 0.0}}, ShortestPaths::npos);
  return sp;
}

CounterfactualResult face(const RecourseProblem& p, const RecourseGraph& g) {
  detail::Stopwatch sw;
  check_dim(static_cast<std::size_t>(g.points().cols()), p.dim());
  const Vector& x0 = p.factual();
  std::vector<Edge> initial;
  for (std::size_t j : neighbours(g.points(), x0, ShortestPaths::npos, g.params(), g.immutable_binary())) {
    initial.push_back({j, g.edge_weight(x0, g.point(j))});
  }
  const auto sp = shortest_paths(g.adjacency(), initial, ShortestPaths::npos);
  std::size_t best = ShortestPaths::npos;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!std::isfinite(sp.distance[i]) || !p.theta().accepts(g.predictions()[static_cast<Eigen::Index>(i)])) continue;
    if (best == ShortestPaths::npos || sp.distance[i] < sp.distance[best]) best = i;
  }
  const char* name = g.params().mode == FaceMode::Eps ? "face_eps" : "face_knn";
  const int settled = static_cast<int>(std::count_if(sp.distance.begin(), sp.distance.end(),
                                                     [](double d) { return std::isfinite(d); }));
  if (best == ShortestPaths::npos) {
    return detail::stamped(finalize(p, std::nullopt, name, settled, kNoReachablePositive), sw);
  }
  return detail::stamped(finalize(p, g.point(best), name, settled, kNoReachablePositive), sw);
}

}  // namespace recourse
