#include "recourse/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "math.hpp"

namespace recourse {

double cost_l0(const Vector& x, const Vector& cf, double tol) {
  check_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(cf.size()));
  if (x.size() == 0) return 0.0;
  const auto changed = ((x - cf).array().abs() > tol).count();
  return static_cast<double>(changed) / static_cast<double>(x.size());
}

double cost_l1(const Vector& x, const Vector& cf) {
  check_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(cf.size()));
  if (x.size() == 0) return 0.0;
  return (x - cf).lpNorm<1>() / static_cast<double>(x.size());
}

std::optional<double> ynn(const std::vector<Vector>& counterfactuals, const Classifier& model,
                          const Matrix& pool, std::size_t k) {
  if (counterfactuals.empty()) return std::nullopt;
  if (k < 1 || k > static_cast<std::size_t>(pool.rows())) throw Error("ynn needs 1 <= k <= pool size");
  const Threshold half;
  const Vector pool_proba = model.predict_proba(pool);
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(pool.rows()));
  double disagreement = 0.0;
  for (const auto& cf : counterfactuals) {
    check_dim(static_cast<std::size_t>(pool.cols()), static_cast<std::size_t>(cf.size()));
    const int label = half.accepts(model.predict_proba(cf)) ? 1 : 0;
    for (Eigen::Index i = 0; i < pool.rows(); ++i) {
      dist[static_cast<std::size_t>(i)] = {(pool.row(i).transpose() - cf).squaredNorm(), i};
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    for (std::size_t j = 0; j < k; ++j) {
      const int neighbour = half.accepts(pool_proba[dist[j].second]) ? 1 : 0;
      disagreement += std::abs(label - neighbour);
    }
  }
  return 1.0 - disagreement / (static_cast<double>(counterfactuals.size()) * static_cast<double>(k));
}

int redundancy(const Vector& x, const Vector& cf, const Classifier& model, Threshold theta, double tol) {
  check_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(cf.size()));
  int count = 0;
  Vector probe = cf;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (std::abs(cf[j] - x[j]) <= tol) continue;
    probe[j] = x[j];
    if (theta.accepts(model.predict_proba(probe))) ++count;
    probe[j] = cf[j];
  }
  return count;
}

int constraint_violation(const Vector& x, const Vector& cf, const Schema& schema, double tol) {
  check_dim(static_cast<std::size_t>(x.size()), static_cast<std::size_t>(cf.size()));
  check_dim(schema.size(), static_cast<std::size_t>(x.size()));
  int count = 0;
  for (std::size_t j = 0; j < schema.size(); ++j) {
    if (!schema[j].immutable) continue;
    const double delta = std::abs(cf[static_cast<Eigen::Index>(j)] - x[static_cast<Eigen::Index>(j)]);
    if (schema[j].is_binary() ? delta != 0.0 : delta > tol) ++count;
  }
  return count;
}

double success_rate(const std::vector<CounterfactualResult>& results) {
  if (results.empty()) throw Error("success rate of an empty result set");
  const auto ok = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.success(); });
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

double avg_time(const std::vector<CounterfactualResult>& results) {
  if (results.empty()) throw Error("average time of an empty result set");
  double total = 0.0;
  for (const auto& r : results) total += r.wall_time_seconds;
  return total / static_cast<double>(results.size());
}

NegativeCohort sample_negative_cohort(const Matrix& data, const Classifier& model, Threshold theta,
                                      std::size_t n, std::uint64_t seed) {
  const Vector proba = model.predict_proba(data);
  std::vector<std::size_t> negatives;
  for (Eigen::Index i = 0; i < proba.size(); ++i) {
    if (proba[i] < theta.value()) negatives.push_back(static_cast<std::size_t>(i));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(negatives.begin(), negatives.end(), rng);
  if (negatives.size() > n) negatives.resize(n);
  std::sort(negatives.begin(), negatives.end());
  NegativeCohort cohort;
  cohort.sample_seed = seed;
  cohort.sample_size = negatives.size();
  cohort.rows = negatives;
  for (auto r : negatives) cohort.instances.emplace_back(data.row(static_cast<Eigen::Index>(r)).transpose());
  return cohort;
}

std::vector<InstanceMeasures> measure_instances(const NegativeCohort& cohort,
                                                const std::vector<CounterfactualResult>& results,
                                                const EvaluationContext& ctx) {
  check_dim(cohort.instances.size(), results.size());
  if (!ctx.model || !ctx.schema) throw Error("evaluation context needs a model and a schema");
  std::vector<InstanceMeasures> out;
  out.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const Vector& x = cohort.instances[i];
    InstanceMeasures m;
    m.row = cohort.rows[i];
    m.success = r.success();
    m.failure_reason = r.failure_reason;
    m.iterations = r.iterations;
    m.wall_time_seconds = r.wall_time_seconds;
    if (r.success()) {
      const Vector& cf = *r.counterfactual;
      m.counterfactual = cf;
      m.c0 = cost_l0(x, cf, ctx.change_tolerance);
      m.c1 = cost_l1(x, cf);
      m.redundancy = redundancy(x, cf, *ctx.model, ctx.theta, ctx.change_tolerance);
      m.violation = constraint_violation(x, cf, *ctx.schema, ctx.violation_tolerance);
    }
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

BenchmarkRecord aggregate(std::string dataset, std::string model_arch, std::string method, std::string family,
                          const std::vector<InstanceMeasures>& measures, const EvaluationContext& ctx,
                          double setup_time_seconds) {
  BenchmarkRecord rec;
  rec.dataset = std::move(dataset);
  rec.model_arch = std::move(model_arch);
  rec.method = std::move(method);
  rec.family = std::move(family);
  rec.setup_time_seconds = setup_time_seconds;
  rec.n_attempted = measures.size();
  std::vector<double> c0, c1, red, vio;
  std::vector<Vector> cfs;
  double time_total = 0.0;
  for (const auto& m : measures) {
    time_total += m.wall_time_seconds;
    if (!m.success) continue;
    ++rec.n_succeeded;
    c0.push_back(*m.c0);
    c1.push_back(*m.c1);
    red.push_back(*m.redundancy);
    vio.push_back(*m.violation);
    cfs.push_back(*m.counterfactual);
  }
  if (rec.n_attempted > 0) {
    rec.success_rate = static_cast<double>(rec.n_succeeded) / static_cast<double>(rec.n_attempted);
    rec.avg_time_seconds = time_total / static_cast<double>(rec.n_attempted);
  }
  if (rec.n_succeeded > 0) {
    rec.mean_c0 = mean(c0);
    rec.mean_c1 = mean(c1);
    std::sort(c0.begin(), c0.end());
    std::sort(c1.begin(), c1.end());
    rec.median_c0 = detail::sorted_quantile(c0, 0.5);
    rec.median_c1 = detail::sorted_quantile(c1, 0.5);
    rec.iqr_c0 = detail::sorted_quantile(c0, 0.75) - detail::sorted_quantile(c0, 0.25);
    rec.iqr_c1 = detail::sorted_quantile(c1, 0.75) - detail::sorted_quantile(c1, 0.25);
    rec.redundancy = mean(red);
    rec.violation = mean(vio);
    if (ctx.model && ctx.pool) rec.ynn = ynn(cfs, *ctx.model, *ctx.pool, ctx.ynn_k);
  }
  return rec;
}

}  // namespace recourse
