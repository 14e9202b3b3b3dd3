#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recourse/dataset.hpp"
#include "recourse/model.hpp"
#include "recourse/problem.hpp"

namespace recourse {

inline constexpr double kChangeTolerance = 1e-9;
inline constexpr double kViolationTolerance = 1e-5;

// (1/d) * number of coordinates with |x_j - cf_j| > tol.
double cost_l0(const Vector& x, const Vector& cf, double tol = kChangeTolerance);
// (1/d) * ||x - cf||_1.
double cost_l1(const Vector& x, const Vector& cf);

// 1 - (1/(n k)) sum_i sum_{j in kNN(cf_i)} |f_b(cf_i) - f_b(x_j)| with f_b = 1[f > 0.5]
// and neighbours taken from `pool` by euclidean distance. Empty input gives nullopt.
std::optional<double> ynn(const std::vector<Vector>& counterfactuals, const Classifier& model,
                          const Matrix& pool, std::size_t k = 5);

// Number of changed coordinates whose single reversion keeps the label at 1.
int redundancy(const Vector& x, const Vector& cf, const Classifier& model,
               Threshold theta = Threshold{}, double tol = kChangeTolerance);

// Number of immutable coordinates that changed: |delta| > tol for continuous
// features, delta != 0 for binary ones.
int constraint_violation(const Vector& x, const Vector& cf, const Schema& schema,
                         double tol = kViolationTolerance);

double success_rate(const std::vector<CounterfactualResult>& results);
// Mean wall time over all attempts.
double avg_time(const std::vector<CounterfactualResult>& results);

struct NegativeCohort {
  // Row indices into the data the cohort was drawn from.
  std::vector<std::size_t> rows;
  std::vector<Vector> instances;
  std::uint64_t sample_seed = 0;
  std::size_t sample_size = 0;
};

// Seeded sample (without replacement) of up to n rows with f(x) < theta.
NegativeCohort sample_negative_cohort(const Matrix& data, const Classifier& model, Threshold theta,
                                      std::size_t n, std::uint64_t seed);

// Measures for one attempted instance; cost fields are set on success only.
struct InstanceMeasures {
  std::size_t row = 0;
  bool success = false;
  std::string failure_reason;
  std::optional<double> c0;
  std::optional<double> c1;
  std::optional<int> redundancy;
  std::optional<int> violation;
  int iterations = 0;
  double wall_time_seconds = 0.0;
  std::optional<Vector> counterfactual;
};

struct BenchmarkRecord {
  std::string dataset;
  std::string model_arch;
  std::string method;
  std::string family;
  std::optional<double> mean_c0, mean_c1, median_c0, median_c1, iqr_c0, iqr_c1;
  std::optional<double> ynn;
  std::optional<double> redundancy;
  std::optional<double> violation;
  double success_rate = 0.0;
  // Absent when instances ran concurrently.
  std::optional<double> avg_time_seconds;
  double setup_time_seconds = 0.0;
  std::size_t n_attempted = 0;
  std::size_t n_succeeded = 0;
  // Set when the whole cell failed before producing results.
  std::string cell_error;
};

struct EvaluationContext {
  const Classifier* model = nullptr;
  const Schema* schema = nullptr;
  // kNN pool for yNN.
  const Matrix* pool = nullptr;
  Threshold theta;
  std::size_t ynn_k = 5;
  double change_tolerance = kChangeTolerance;
  double violation_tolerance = kViolationTolerance;
};

std::vector<InstanceMeasures> measure_instances(const NegativeCohort& cohort,
                                                const std::vector<CounterfactualResult>& results,
                                                const EvaluationContext& ctx);

// Cost, redundancy and violation statistics are taken over successes only.
BenchmarkRecord aggregate(std::string dataset, std::string model_arch, std::string method,
                          std::string family, const std::vector<InstanceMeasures>& measures,
                          const EvaluationContext& ctx, double setup_time_seconds);

}  // namespace recourse
