#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

#include "recourse/independent.hpp"
#include "timing.hpp"

namespace recourse {

void ArParams::validate() const {
  if (grid_steps < 2) throw ConfigError("ar grid_steps must be >= 2");
  if (flipset_size < 1) throw ConfigError("ar flipset_size must be >= 1");
  if (max_expansions < 1) throw ConfigError("ar max_expansions must be >= 1");
}

LinearScore LinearScore::from_model(const LinearModel& model, Threshold theta) {
  const double t = theta.value();
  return {model.weights(), model.bias(), std::log(t / (1.0 - t))};
}

LinearScore LinearScore::from_surrogate(const LocalLinearModel& local, Threshold theta) {
  return {local.coefficients, local.intercept, theta.value()};
}

std::vector<std::vector<double>> action_grid(const RecourseProblem& p, const LinearScore& score,
                                             const ArParams& params) {
  params.validate();
  check_dim(p.dim(), static_cast<std::size_t>(score.coefficients.size()));
  const auto& acts = p.actions();
  const Vector& x0 = p.factual();
  constexpr double slack = 1e-12;
  std::vector<std::vector<double>> grid(p.dim());
  for (std::size_t j = 0; j < p.dim(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    auto& moves = grid[j];
    moves.push_back(0.0);
    if (acts.frozen[j]) continue;
    const double w = score.coefficients[i];
    auto admissible = [&](double offset) {
      const double v = x0[i] + offset;
      return w * offset > 0.0 && v >= acts.lower[i] - slack && v <= acts.upper[i] + slack;
    };
    if (p.binary_mask()[j]) {
      const double offset = (x0[i] >= 0.5 ? 0.0 : 1.0) - x0[i];
      if (offset != 0.0 && admissible(offset)) moves.push_back(offset);
      continue;
    }
    for (int k = 1; k <= 2 * params.grid_steps; ++k) {
      // Alternate sides so moves stay sorted by |offset|; only one side survives.
      for (double sign : {1.0, -1.0}) {
        const double offset = sign * static_cast<double>(k) / params.grid_steps;
        if (admissible(offset)) moves.push_back(offset);
      }
    }
  }
  return grid;
}

namespace {

// Fractional knapsack over the features from `first` on: the least l1 cost that
// raises the score by more than `needed` when offsets may take any value up to
// each feature's largest move. Infinite when even that cannot succeed.
class KnapsackBound {
 public:
  KnapsackBound(const std::vector<std::vector<double>>& grid, const Vector& coef) {
    const std::size_t d = grid.size();
    suffix_.resize(d + 1);
    for (std::size_t first = d; first-- > 0;) {
      suffix_[first] = suffix_[first + 1];
      double capacity = 0.0;
      for (double m : grid[first]) capacity = std::max(capacity, std::abs(m));
      const double rate = std::abs(coef[static_cast<Eigen::Index>(first)]);
      if (capacity > 0.0 && rate > 0.0) suffix_[first].push_back({rate, capacity});
      std::sort(suffix_[first].begin(), suffix_[first].end(),
                [](const Item& a, const Item& b) { return a.rate > b.rate; });
    }
  }

  double operator()(std::size_t first, double needed) const {
    if (needed < 0.0) return 0.0;
    double cost = 0.0;
    for (const auto& item : suffix_[first]) {
      const double gain = item.rate * item.capacity;
      if (gain > needed) return cost + needed / item.rate;
      needed -= gain;
      cost += item.capacity;
    }
    return std::numeric_limits<double>::infinity();
  }

 private:
  struct Item {
    double rate;
    double capacity;
  };
  std::vector<std::vector<Item>> suffix_;
};

struct Node {
  std::size_t parent;
  std::size_t depth;
  std::size_t move;
  double cost;
  double gain;
};

struct Entry {
  double priority;
  std::size_t seq;
  bool operator>(const Entry& o) const {
    return priority != o.priority ? priority > o.priority : seq > o.seq;
  }
};

}  // namespace

std::vector<Action> flipset(const RecourseProblem& p, const LinearScore& score, const ArParams& params) {
  const auto grid = action_grid(p, score, params);
  const std::size_t d = grid.size();
  const double needed = score.threshold - score.score(p.factual());
  const KnapsackBound bound(grid, score.coefficients);

  constexpr std::size_t kRoot = std::numeric_limits<std::size_t>::max();
  std::vector<Node> nodes;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  auto push = [&](Node n) {
    const double h = bound(n.depth, needed - n.gain);
    if (!std::isfinite(h)) return;
    nodes.push_back(n);
    open.push({n.cost + h, nodes.size() - 1});
  };
  push({kRoot, 0, 0, 0.0, 0.0});

  std::vector<Action> out;
  // One action per set of changed features: the first popped is the cheapest for that set.
  std::set<std::vector<bool>> supports;
  std::size_t expansions = 0;
  while (!open.empty() && out.size() < params.flipset_size && expansions < params.max_expansions) {
    const std::size_t id = open.top().seq;
    open.pop();
    const Node node = nodes[id];
    if (node.depth == d) {
      Action a{Vector::Zero(static_cast<Eigen::Index>(d)), node.cost};
      std::vector<bool> support(d, false);
      for (std::size_t at = id; nodes[at].parent != kRoot; at = nodes[at].parent) {
        const auto& n = nodes[at];
        const double offset = grid[n.depth - 1][n.move];
        a.delta[static_cast<Eigen::Index>(n.depth - 1)] = offset;
        support[n.depth - 1] = offset != 0.0;
      }
      // The accumulated gain can round past the threshold when the exact score does not.
      if (!(score.score(p.factual() + a.delta) > score.threshold)) continue;
      if (supports.insert(std::move(support)).second) out.push_back(std::move(a));
      continue;
    }
    ++expansions;
    const double coef = score.coefficients[static_cast<Eigen::Index>(node.depth)];
    for (std::size_t m = 0; m < grid[node.depth].size(); ++m) {
      const double offset = grid[node.depth][m];
      push({id, node.depth + 1, m, node.cost + std::abs(offset), node.gain + coef * offset});
    }
  }
  return out;
}

CounterfactualResult actionable_recourse(const RecourseProblem& p, const LinearScore& score,
                                         const ArParams& params) {
  detail::Stopwatch sw;
  const auto actions = flipset(p, score, params);
  int tried = 0;
  for (const auto& a : actions) {
    ++tried;
    Vector candidate = p.factual() + a.delta;
    if (p.theta().accepts(p.model().predict_proba(candidate))) {
      return detail::stamped(finalize(p, std::move(candidate), "ar", tried), sw);
    }
  }
  return detail::stamped(finalize(p, std::nullopt, "ar", tried, kNoValidatedAction), sw);
}

CounterfactualResult actionable_recourse(const RecourseProblem& p, const LinearModel& model,
                                         const ArParams& params) {
  return actionable_recourse(p, LinearScore::from_model(model, p.theta()), params);
}

CounterfactualResult actionable_recourse(const RecourseProblem& p, const LocalLinearModel& local,
                                         const ArParams& params) {
  return actionable_recourse(p, LinearScore::from_surrogate(local, p.theta()), params);
}

CounterfactualResult ar_lime(const RecourseProblem& p, const ArParams& params, const LimeConfig& lime) {
  detail::Stopwatch sw;
  LimeConfig cfg = lime;
  if (cfg.binary_mask.empty()) cfg.binary_mask = p.binary_mask();
  const auto local = lime_fit(p.model(), p.factual(), cfg);
  auto r = actionable_recourse(p, local, params);
  r.method_name = "ar_lime";
  return detail::stamped(std::move(r), sw);
}

}  // namespace recourse
