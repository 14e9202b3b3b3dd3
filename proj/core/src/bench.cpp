#include "recourse/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "math.hpp"
#include "recourse/catalog.hpp"
#include "recourse/dependent.hpp"
#include "recourse/independent.hpp"
#include "timing.hpp"
#include "yaml_util.hpp"

namespace recourse {

using nlohmann::json;

// --- Method registry ---------------------------------------------------------------

const std::vector<MethodInfo>& list_methods() {
  static const std::vector<MethodInfo> methods{
      {"wachter", "independent", "gradient descent on prediction loss plus l1 distance"},
      {"growing_spheres", "independent", "random search in growing l2 shells"},
      {"cem", "independent", "elastic-net regularized hinge loss, iterative shrinkage"},
      {"dice", "independent", "hinge validity plus l1 proximity, projected onto actionable set"},
      {"ar", "independent", "minimal-cost discrete actions for a linear score (local surrogate on non-linear models)"},
      {"ar_lime", "independent", "minimal-cost discrete actions on a local linear surrogate"},
      {"cem_vae", "dependent", "cem with an autoencoder reconstruction penalty"},
      {"revise", "dependent", "latent-space gradient search through a vae decoder"},
      {"clue", "dependent", "latent-space search for low-entropy counterfactuals"},
      {"face_eps", "dependent", "shortest density-weighted path on an epsilon graph"},
      {"face_knn", "dependent", "shortest density-weighted path on a k-nearest-neighbour graph"},
  };
  return methods;
}

const MethodInfo& method_info(std::string_view name) {
  for (const auto& m : list_methods()) {
    if (m.name == name) return m;
  }
  throw ConfigError(fmt::format("unknown method '{}'", name));
}

namespace {

using Slot = std::variant<double*, int*, std::size_t*>;

void apply_overrides(const MethodSpec& spec, std::initializer_list<std::pair<const char*, Slot>> slots) {
  for (const auto& [key, value] : spec.params) {
    const auto it = std::find_if(slots.begin(), slots.end(), [&](const auto& s) { return key == s.first; });
    if (it == slots.end()) throw ConfigError(fmt::format("method '{}' has no parameter '{}'", spec.name, key));
    std::visit(
        [&](auto* field) {
          using T = std::remove_pointer_t<decltype(field)>;
          if constexpr (std::is_same_v<T, double>) {
            *field = value;
          } else {
            if (value != std::floor(value) || value < 0.0) {
              throw ConfigError(fmt::format("method '{}': parameter '{}' must be a non-negative integer", spec.name, key));
            }
            *field = static_cast<T>(value);
          }
        },
        it->second);
  }
}

struct LatentSettings {
  double half_width = 3.0;
};

WachterParams wachter_params(const MethodSpec& s) {
  WachterParams p;
  apply_overrides(s, {{"learning_rate", &p.learning_rate}, {"lambda_init", &p.lambda_init},
                      {"lambda_growth", &p.lambda_growth}, {"max_iters", &p.max_iters},
                      {"inner_iters", &p.inner_iters}, {"tolerance", &p.tolerance}});
  p.validate();
  return p;
}

GsParams gs_params(const MethodSpec& s) {
  GsParams p;
  apply_overrides(s, {{"step", &p.step}, {"samples_per_shell", &p.samples_per_shell}, {"max_shells", &p.max_shells}});
  p.validate();
  return p;
}

CemParams cem_params(const MethodSpec& s, bool with_vae) {
  CemParams p;
  if (with_vae) p.vae_weight = 0.9;
  apply_overrides(s, {{"l1_weight", &p.l1_weight}, {"l2_weight", &p.l2_weight}, {"vae_weight", &p.vae_weight},
                      {"learning_rate", &p.learning_rate}, {"max_iters", &p.max_iters},
                      {"confidence_init", &p.confidence_init}, {"confidence_growth", &p.confidence_growth},
                      {"block_iters", &p.block_iters}, {"margin", &p.margin}});
  p.validate();
  if (with_vae != (p.vae_weight > 0.0)) {
    throw ConfigError(fmt::format("method '{}': vae_weight must be {}", s.name, with_vae ? "> 0" : "0"));
  }
  return p;
}

DiceParams dice_params(const MethodSpec& s) {
  DiceParams p;
  apply_overrides(s, {{"proximity_weight", &p.proximity_weight}, {"diversity_weight", &p.diversity_weight},
                      {"learning_rate", &p.learning_rate}, {"max_iters", &p.max_iters},
                      {"validity_weight_init", &p.validity_weight_init},
                      {"validity_weight_growth", &p.validity_weight_growth}, {"patience", &p.patience},
                      {"margin", &p.margin}});
  p.validate();
  return p;
}

struct ArSettings {
  ArParams ar;
  LimeConfig lime;
  double lime_scale = 0.1;
};

ArSettings ar_settings(const MethodSpec& s) {
  ArSettings a;
  apply_overrides(s, {{"grid_steps", &a.ar.grid_steps}, {"flipset_size", &a.ar.flipset_size},
                      {"max_expansions", &a.ar.max_expansions}, {"lime_samples", &a.lime.n_samples},
                      {"lime_kernel_width", &a.lime.kernel_width}, {"lime_scale", &a.lime_scale},
                      {"lime_flip_probability", &a.lime.flip_probability}});
  a.ar.validate();
  if (!(a.lime_scale > 0.0)) throw ConfigError("lime_scale must be > 0");
  return a;
}

std::pair<ReviseParams, LatentSettings> revise_params(const MethodSpec& s) {
  ReviseParams p;
  LatentSettings l;
  apply_overrides(s, {{"learning_rate", &p.learning_rate}, {"lambda", &p.lambda}, {"max_iters", &p.max_iters},
                      {"latent_half_width", &l.half_width}});
  p.validate();
  return {p, l};
}

std::pair<ClueParams, LatentSettings> clue_params(const MethodSpec& s) {
  ClueParams p;
  LatentSettings l;
  apply_overrides(s, {{"uncertainty_weight", &p.uncertainty_weight}, {"distance_weight", &p.distance_weight},
                      {"validity_weight", &p.validity_weight}, {"validity_growth", &p.validity_growth},
                      {"patience", &p.patience}, {"margin", &p.margin}, {"learning_rate", &p.learning_rate},
                      {"max_iters", &p.max_iters}, {"latent_half_width", &l.half_width}});
  p.validate();
  return {p, l};
}

FaceParams face_params(const MethodSpec& s, FaceMode mode, std::uint64_t seed) {
  FaceParams p;
  p.mode = mode;
  p.seed = seed;
  apply_overrides(s, {{"k", &p.k}, {"radius", &p.radius}, {"density_bandwidth", &p.density_bandwidth},
                      {"max_graph_nodes", &p.max_graph_nodes}, {"kde_reference_size", &p.kde_reference_size}});
  p.validate();
  return p;
}

// Parses every method's overrides once so config errors surface before running.
void check_method(const MethodSpec& s) {
  const auto& name = s.name;
  method_info(name);
  if (name == "wachter") wachter_params(s);
  else if (name == "growing_spheres") gs_params(s);
  else if (name == "cem") cem_params(s, false);
  else if (name == "cem_vae") cem_params(s, true);
  else if (name == "dice") dice_params(s);
  else if (name == "ar" || name == "ar_lime") ar_settings(s);
  else if (name == "revise") revise_params(s);
  else if (name == "clue") clue_params(s);
  else if (name == "face_eps") face_params(s, FaceMode::Eps, 0);
  else if (name == "face_knn") face_params(s, FaceMode::Knn, 0);
}

}  // namespace

// --- Config -------------------------------------------------------------------------

void RunConfig::validate() const {
  if (datasets.empty()) throw ConfigError("run config needs at least one dataset");
  if (models.empty()) throw ConfigError("run config needs at least one model");
  if (methods.empty()) throw ConfigError("run config needs at least one method");
  if (cohort_size < 1) throw ConfigError("cohort_size must be >= 1");
  Threshold check(theta);
  (void)check;
  vae.validate();
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(m.name).second) throw ConfigError(fmt::format("method '{}' listed twice", m.name));
    check_method(m);
  }
}

RunConfig parse_run_config(std::string_view yaml_text, const std::filesystem::path& base_dir) {
  using detail::allow_keys;
  using detail::scalar;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("run config is not valid YAML: ") + e.what());
  }
  allow_keys(root, "run config",
             {"catalog", "datasets", "models", "methods", "cohort_size", "seed", "theta", "output_dir", "parallel",
              "vae", "latent_dim"});
  RunConfig c;
  c.catalog_dir = base_dir / scalar<std::string>(root, "catalog", "data/catalog");
  c.output_dir = base_dir / scalar<std::string>(root, "output_dir", "results");
  auto list = [&](const char* key) {
    const auto node = root[key];
    if (!node || !node.IsSequence()) throw ConfigError(fmt::format("'{}' must be a list", key));
    return node;
  };
  for (const auto& d : list("datasets")) c.datasets.push_back(d.as<std::string>());
  for (const auto& m : list("models")) {
    try {
      c.models.push_back(parse_architecture(m.as<std::string>()));
    } catch (const YAML::Exception&) {
      throw ConfigError("models entries must be strings");
    }
  }
  for (const auto& m : list("methods")) {
    MethodSpec spec;
    if (m.IsScalar()) {
      spec.name = m.as<std::string>();
    } else {
      allow_keys(m, "method", {"name", "params"});
      spec.name = scalar<std::string>(m, "name");
      if (m["params"]) {
        if (!m["params"].IsMap()) throw ConfigError("method params must be a mapping");
        for (const auto& kv : m["params"]) {
          try {
            spec.params[kv.first.as<std::string>()] = kv.second.as<double>();
          } catch (const YAML::Exception&) {
            throw ConfigError(fmt::format("method '{}': parameter values must be numbers", spec.name));
          }
        }
      }
    }
    c.methods.push_back(std::move(spec));
  }
  c.cohort_size = scalar<std::size_t>(root, "cohort_size", c.cohort_size);
  c.seed = scalar<std::uint64_t>(root, "seed", c.seed);
  c.theta = scalar<double>(root, "theta", c.theta);
  c.parallel = scalar<bool>(root, "parallel", c.parallel);
  c.latent_dim = scalar<std::size_t>(root, "latent_dim", c.latent_dim);
  if (const auto v = root["vae"]) {
    allow_keys(v, "vae", {"learning_rate", "epochs", "batch_size", "min_steps", "seed", "kl_weight", "hidden"});
    c.vae.learning_rate = scalar<double>(v, "learning_rate", c.vae.learning_rate);
    c.vae.epochs = scalar<int>(v, "epochs", c.vae.epochs);
    c.vae.batch_size = scalar<int>(v, "batch_size", c.vae.batch_size);
    c.vae.min_steps = scalar<int>(v, "min_steps", c.vae.min_steps);
    c.vae.seed = scalar<std::uint64_t>(v, "seed", c.vae.seed);
    c.vae.kl_weight = scalar<double>(v, "kl_weight", c.vae.kl_weight);
    c.vae.hidden = scalar<int>(v, "hidden", c.vae.hidden);
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open run config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.parent_path());
}

// --- Running ------------------------------------------------------------------------

namespace {

using Generator = std::function<CounterfactualResult(const RecourseProblem&, std::size_t)>;

struct TimedVae {
  std::shared_ptr<const Vae> vae;
  double seconds = 0.0;
};

struct Prepared {
  Generator generate;
  double setup_seconds = 0.0;
};

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  return seed * 1000003ULL + index;
}

Prepared prepare_method(const MethodSpec& spec, const RunConfig& cfg, const PreparedData& data,
                        const std::shared_ptr<const Classifier>& model, const std::function<TimedVae()>& vae) {
  const auto& name = spec.name;
  const std::uint64_t seed = cfg.seed;
  if (name == "wachter") {
    return {[p = wachter_params(spec)](const RecourseProblem& pr, std::size_t) { return wachter(pr, p); }};
  }
  if (name == "growing_spheres") {
    return {[p = gs_params(spec), seed](const RecourseProblem& pr, std::size_t i) {
      GsParams q = p;
      q.seed = instance_seed(seed, i);
      return growing_spheres(pr, q);
    }};
  }
  if (name == "cem") {
    return {[p = cem_params(spec, false)](const RecourseProblem& pr, std::size_t) { return cem(pr, p); }};
  }
  if (name == "cem_vae") {
    const auto v = vae();
    return {[p = cem_params(spec, true), m = v.vae](const RecourseProblem& pr, std::size_t) { return cem(pr, p, m); },
            v.seconds};
  }
  if (name == "dice") {
    return {[p = dice_params(spec)](const RecourseProblem& pr, std::size_t) { return dice_single(pr, p); }};
  }
  if (name == "ar" || name == "ar_lime") {
    const auto s = ar_settings(spec);
    const auto linear = std::dynamic_pointer_cast<const LinearModel>(model);
    if (name == "ar" && linear) {
      return {[s, linear](const RecourseProblem& pr, std::size_t) { return actionable_recourse(pr, *linear, s.ar); }};
    }
    return {[s, seed, name](const RecourseProblem& pr, std::size_t i) {
      LimeConfig lime = s.lime;
      lime.seed = instance_seed(seed, i);
      lime.perturbation_scale = Vector::Constant(static_cast<Eigen::Index>(pr.dim()), s.lime_scale);
      auto r = ar_lime(pr, s.ar, lime);
      r.method_name = name;
      return r;
    }};
  }
  if (name == "revise") {
    const auto v = vae();
    const auto [p, l] = revise_params(spec);
    return {[p = p, l = l, m = v.vae](const RecourseProblem& pr, std::size_t) {
              return revise(LatentProblem(pr, m, l.half_width), p);
            },
            v.seconds};
  }
  if (name == "clue") {
    const auto v = vae();
    const auto [p, l] = clue_params(spec);
    return {[p = p, l = l, m = v.vae](const RecourseProblem& pr, std::size_t) {
              return clue_lite(LatentProblem(pr, m, l.half_width), p);
            },
            v.seconds};
  }
  if (name == "face_eps" || name == "face_knn") {
    const auto params = face_params(spec, name == "face_eps" ? FaceMode::Eps : FaceMode::Knn, seed);
    detail::Stopwatch sw;
    auto graph = std::make_shared<const RecourseGraph>(build_graph(data.train, *model, params));
    const double seconds = sw.seconds();
    return {[graph](const RecourseProblem& pr, std::size_t) { return face(pr, *graph); }, seconds};
  }
  throw ConfigError(fmt::format("unknown method '{}'", name));
}

std::vector<CounterfactualResult> generate_all(const Generator& gen, const NegativeCohort& cohort,
                                               const std::shared_ptr<const Classifier>& model, const Schema& schema,
                                               Threshold theta, const std::string& method, bool parallel) {
  std::vector<CounterfactualResult> results(cohort.instances.size());
  auto one = [&](std::size_t i) {
    try {
      results[i] = gen(RecourseProblem(model, cohort.instances[i], schema, theta), i);
    } catch (const std::exception& e) {
      results[i] = CounterfactualResult{};
      results[i].method_name = method;
      results[i].failure_reason = std::string("error: ") + e.what();
    }
  };
  if (!parallel) {
    for (std::size_t i = 0; i < results.size(); ++i) one(i);
    return results;
  }
  const std::size_t workers = std::max(1U, std::thread::hardware_concurrency());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < results.size(); i += workers) one(i);
    });
  }
  for (auto& t : pool) t.join();
  return results;
}

BenchmarkRecord error_record(const std::string& dataset, Architecture arch, const std::string& method,
                             const std::string& error) {
  BenchmarkRecord r;
  r.dataset = dataset;
  r.model_arch = std::string(to_string(arch));
  r.method = method;
  r.family = method_info(method).family;
  r.cell_error = error;
  return r;
}

}  // namespace

RunResult run(const RunConfig& config) {
  config.validate();
  const Threshold theta(config.theta);
  const auto catalog = load_catalog(config.catalog_dir);
  RunResult out;
  auto log = [](const std::string& msg) { fmt::print(stderr, "{}\n", msg); };

  for (const auto& dataset : config.datasets) {
    std::optional<PreparedData> data;
    std::string data_error;
    const DatasetEntry* entry = nullptr;
    try {
      entry = &find_entry(catalog, dataset);
      data.emplace(prepare(*entry));
    } catch (const std::exception& e) {
      data_error = e.what();
    }
    std::optional<TimedVae> vae_cache;
    auto vae = [&]() -> TimedVae {
      if (!vae_cache) {
        detail::Stopwatch sw;
        const std::size_t k =
            config.latent_dim > 0 ? config.latent_dim : default_latent_dim(data->train.features());
        auto trained = train_vae(data->train, k, config.vae);
        vae_cache = TimedVae{trained.vae, sw.seconds()};
      }
      return *vae_cache;
    };

    for (const auto arch : config.models) {
      const std::string arch_name(to_string(arch));
      std::shared_ptr<const Classifier> model;
      std::string model_error = data_error;
      if (data) {
        try {
          detail::Stopwatch sw;
          model = train(arch, data->train, entry->training(arch)).model;
          ModelReport report{dataset, arch_name,
                             accuracy(*model, data->test.matrix(), data->test.target(), theta), sw.seconds(), model};
          log(fmt::format("[{}/{}] test accuracy {:.4f} ({:.1f}s)", dataset, arch_name, report.test_accuracy,
                          report.train_seconds));
          out.models.push_back(report);
        } catch (const std::exception& e) {
          model_error = e.what();
        }
      }
      if (!model) {
        for (const auto& m : config.methods) {
          out.cells.push_back({error_record(dataset, arch, m.name, model_error), {}});
          out.exit_code = 1;
        }
        log(fmt::format("[{}/{}] skipped: {}", dataset, arch_name, model_error));
        continue;
      }
      const NegativeCohort cohort =
          sample_negative_cohort(data->test.matrix(), *model, theta, config.cohort_size, config.seed);
      EvaluationContext ctx;
      ctx.model = model.get();
      ctx.schema = &data->train.schema();
      ctx.pool = &data->train.matrix();
      ctx.theta = theta;

      for (const auto& spec : config.methods) {
        CellOutput cell;
        try {
          const Prepared prepared = prepare_method(spec, config, *data, model, vae);
          const auto results = generate_all(prepared.generate, cohort, model, data->train.schema(), theta,
                                            spec.name, config.parallel);
          cell.instances = measure_instances(cohort, results, ctx);
          cell.record = aggregate(dataset, arch_name, spec.name, method_info(spec.name).family, cell.instances, ctx,
                                  prepared.setup_seconds);
          if (config.parallel) cell.record.avg_time_seconds.reset();
          log(fmt::format("[{}/{}/{}] success {:.2f} over {}", dataset, arch_name, spec.name,
                          cell.record.success_rate, cell.record.n_attempted));
        } catch (const std::exception& e) {
          cell = CellOutput{error_record(dataset, arch, spec.name, e.what()), {}};
          out.exit_code = 1;
          log(fmt::format("[{}/{}/{}] failed: {}", dataset, arch_name, spec.name, e.what()));
        }
        out.cells.push_back(std::move(cell));
      }
    }
  }
  return out;
}

// --- Output ---------------------------------------------------------------------------

std::string cell_id(const BenchmarkRecord& record) {
  return fmt::format("{}_{}_{}", record.dataset, record.model_arch, record.method);
}

namespace {

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string opt_csv(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json record_to_json(const BenchmarkRecord& r) {
  return json{{"dataset", r.dataset},
              {"model", r.model_arch},
              {"method", r.method},
              {"family", r.family},
              {"n_attempted", r.n_attempted},
              {"n_succeeded", r.n_succeeded},
              {"success_rate", r.success_rate},
              {"mean_c0", opt_json(r.mean_c0)},
              {"mean_c1", opt_json(r.mean_c1)},
              {"median_c0", opt_json(r.median_c0)},
              {"median_c1", opt_json(r.median_c1)},
              {"iqr_c0", opt_json(r.iqr_c0)},
              {"iqr_c1", opt_json(r.iqr_c1)},
              {"ynn", opt_json(r.ynn)},
              {"redundancy", opt_json(r.redundancy)},
              {"violation", opt_json(r.violation)},
              {"avg_time_seconds", opt_json(r.avg_time_seconds)},
              {"setup_time_seconds", r.setup_time_seconds},
              {"cell_error", r.cell_error.empty() ? json(nullptr) : json(r.cell_error)}};
}

std::optional<double> json_opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<double>();
}

BenchmarkRecord record_from_json(const json& j) {
  BenchmarkRecord r;
  r.dataset = j.at("dataset").get<std::string>();
  r.model_arch = j.at("model").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.family = j.at("family").get<std::string>();
  r.n_attempted = j.at("n_attempted").get<std::size_t>();
  r.n_succeeded = j.at("n_succeeded").get<std::size_t>();
  r.success_rate = j.at("success_rate").get<double>();
  r.mean_c0 = json_opt(j, "mean_c0");
  r.mean_c1 = json_opt(j, "mean_c1");
  r.median_c0 = json_opt(j, "median_c0");
  r.median_c1 = json_opt(j, "median_c1");
  r.iqr_c0 = json_opt(j, "iqr_c0");
  r.iqr_c1 = json_opt(j, "iqr_c1");
  r.ynn = json_opt(j, "ynn");
  r.redundancy = json_opt(j, "redundancy");
  r.violation = json_opt(j, "violation");
  r.avg_time_seconds = json_opt(j, "avg_time_seconds");
  r.setup_time_seconds = j.value("setup_time_seconds", 0.0);
  if (j.contains("cell_error") && !j["cell_error"].is_null()) r.cell_error = j["cell_error"].get<std::string>();
  return r;
}

json instance_to_json(const InstanceMeasures& m) {
  json j{{"row", m.row},
         {"status", m.success ? "success" : "failure"},
         {"failure_reason", m.success ? json(nullptr) : json(m.failure_reason)},
         {"c0", opt_json(m.c0)},
         {"c1", opt_json(m.c1)},
         {"redundancy", m.redundancy ? json(*m.redundancy) : json(nullptr)},
         {"violation", m.violation ? json(*m.violation) : json(nullptr)},
         {"iterations", m.iterations},
         {"wall_time_seconds", m.wall_time_seconds}};
  if (m.counterfactual) {
    j["counterfactual"] = std::vector<double>(m.counterfactual->data(), m.counterfactual->data() + m.counterfactual->size());
  } else {
    j["counterfactual"] = nullptr;
  }
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

std::string plot_data_csv(const CellOutput& cell) {
  std::string out = "kind,row,c0,c1,median_c0,q25_c0,q75_c0,median_c1,q25_c1,q75_c1\n";
  std::vector<double> c0, c1;
  for (const auto& m : cell.instances) {
    if (!m.success) continue;
    c0.push_back(*m.c0);
    c1.push_back(*m.c1);
    out += fmt::format("instance,{},{},{},,,,,,\n", m.row, *m.c0, *m.c1);
  }
  if (c0.empty()) return out + "summary,,,,NA,NA,NA,NA,NA,NA\n";
  std::sort(c0.begin(), c0.end());
  std::sort(c1.begin(), c1.end());
  using detail::sorted_quantile;
  return out + fmt::format("summary,,,,{},{},{},{},{},{}\n", sorted_quantile(c0, 0.5), sorted_quantile(c0, 0.25),
                           sorted_quantile(c0, 0.75), sorted_quantile(c1, 0.5), sorted_quantile(c1, 0.25),
                           sorted_quantile(c1, 0.75));
}

std::string records_csv(const std::vector<BenchmarkRecord>& records) {
  std::string out =
      "dataset,model,method,family,n_attempted,n_succeeded,success_rate,mean_c0,mean_c1,median_c0,median_c1,"
      "iqr_c0,iqr_c1,ynn,redundancy,violation,avg_time_seconds,setup_time_seconds,cell_error\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.dataset),
                       r.model_arch, r.method, r.family, r.n_attempted, r.n_succeeded, r.success_rate,
                       opt_csv(r.mean_c0), opt_csv(r.mean_c1), opt_csv(r.median_c0), opt_csv(r.median_c1),
                       opt_csv(r.iqr_c0), opt_csv(r.iqr_c1), opt_csv(r.ynn), opt_csv(r.redundancy),
                       opt_csv(r.violation), opt_csv(r.avg_time_seconds), r.setup_time_seconds,
                       csv_field(r.cell_error));
  }
  return out;
}

std::string records_json(const std::vector<BenchmarkRecord>& records) {
  json arr = json::array();
  for (const auto& r : records) arr.push_back(record_to_json(r));
  return arr.dump(2) + "\n";
}

std::string records_markdown(const std::vector<BenchmarkRecord>& records) {
  auto num = [](const std::optional<double>& v, int digits) {
    return v ? fmt::format("{:.{}f}", *v, digits) : std::string("-");
  };
  std::string out =
      "| dataset | model | method | family | yNN | redund. | violation | success | c0 | c1 | t (s) | setup (s) |\n"
      "|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : records) {
    if (!r.cell_error.empty()) {
      out += fmt::format("| {} | {} | {} | {} | error: {} | | | | | | | |\n", r.dataset, r.model_arch, r.method,
                         r.family, r.cell_error);
      continue;
    }
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {:.2f} | {} | {} | {} | {:.2f} |\n", r.dataset,
                       r.model_arch, r.method, r.family, num(r.ynn, 2), num(r.redundancy, 2), num(r.violation, 2),
                       r.success_rate, num(r.mean_c0, 3), num(r.mean_c1, 3), num(r.avg_time_seconds, 4),
                       r.setup_time_seconds);
  }
  return out;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "csv") return ReportFormat::Csv;
  if (text == "json") return ReportFormat::Json;
  if (text == "md" || text == "markdown") return ReportFormat::Markdown;
  throw ConfigError(fmt::format("unknown report format '{}'", text));
}

std::string render_report(const std::vector<BenchmarkRecord>& records, ReportFormat format) {
  switch (format) {
    case ReportFormat::Csv:
      return records_csv(records);
    case ReportFormat::Json:
      return records_json(records);
    default:
      return records_markdown(records);
  }
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "per_instance");
  fs::create_directories(dir / "plots");
  std::vector<BenchmarkRecord> records;
  for (const auto& cell : result.cells) {
    records.push_back(cell.record);
    const auto id = cell_id(cell.record);
    std::string lines;
    for (const auto& m : cell.instances) lines += instance_to_json(m).dump() + "\n";
    write_file(dir / "per_instance" / (id + ".jsonl"), lines);
    write_file(dir / "plots" / (id + "_costs.csv"), plot_data_csv(cell));
  }
  write_file(dir / "records.csv", records_csv(records));
  write_file(dir / "records.json", records_json(records));
  json models = json::array();
  for (const auto& m : result.models) {
    models.push_back({{"dataset", m.dataset},
                      {"model", m.model_arch},
                      {"test_accuracy", m.test_accuracy},
                      {"train_seconds", m.train_seconds}});
  }
  write_file(dir / "models.json", models.dump(2) + "\n");
}

std::vector<BenchmarkRecord> read_records(const std::filesystem::path& dir) {
  const auto path = dir / "records.json";
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::vector<BenchmarkRecord> out;
  try {
    const json arr = json::parse(in);
    for (const auto& j : arr) out.push_back(record_from_json(j));
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed records.json: ") + e.what());
  }
  return out;
}

}  // namespace recourse
