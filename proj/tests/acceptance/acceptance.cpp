// Acceptance checks over the shipped catalog. Prints one PASS/FAIL line per
// criterion and exits non-zero if any fails.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "oracles.hpp"
#include "recourse/bench.hpp"
#include "recourse/catalog.hpp"
#include "recourse/dependent.hpp"
#include "recourse/evaluation.hpp"
#include "recourse/independent.hpp"

using namespace recourse;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  std::string id;
  bool pass = true;
  std::vector<std::string> notes;

  explicit Verdict(std::string name) : id(std::move(name)) {}
  void fail(const std::string& why) {
    pass = false;
    notes.push_back(why);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cell_name(const BenchmarkRecord& r) { return r.dataset + "/" + r.model_arch + "/" + r.method; }

// Index of a full catalog run by (dataset, model, method).
struct RunIndex {
  const RunResult* result = nullptr;
  std::map<std::string, const CellOutput*> cells;
  std::set<std::pair<std::string, std::string>> dataset_models;

  explicit RunIndex(const RunResult& r) : result(&r) {
    for (const auto& c : r.cells) {
      if (!c.record.cell_error.empty()) continue;
      cells[cell_name(c.record)] = &c;
      dataset_models.insert({c.record.dataset, c.record.model_arch});
    }
  }
  const CellOutput* find(const std::string& dataset, const std::string& arch, const std::string& method) const {
    const auto it = cells.find(dataset + "/" + arch + "/" + method);
    return it == cells.end() ? nullptr : it->second;
  }
  const ModelReport* model(const std::string& dataset, const std::string& arch) const {
    for (const auto& m : result->models) {
      if (m.dataset == dataset && m.model_arch == arch) return &m;
    }
    return nullptr;
  }
};

const std::vector<std::string> kAllMethods = {"wachter", "growing_spheres", "cem",      "dice",    "ar",      "ar_lime",
                                              "cem_vae", "revise",          "clue",     "face_eps", "face_knn"};

// --- C1 -------------------------------------------------------------------------------

Verdict check_c1(const RunIndex& idx, const std::vector<DatasetEntry>& catalog) {
  Verdict v("C1");
  struct Target {
    std::string dataset;
    double linear, mlp, tol;
    bool required;
  };
  const std::vector<Target> targets = {
      {"adult", 0.83, 0.84, 0.02, true}, {"gmc", 0.92, 0.93, 0.02, true}, {"compas", 0.84, 0.85, 0.03, false}};
  for (const auto& t : targets) {
    bool available = false;
    for (const auto& e : catalog) available = available || (e.name == t.dataset && e.available());
    if (!available) {
      if (t.required) v.fail(t.dataset + ": data not available");
      else v.note(t.dataset + ": data not available (optional)");
      continue;
    }
    for (const auto& [arch, target] : {std::pair{"linear", t.linear}, std::pair{"mlp", t.mlp}}) {
      const ModelReport* m = idx.model(t.dataset, arch);
      if (!m) {
        v.fail(fmt::format("{}/{}: not trained", t.dataset, arch));
        continue;
      }
      const bool ok = std::abs(m->test_accuracy - target) <= t.tol && m->train_seconds < 300.0;
      const std::string text = fmt::format("{}/{} acc {:.4f} (target {:.2f} +/- {:.2f}), {:.1f}s", t.dataset, arch,
                                           m->test_accuracy, target, t.tol, m->train_seconds);
      if (ok) v.note(text);
      else if (t.required) v.fail(text);
      else v.note(text + " [optional, outside band]");
    }
  }
  return v;
}

// --- C2 / C3 / C4 / C6 / C8 -----------------------------------------------------------

Verdict check_c2(const RunIndex& idx) {
  Verdict v("C2");
  for (const auto& [dataset, arch] : idx.dataset_models) {
    for (const std::string method : {"growing_spheres", "cem", "dice", "revise"}) {
      const auto* c = idx.find(dataset, arch, method);
      if (!c) {
        v.fail(fmt::format("{}/{}/{} missing", dataset, arch, method));
      } else if (c->record.success_rate != 1.0) {
        v.fail(fmt::format("{}/{}/{} success {:.2f}", dataset, arch, method, c->record.success_rate));
      }
    }
    if (arch == "linear") {
      const auto* c = idx.find(dataset, arch, "wachter");
      if (!c || c->record.success_rate < 0.95) {
        v.fail(fmt::format("{}/linear/wachter success {:.2f} < 0.95", dataset, c ? c->record.success_rate : 0.0));
      }
    }
  }
  const auto* ar = idx.find("adult", "mlp", "ar_lime");
  if (!ar) {
    v.fail("adult/mlp/ar_lime missing");
  } else {
    const double s = ar->record.success_rate;
    const std::string text = fmt::format("adult/mlp/ar_lime success {:.2f} (band [0.05, 0.6))", s);
    if (s >= 0.05 && s < 0.6) v.note(text);
    else v.fail(text);
  }
  return v;
}

Verdict check_c3(const RunIndex& idx) {
  Verdict v("C3");
  int checked = 0;
  for (const auto& [dataset, arch] : idx.dataset_models) {
    if (arch != "linear") continue;
    const auto* c = idx.find(dataset, arch, "ar");
    if (!c) {
      v.fail(dataset + "/linear/ar missing");
      continue;
    }
    ++checked;
    if (!c->record.redundancy || *c->record.redundancy != 0.0) {
      v.fail(fmt::format("{}/linear/ar redundancy {}", dataset,
                         c->record.redundancy ? fmt::format("{:.4f}", *c->record.redundancy) : "n/a"));
    }
  }
  if (checked == 0) v.fail("no linear cells");
  v.note(fmt::format("{} linear cells", checked));
  return v;
}

Verdict check_c4(const RunIndex& idx) {
  Verdict v("C4");
  const std::vector<std::string> dependent = {"revise", "clue", "face_eps", "face_knn"};
  const std::vector<std::string> independent = {"wachter", "growing_spheres", "cem"};
  auto mean_ynn = [&](const std::string& d, const std::string& a, const std::vector<std::string>& methods) {
    double sum = 0.0;
    int n = 0;
    for (const auto& m : methods) {
      const auto* c = idx.find(d, a, m);
      if (c && c->record.ynn) {
        sum += *c->record.ynn;
        ++n;
      }
    }
    return n > 0 ? std::optional<double>(sum / n) : std::nullopt;
  };
  for (const auto& [dataset, arch] : idx.dataset_models) {
    const auto dep = mean_ynn(dataset, arch, dependent);
    const auto ind = mean_ynn(dataset, arch, independent);
    if (!dep || !ind) {
      v.fail(fmt::format("{}/{}: yNN unavailable", dataset, arch));
      continue;
    }
    const std::string text = fmt::format("{}/{} dep {:.3f} vs indep {:.3f}", dataset, arch, *dep, *ind);
    if (*dep > *ind) v.note(text);
    else v.fail(text);
  }
  return v;
}

Verdict check_c6(const RunIndex& idx) {
  Verdict v("C6");
  for (const auto& [dataset, arch] : idx.dataset_models) {
    const auto* gs = idx.find(dataset, arch, "growing_spheres");
    if (!gs || !gs->record.avg_time_seconds) {
      v.fail(fmt::format("{}/{}: growing_spheres time missing", dataset, arch));
      continue;
    }
    const double t_gs = *gs->record.avg_time_seconds;
    for (const std::string m : {"wachter", "cem", "dice"}) {
      const auto* c = idx.find(dataset, arch, m);
      if (!c || !c->record.avg_time_seconds) {
        v.fail(fmt::format("{}/{}/{} time missing", dataset, arch, m));
        continue;
      }
      const double t = *c->record.avg_time_seconds;
      if (!(t_gs < t)) v.fail(fmt::format("{}/{}: gs {:.2e}s >= {} {:.2e}s", dataset, arch, t_gs, m, t));
    }
    for (const std::string m : {"face_eps", "face_knn"}) {
      const auto* c = idx.find(dataset, arch, m);
      if (!c) continue;
      // Graph build is reported as setup time, separate from per-instance time.
      if (!(c->record.setup_time_seconds > 0.0)) v.fail(fmt::format("{}/{}/{}: no setup time", dataset, arch, m));
      double per_instance = 0.0;
      for (const auto& inst : c->instances) per_instance += inst.wall_time_seconds;
      if (c->record.avg_time_seconds && c->instances.size() > 0 &&
          std::abs(per_instance / c->instances.size() - *c->record.avg_time_seconds) > 1e-9) {
        v.fail(fmt::format("{}/{}/{}: avg_time does not match per-instance times", dataset, arch, m));
      }
    }
  }
  return v;
}

struct RowSet {
  std::set<std::vector<double>> rows;
  explicit RowSet(const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const Vector r = m.row(i).transpose();
      rows.insert(std::vector<double>(r.data(), r.data() + r.size()));
    }
  }
  bool contains(const Vector& v) const { return rows.count(std::vector<double>(v.data(), v.data() + v.size())) > 0; }
};

Verdict check_c8(const RunIndex& idx, const std::vector<DatasetEntry>& catalog) {
  Verdict v("C8");
  std::map<std::string, RowSet> train_rows;
  bool dependent_violation = false;
  std::size_t successes = 0;
  for (const auto& c : idx.result->cells) {
    if (!c.record.cell_error.empty()) v.fail(cell_name(c.record) + ": " + c.record.cell_error);
  }
  for (const auto& [name, cell] : idx.cells) {
    const auto& r = cell->record;
    const ModelReport* m = idx.model(r.dataset, r.model_arch);
    if (!m || !m->model) {
      v.fail(name + ": model missing");
      continue;
    }
    for (const auto& inst : cell->instances) {
      if (!inst.success) continue;
      ++successes;
      if (!inst.counterfactual || !(m->model->predict_proba(*inst.counterfactual) > 0.5)) {
        v.fail(fmt::format("{} row {}: success without crossing theta", name, inst.row));
      }
    }
    if (r.method == "face_eps" || r.method == "face_knn") {
      if (!train_rows.count(r.dataset)) {
        train_rows.emplace(r.dataset, RowSet(prepare(find_entry(catalog, r.dataset)).train.matrix()));
      }
      const RowSet& rows = train_rows.at(r.dataset);
      for (const auto& inst : cell->instances) {
        if (inst.success && !rows.contains(*inst.counterfactual)) {
          v.fail(fmt::format("{} row {}: output is not a training row", name, inst.row));
        }
      }
    }
    const bool must_respect = r.method == "growing_spheres" || r.method == "ar" || r.method == "ar_lime" ||
                              r.method == "dice";
    if (must_respect && r.violation && *r.violation != 0.0) {
      v.fail(fmt::format("{}: violation {:.3f}", name, *r.violation));
    }
    if (r.family == "dependent" && r.violation) {
      if (*r.violation < 0.0) v.fail(name + ": negative violation");
      if (*r.violation > 0.0) dependent_violation = true;
    }
  }
  if (!dependent_violation) v.fail("no dependence-based cell with positive violation");
  v.note(fmt::format("{} successes checked", successes));
  return v;
}

// --- C5 -------------------------------------------------------------------------------

Verdict check_c5(const std::vector<DatasetEntry>& catalog) {
  Verdict v("C5");
  const DatasetEntry& entry = find_entry(catalog, "synthetic");
  if (!entry.synthetic || std::abs(entry.synthetic->correlation - 0.9) > 1e-12) {
    v.fail("synthetic catalog entry does not have correlation 0.9");
    return v;
  }
  const PreparedData data = prepare(entry);
  // Gradient dominated by x1.
  const auto model = std::make_shared<const LinearModel>(Vector{{8.0, 0.8}}, -4.4);
  const auto vae =
      train_vae(data.train, default_latent_dim(data.train.features()), VaeTrainConfig{}).vae;
  const NegativeCohort cohort = sample_negative_cohort(data.test.matrix(), *model, Threshold{}, 100, 0);
  if (cohort.instances.size() < 100) v.fail(fmt::format("only {} negatives", cohort.instances.size()));
  int revise_ok = 0, revise_both = 0, wachter_ok = 0, wachter_dominant = 0;
  for (const auto& x : cohort.instances) {
    const RecourseProblem p(model, x, data.train.schema());
    const auto r = revise(LatentProblem(p, vae));
    if (r.success()) {
      ++revise_ok;
      const Vector d = (*r.counterfactual - x).cwiseAbs();
      revise_both += d[0] > kChangeTolerance && d[1] > kChangeTolerance;
    }
    const auto w = wachter(p);
    if (w.success()) {
      ++wachter_ok;
      const Vector d = (*w.counterfactual - x).cwiseAbs();
      wachter_dominant += d[0] > kChangeTolerance && d[1] <= kChangeTolerance;
    }
  }
  const double rb = revise_ok > 0 ? static_cast<double>(revise_both) / revise_ok : 0.0;
  const double wd = wachter_ok > 0 ? static_cast<double>(wachter_dominant) / wachter_ok : 0.0;
  const std::string text = fmt::format("revise both-changed {:.2f} of {} successes, wachter dominant-only {:.2f} of {}",
                                       rb, revise_ok, wd, wachter_ok);
  if (rb >= 0.8 && wd >= 0.8) v.note(text);
  else v.fail(text);
  return v;
}

// --- C7 -------------------------------------------------------------------------------

Verdict check_c7() {
  Verdict v("C7");
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<oracle::Outcome()>>> suite = {
      {"a ar grid", [] { return oracle::ar_matches_brute_force(101, 300); }},
      {"b face paths", [] { return oracle::face_matches_brute_force(102, 60); }},
      {"c gs bound", [] { return oracle::gs_within_boundary_bound(103, 400); }},
      {"d classifier gradients", [] { return oracle::classifier_gradients(104, 200); }},
      {"d decoder gradients", [] { return oracle::decoder_gradients(105, 100); }},
      {"d entropy gradients", [] { return oracle::entropy_gradients(106, 100); }},
      {"e measure fixtures", [] { return oracle::measure_fixtures(); }},
  };
  for (const auto& [name, fn] : suite) {
    const auto out = fn();
    if (!out.pass) v.fail(name + ": " + out.detail);
  }
  const double elapsed = seconds_since(t0);
  v.note(fmt::format("suite {:.1f}s", elapsed));
  if (elapsed >= 600.0) v.fail("suite exceeded 10 minutes");
  return v;
}

// --- C9 -------------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// records.json and per-instance lines with timing fields nulled.
std::string untimed_outputs(const fs::path& dir) {
  using nlohmann::json;
  json records = json::parse(slurp(dir / "records.json"));
  for (auto& r : records) {
    r["avg_time_seconds"] = nullptr;
    r["setup_time_seconds"] = nullptr;
  }
  std::string out = records.dump() + "\n";
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir / "per_instance")) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    out += f.filename().string() + "\n";
    std::istringstream lines(slurp(f));
    for (std::string line; std::getline(lines, line);) {
      json j = json::parse(line);
      j["wall_time_seconds"] = nullptr;
      out += j.dump() + "\n";
    }
  }
  for (const auto& e : fs::directory_iterator(dir / "plots")) out += slurp(e.path());
  return out;
}

Verdict check_c9(const fs::path& catalog_dir, const fs::path& work_dir) {
  Verdict v("C9");
  RunConfig cfg;
  cfg.catalog_dir = catalog_dir;
  cfg.datasets = {"synthetic", "compas"};
  cfg.models = {Architecture::Linear, Architecture::Mlp};
  for (const auto& m : kAllMethods) cfg.methods.push_back({m, {}});
  cfg.cohort_size = 15;
  cfg.seed = 7;
  std::vector<std::string> outputs;
  for (const char* name : {"repro_a", "repro_b"}) {
    const fs::path dir = work_dir / name;
    fs::remove_all(dir);
    write_outputs(run(cfg), dir);
    outputs.push_back(untimed_outputs(dir));
  }
  if (outputs[0] != outputs[1]) v.fail("outputs differ between identical runs");
  v.note(fmt::format("{} bytes compared", outputs[0].size()));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work_dir = fs::temp_directory_path() / "recourse_acceptance";
  fs::path catalog_dir = fs::path(RECOURSE_SOURCE_DIR) / "data" / "catalog";
  std::size_t cohort = 100;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--work-dir") work_dir = argv[i + 1];
    else if (flag == "--catalog") catalog_dir = argv[i + 1];
    else if (flag == "--cohort") cohort = std::stoul(argv[i + 1]);
    else {
      fmt::print(stderr, "unknown flag {}\n", flag);
      return 2;
    }
  }
  fs::create_directories(work_dir);
  const auto catalog = load_catalog(catalog_dir);

  std::vector<Verdict> verdicts;
  auto report = [&](Verdict v) {
    fmt::print("{} {}", v.id, v.pass ? "PASS" : "FAIL");
    for (const auto& n : v.notes) fmt::print(" | {}", n);
    fmt::print("\n");
    std::fflush(stdout);
    verdicts.push_back(std::move(v));
  };

  RunConfig cfg;
  cfg.catalog_dir = catalog_dir;
  for (const auto& e : catalog) {
    if (e.available()) cfg.datasets.push_back(e.name);
  }
  cfg.models = {Architecture::Linear, Architecture::Mlp};
  for (const auto& m : kAllMethods) cfg.methods.push_back({m, {}});
  cfg.cohort_size = cohort;
  cfg.seed = 0;
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult result = run(cfg);
  write_outputs(result, work_dir / "catalog_run");
  fmt::print(stderr, "catalog run {:.1f}s\n", seconds_since(t0));
  const RunIndex idx(result);

  report(check_c1(idx, catalog));
  report(check_c2(idx));
  report(check_c3(idx));
  report(check_c4(idx));
  report(check_c5(catalog));
  report(check_c6(idx));
  report(check_c7());
  report(check_c8(idx, catalog));
  report(check_c9(catalog_dir, work_dir));

  int failed = 0;
  for (const auto& v : verdicts) failed += !v.pass;
  fmt::print("{}/{} criteria passed\n", verdicts.size() - failed, verdicts.size());
  return failed == 0 ? 0 : 1;
}
