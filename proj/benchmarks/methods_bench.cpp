#include <benchmark/benchmark.h>

#include <memory>

#include "recourse/dataset.hpp"
#include "recourse/dependent.hpp"
#include "recourse/evaluation.hpp"
#include "recourse/independent.hpp"
#include "recourse/model.hpp"

using namespace recourse;

namespace {

struct Fixture {
  EncodedDataset data = minmax_scale(synthetic_generate(2000, 0.9, 0));
  std::shared_ptr<const Classifier> mlp;
  std::shared_ptr<const Vae> vae;
  Vector factual;

  Fixture() {
    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.batch_size = 64;
    cfg.learning_rate = 0.01;
    mlp = train(Architecture::Mlp, data, cfg).model;
    vae = train_vae(data, 2, VaeTrainConfig{}).vae;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      if (mlp->predict_proba(data.row(i)) < 0.3) {
        factual = data.row(i);
        break;
      }
    }
  }
  RecourseProblem problem() const { return RecourseProblem(mlp, factual, data.schema()); }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_PredictProba(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(f.mlp->predict_proba(f.factual));
}
BENCHMARK(BM_PredictProba);

void BM_Wachter(benchmark::State& state) {
  const auto p = fixture().problem();
  for (auto _ : state) benchmark::DoNotOptimize(wachter(p));
}
BENCHMARK(BM_Wachter);

void BM_GrowingSpheres(benchmark::State& state) {
  const auto p = fixture().problem();
  for (auto _ : state) benchmark::DoNotOptimize(growing_spheres(p));
}
BENCHMARK(BM_GrowingSpheres);

void BM_Cem(benchmark::State& state) {
  const auto p = fixture().problem();
  for (auto _ : state) benchmark::DoNotOptimize(cem(p));
}
BENCHMARK(BM_Cem);

void BM_Dice(benchmark::State& state) {
  const auto p = fixture().problem();
  for (auto _ : state) benchmark::DoNotOptimize(dice_single(p));
}
BENCHMARK(BM_Dice);

void BM_ArLime(benchmark::State& state) {
  const auto p = fixture().problem();
  for (auto _ : state) benchmark::DoNotOptimize(ar_lime(p));
}
BENCHMARK(BM_ArLime);

void BM_Revise(benchmark::State& state) {
  const auto& f = fixture();
  const LatentProblem lp(f.problem(), f.vae);
  for (auto _ : state) benchmark::DoNotOptimize(revise(lp));
}
BENCHMARK(BM_Revise);

void BM_FaceGraphBuild(benchmark::State& state) {
  const auto& f = fixture();
  FaceParams params;
  params.max_graph_nodes = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(f.data, *f.mlp, params));
}
BENCHMARK(BM_FaceGraphBuild)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FaceQuery(benchmark::State& state) {
  const auto& f = fixture();
  const auto g = build_graph(f.data, *f.mlp, FaceParams{});
  const auto p = f.problem();
  for (auto _ : state) benchmark::DoNotOptimize(face(p, g));
}
BENCHMARK(BM_FaceQuery);

void BM_Ynn(benchmark::State& state) {
  const auto& f = fixture();
  const std::vector<Vector> cfs(10, f.factual);
  for (auto _ : state) benchmark::DoNotOptimize(ynn(cfs, *f.mlp, f.data.matrix(), 5));
}
BENCHMARK(BM_Ynn);

}  // namespace

BENCHMARK_MAIN();
