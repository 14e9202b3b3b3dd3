#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "recourse/dependent.hpp"
#include "recourse/independent.hpp"
#include "recourse/model.hpp"
#include "recourse/vae.hpp"

namespace recourse::oracle {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// --- Random fixtures ----------------------------------------------------------

Schema continuous_schema(std::size_t d);
DenseLayer random_layer(std::size_t in, std::size_t out, double scale, std::mt19937_64& rng);
std::shared_ptr<const MlpModel> random_mlp(std::size_t d, std::mt19937_64& rng);
std::shared_ptr<const Vae> random_vae(std::size_t d, std::size_t k, std::size_t hidden, std::mt19937_64& rng);

// --- Numerics -----------------------------------------------------------------

Vector central_difference(const std::function<double(const Vector&)>& fn, const Vector& x, double h = 1e-5);
// ||a - b|| / max(||a||, ||b||), 0 when both vanish.
double relative_error(const Vector& a, const Vector& b);

// --- Actionable recourse ------------------------------------------------------

// Least l1 cost over every combination of per-feature grid offsets (k / steps
// for |k| <= 2 steps, binary flips) that stays within the action set and makes
// the score cross its threshold. nullopt when no combination does.
std::optional<double> brute_force_ar_cost(const RecourseProblem& p, const LinearScore& score, int grid_steps);

// Random linear problems in 2..4 dimensions with mixed feature types; the AR
// optimum must equal the exhaustive grid minimum.
Outcome ar_matches_brute_force(std::uint64_t seed, int problems);

// --- FACE ---------------------------------------------------------------------

// Least path cost from the factual to every node, found by enumerating all
// simple paths over neighbour sets recomputed from scratch.
std::vector<double> brute_force_path_costs(const RecourseGraph& g, const Vector& factual);

// 20-node graphs in both modes; FACE must return a positive node whose path cost
// equals the enumerated minimum.
Outcome face_matches_brute_force(std::uint64_t seed, int graphs);

// --- Growing spheres ------------------------------------------------------------

// Random 1-D and 2-D linear problems; ||cf - x||_2 must not exceed the exact
// distance to the decision boundary by more than 2 * step + 0.05.
Outcome gs_within_boundary_bound(std::uint64_t seed, int problems);

// --- Gradients ------------------------------------------------------------------

// Analytic gradients against central differences (h = 1e-5), relative error < 1e-4.
Outcome classifier_gradients(std::uint64_t seed, int points);
Outcome decoder_gradients(std::uint64_t seed, int points);
Outcome entropy_gradients(std::uint64_t seed, int points);

// --- Measures -------------------------------------------------------------------

// Hand-computed values for every evaluation measure.
Outcome measure_fixtures();

}  // namespace recourse::oracle
