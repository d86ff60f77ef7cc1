#pragma once

#include "sli/model.hpp"
#include "sli/particle_system.hpp"
#include "sli/rng.hpp"

#include <cstdint>
#include <vector>

namespace sli {

/// A local-intensity path has the same shape as a particle path record.
using LiPath = PathRecord;

/// Unit-jump Markov chain with rate lambda(t-, x), sampled by thinning a
/// rate-lambda_bar Poisson clock. Stops at the horizon or at level M.
LiPath simulate_li_path(const Model& model, int x0, Rng& rng);

/// n_paths independent LI paths; path p uses stream (seed, p, Role::path).
std::vector<LiPath> simulate_li_paths(const Model& model, std::size_t n_paths, int x0,
                                      std::uint64_t seed, int threads = 0);

/// Binomial(M, 1 - exp(-lambda_bar t / M)) pmf at k: the exact law of X_t
/// for the linear-decay family started at 0. Throws DomainError for tables.
double binomial_oracle(const LocalIntensity& li, double t, int k);

/// The whole oracle pmf over {0..M}.
std::vector<double> binomial_oracle_pmf(const LocalIntensity& li, double t);

}  // namespace sli
