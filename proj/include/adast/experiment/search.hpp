#pragma once

#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "adast/model/hyperparams.hpp"

namespace adast::experiment {

struct SearchTrial {
    std::size_t index = 0;
    model::HyperParams hyperparams;
    std::vector<double> fold_scores;  // validation RMSE per fold
    double mean_score = std::numeric_limits<double>::quiet_NaN();
    bool failed = false;
    std::string error;
};

struct SearchResult {
    model::HyperParams best;
    std::size_t best_index = 0;
    std::vector<SearchTrial> trials;
};

/// Evaluates one hyperparameter point across all folds; returns one score per fold.
using FoldRunner = std::function<std::vector<double>(const model::HyperParams&, std::size_t trial)>;

/// Independent uniform draws from the space. A trial that throws is logged
/// and skipped; the winner has the lowest mean fold score.
inline SearchResult random_search(const model::SearchSpace& space, std::size_t n_trials, const FoldRunner& runner,
                                  Rng& rng) {
    if (n_trials < 1) throw ParameterError("random_search: n_trials must be at least 1");
    SearchResult result;
    double best = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t t = 0; t < n_trials; ++t) {
        SearchTrial trial;
        trial.index = t;
        trial.hyperparams = space.sample(rng);
        try {
            trial.fold_scores = runner(trial.hyperparams, t);
            if (trial.fold_scores.empty()) throw Error("trial produced no fold scores");
            trial.mean_score = std::accumulate(trial.fold_scores.begin(), trial.fold_scores.end(), 0.0) /
                               static_cast<double>(trial.fold_scores.size());
            if (!std::isfinite(trial.mean_score)) throw Error("non-finite trial score");
            if (trial.mean_score < best) {
                best = trial.mean_score;
                result.best = trial.hyperparams;
                result.best_index = t;
                found = true;
            }
        } catch (const std::exception& e) {
            trial.failed = true;
            trial.error = e.what();
        }
        result.trials.push_back(std::move(trial));
    }
    if (!found) throw Error("random_search: every trial failed");
    return result;
}

}  // namespace adast::experiment
