#ifndef UIC_RECIPES_HPP_
#define UIC_RECIPES_HPP_

#include <string>
#include <vector>

#include "uic/config.hpp"
#include "uic/csvio.hpp"

namespace uic {

struct RecipeOutcome {
  std::vector<ResultRow> rows;
  std::vector<std::string> output_files;  // relative to the output directory
  std::vector<std::string> failures;      // empty on full success
};

/// Runs the configured recipe. Independent (seed, hyperparameter) cells run
/// on up to `threads` workers; every file and CSV row is computed from
/// seed-derived substreams and written after the join in canonical order, so
/// outputs are byte-identical regardless of the thread count. Cells that
/// fail are recorded in the failure list; completed rows are still written
/// together with a manifest carrying per-file content hashes.
RecipeOutcome run_recipe(const ExperimentConfig& cfg, int threads = 1,
                         bool quiet = true);

}  // namespace uic

#endif  // UIC_RECIPES_HPP_
