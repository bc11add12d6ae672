#ifndef UIC_CONFIG_HPP_
#define UIC_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uic/gaussmix.hpp"
#include "uic/loss.hpp"
#include "uic/train.hpp"

namespace uic {

enum class Recipe {
  kBoundary,
  kAlphaSweep,
  kFCurve,
  kLimitCheck,
  kCAblation,
  kInfluenceDemo,
};

const char* recipe_name(Recipe r);
Recipe recipe_from_name(const std::string& name);

/// One experiment: a recipe, the synthetic task it runs on, the loss grid,
/// training settings and seeds. Parsed from a single versioned JSON document;
/// serialization is canonical (sorted keys, shortest round-trip numbers) so
/// configs hash deterministically.
struct ExperimentConfig {
  int version = 1;
  Recipe recipe = Recipe::kFCurve;

  // Task; filled by a preset name or given explicitly.
  double pi = 1.0 / 501.0;
  GaussianMixture minority = GaussianMixture::Single(
      Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  GaussianMixture majority = GaussianMixture::Single(
      Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  std::size_t n_minority = 200;
  std::size_t n_majority = 100000;

  std::vector<LossSpec> losses;
  TrainConfig train;
  std::vector<std::uint64_t> seeds = {1};

  std::vector<double> alpha_grid;  // alpha-sweep
  std::vector<double> c_grid;      // c-ablation
  double tbl_alpha = 0.8;          // c-ablation alpha
  std::vector<double> t_grid;      // fcurve
  std::vector<double> pi_grid;     // fcurve
  std::vector<double> limit_alphas = {0.5};
  std::size_t n_eval = 0;          // 0 = exact mixture AUC, else empirical
  std::size_t influence_n = 200;

  std::string output_dir = "out";

  Task make_task(const LossSpec& loss) const;
  void validate() const;  // throws ConfigError with field paths
};

/// Built-in presets: "fig1" (one anisotropic minority cluster vs an isotropic
/// majority, ratio 1:1000, 200 minority samples) and "fig3" (the two-cluster
/// 2-D setup at ratio 1:500 with 200 minority samples).
ExperimentConfig preset_config(const std::string& name);
ExperimentConfig default_config_for(Recipe recipe);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical JSON form; parse(serialize(parse(x))) == parse(x) and the
/// serialization is byte-stable.
std::string serialize_config(const ExperimentConfig& cfg);

/// FNV-1a 64-bit hash of the canonical serialization, as fixed-width hex.
std::string config_hash(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace uic

#endif  // UIC_CONFIG_HPP_
