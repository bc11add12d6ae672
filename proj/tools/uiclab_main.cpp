#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uic/bayes.hpp"
#include "uic/config.hpp"
#include "uic/errors.hpp"
#include "uic/loss.hpp"
#include "uic/recipes.hpp"
#include "uic/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  bool quiet = false;
};

uic::ExperimentConfig resolve_config(const GlobalFlags& flags,
                                     uic::Recipe recipe) {
  uic::ExperimentConfig cfg = flags.config_path.empty()
                                  ? uic::default_config_for(recipe)
                                  : uic::load_config(flags.config_path);
  cfg.recipe = recipe;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed) cfg.seeds = {*flags.seed};
  cfg.validate();
  return cfg;
}

int run(const GlobalFlags& flags, uic::Recipe recipe) {
  const uic::ExperimentConfig cfg = resolve_config(flags, recipe);
  if (!flags.quiet)
    std::fprintf(stderr, "[uiclab] running %s -> %s (config %s)\n",
                 uic::recipe_name(recipe), cfg.output_dir.c_str(),
                 uic::config_hash(cfg).c_str());
  const uic::RecipeOutcome outcome =
      uic::run_recipe(cfg, flags.threads, flags.quiet);
  if (!flags.quiet)
    std::fprintf(stderr, "[uiclab] wrote %zu files, %zu rows\n",
                 outcome.output_files.size(), outcome.rows.size());
  if (!outcome.failures.empty()) {
    for (const std::string& f : outcome.failures)
      std::fprintf(stderr, "[uiclab] FAILED %s\n", f.c_str());
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uiclab: losses, f-functions and limiting linear classifiers "
               "for ultra-imbalanced classification"};
  app.set_version_flag("--version", uic::kVersion);
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path,
                 "JSON experiment config (defaults per recipe)");
  app.add_option("--out", flags.out_dir, "output directory override");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value,
                                  "replace the config seed list");
  app.add_option("--threads", flags.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  app.add_flag("--quiet", flags.quiet, "suppress progress output");

  app.add_subcommand("boundary", "decision boundaries per loss (fig 1/3)");
  app.add_subcommand("alpha-sweep", "AUC against alpha (fig 2)");
  app.add_subcommand("fcurve", "exact vs limiting f-functions (table 1)");
  app.add_subcommand("limit-check", "limiting-classifier solvers (thm 1)");
  app.add_subcommand("c-ablation", "tunable-boosting C sweep (fig 4)");
  app.add_subcommand("influence", "influence diagnostics demo (thm 3)");

  auto* losses_cmd = app.add_subcommand("losses", "loss evaluation helpers");
  auto* eval_cmd = losses_cmd->add_subcommand("eval", "evaluate one loss");
  std::string family = "ce";
  double gamma = 2.0, epsilon = 1.0, delta1 = 0.5, alpha = 0.5, cpen = 0.0;
  int y = 1;
  double etahat = 0.5;
  std::optional<double> eta, margin;
  eval_cmd->add_option("--family", family, "ce|square|erf|focal|poly|vs|alpha|tbl");
  eval_cmd->add_option("--gamma", gamma, "focal gamma");
  eval_cmd->add_option("--epsilon", epsilon, "poly epsilon");
  eval_cmd->add_option("--delta1", delta1, "vs delta1");
  eval_cmd->add_option("--alpha", alpha, "alpha / tbl alpha");
  eval_cmd->add_option("--C", cpen, "tbl penalty C");
  eval_cmd->add_option("--y", y, "label in {0,1}");
  eval_cmd->add_option("--etahat", etahat, "probability estimate");
  double eta_value = 0.0, margin_value = 0.0;
  auto* eta_opt = eval_cmd->add_option("--eta", eta_value,
                                       "also print pointwise/Bayes risk");
  auto* margin_opt =
      eval_cmd->add_option("--margin", margin_value, "also print margin form");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) flags.seed = seed_value;
  if (eta_opt->count() > 0) eta = eta_value;
  if (margin_opt->count() > 0) margin = margin_value;

  try {
    if (app.got_subcommand("losses")) {
      if (!losses_cmd->got_subcommand("eval")) {
        std::fprintf(stderr, "usage: uiclab losses eval ...\n");
        return kExitConfig;
      }
      uic::LossSpec spec;
      spec.family = uic::family_from_name(family);
      spec.gamma = gamma;
      spec.epsilon = epsilon;
      spec.delta1 = delta1;
      spec.alpha = alpha;
      spec.cpen = cpen;
      spec.validate();
      std::printf("family,%s\n", spec.label().c_str());
      std::printf("value,%.17g\n", uic::loss_value(spec, y, etahat));
      std::printf("grad,%.17g\n", uic::loss_grad(spec, y, etahat));
      std::printf("hess,%.17g\n", uic::loss_hess(spec, y, etahat));
      if (eta) {
        std::printf("pointwise_risk,%.17g\n",
                    uic::pointwise_risk_value(spec, *eta, etahat));
        const uic::BayesRiskResult bayes =
            uic::pointwise_bayes_risk(spec, *eta);
        std::printf("bayes_risk,%.17g\n", bayes.value);
        std::printf("bayes_minimizer,%.17g\n", bayes.minimizer);
      }
      if (margin) {
        std::printf("margin_value,%.17g\n",
                    uic::margin_loss_value(spec, y == 1 ? 1 : -1, *margin));
        std::printf("margin_grad,%.17g\n",
                    uic::margin_loss_grad(spec, y == 1 ? 1 : -1, *margin));
      }
      return kExitOk;
    }
    for (uic::Recipe recipe :
         {uic::Recipe::kBoundary, uic::Recipe::kAlphaSweep,
          uic::Recipe::kFCurve, uic::Recipe::kLimitCheck,
          uic::Recipe::kCAblation, uic::Recipe::kInfluenceDemo}) {
      if (app.got_subcommand(uic::recipe_name(recipe)))
        return run(flags, recipe);
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitConfig;
  } catch (const uic::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const uic::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const uic::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kExitNumerical;
  }
}
