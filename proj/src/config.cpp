#include "uic/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "uic/errors.hpp"

namespace uic {

using nlohmann::json;

namespace {

// nlohmann::json objects keep keys sorted, which gives canonical dumps.

json mixture_to_json(const GaussianMixture& mix) {
  json j;
  j["weights"] = mix.weights();
  json means = json::array();
  json covs = json::array();
  for (int i = 0; i < mix.components(); ++i) {
    json mean = json::array();
    for (Eigen::Index k = 0; k < mix.mean(i).size(); ++k)
      mean.push_back(mix.mean(i)(k));
    means.push_back(mean);
    json cov = json::array();
    for (Eigen::Index r = 0; r < mix.covariance(i).rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < mix.covariance(i).cols(); ++c)
        row.push_back(mix.covariance(i)(r, c));
      cov.push_back(row);
    }
    covs.push_back(cov);
  }
  j["means"] = means;
  j["covariances"] = covs;
  return j;
}

GaussianMixture mixture_from_json(const json& j, const std::string& path) {
  try {
    std::vector<double> weights = j.at("weights").get<std::vector<double>>();
    std::vector<Eigen::VectorXd> means;
    std::vector<Eigen::MatrixXd> covs;
    for (const auto& m : j.at("means")) {
      Eigen::VectorXd mean(m.size());
      for (std::size_t k = 0; k < m.size(); ++k)
        mean(static_cast<Eigen::Index>(k)) = m[k].get<double>();
      means.push_back(mean);
    }
    for (const auto& c : j.at("covariances")) {
      const std::size_t rows = c.size();
      Eigen::MatrixXd cov(rows, rows ? c[0].size() : 0);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < c[r].size(); ++k)
          cov(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
              c[r][k].get<double>();
      covs.push_back(cov);
    }
    return GaussianMixture(std::move(weights), std::move(means),
                           std::move(covs));
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json loss_to_json(const LossSpec& spec) {
  json j;
  j["family"] = family_name(spec.family);
  switch (spec.family) {
    case Family::kFocal:
      j["gamma"] = spec.gamma;
      break;
    case Family::kPoly:
      j["epsilon"] = spec.epsilon;
      break;
    case Family::kVectorScaling:
      j["delta1"] = spec.delta1;
      break;
    case Family::kAlpha:
      j["alpha"] = spec.alpha;
      break;
    case Family::kTunableBoosting:
      j["alpha"] = spec.alpha;
      j["C"] = spec.cpen;
      break;
    default:
      break;
  }
  return j;
}

LossSpec loss_from_json(const json& j, const std::string& path) {
  try {
    LossSpec spec;
    spec.family = family_from_name(j.at("family").get<std::string>());
    if (j.contains("gamma")) spec.gamma = j["gamma"].get<double>();
    if (j.contains("epsilon")) spec.epsilon = j["epsilon"].get<double>();
    if (j.contains("delta1")) spec.delta1 = j["delta1"].get<double>();
    if (j.contains("alpha")) spec.alpha = j["alpha"].get<double>();
    if (j.contains("C")) spec.cpen = j["C"].get<double>();
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Optimizer optimizer_from_name(const std::string& s, const std::string& path) {
  if (s == "sgd") return Optimizer::kSgd;
  if (s == "full-batch") return Optimizer::kFullBatchGd;
  throw ConfigError(path + ": unknown optimizer '" + s + "'");
}

InitScheme init_from_name(const std::string& s, const std::string& path) {
  if (s == "zeros") return InitScheme::kZeros;
  if (s == "logit-adjusted") return InitScheme::kLogitAdjusted;
  throw ConfigError(path + ": unknown init '" + s + "'");
}

}  // namespace

const char* recipe_name(Recipe r) {
  switch (r) {
    case Recipe::kBoundary:
      return "boundary";
    case Recipe::kAlphaSweep:
      return "alpha-sweep";
    case Recipe::kFCurve:
      return "fcurve";
    case Recipe::kLimitCheck:
      return "limit-check";
    case Recipe::kCAblation:
      return "c-ablation";
    case Recipe::kInfluenceDemo:
      return "influence";
  }
  return "?";
}

Recipe recipe_from_name(const std::string& name) {
  for (Recipe r : {Recipe::kBoundary, Recipe::kAlphaSweep, Recipe::kFCurve,
                   Recipe::kLimitCheck, Recipe::kCAblation,
                   Recipe::kInfluenceDemo})
    if (name == recipe_name(r)) return r;
  throw ConfigError("recipe: unknown recipe '" + name + "'");
}

Task ExperimentConfig::make_task(const LossSpec& loss) const {
  return Task(pi, minority, majority, loss);
}

void ExperimentConfig::validate() const {
  if (version != 1) throw ConfigError("version: only version 1 is supported");
  if (!(pi > 0.0 && pi <= 0.5))
    throw ConfigError("task.pi: must lie in (0, 0.5]");
  if (minority.dim() != majority.dim())
    throw ConfigError("task: class conditionals must share a dimension");
  if (seeds.empty()) throw ConfigError("seeds: must be nonempty");
  try {
    for (const LossSpec& l : losses) l.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("losses: ") + e.what());
  }
  if (!(train.lr > 0.0)) throw ConfigError("train.lr: must be > 0");
  if (train.epochs < 1) throw ConfigError("train.epochs: must be >= 1");
  if (train.batch_size < 1)
    throw ConfigError("train.batch_size: must be >= 1");
  for (double a : alpha_grid)
    if (!(a > 0.0 && a <= 1.0))
      throw ConfigError("alpha_grid: entries must lie in (0, 1]");
  for (double c : c_grid)
    if (!(c >= 0.0)) throw ConfigError("c_grid: entries must be >= 0");
  for (double a : limit_alphas)
    if (!(a > 0.0 && a < 1.0))
      throw ConfigError("limit.alphas: entries must lie in (0, 1)");
  if (output_dir.empty()) throw ConfigError("output: must be nonempty");
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig cfg;
  if (name == "fig3") {
    // Two anisotropic minority clusters against two isotropic majority
    // clusters, ratio 1:500, 200 minority samples.
    cfg.pi = 1.0 / 501.0;
    cfg.n_minority = 200;
    cfg.n_majority = 100000;
    Eigen::VectorXd mp1(2), mp2(2), mm1(2), mm2(2);
    mp1 << -2.0, 2.0;
    mp2 << -2.0, -2.0;
    mm1 << 2.0, 2.0;
    mm2 << 2.0, -2.0;
    Eigen::MatrixXd cp1(2, 2), cp2(2, 2);
    cp1 << 0.5, 0.0, 0.0, 5.0;
    cp2 << 5.0, 0.0, 0.0, 0.5;
    cfg.minority = GaussianMixture({0.5, 0.5}, {mp1, mp2}, {cp1, cp2});
    cfg.majority =
        GaussianMixture({0.5, 0.5}, {mm1, mm2},
                        {Eigen::MatrixXd::Identity(2, 2),
                         Eigen::MatrixXd::Identity(2, 2)});
    return cfg;
  }
  if (name == "fig1") {
    // One minority cluster elongated at 45 degrees against an isotropic
    // majority, ratio 1:1000, 200 minority samples.
    cfg.pi = 1.0 / 1001.0;
    cfg.n_minority = 200;
    cfg.n_majority = 200000;
    Eigen::VectorXd mp(2), mm(2);
    mp << -2.0, 0.0;
    mm << 2.0, 0.0;
    Eigen::MatrixXd cp(2, 2);
    cp << 2.75, 2.25, 2.25, 2.75;  // rot(45) diag(5, 0.5) rot(45)'
    cfg.minority = GaussianMixture::Single(mp, cp);
    cfg.majority =
        GaussianMixture::Single(mm, Eigen::MatrixXd::Identity(2, 2));
    return cfg;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

ExperimentConfig default_config_for(Recipe recipe) {
  ExperimentConfig cfg =
      preset_config(recipe == Recipe::kBoundary ? "fig3" : "fig3");
  cfg.recipe = recipe;
  cfg.seeds = {1, 2, 3};
  switch (recipe) {
    case Recipe::kBoundary:
      cfg.losses = {LossSpec::CrossEntropy(), LossSpec::Focal(2.0),
                    LossSpec::Poly(0.5), LossSpec::VectorScaling(0.5),
                    LossSpec::Alpha(0.5)};
      cfg.seeds = {1};
      break;
    case Recipe::kAlphaSweep:
      for (int i = 0; i < 12; ++i)
        cfg.alpha_grid.push_back(0.1 + 0.8 * i / 11.0);
      break;
    case Recipe::kFCurve:
      cfg.losses = {LossSpec::CrossEntropy(), LossSpec::Square(),
                    LossSpec::Focal(2.0),     LossSpec::Poly(0.25),
                    LossSpec::VectorScaling(0.5), LossSpec::Alpha(0.5),
                    LossSpec::TunableBoosting(0.8, 0.5)};
      cfg.seeds = {1};
      break;
    case Recipe::kLimitCheck:
      cfg.limit_alphas = {0.5, 0.7, 0.9};
      cfg.seeds = {1};
      break;
    case Recipe::kCAblation:
      cfg.c_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
      cfg.tbl_alpha = 0.8;
      break;
    case Recipe::kInfluenceDemo:
      cfg.losses = {LossSpec::Alpha(0.5)};
      cfg.influence_n = 200;
      cfg.seeds = {1};
      break;
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("preset")) cfg = preset_config(j["preset"].get<std::string>());
    if (j.contains("version")) cfg.version = j["version"].get<int>();
    if (j.contains("recipe"))
      cfg.recipe = recipe_from_name(j["recipe"].get<std::string>());
    if (j.contains("task")) {
      const json& t = j["task"];
      if (t.contains("pi")) cfg.pi = t["pi"].get<double>();
      if (t.contains("ratio")) {
        const double ratio = t["ratio"].get<double>();
        if (!(ratio >= 1.0))
          throw ConfigError("task.ratio: must be >= 1 (majority:minority)");
        cfg.pi = 1.0 / (1.0 + ratio);
      }
      if (t.contains("minority"))
        cfg.minority = mixture_from_json(t["minority"], "task.minority");
      if (t.contains("majority"))
        cfg.majority = mixture_from_json(t["majority"], "task.majority");
    }
    if (j.contains("counts")) {
      cfg.n_minority = j["counts"].at("n_minority").get<std::size_t>();
      cfg.n_majority = j["counts"].at("n_majority").get<std::size_t>();
    }
    if (j.contains("losses")) {
      cfg.losses.clear();
      std::size_t i = 0;
      for (const auto& l : j["losses"])
        cfg.losses.push_back(
            loss_from_json(l, "losses[" + std::to_string(i++) + "]"));
    }
    if (j.contains("train")) {
      const json& t = j["train"];
      if (t.contains("optimizer"))
        cfg.train.optimizer = optimizer_from_name(
            t["optimizer"].get<std::string>(), "train.optimizer");
      if (t.contains("lr")) cfg.train.lr = t["lr"].get<double>();
      if (t.contains("momentum"))
        cfg.train.momentum = t["momentum"].get<double>();
      if (t.contains("epochs")) cfg.train.epochs = t["epochs"].get<int>();
      if (t.contains("batch_size"))
        cfg.train.batch_size = t["batch_size"].get<int>();
      if (t.contains("init"))
        cfg.train.init =
            init_from_name(t["init"].get<std::string>(), "train.init");
    }
    if (j.contains("seeds"))
      cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    if (j.contains("alpha_grid"))
      cfg.alpha_grid = j["alpha_grid"].get<std::vector<double>>();
    if (j.contains("c_grid"))
      cfg.c_grid = j["c_grid"].get<std::vector<double>>();
    if (j.contains("tbl_alpha")) cfg.tbl_alpha = j["tbl_alpha"].get<double>();
    if (j.contains("fcurve")) {
      const json& f = j["fcurve"];
      if (f.contains("t_grid"))
        cfg.t_grid = f["t_grid"].get<std::vector<double>>();
      if (f.contains("pi_grid"))
        cfg.pi_grid = f["pi_grid"].get<std::vector<double>>();
    }
    if (j.contains("limit") && j["limit"].contains("alphas"))
      cfg.limit_alphas = j["limit"]["alphas"].get<std::vector<double>>();
    if (j.contains("n_eval")) cfg.n_eval = j["n_eval"].get<std::size_t>();
    if (j.contains("influence_n"))
      cfg.influence_n = j["influence_n"].get<std::size_t>();
    if (j.contains("output")) cfg.output_dir = j["output"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json j;
  j["version"] = cfg.version;
  j["recipe"] = recipe_name(cfg.recipe);
  j["task"]["pi"] = cfg.pi;
  j["task"]["minority"] = mixture_to_json(cfg.minority);
  j["task"]["majority"] = mixture_to_json(cfg.majority);
  j["counts"]["n_minority"] = cfg.n_minority;
  j["counts"]["n_majority"] = cfg.n_majority;
  json losses = json::array();
  for (const LossSpec& l : cfg.losses) losses.push_back(loss_to_json(l));
  j["losses"] = losses;
  j["train"]["optimizer"] =
      cfg.train.optimizer == Optimizer::kSgd ? "sgd" : "full-batch";
  j["train"]["lr"] = cfg.train.lr;
  j["train"]["momentum"] = cfg.train.momentum;
  j["train"]["epochs"] = cfg.train.epochs;
  j["train"]["batch_size"] = cfg.train.batch_size;
  j["train"]["init"] = cfg.train.init == InitScheme::kLogitAdjusted
                           ? "logit-adjusted"
                           : "zeros";
  j["seeds"] = cfg.seeds;
  if (!cfg.alpha_grid.empty()) j["alpha_grid"] = cfg.alpha_grid;
  if (!cfg.c_grid.empty()) {
    j["c_grid"] = cfg.c_grid;
    j["tbl_alpha"] = cfg.tbl_alpha;
  }
  if (!cfg.t_grid.empty()) j["fcurve"]["t_grid"] = cfg.t_grid;
  if (!cfg.pi_grid.empty()) j["fcurve"]["pi_grid"] = cfg.pi_grid;
  j["limit"]["alphas"] = cfg.limit_alphas;
  if (cfg.n_eval) j["n_eval"] = cfg.n_eval;
  j["influence_n"] = cfg.influence_n;
  j["output"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

std::uint64_t fnv1a64(const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(bytes.data(), bytes.size())));
  return buf;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return fnv1a64_hex(serialize_config(cfg));
}

}  // namespace uic
