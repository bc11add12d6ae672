#include "uic/recipes.hpp"

#include <Eigen/Eigenvalues>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "uic/bayes.hpp"
#include "uic/diagnostics.hpp"
#include "uic/errors.hpp"
#include "uic/limits.hpp"
#include "uic/math.hpp"
#include "uic/train.hpp"
#include "uic/version.hpp"

namespace uic {
namespace {

namespace fs = std::filesystem;

struct CellResult {
  std::vector<ResultRow> rows;
  // filename -> content; written after the parallel join, sorted by name.
  std::vector<std::pair<std::string, std::string>> files;
};

using Cell = std::function<CellResult()>;

std::vector<std::optional<CellResult>> run_cells(
    const std::vector<Cell>& cells, int threads,
    std::vector<std::string>& failures, bool quiet) {
  std::vector<std::optional<CellResult>> results(cells.size());
  std::vector<std::string> errors(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        results[i] = cells[i]();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(threads, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!results[i]) {
      failures.push_back("cell " + std::to_string(i) + ": " + errors[i]);
      if (!quiet)
        std::fprintf(stderr, "[uiclab] cell %zu failed: %s\n", i,
                     errors[i].c_str());
    }
  }
  return results;
}

std::string curve_to_string(const std::vector<CurvePoint>& pts) {
  std::ostringstream out;
  out << "x,mean,std,n_seeds\n";
  for (const CurvePoint& p : pts)
    out << format_double(p.x) << "," << format_double(p.mean) << ","
        << format_double(p.std) << "," << p.n_seeds << "\n";
  return out.str();
}

std::string boundary_to_string(const std::vector<Eigen::Vector2d>& points) {
  std::ostringstream out;
  out << "x1,x2\n";
  for (const Eigen::Vector2d& p : points)
    out << format_double(p(0)) << "," << format_double(p(1)) << "\n";
  return out.str();
}

// Aggregates per-seed values into mean/std curve points.
CurvePoint aggregate(double x, const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var = values.size() > 1 ? var / (n - 1.0) : 0.0;
  return {x, mean, std::sqrt(var), static_cast<int>(values.size())};
}

Eigen::VectorXd leading_eigenvector(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvectors().col(m.rows() - 1);
}

double unit_projection(const Eigen::VectorXd& v, const Eigen::VectorXd& axis) {
  if (v.norm() == 0.0) return 0.0;
  return std::abs(v.normalized().dot(axis.normalized()));
}

TrainConfig cell_train_config(const ExperimentConfig& cfg,
                              std::uint64_t seed) {
  TrainConfig t = cfg.train;
  t.seed = seed;
  return t;
}

std::uint64_t eval_seed(std::uint64_t seed) {
  return seed ^ 0xE7A1u;  // disjoint from the training-data stream
}

// ---- boundary (one dataset per seed, every loss trained on it) ----

CellResult boundary_cell(const ExperimentConfig& cfg, std::uint64_t seed) {
  CellResult cell;
  const Task base = cfg.make_task(LossSpec::CrossEntropy());
  const Dataset data =
      sample_fixed_counts(base, cfg.n_minority, cfg.n_majority, seed);

  // Leading axis of the empirical minority scatter; the alpha boundary is
  // expected to rotate toward it while the cross-entropy-like boundaries
  // stay put.
  Eigen::MatrixXd minority_x(data.y.sum(), data.dim());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if (data.y(i) == 1) minority_x.row(r++) = data.x.row(i);
  const Eigen::RowVectorXd mean = minority_x.colwise().mean();
  const Eigen::MatrixXd centered = minority_x.rowwise() - mean;
  const Eigen::MatrixXd scatter =
      centered.transpose() * centered / static_cast<double>(r - 1);
  const Eigen::VectorXd lead = leading_eigenvector(scatter);

  std::optional<LinearClassifier> ce_clf;
  for (const LossSpec& spec : cfg.losses) {
    const TrainResult fit =
        fit_linear(data, spec, cell_train_config(cfg, seed));
    const LinearClassifier& clf = fit.classifier;
    const std::string fam = family_name(spec.family);
    const std::string params = spec.label();
    auto put = [&](const std::string& metric, double value) {
      cell.rows.push_back(
          {"boundary", seed, fam, params, metric, value});
    };
    for (Eigen::Index k = 0; k < clf.w.size(); ++k)
      put("w" + std::to_string(k), clf.w(k));
    put("b", clf.b);
    put("auc_exact", mixture_auc(cfg.minority, cfg.majority, clf.w));
    put("normal_proj_minority_lead", unit_projection(clf.w, lead));
    put("grad_norm_final", fit.grad_norm_final);
    if (spec.family == Family::kCrossEntropy) ce_clf = clf;
    if (data.dim() == 2) {
      char name[128];
      std::snprintf(name, sizeof(name), "boundary_%s_s%llu.csv",
                    params.c_str(), static_cast<unsigned long long>(seed));
      cell.files.emplace_back(
          name, boundary_to_string(decision_boundary_2d(clf, -6.0, 6.0)));
    }
  }
  if (ce_clf) {
    // Angles against the cross-entropy direction, one row per loss.
    for (const LossSpec& spec : cfg.losses) {
      if (spec.family == Family::kCrossEntropy) continue;
      Eigen::VectorXd w = Eigen::VectorXd::Zero(data.dim());
      for (const ResultRow& row : cell.rows) {
        if (row.params != spec.label() || row.metric.size() < 2 ||
            row.metric[0] != 'w')
          continue;
        const int k = std::atoi(row.metric.c_str() + 1);
        if (k >= 0 && k < w.size()) w(k) = row.value;
      }
      cell.rows.push_back({"boundary", seed, family_name(spec.family),
                           spec.label(), "angle_vs_ce_deg",
                           line_angle_deg(w, ce_clf->w)});
    }
  }
  return cell;
}

// ---- alpha sweep ----

CellResult alpha_sweep_cell(const ExperimentConfig& cfg, double alpha,
                            std::uint64_t seed) {
  CellResult cell;
  const LossSpec spec = LossSpec::Alpha(alpha);
  const Task task = cfg.make_task(spec);
  const Dataset data =
      sample_fixed_counts(task, cfg.n_minority, cfg.n_majority, seed);
  const TrainResult fit = fit_linear(data, spec, cell_train_config(cfg, seed));
  double auc_value;
  if (cfg.n_eval > 0) {
    std::vector<double> sp, sn;
    for (const LabeledSample& s : sample(task, cfg.n_eval, eval_seed(seed)))
      (s.y == 1 ? sp : sn).push_back(fit.classifier.margin(s.x));
    auc_value = auc(sp, sn);
  } else {
    auc_value = mixture_auc(cfg.minority, cfg.majority, fit.classifier.w);
  }
  cell.rows.push_back({"alpha-sweep", seed, "alpha", spec.label(), "auc",
                       auc_value});
  cell.rows.push_back({"alpha-sweep", seed, "alpha", spec.label(), "b",
                       fit.classifier.b});
  return cell;
}

// ---- fcurve ----

CellResult fcurve_cell(const ExperimentConfig& cfg, const LossSpec& spec) {
  CellResult cell;
  const FCurve curve = compute_fcurve(spec, cfg.pi_grid, cfg.t_grid);
  std::ostringstream out;
  out << "family,params,pi,t,f_exact,f_asymptotic,ratio\n";
  for (std::size_t i = 0; i < curve.pi_grid.size(); ++i) {
    for (std::size_t k = 0; k < curve.t_grid.size(); ++k) {
      const double pi = curve.pi_grid[i];
      const double t = curve.t_grid[k];
      const double fe = curve.exact[i][k];
      out << family_name(spec.family) << "," << spec.label() << ","
          << format_double(pi) << "," << format_double(t) << ","
          << format_double(fe) << ",";
      if (!curve.asymptotic.empty()) {
        const double fa = curve.asymptotic[i][k];
        const double ratio = t == 1.0 ? 1.0 : fe / fa;
        out << format_double(fa) << "," << format_double(ratio) << "\n";
        if (t != 1.0)
          cell.rows.push_back({"fcurve", 0, family_name(spec.family),
                               spec.label(),
                               "ratio_pi" + format_double(pi) + "_t" +
                                   format_double(t),
                               ratio});
      } else {
        out << ",\n";
      }
    }
  }
  cell.files.emplace_back("fcurve_" + spec.label() + ".csv", out.str());
  return cell;
}

// ---- limit check ----

CellResult limit_check_cell(const ExperimentConfig& cfg) {
  CellResult cell;
  const Task task = cfg.make_task(LossSpec::Square());
  auto put = [&](const std::string& fam, const std::string& params,
                 const std::string& metric, double value) {
    cell.rows.push_back({"limit-check", 0, fam, params, metric, value});
  };

  const LimitResult sq = limit_square(task);
  for (Eigen::Index k = 0; k < sq.classifier.w.size(); ++k)
    put("square", "square", "w" + std::to_string(k), sq.classifier.w(k));
  put("square", "square", "b", sq.classifier.b);
  {
    TrainConfig t;
    t.optimizer = Optimizer::kFullBatchGd;
    t.lr = 0.05;
    t.momentum = 0.9;
    t.epochs = 4000;
    t.grad_tol = 1e-12;
    const Task sq_task = cfg.make_task(LossSpec::Square());
    const TrainResult trained = fit_linear_population(sq_task, t);
    put("square", "square", "angle_vs_trained_deg",
        line_angle_deg(sq.classifier.w, trained.classifier.w));
    put("square", "square", "trained_b", trained.classifier.b);
  }

  const LimitResult erf = limit_erf(task);
  for (Eigen::Index k = 0; k < erf.classifier.w.size(); ++k)
    put("erf", "erf", "w" + std::to_string(k), erf.classifier.w(k));
  put("erf", "erf", "b", erf.classifier.b);
  put("erf", "erf", "residual", erf.residual);
  put("erf", "erf", "iterations", erf.iterations);

  for (double alpha : cfg.limit_alphas) {
    const LossSpec spec = LossSpec::Alpha(alpha);
    const LimitResult fp =
        limit_alpha(task, alpha, AlphaSolver::kFixedPoint);
    const LimitResult pg =
        limit_alpha(task, alpha, AlphaSolver::kProjectedGradient);
    const std::string params = spec.label();
    for (Eigen::Index k = 0; k < fp.classifier.w.size(); ++k)
      put("alpha", params, "w" + std::to_string(k), fp.classifier.w(k));
    put("alpha", params, "b", fp.classifier.b);
    put("alpha", params, "residual", fp.residual);
    put("alpha", params, "iterations", fp.iterations);
    put("alpha", params, "converged", fp.converged ? 1.0 : 0.0);
    double gap = (fp.classifier.w - pg.classifier.w).cwiseAbs().maxCoeff();
    gap = std::max(
        gap, (fp.weights.xi_minus - pg.weights.xi_minus).cwiseAbs().maxCoeff());
    gap = std::max(
        gap, (fp.weights.xi_plus - pg.weights.xi_plus).cwiseAbs().maxCoeff());
    put("alpha", params, "solver_gap", gap);
    put("alpha", params, "auc_exact",
        mixture_auc(cfg.minority, cfg.majority, fp.classifier.w));
  }
  return cell;
}

// ---- C ablation ----

CellResult c_ablation_cell(const ExperimentConfig& cfg, double cpen,
                           std::uint64_t seed) {
  CellResult cell;
  const LossSpec spec = LossSpec::TunableBoosting(cfg.tbl_alpha, cpen);
  const Task task = cfg.make_task(spec);
  const Dataset data =
      sample_fixed_counts(task, cfg.n_minority, cfg.n_majority, seed);
  const TrainResult fit = fit_linear(data, spec, cell_train_config(cfg, seed));

  const std::size_t n_eval = cfg.n_eval > 0 ? cfg.n_eval : 20000;
  std::vector<double> sp, sn;
  std::vector<int> labels;
  std::vector<double> probs;
  for (const LabeledSample& s : sample(task, n_eval, eval_seed(seed))) {
    const double m = fit.classifier.margin(s.x);
    (s.y == 1 ? sp : sn).push_back(m);
    labels.push_back(s.y);
    probs.push_back(sigmoid(m));
  }
  auto put = [&](const std::string& metric, double value) {
    cell.rows.push_back({"c-ablation", seed, "tbl", spec.label(), metric,
                         value});
  };
  put("auc_exact", mixture_auc(cfg.minority, cfg.majority, fit.classifier.w));
  if (!sp.empty() && !sn.empty()) {
    const MetricReport m = partial_metrics(sp, sn);
    put("auc_emp", m.auc);
    put("accuracy", m.accuracy);
    put("brier", brier(labels, probs));
  }
  return cell;
}

// ---- influence demo ----

CellResult influence_cell(const ExperimentConfig& cfg, std::uint64_t seed) {
  CellResult cell;
  const LossSpec spec =
      cfg.losses.empty() ? LossSpec::Alpha(0.5) : cfg.losses.front();
  const Task task = cfg.make_task(spec);
  // A readable demo needs both classes present in a small sample, so the
  // demo draws fixed counts at one minority to three majority.
  const std::size_t n_pos = std::max<std::size_t>(cfg.influence_n / 4, 4);
  const std::size_t n_neg = cfg.influence_n - n_pos;
  const Dataset data = sample_fixed_counts(task, n_pos, n_neg, seed);

  TrainConfig t = cfg.train;
  t.optimizer = Optimizer::kFullBatchGd;
  t.epochs = std::max(cfg.train.epochs, 3000);
  t.lr = 0.5;
  t.momentum = 0.9;
  t.grad_tol = 1e-11;
  t.seed = seed;
  const TrainResult fit = fit_linear(data, spec, t);

  const Eigen::VectorXd margins =
      (data.x * fit.classifier.w).array() + fit.classifier.b;
  std::ostringstream out;
  out << "index,y,margin,g,influence_oracle_norm,influence_theorem3_norm,"
         "cosine\n";
  Eigen::Index worst_pos = -1, best_any = -1;
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const double signed_margin =
        data.y(i) == 1 ? margins(i) : -margins(i);
    if (data.y(i) == 1 && (worst_pos < 0 || margins(i) < margins(worst_pos)))
      worst_pos = i;
    if (best_any < 0 ||
        signed_margin > (data.y(best_any) == 1 ? margins(best_any)
                                               : -margins(best_any)))
      best_any = i;
    const InfluenceReport rep =
        influence(data, fit.classifier, spec, {data.x.row(i).transpose(),
                                               data.y(i)});
    double cosine = 0.0;
    if (rep.influence_theorem3.size() > 0 &&
        rep.influence_oracle.norm() > 0.0 &&
        rep.influence_theorem3.norm() > 0.0)
      cosine = rep.influence_oracle.normalized().dot(
          rep.influence_theorem3.normalized());
    out << i << "," << data.y(i) << "," << format_double(margins(i)) << ","
        << format_double(rep.g_value) << ","
        << format_double(rep.influence_oracle.norm()) << ","
        << format_double(rep.influence_theorem3.size() > 0
                             ? rep.influence_theorem3.norm()
                             : 0.0)
        << "," << format_double(cosine) << "\n";
  }
  char name[64];
  std::snprintf(name, sizeof(name), "influence_s%llu.csv",
                static_cast<unsigned long long>(seed));
  cell.files.emplace_back(name, out.str());

  auto probe = [&](const char* tag, Eigen::Index i) {
    const InfluenceReport rep =
        influence(data, fit.classifier, spec,
                  {data.x.row(i).transpose(), data.y(i)});
    cell.rows.push_back({"influence", seed, family_name(spec.family),
                         spec.label(), std::string(tag) + "_margin",
                         margins(i)});
    cell.rows.push_back({"influence", seed, family_name(spec.family),
                         spec.label(), std::string(tag) + "_influence_norm",
                         rep.influence_oracle.norm()});
    cell.rows.push_back({"influence", seed, family_name(spec.family),
                         spec.label(), std::string(tag) + "_g",
                         rep.g_value});
  };
  probe("poorly_fit", worst_pos);
  probe("well_fit", best_any);
  return cell;
}

}  // namespace

RecipeOutcome run_recipe(const ExperimentConfig& cfg, int threads,
                         bool quiet) {
  cfg.validate();
  fs::create_directories(cfg.output_dir);

  std::vector<Cell> cells;
  switch (cfg.recipe) {
    case Recipe::kBoundary:
      for (std::uint64_t seed : cfg.seeds)
        cells.push_back([&cfg, seed] { return boundary_cell(cfg, seed); });
      break;
    case Recipe::kAlphaSweep: {
      std::vector<double> grid = cfg.alpha_grid;
      if (grid.empty())
        for (int i = 0; i < 12; ++i) grid.push_back(0.1 + 0.8 * i / 11.0);
      for (double alpha : grid)
        for (std::uint64_t seed : cfg.seeds)
          cells.push_back([&cfg, alpha, seed] {
            return alpha_sweep_cell(cfg, alpha, seed);
          });
      break;
    }
    case Recipe::kFCurve: {
      std::vector<LossSpec> losses = cfg.losses;
      if (losses.empty())
        losses = {LossSpec::CrossEntropy(), LossSpec::Square(),
                  LossSpec::Focal(2.0), LossSpec::Poly(0.25),
                  LossSpec::VectorScaling(0.5), LossSpec::Alpha(0.5)};
      for (const LossSpec& spec : losses)
        cells.push_back([&cfg, spec] { return fcurve_cell(cfg, spec); });
      break;
    }
    case Recipe::kLimitCheck:
      cells.push_back([&cfg] { return limit_check_cell(cfg); });
      break;
    case Recipe::kCAblation: {
      std::vector<double> grid = cfg.c_grid;
      if (grid.empty()) grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
      for (double c : grid)
        for (std::uint64_t seed : cfg.seeds)
          cells.push_back(
              [&cfg, c, seed] { return c_ablation_cell(cfg, c, seed); });
      break;
    }
    case Recipe::kInfluenceDemo:
      for (std::uint64_t seed : cfg.seeds)
        cells.push_back([&cfg, seed] { return influence_cell(cfg, seed); });
      break;
  }

  RecipeOutcome outcome;
  const std::vector<std::optional<CellResult>> results =
      run_cells(cells, threads, outcome.failures, quiet);

  std::map<std::string, std::string> files;
  for (const auto& res : results) {
    if (!res) continue;
    outcome.rows.insert(outcome.rows.end(), res->rows.begin(),
                        res->rows.end());
    for (const auto& [name, content] : res->files) files[name] = content;
  }

  // Aggregated curves for the sweep-style recipes.
  if (cfg.recipe == Recipe::kAlphaSweep || cfg.recipe == Recipe::kCAblation) {
    const bool is_alpha = cfg.recipe == Recipe::kAlphaSweep;
    std::vector<double> grid =
        is_alpha ? cfg.alpha_grid : cfg.c_grid;
    if (grid.empty()) {
      if (is_alpha)
        for (int i = 0; i < 12; ++i) grid.push_back(0.1 + 0.8 * i / 11.0);
      else
        grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.75, 1.0};
    }
    const std::string metric = is_alpha ? "auc" : "auc_exact";
    std::vector<CurvePoint> pts;
    for (double x : grid) {
      const std::string params =
          is_alpha ? LossSpec::Alpha(x).label()
                   : LossSpec::TunableBoosting(cfg.tbl_alpha, x).label();
      std::vector<double> vals;
      for (const ResultRow& row : outcome.rows)
        if (row.params == params && row.metric == metric)
          vals.push_back(row.value);
      if (!vals.empty()) pts.push_back(aggregate(x, vals));
    }
    files[is_alpha ? "alpha_auc.csv" : "c_ablation_auc.csv"] =
        curve_to_string(pts);
    if (!is_alpha) {
      std::vector<CurvePoint> acc;
      for (double x : grid) {
        const std::string params =
            LossSpec::TunableBoosting(cfg.tbl_alpha, x).label();
        std::vector<double> vals;
        for (const ResultRow& row : outcome.rows)
          if (row.params == params && row.metric == "accuracy")
            vals.push_back(row.value);
        if (!vals.empty()) acc.push_back(aggregate(x, vals));
      }
      files["c_ablation_acc.csv"] = curve_to_string(acc);
    }
  }

  const std::string hash = config_hash(cfg);
  files["run_config.json"] = serialize_config(cfg);

  // results.csv through the canonical writer, remaining files directly.
  write_result_table((fs::path(cfg.output_dir) / "results.csv").string(),
                     outcome.rows, hash);
  outcome.output_files.push_back("results.csv");
  for (const auto& [name, content] : files) {
    write_file((fs::path(cfg.output_dir) / name).string(), content);
    outcome.output_files.push_back(name);
  }
  std::sort(outcome.output_files.begin(), outcome.output_files.end());

  nlohmann::json manifest;
  manifest["artifact_version"] = kVersion;
  manifest["config_hash"] = hash;
  manifest["recipe"] = recipe_name(cfg.recipe);
  manifest["status"] = outcome.failures.empty() ? "ok" : "partial";
  manifest["failures"] = outcome.failures;
  nlohmann::json outs = nlohmann::json::array();
  for (const std::string& name : outcome.output_files) {
    const std::string content =
        read_file((fs::path(cfg.output_dir) / name).string());
    nlohmann::json entry;
    entry["path"] = name;
    entry["bytes"] = content.size();
    entry["fnv1a64"] = fnv1a64_hex(content);
    outs.push_back(entry);
  }
  manifest["outputs"] = outs;
  write_file((fs::path(cfg.output_dir) / "manifest.json").string(),
             manifest.dump(2) + "\n");
  outcome.output_files.push_back("manifest.json");
  return outcome;
}

}  // namespace uic
