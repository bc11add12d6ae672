#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "uic/bayes.hpp"
#include "uic/config.hpp"
#include "uic/diagnostics.hpp"
#include "uic/errors.hpp"
#include "uic/limits.hpp"
#include "uic/loss.hpp"
#include "uic/train.hpp"
#include "uic/version.hpp"

namespace py = pybind11;
using namespace uic;

namespace {

LossSpec make_spec(const std::string& family, double gamma, double epsilon,
                   double delta1, double alpha, double cpen) {
  LossSpec spec;
  spec.family = family_from_name(family);
  spec.gamma = gamma;
  spec.epsilon = epsilon;
  spec.delta1 = delta1;
  spec.alpha = alpha;
  spec.cpen = cpen;
  spec.validate();
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Loss functions, f-functions and limiting linear classifiers "
            "for ultra-imbalanced classification";
  m.attr("__version__") = kVersion;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);

  py::class_<LossSpec>(m, "LossSpec")
      .def(py::init(&make_spec), py::arg("family"), py::arg("gamma") = 2.0,
           py::arg("epsilon") = 1.0, py::arg("delta1") = 0.5,
           py::arg("alpha") = 0.5, py::arg("C") = 0.0)
      .def_readonly("gamma", &LossSpec::gamma)
      .def_readonly("epsilon", &LossSpec::epsilon)
      .def_readonly("delta1", &LossSpec::delta1)
      .def_readonly("alpha", &LossSpec::alpha)
      .def_readonly("C", &LossSpec::cpen)
      .def_property_readonly(
          "family", [](const LossSpec& s) { return family_name(s.family); })
      .def("label", &LossSpec::label)
      .def("__repr__", [](const LossSpec& s) {
        return "LossSpec(" + s.label() + ")";
      });

  m.def("loss_value", &loss_value, py::arg("spec"), py::arg("y"),
        py::arg("etahat"));
  m.def("loss_grad", &loss_grad, py::arg("spec"), py::arg("y"),
        py::arg("etahat"));
  m.def("loss_hess", &loss_hess, py::arg("spec"), py::arg("y"),
        py::arg("etahat"));
  m.def("pointwise_risk", &pointwise_risk_value, py::arg("spec"),
        py::arg("eta"), py::arg("etahat"));
  m.def("margin_loss_value", &margin_loss_value, py::arg("spec"),
        py::arg("y_pm"), py::arg("margin"));
  m.def("margin_loss_grad", &margin_loss_grad, py::arg("spec"),
        py::arg("y_pm"), py::arg("margin"));

  py::class_<BayesRiskResult>(m, "BayesRiskResult")
      .def_readonly("eta", &BayesRiskResult::eta)
      .def_readonly("minimizer", &BayesRiskResult::minimizer)
      .def_readonly("value", &BayesRiskResult::value);
  m.def("pointwise_bayes_risk", &pointwise_bayes_risk, py::arg("spec"),
        py::arg("eta"));
  m.def("f_exact", &f_exact, py::arg("spec"), py::arg("pi"), py::arg("t"));
  m.def("f_asymptotic", &f_asymptotic, py::arg("spec"), py::arg("pi"),
        py::arg("t"));
  m.def("verify_uic_limit", &verify_uic_limit, py::arg("spec"), py::arg("t"),
        py::arg("pi_sequence"));

  py::class_<GaussianMixture>(m, "GaussianMixture")
      .def(py::init<std::vector<double>, std::vector<Eigen::VectorXd>,
                    std::vector<Eigen::MatrixXd>>(),
           py::arg("weights"), py::arg("means"), py::arg("covariances"))
      .def_property_readonly("dim", &GaussianMixture::dim)
      .def_property_readonly("components", &GaussianMixture::components)
      .def("density", &GaussianMixture::density)
      .def("log_density", &GaussianMixture::log_density)
      .def("mixture_mean", &GaussianMixture::mixture_mean)
      .def("total_covariance", &GaussianMixture::total_covariance);

  py::class_<Task>(m, "Task")
      .def(py::init<double, GaussianMixture, GaussianMixture, LossSpec>(),
           py::arg("pi"), py::arg("minority"), py::arg("majority"),
           py::arg("loss"))
      .def_readonly("pi", &Task::pi)
      .def_readonly("rho", &Task::rho)
      .def_readonly("loss", &Task::loss);

  m.def("posterior_eta", &posterior_eta, py::arg("task"), py::arg("x"));
  m.def(
      "sample",
      [](const Task& task, std::size_t n, std::uint64_t seed) {
        const Dataset d = sample_dataset(task, n, seed);
        return py::make_tuple(d.x, d.y);
      },
      py::arg("task"), py::arg("n"), py::arg("seed"));
  m.def(
      "sample_fixed_counts",
      [](const Task& task, std::size_t n_minority, std::size_t n_majority,
         std::uint64_t seed) {
        const Dataset d =
            sample_fixed_counts(task, n_minority, n_majority, seed);
        return py::make_tuple(d.x, d.y);
      },
      py::arg("task"), py::arg("n_minority"), py::arg("n_majority"),
      py::arg("seed"));
  m.def(
      "population_risk",
      [](const Task& task, const Eigen::VectorXd& w, double b,
         const std::string& method, std::size_t mc_n, std::uint64_t seed,
         int order) {
        const RiskEstimate est = population_risk(
            task, LinearClassifier{w, b},
            method == "quadrature" ? RiskMethod::kQuadrature
                                   : RiskMethod::kMonteCarlo,
            mc_n, seed, order);
        return py::make_tuple(est.value, est.std_error);
      },
      py::arg("task"), py::arg("w"), py::arg("b"),
      py::arg("method") = "quadrature", py::arg("mc_n") = 100000,
      py::arg("seed") = 0, py::arg("order") = 64);
  m.def("mixture_auc", &mixture_auc, py::arg("minority"), py::arg("majority"),
        py::arg("w"));
  m.def(
      "statistical_information",
      [](const Task& task, std::size_t mc_samples, std::uint64_t seed) {
        const StatInfoEstimate e =
            statistical_information(task, mc_samples, seed);
        return py::make_tuple(e.value, e.std_error, e.dual_value,
                              e.dual_std_error);
      },
      py::arg("task"), py::arg("mc_samples"), py::arg("seed"));

  py::class_<LimitResult>(m, "LimitResult")
      .def_property_readonly(
          "w", [](const LimitResult& r) { return r.classifier.w; })
      .def_property_readonly(
          "b", [](const LimitResult& r) { return r.classifier.b; })
      .def_property_readonly(
          "xi_minus", [](const LimitResult& r) { return r.weights.xi_minus; })
      .def_property_readonly(
          "xi_plus", [](const LimitResult& r) { return r.weights.xi_plus; })
      .def_readonly("converged", &LimitResult::converged)
      .def_readonly("iterations", &LimitResult::iterations)
      .def_readonly("residual", &LimitResult::residual);
  m.def("limit_square", &limit_square, py::arg("task"));
  m.def(
      "limit_alpha",
      [](const Task& task, double alpha, const std::string& solver) {
        return limit_alpha(task, alpha,
                           solver == "projected-gradient"
                               ? AlphaSolver::kProjectedGradient
                               : AlphaSolver::kFixedPoint);
      },
      py::arg("task"), py::arg("alpha"), py::arg("solver") = "fixed-point");
  m.def("limit_erf", [](const Task& task) { return limit_erf(task); },
        py::arg("task"));
  m.def(
      "optimal_auc_direction",
      [](const GaussianMixture& minority, const GaussianMixture& majority) {
        const AucDirection d = optimal_auc_direction(minority, majority);
        return py::make_tuple(d.w, d.auc);
      },
      py::arg("minority"), py::arg("majority"));

  py::class_<TrainResult>(m, "TrainResult")
      .def_property_readonly(
          "w", [](const TrainResult& r) { return r.classifier.w; })
      .def_property_readonly(
          "b", [](const TrainResult& r) { return r.classifier.b; })
      .def_readonly("loss_trace", &TrainResult::loss_trace)
      .def_readonly("grad_norm_final", &TrainResult::grad_norm_final);
  m.def(
      "fit_linear",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
         const LossSpec& spec, const std::string& optimizer, double lr,
         double momentum, int epochs, int batch_size, std::uint64_t seed,
         const std::string& init) {
        TrainConfig cfg;
        cfg.optimizer = optimizer == "full-batch" ? Optimizer::kFullBatchGd
                                                  : Optimizer::kSgd;
        cfg.lr = lr;
        cfg.momentum = momentum;
        cfg.epochs = epochs;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        cfg.init = init == "logit-adjusted" ? InitScheme::kLogitAdjusted
                                            : InitScheme::kZeros;
        Dataset d;
        d.x = x;
        d.y = y;
        return fit_linear(d, spec, cfg);
      },
      py::arg("x"), py::arg("y"), py::arg("spec"), py::arg("optimizer") = "sgd",
      py::arg("lr") = 0.05, py::arg("momentum") = 0.9, py::arg("epochs") = 200,
      py::arg("batch_size") = 256, py::arg("seed") = 0,
      py::arg("init") = "zeros");
  m.def(
      "fit_linear_population",
      [](const Task& task, double lr, double momentum, int epochs,
         double grad_tol) {
        TrainConfig cfg;
        cfg.optimizer = Optimizer::kFullBatchGd;
        cfg.lr = lr;
        cfg.momentum = momentum;
        cfg.epochs = epochs;
        cfg.grad_tol = grad_tol;
        return fit_linear_population(task, cfg);
      },
      py::arg("task"), py::arg("lr") = 0.1, py::arg("momentum") = 0.9,
      py::arg("epochs") = 2000, py::arg("grad_tol") = 1e-10);

  m.def("auc", &auc, py::arg("scores_pos"), py::arg("scores_neg"));
  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("auc", &MetricReport::auc)
      .def_readonly("op_auc", &MetricReport::op_auc)
      .def_readonly("recall_at_fpr", &MetricReport::recall_at_fpr)
      .def_readonly("accuracy", &MetricReport::accuracy)
      .def_readonly("brier", &MetricReport::brier)
      .def_readonly("resolution_warning", &MetricReport::resolution_warning);
  m.def("partial_metrics", &partial_metrics, py::arg("scores_pos"),
        py::arg("scores_neg"), py::arg("fpr_cap") = 0.01,
        py::arg("fpr_point") = 0.001);
  m.def("brier", &brier, py::arg("labels"), py::arg("probabilities"));
  m.def(
      "influence",
      [](const Eigen::MatrixXd& x, const Eigen::VectorXi& y,
         const Eigen::VectorXd& w, double b, const LossSpec& spec,
         const Eigen::VectorXd& x_star, int y_star) {
        Dataset d;
        d.x = x;
        d.y = y;
        const InfluenceReport rep =
            influence(d, LinearClassifier{w, b}, spec, {x_star, y_star});
        return py::make_tuple(rep.influence_oracle, rep.influence_theorem3,
                              rep.g_value, rep.hessian_singular_warning);
      },
      py::arg("x"), py::arg("y"), py::arg("w"), py::arg("b"), py::arg("spec"),
      py::arg("x_star"), py::arg("y_star"));
}
