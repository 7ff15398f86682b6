#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fal/fairness.hpp"
#include "fal/glm.hpp"
#include "fal/harness.hpp"
#include "fal/schedule.hpp"
#include "fal/strategies.hpp"
#include "fal/synthetic.hpp"

namespace py = pybind11;
using namespace fal;

namespace {

Population population(const RowMatrix& x, const std::vector<int>& s) {
  if (static_cast<std::size_t>(x.rows()) != s.size()) throw std::invalid_argument("X and s have different lengths");
  Population p;
  p.x = x;
  p.s = s;
  for (std::size_t i = 0; i < s.size(); ++i) p.ids.push_back(i);
  return p;
}

strategies::CandidateSet candidates(const std::vector<std::size_t>& ids, const RowMatrix& x, const std::vector<int>& s) {
  if (static_cast<std::size_t>(x.rows()) != ids.size() || s.size() != ids.size())
    throw std::invalid_argument("ids, X and s must have the same length");
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] <= ids[i - 1]) throw std::invalid_argument("candidate ids must be strictly ascending");
  return {ids, x, s};
}

strategies::LabeledSet labeled(const RowMatrix& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw std::invalid_argument("L_X and L_y have different lengths");
  return {x, y};
}

py::list score_table(const std::vector<strategies::SelectionScore>& scores) {
  py::list out;
  for (const auto& s : scores) {
    py::dict d;
    d["candidate_id"] = s.candidate_id;
    d["raw_entropy"] = s.raw_entropy;
    d["raw_fairness"] = s.raw_fairness;
    d["entropy_term"] = s.entropy_term;
    d["fairness_term"] = s.fairness_term;
    d["combined"] = s.combined;
    out.append(d);
  }
  return out;
}

py::tuple dataset_arrays(const Dataset& ds) {
  std::vector<int> s, y;
  for (const auto& p : ds.points) {
    s.push_back(p.s);
    y.push_back(p.y);
  }
  return py::make_tuple(ds.feature_matrix(), s, y, ds.feature_names);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "fair active learning core";

  py::register_exception<fairness::UndefinedMeasureError>(m, "UndefinedMeasureError", PyExc_ValueError);

  py::class_<glm::LinearClassifier>(m, "LinearClassifier")
      .def(py::init<Eigen::VectorXd, double>(), py::arg("theta"), py::arg("intercept") = 0.0)
      .def_property_readonly("theta", &glm::LinearClassifier::theta)
      .def_property_readonly("intercept", &glm::LinearClassifier::intercept)
      .def_property_readonly("trained_on", &glm::LinearClassifier::trained_on)
      .def("linear_score", &glm::LinearClassifier::linear_score, py::arg("x"))
      .def("predict_proba", &glm::LinearClassifier::predict_proba, py::arg("x"))
      .def("predict", &glm::LinearClassifier::predict, py::arg("x"), py::arg("threshold") = 0.5)
      .def("linear_scores", &glm::LinearClassifier::linear_scores, py::arg("X"))
      .def("predict_all", &glm::LinearClassifier::predict_all, py::arg("X"), py::arg("threshold") = 0.5)
      .def("__repr__", [](const glm::LinearClassifier& c) {
        return "LinearClassifier(d=" + std::to_string(c.dim()) + ", intercept=" + std::to_string(c.intercept()) + ")";
      });

  m.def(
      "train",
      [](const RowMatrix& x, const Eigen::VectorXd& y, double reg_strength, int max_iter, double tol) {
        return glm::train(x, y, {reg_strength, max_iter, tol});
      },
      py::arg("X"), py::arg("y"), py::arg("reg_strength") = 1.0, py::arg("max_iter") = 100, py::arg("tol") = 1e-6);

  m.def(
      "entropy", [](const std::vector<double>& p) { return strategies::entropy(p); }, py::arg("probs"));

  m.def(
      "contingency",
      [](const std::vector<int>& pred, const std::vector<int>& s) {
        const auto t = fairness::contingency(pred, s);
        return py::make_tuple(t.a, t.b, t.c, t.d);
      },
      py::arg("predictions"), py::arg("s"));

  m.def(
      "measure",
      [](const std::string& name, double a, double b, double c, double d) {
        return fairness::measure(fairness::parse_measure(name), {a, b, c, d});
      },
      py::arg("name"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

  m.def(
      "disparity",
      [](const glm::LinearClassifier& clf, const RowMatrix& x, const std::vector<int>& s, const std::string& name,
         double threshold) { return fairness::evaluate(clf, population(x, s), fairness::parse_measure(name), threshold); },
      py::arg("clf"), py::arg("X"), py::arg("s"), py::arg("measure") = "mutual_info", py::arg("threshold") = 0.5);

  m.def(
      "measure_disagreement_fixture",
      [](double p, double eps) {
        const auto f = fairness::measure_disagreement_fixture(p, eps);
        py::dict d;
        d["f1_c"] = f.f1_c;
        d["f1_c_prime"] = f.f1_c_prime;
        d["f2_c"] = f.f2_c;
        d["f2_c_prime"] = f.f2_c_prime;
        d["preference_flip"] = f.preference_flip();
        return d;
      },
      py::arg("p"), py::arg("eps"));

  m.def(
      "alpha_at",
      [](const std::string& schedule_json, std::size_t t, std::size_t budget) {
        return schedule::alpha_at(schedule::AlphaSchedule::from_json(nlohmann::json::parse(schedule_json)), t, budget);
      },
      py::arg("schedule_json"), py::arg("t"), py::arg("budget"));

  m.def(
      "select_entropy",
      [](const std::vector<std::size_t>& ids, const RowMatrix& x, const glm::LinearClassifier& clf) {
        return strategies::select_entropy(candidates(ids, x, std::vector<int>(ids.size(), 0)), clf);
      },
      py::arg("ids"), py::arg("X"), py::arg("clf"));

  m.def(
      "select_fal",
      [](const std::vector<std::size_t>& ids, const RowMatrix& x, const std::vector<int>& s, const RowMatrix& lx,
         const Eigen::VectorXd& ly, const glm::LinearClassifier& clf, const RowMatrix& vx, const std::vector<int>& vs,
         double alpha, const std::string& measure, double threshold) {
        const strategies::FairnessEval eval{fairness::parse_measure(measure), threshold, {}};
        const auto sel = strategies::select_fal(candidates(ids, x, s), labeled(lx, ly), clf, population(vx, vs), eval,
                                                alpha);
        return py::make_tuple(sel.id, score_table(sel.scores));
      },
      py::arg("ids"), py::arg("X"), py::arg("s"), py::arg("L_X"), py::arg("L_y"), py::arg("clf"), py::arg("V_X"),
      py::arg("V_s"), py::arg("alpha"), py::arg("measure") = "mutual_info", py::arg("threshold") = 0.5);

  m.def(
      "select_fbc",
      [](const std::vector<std::size_t>& ids, const RowMatrix& x, const std::vector<int>& s, const RowMatrix& lx,
         const Eigen::VectorXd& ly, const glm::LinearClassifier& clf, const RowMatrix& vx, const std::vector<int>& vs,
         double alpha, bool use_abs) {
        strategies::CovAggregates agg(static_cast<std::size_t>(lx.cols()));
        for (Eigen::Index i = 0; i < lx.rows(); ++i) agg.add(lx.row(i).transpose(), static_cast<int>(ly[i]));
        const auto sens = strategies::init_sensitive_cov(population(vx, vs));
        const auto sel = strategies::select_fbc(candidates(ids, x, s), agg, clf, sens, alpha, use_abs);
        return py::make_tuple(sel.id, score_table(sel.scores));
      },
      py::arg("ids"), py::arg("X"), py::arg("s"), py::arg("L_X"), py::arg("L_y"), py::arg("clf"), py::arg("V_X"),
      py::arg("V_s"), py::arg("alpha"), py::arg("use_abs") = true);

  py::class_<strategies::CovAggregates>(m, "CovAggregates")
      .def(py::init<std::size_t>(), py::arg("d"))
      .def_readonly("n", &strategies::CovAggregates::n)
      .def_readonly("g_y", &strategies::CovAggregates::g_y)
      .def_readonly("g_x", &strategies::CovAggregates::g_x)
      .def_readonly("g_z", &strategies::CovAggregates::g_z)
      .def("add", &strategies::CovAggregates::add, py::arg("x"), py::arg("y"))
      .def("cov", [](const strategies::CovAggregates& a, std::size_t i) { return strategies::cov_from_aggregates(a, i); },
           py::arg("i"))
      .def("hypothetical_cov",
           [](const strategies::CovAggregates& a, const Eigen::VectorXd& x, std::size_t i, int k) {
             return strategies::hypothetical_cov(a, x, i, k);
           },
           py::arg("x"), py::arg("i"), py::arg("k"));

  m.def(
      "make_synthetic_scenario",
      [](std::size_t n_red, std::size_t n_blue, std::uint64_t seed) {
        synthetic::ScenarioParams p;
        p.n_red = n_red;
        p.n_blue = n_blue;
        return dataset_arrays(synthetic::make_synthetic_scenario(p, seed));
      },
      py::arg("n_red") = 10000, py::arg("n_blue") = 10000, py::arg("seed") = 0);

  m.def(
      "make_compas_like",
      [](std::size_t n, double p_group1, std::uint64_t seed) {
        return dataset_arrays(synthetic::make_compas_like({n, p_group1}, seed));
      },
      py::arg("n") = 1000, py::arg("p_group1") = 0.6, py::arg("seed") = 0);

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& base_dir, std::size_t threads) {
        const auto cfg = harness::ExperimentConfig::from_json(nlohmann::json::parse(config_json), base_dir);
        harness::ExperimentResult res;
        {
          py::gil_scoped_release release;
          res = harness::run_experiment(cfg, threads);
        }
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : res.all_records()) records.push_back(harness::record_to_json(r));
        return py::make_tuple(records.dump(), res.summary_json().dump());
      },
      py::arg("config_json"), py::arg("base_dir") = "", py::arg("threads") = 0);
}
