#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "supalign/alignment.hpp"
#include "supalign/classify.hpp"
#include "supalign/dataset.hpp"
#include "supalign/errors.hpp"
#include "supalign/linalg.hpp"
#include "supalign/metrics.hpp"
#include "supalign/supervision.hpp"
#include "supalign/synth.hpp"

namespace py = pybind11;
using namespace supalign;

namespace {

py::dict stat_dict(const CorrelationStat& s) {
  py::dict d;
  d["mean"] = s.defined ? py::cast(s.mean) : py::none();
  d["std"] = s.defined ? py::cast(s.std) : py::none();
  d["pairs"] = s.pairs;
  return d;
}

FitOptions fit_options(double epsilon, std::optional<std::size_t> k, std::size_t iterations) {
  FitOptions opt;
  opt.epsilon = epsilon;
  opt.k = k;
  opt.iterations = iterations;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(std::string(e.what()));
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::enum_<Method>(m, "Method")
      .value("sha", Method::kSha)
      .value("sha_r", Method::kShaR)
      .value("rha", Method::kRha)
      .value("none", Method::kNone);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init([](std::vector<Matrix> xs, std::vector<std::vector<int>> classes,
                       std::vector<std::string> class_names, std::vector<std::string> ids) {
             Dataset d;
             d.class_names = std::move(class_names);
             require(classes.size() == xs.size(), ErrorKind::kInvalidArgument,
                     "one class list per subject is required");
             for (std::size_t i = 0; i < xs.size(); ++i) {
               const std::string id = i < ids.size() ? ids[i] : "sub" + std::to_string(i + 1);
               d.subjects.push_back({id, std::move(xs[i])});
               d.labels.push_back(LabelMatrix::from_classes(classes[i], d.class_names.size()));
             }
             validate_dataset(d, false);
             return d;
           }),
           py::arg("subjects"), py::arg("classes"), py::arg("class_names"),
           py::arg("ids") = std::vector<std::string>{})
      .def_property_readonly("num_subjects", &Dataset::num_subjects)
      .def_property_readonly("num_timepoints", &Dataset::num_timepoints)
      .def_property_readonly("num_features", &Dataset::num_features)
      .def_property_readonly("class_names", [](const Dataset& d) { return d.class_names; })
      .def_property_readonly("ids",
                             [](const Dataset& d) {
                               std::vector<std::string> ids;
                               for (const auto& s : d.subjects) ids.push_back(s.id);
                               return ids;
                             })
      .def("data", [](const Dataset& d, std::size_t i) { return d.subjects.at(i).x; })
      .def("classes", [](const Dataset& d, std::size_t i) { return d.labels.at(i).classes(); })
      .def("normalized", [](const Dataset& d) { return normalize(d).dataset; })
      .def("truncated", &truncate_timepoints, py::arg("count"))
      .def("save", [](const Dataset& d, const std::filesystem::path& dir) { save_dataset(d, dir); });

  m.def("load_dataset", [](const std::filesystem::path& p, bool strict) {
    return load_dataset(p, LoadOptions{strict});
  }, py::arg("manifest"), py::arg("strict") = true);

  m.def("synth",
        [](std::size_t subjects, std::size_t classes, std::size_t instances, std::size_t length,
           std::size_t voxels, double sigma, const std::string& rotation, std::uint64_t seed) {
          SynthConfig cfg{subjects, classes, instances, length, voxels, sigma, parse_rotation(rotation), seed};
          return generate(cfg).dataset;
        },
        py::arg("subjects") = 6, py::arg("classes") = 4, py::arg("instances") = 4,
        py::arg("length") = 5, py::arg("voxels") = 50, py::arg("sigma") = 0.5,
        py::arg("rotation") = "orthogonal", py::arg("seed") = 0);

  py::class_<AlignmentModel>(m, "Model")
      .def_property_readonly("method", [](const AlignmentModel& a) { return a.method; })
      .def_property_readonly("w", [](const AlignmentModel& a) { return a.w; })
      .def_property_readonly("g", [](const AlignmentModel& a) { return a.g; })
      .def_property_readonly("epsilon", [](const AlignmentModel& a) { return a.epsilon; })
      .def_property_readonly("gamma", [](const AlignmentModel& a) { return a.gamma; })
      .def_property_readonly("k", [](const AlignmentModel& a) { return a.k; })
      .def_property_readonly("trace_objective", [](const AlignmentModel& a) { return a.report.trace_objective; })
      .def_property_readonly("pairwise_objective",
                             [](const AlignmentModel& a) { return a.report.pairwise_objective; })
      .def_property_readonly("iteration_objectives",
                             [](const AlignmentModel& a) { return a.report.iteration_objectives; })
      .def_property_readonly("advisories", [](const AlignmentModel& a) { return a.report.advisories; })
      .def("map", [](const AlignmentModel& a, const Matrix& x) { return map_subject(a, {"x", x}).z; },
           py::arg("x"))
      .def("save", [](const AlignmentModel& a, const std::filesystem::path& dir) { save_model(a, dir); });

  m.def("load_model", &load_model, py::arg("dir"));

  m.def("fit",
        [](const Dataset& d, Method method, std::optional<double> gamma, double epsilon,
           std::optional<std::size_t> k, std::size_t iterations) {
          return fit_model(method, d, gamma, fit_options(epsilon, k, iterations));
        },
        py::arg("dataset"), py::arg("method") = Method::kSha, py::arg("gamma") = py::none(),
        py::arg("epsilon") = 1e-4, py::arg("k") = py::none(), py::arg("iterations") = 10);

  m.def("map_dataset", [](const AlignmentModel& a, const Dataset& d) {
    std::vector<Matrix> z;
    for (auto& f : map_dataset(a, d)) z.push_back(std::move(f.z));
    return z;
  });

  m.def("correlations",
        [](const std::vector<Matrix>& mapped, const Dataset& d, bool include_rest) {
          const auto r = correlation_report(mapped, d.labels.at(0), include_rest);
          py::dict out;
          out["rho1"] = stat_dict(r.rho1);
          out["rho2"] = stat_dict(r.rho2);
          out["rho3"] = stat_dict(r.rho3);
          out["rho4"] = stat_dict(r.rho4);
          out["advisories"] = r.advisories;
          return out;
        },
        py::arg("mapped"), py::arg("dataset"), py::arg("include_rest") = false);

  m.def("loso",
        [](const Dataset& d, Method method, std::optional<double> gamma, double epsilon, double ridge) {
          Hyperparams hp;
          hp.fit.epsilon = epsilon;
          hp.gamma = gamma;
          hp.ridge = ridge;
          const auto r = run_loso(d, method, hp);
          py::dict out;
          std::vector<double> folds;
          for (const auto& f : r.folds) folds.push_back(f.accuracy);
          out["fold_accuracy"] = folds;
          out["accuracy_mean"] = r.accuracy_mean;
          out["accuracy_std"] = r.accuracy_std;
          out["auc_mean"] = r.auc_mean;
          out["auc_std"] = r.auc_std;
          return out;
        },
        py::arg("dataset"), py::arg("method") = Method::kSha, py::arg("gamma") = py::none(),
        py::arg("epsilon") = 1e-4, py::arg("ridge") = 1.0);

  m.def("build_h", &build_h, py::arg("t"), py::arg("gamma"));
  m.def("det_h", &det_h, py::arg("t"), py::arg("gamma"));
  m.def("projector",
        [](const Matrix& x, double epsilon) {
          const auto rank = static_cast<std::size_t>(std::min(x.rows(), x.cols()));
          return regularized_projector(x, epsilon, rank).dense();
        },
        py::arg("x"), py::arg("epsilon"));
}
