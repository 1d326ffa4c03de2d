#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "supalign/alignment.hpp"
#include "supalign/csv.hpp"
#include "supalign/errors.hpp"

namespace supalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void save_model(const AlignmentModel& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + dir.string());

  const FitReport& r = model.report;
  json doc = {
      {"method", std::string(to_string(model.method))},
      {"epsilon", model.epsilon},
      {"gamma", model.gamma},
      {"k", model.k},
      {"dims",
       {{"subjects", model.subjects},
        {"timepoints", model.timepoints},
        {"features", model.features},
        {"classes", model.classes}}},
      {"fit_report",
       {{"trace_objective", r.trace_objective},
        {"pairwise_objective", r.pairwise_objective},
        {"trace_form_gap", r.trace_form_gap},
        {"eigenvalues", to_std(r.eigenvalues)},
        {"iteration_objectives", r.iteration_objectives},
        {"penalized_objectives", r.penalized_objectives},
        {"advisories", r.advisories},
        {"input_digest", hex64(r.input_digest)}}},
  };
  std::ofstream out(dir / "model.json", std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write model.json in " + dir.string());
  out << doc.dump(2) << '\n';
  out.close();

  if (model.method != Method::kNone) {
    csv::write_matrix(dir / "w.csv", model.w);
    csv::write_matrix(dir / "g.csv", model.g);
  }
}

AlignmentModel load_model(const fs::path& dir) {
  std::ifstream in(dir / "model.json");
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + (dir / "model.json").string());
  AlignmentModel model;
  try {
    const json doc = json::parse(in);
    model.method = parse_method(doc.at("method").get<std::string>());
    model.epsilon = doc.at("epsilon").get<double>();
    model.gamma = doc.at("gamma").get<double>();
    model.k = doc.at("k").get<std::size_t>();
    const auto& dims = doc.at("dims");
    model.subjects = dims.at("subjects").get<std::size_t>();
    model.timepoints = dims.at("timepoints").get<std::size_t>();
    model.features = dims.at("features").get<std::size_t>();
    model.classes = dims.at("classes").get<std::size_t>();
    if (doc.contains("fit_report")) {
      const auto& r = doc.at("fit_report");
      model.report.trace_objective = r.value("trace_objective", 0.0);
      model.report.pairwise_objective = r.value("pairwise_objective", 0.0);
      model.report.trace_form_gap = r.value("trace_form_gap", 0.0);
      const auto eig = r.value("eigenvalues", std::vector<double>{});
      model.report.eigenvalues =
          Eigen::Map<const Vector>(eig.data(), static_cast<Eigen::Index>(eig.size()));
      model.report.iteration_objectives =
          r.value("iteration_objectives", std::vector<double>{});
      model.report.penalized_objectives =
          r.value("penalized_objectives", std::vector<double>{});
      model.report.advisories = r.value("advisories", std::vector<std::string>{});
      model.report.input_digest =
          std::stoull(r.value("input_digest", std::string("0")), nullptr, 16);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, "model.json: " + std::string(e.what()));
  }
  if (model.method != Method::kNone) {
    model.w = csv::read_matrix(dir / "w.csv");
    model.g = csv::read_matrix(dir / "g.csv");
    require(model.g.rows() == static_cast<Eigen::Index>(model.timepoints) &&
                model.g.cols() == static_cast<Eigen::Index>(model.k) &&
                model.w.cols() == static_cast<Eigen::Index>(model.k),
            ErrorKind::kSchema, "model: w.csv / g.csv shapes disagree with model.json");
  }
  return model;
}

}  // namespace supalign
