#include "supalign/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "supalign/csv.hpp"
#include "supalign/errors.hpp"

namespace supalign {

namespace fs = std::filesystem;
using nlohmann::json;

LabelMatrix::LabelMatrix(Matrix y) : y_(std::move(y)) {
  require(y_.rows() >= 2, ErrorKind::kSchema, "labels: need at least 2 classes");
  require(y_.cols() >= 1, ErrorKind::kSchema, "labels: no time points");
  classes_.assign(static_cast<std::size_t>(y_.cols()), -1);
  for (Eigen::Index t = 0; t < y_.cols(); ++t) {
    int hot = -1;
    for (Eigen::Index m = 0; m < y_.rows(); ++m) {
      const double v = y_(m, t);
      require(v == 0.0 || v == 1.0, ErrorKind::kSchema,
              "labels: non-binary entry at class " + std::to_string(m) + ", time " +
                  std::to_string(t));
      if (v == 1.0) {
        require(hot < 0, ErrorKind::kSchema,
                "labels: time point " + std::to_string(t) + " has more than one class");
        hot = static_cast<int>(m);
      }
    }
    classes_[static_cast<std::size_t>(t)] = hot;
  }
}

LabelMatrix LabelMatrix::from_classes(std::span<const int> classes, std::size_t num_classes) {
  Matrix y = Matrix::Zero(static_cast<Eigen::Index>(num_classes),
                          static_cast<Eigen::Index>(classes.size()));
  for (std::size_t t = 0; t < classes.size(); ++t) {
    const int c = classes[t];
    if (c < 0) continue;
    require(static_cast<std::size_t>(c) < num_classes, ErrorKind::kSchema,
            "labels: class index " + std::to_string(c) + " out of range");
    y(c, static_cast<Eigen::Index>(t)) = 1.0;
  }
  return LabelMatrix(std::move(y));
}

std::vector<Eigen::Index> LabelMatrix::labeled_indices() const {
  std::vector<Eigen::Index> out;
  for (std::size_t t = 0; t < classes_.size(); ++t) {
    if (classes_[t] >= 0) out.push_back(static_cast<Eigen::Index>(t));
  }
  return out;
}

std::size_t LabelMatrix::labeled_count() const {
  return static_cast<std::size_t>(
      std::count_if(classes_.begin(), classes_.end(), [](int c) { return c >= 0; }));
}

std::size_t Dataset::num_timepoints() const {
  return subjects.empty() ? 0 : static_cast<std::size_t>(subjects.front().x.rows());
}

std::size_t Dataset::num_features() const {
  return subjects.empty() ? 0 : static_cast<std::size_t>(subjects.front().x.cols());
}

namespace {

bool filename_safe(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

void validate_dataset(const Dataset& d, bool strict) {
  require(!d.subjects.empty(), ErrorKind::kSchema, "dataset: no subjects");
  require(d.class_names.size() >= 2, ErrorKind::kSchema, "dataset: need at least 2 classes");
  require(d.labels.size() == d.subjects.size(), ErrorKind::kSchema,
          "dataset: one label matrix per subject required");

  const auto& first = d.subjects.front();
  const Eigen::Index t = first.x.rows();
  const Eigen::Index v = first.x.cols();
  std::set<std::string> ids;
  for (std::size_t i = 0; i < d.subjects.size(); ++i) {
    const auto& s = d.subjects[i];
    require(filename_safe(s.id), ErrorKind::kSchema,
            "dataset: subject id '" + s.id + "' must match [A-Za-z0-9_.-]+");
    require(ids.insert(s.id).second, ErrorKind::kSchema,
            "dataset: duplicate subject id '" + s.id + "'");
    require(s.x.rows() >= 2, ErrorKind::kSchema,
            "dataset: subject '" + s.id + "' needs at least 2 time points");
    require(s.x.cols() >= 1, ErrorKind::kSchema,
            "dataset: subject '" + s.id + "' has no features");
    require(s.x.rows() == t && s.x.cols() == v, ErrorKind::kSchema,
            "dataset: subject '" + s.id + "' has shape " + std::to_string(s.x.rows()) + "x" +
                std::to_string(s.x.cols()) + ", expected " + std::to_string(t) + "x" +
                std::to_string(v));
    require(s.x.allFinite(), ErrorKind::kInvalidData,
            "dataset: subject '" + s.id + "' contains non-finite values");
    const auto& y = d.labels[i];
    require(y.num_classes() == d.class_names.size(), ErrorKind::kSchema,
            "dataset: labels of subject '" + s.id + "' have " + std::to_string(y.num_classes()) +
                " classes, expected " + std::to_string(d.class_names.size()));
    require(static_cast<Eigen::Index>(y.num_timepoints()) == t, ErrorKind::kSchema,
            "dataset: labels of subject '" + s.id + "' cover " +
                std::to_string(y.num_timepoints()) + " time points, expected " +
                std::to_string(t));
    if (strict) {
      require(y == d.labels.front(), ErrorKind::kSchema,
              "dataset: labels of subject '" + s.id + "' differ from subject '" + first.id +
                  "' (strict mode)");
    }
  }
}

Dataset load_dataset(const fs::path& manifest_path, LoadOptions options) {
  std::ifstream in(manifest_path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open manifest " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, "manifest " + manifest_path.string() + ": " + e.what());
  }

  Dataset d;
  const fs::path base = manifest_path.parent_path();
  try {
    d.class_names = manifest.at("class_names").get<std::vector<std::string>>();
    for (const auto& entry : manifest.at("subjects")) {
      const auto id = entry.at("id").get<std::string>();
      const fs::path data = base / entry.at("data").get<std::string>();
      const fs::path labels = base / entry.at("labels").get<std::string>();
      Matrix y = csv::read_matrix(labels);
      try {
        d.labels.emplace_back(std::move(y));
      } catch (const Error& e) {
        fail(e.kind(), "subject '" + id + "': " + e.what());
      }
      d.subjects.push_back({id, csv::read_matrix(data)});
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, "manifest " + manifest_path.string() + ": " + e.what());
  }
  validate_dataset(d, options.strict);
  return d;
}

void save_dataset(const Dataset& d, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + dir.string());
  json manifest;
  manifest["class_names"] = d.class_names;
  manifest["subjects"] = json::array();
  for (std::size_t i = 0; i < d.subjects.size(); ++i) {
    const auto& s = d.subjects[i];
    const std::string data = s.id + "_data.csv";
    const std::string labels = s.id + "_labels.csv";
    csv::write_matrix(dir / data, s.x);
    csv::write_matrix(dir / labels, d.labels[i].y());
    manifest["subjects"].push_back({{"id", s.id}, {"data", data}, {"labels", labels}});
  }
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write manifest in " + dir.string());
  out << manifest.dump(2) << '\n';
}

Matrix standardize_columns(const Matrix& x, std::vector<Eigen::Index>* constant_columns) {
  require(x.rows() >= 2, ErrorKind::kInvalidArgument,
          "standardize_columns: need at least 2 rows");
  Matrix out(x.rows(), x.cols());
  const double denom = static_cast<double>(x.rows() - 1);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double mean = x.col(j).mean();
    Vector centered = x.col(j).array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / denom);
    const double scale = std::max(1.0, x.col(j).cwiseAbs().maxCoeff());
    if (sd <= 1e-12 * scale) {
      out.col(j).setZero();
      if (constant_columns) constant_columns->push_back(j);
    } else {
      out.col(j) = centered / sd;
    }
  }
  return out;
}

NormalizeResult normalize(const Dataset& d) {
  NormalizeResult result{d, {}};
  for (auto& s : result.dataset.subjects) {
    std::vector<Eigen::Index> constant;
    s.x = standardize_columns(s.x, &constant);
    for (auto j : constant) {
      result.advisories.push_back("subject '" + s.id + "': column " + std::to_string(j) +
                                  " is constant; set to zero");
    }
  }
  return result;
}

LosoSplit split_loso(const Dataset& d, std::size_t held_out) {
  require(d.num_subjects() >= 2, ErrorKind::kInvalidArgument,
          "split_loso: need at least 2 subjects");
  require(held_out < d.num_subjects(), ErrorKind::kInvalidArgument,
          "split_loso: held-out index " + std::to_string(held_out) + " out of range for " +
              std::to_string(d.num_subjects()) + " subjects");
  LosoSplit split;
  split.train.class_names = d.class_names;
  split.test.class_names = d.class_names;
  for (std::size_t i = 0; i < d.num_subjects(); ++i) {
    Dataset& side = i == held_out ? split.test : split.train;
    side.subjects.push_back(d.subjects[i]);
    side.labels.push_back(d.labels[i]);
  }
  split.degenerate = split.train.num_subjects() == 1;
  return split;
}

Dataset truncate_timepoints(const Dataset& d, std::size_t count) {
  require(count >= 2 && count <= d.num_timepoints(), ErrorKind::kInvalidArgument,
          "truncate_timepoints: count " + std::to_string(count) + " outside [2, " +
              std::to_string(d.num_timepoints()) + "]");
  Dataset out;
  out.class_names = d.class_names;
  const auto n = static_cast<Eigen::Index>(count);
  for (std::size_t i = 0; i < d.num_subjects(); ++i) {
    out.subjects.push_back({d.subjects[i].id, d.subjects[i].x.topRows(n)});
    out.labels.emplace_back(d.labels[i].y().leftCols(n));
  }
  return out;
}

}  // namespace supalign
