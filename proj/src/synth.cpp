#include "supalign/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "supalign/digest.hpp"
#include "supalign/errors.hpp"

namespace supalign {

std::string_view to_string(Rotation rotation) {
  return rotation == Rotation::kOrthogonal ? "orthogonal" : "identity";
}

Rotation parse_rotation(std::string_view name) {
  if (name == "orthogonal") return Rotation::kOrthogonal;
  if (name == "identity") return Rotation::kIdentity;
  fail(ErrorKind::kInvalidArgument, "unknown rotation '" + std::string(name) + "'");
}

void validate_config(const SynthConfig& cfg) {
  require(cfg.subjects >= 1 && cfg.classes >= 1 && cfg.instances_per_class >= 1 &&
              cfg.instance_length >= 1 && cfg.voxels >= 1,
          ErrorKind::kInvalidArgument, "synth: all counts must be at least 1");
  require(cfg.classes >= 2, ErrorKind::kInvalidArgument, "synth: need at least 2 classes");
  require(cfg.voxels >= cfg.classes, ErrorKind::kInvalidArgument,
          "synth: voxels (" + std::to_string(cfg.voxels) + ") must be at least classes (" +
              std::to_string(cfg.classes) + ")");
  require(std::isfinite(cfg.noise_sigma) && cfg.noise_sigma >= 0.0, ErrorKind::kInvalidArgument,
          "synth: noise_sigma must be finite and non-negative");
}

std::mt19937_64 substream(std::uint64_t seed, std::string_view name) {
  Digest d;
  d.update(name);
  const std::uint64_t h = d.value();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return std::mt19937_64(seq);
}

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  // Row-major fill keeps the draw order independent of Eigen's storage.
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  }
  return m;
}

}  // namespace

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
  const auto dim = static_cast<Eigen::Index>(n);
  const Matrix a = gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

SynthResult generate(const SynthConfig& cfg) {
  validate_config(cfg);
  const auto l = static_cast<Eigen::Index>(cfg.classes);
  const auto v = static_cast<Eigen::Index>(cfg.voxels);
  const auto t = static_cast<Eigen::Index>(cfg.timepoints());

  SynthResult out;
  GroundTruth& truth = out.truth;
  truth.classes.reserve(static_cast<std::size_t>(t));
  for (std::size_t rep = 0; rep < cfg.instances_per_class; ++rep) {
    for (std::size_t c = 0; c < cfg.classes; ++c) {
      for (std::size_t k = 0; k < cfg.instance_length; ++k) {
        truth.classes.push_back(static_cast<int>(c));
      }
    }
  }

  auto sig_rng = substream(cfg.seed, "signatures");
  truth.signatures = random_orthogonal(cfg.classes, sig_rng);
  auto emb_rng = substream(cfg.seed, "embedding");
  truth.embedding = random_orthogonal(cfg.voxels, emb_rng).topRows(l);

  Matrix latent(t, l);
  for (Eigen::Index r = 0; r < t; ++r) {
    latent.row(r) = truth.signatures.row(truth.classes[static_cast<std::size_t>(r)]);
  }
  const Matrix shared = latent * truth.embedding;  // T × V

  Dataset& d = out.dataset;
  for (std::size_t c = 0; c < cfg.classes; ++c) d.class_names.push_back("c" + std::to_string(c));
  const LabelMatrix labels = LabelMatrix::from_classes(truth.classes, cfg.classes);
  for (std::size_t i = 0; i < cfg.subjects; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "sub%02zu", i + 1);
    Matrix q = Matrix::Identity(v, v);
    if (cfg.rotation == Rotation::kOrthogonal) {
      auto rot_rng = substream(cfg.seed, "rotation/" + std::to_string(i));
      q = random_orthogonal(cfg.voxels, rot_rng);
    }
    Matrix x = shared * q;
    if (cfg.noise_sigma > 0.0) {
      auto noise_rng = substream(cfg.seed, "noise/" + std::to_string(i));
      x += cfg.noise_sigma * gaussian(t, v, noise_rng);
    }
    d.subjects.push_back({id, standardize_columns(x)});
    d.labels.push_back(labels);
    truth.rotations.push_back(std::move(q));
  }
  validate_dataset(d);
  return out;
}

namespace {

nlohmann::json rows_of(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void save_ground_truth(const SynthConfig& cfg, const GroundTruth& truth,
                       const std::filesystem::path& dir) {
  nlohmann::json doc;
  doc["config"] = {{"subjects", cfg.subjects},
                   {"classes", cfg.classes},
                   {"instances_per_class", cfg.instances_per_class},
                   {"instance_length", cfg.instance_length},
                   {"voxels", cfg.voxels},
                   {"noise_sigma", cfg.noise_sigma},
                   {"rotation", std::string(to_string(cfg.rotation))},
                   {"seed", cfg.seed}};
  doc["classes"] = truth.classes;
  doc["signatures"] = rows_of(truth.signatures);
  doc["embedding"] = rows_of(truth.embedding);
  nlohmann::json rotations = nlohmann::json::array();
  if (cfg.rotation == Rotation::kOrthogonal) {
    for (const auto& q : truth.rotations) rotations.push_back(rows_of(q));
  }
  doc["rotations"] = std::move(rotations);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::kIo, "cannot create " + dir.string());
  std::ofstream f(dir / "ground_truth.json", std::ios::binary | std::ios::trunc);
  require(static_cast<bool>(f), ErrorKind::kIo, "cannot write ground_truth.json");
  f << doc.dump() << '\n';
}

}  // namespace supalign
