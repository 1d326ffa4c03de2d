#include <doctest.h>

#include "../test_util.hpp"
#include "supalign/alignment.hpp"
#include "supalign/metrics.hpp"
#include "supalign/synth.hpp"

using namespace supalign;
using testing::error_kind;

namespace {

CorrelationReport report_for(Method m, const Dataset& d) {
  const auto model = fit_model(m, d, {});
  std::vector<Matrix> z;
  for (auto& f : map_dataset(model, d)) z.push_back(f.z);
  return correlation_report(z, d.labels.front());
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("default config produces a valid dataset") {
  const auto r = generate(SynthConfig{});
  const Dataset& d = r.dataset;
  CHECK(d.num_subjects() == 6);
  CHECK(d.num_timepoints() == 80);
  CHECK(d.num_features() == 50);
  CHECK(d.num_classes() == 4);
  CHECK_NOTHROW(validate_dataset(d));
  const auto layout = InstanceLayout::from_labels(d.labels.front());
  for (std::size_t m = 0; m < 4; ++m) {
    REQUIRE(layout.instances(m).size() == 4);
    for (const auto& inst : layout.instances(m)) CHECK(inst.length == 5);
  }
}

TEST_CASE("rotations are orthogonal") {
  const auto r = generate(SynthConfig{});
  for (const auto& q : r.truth.rotations) {
    CHECK((q.transpose() * q - Matrix::Identity(50, 50)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK((r.truth.signatures * r.truth.signatures.transpose() - Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
  CHECK((r.truth.embedding * r.truth.embedding.transpose() - Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-10);
}

TEST_CASE("seed determinism") {
  SynthConfig cfg;
  cfg.seed = 42;
  const auto a = generate(cfg), b = generate(cfg);
  for (std::size_t i = 0; i < 6; ++i) CHECK(a.dataset.subjects[i].x == b.dataset.subjects[i].x);
  cfg.seed = 43;
  const auto c = generate(cfg);
  CHECK(c.dataset.subjects[0].x != a.dataset.subjects[0].x);

  testing::TempDir d1, d2;
  cfg.seed = 42;
  save_dataset(a.dataset, d1.path());
  save_ground_truth(cfg, a.truth, d1.path());
  save_dataset(b.dataset, d2.path());
  save_ground_truth(cfg, b.truth, d2.path());
  for (const char* f : {"manifest.json", "sub01_data.csv", "sub06_labels.csv", "ground_truth.json"}) {
    CHECK(testing::read_file(d1 / f) == testing::read_file(d2 / f));
  }
}

TEST_CASE("a subject does not depend on how many follow it") {
  SynthConfig small;
  small.subjects = 2;
  const auto a = generate(small), b = generate(SynthConfig{});
  CHECK(a.dataset.subjects[1].x == b.dataset.subjects[1].x);
}

TEST_CASE("noise-free identity data gives identical subjects") {
  SynthConfig cfg;
  cfg.noise_sigma = 0.0;
  cfg.rotation = Rotation::kIdentity;
  const Dataset d = generate(cfg).dataset;
  for (std::size_t i = 1; i < 6; ++i) CHECK(d.subjects[i].x == d.subjects[0].x);
  CHECK(report_for(Method::kNone, d).rho1.mean == doctest::Approx(1.0));
}

TEST_CASE("noise-free rotations are recovered by sha") {
  SynthConfig cfg;
  cfg.noise_sigma = 0.0;
  const Dataset d = generate(cfg).dataset;
  const auto before = report_for(Method::kNone, d);
  const auto after = report_for(Method::kSha, d);
  CHECK(std::abs(before.rho2.mean) < 0.1);
  CHECK(after.rho2.mean >= 0.99);
  CHECK(after.rho3.mean >= 0.99);
  CHECK(after.rho4.mean < 0.0);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.voxels = 3;
  CHECK(error_kind([&] { generate(cfg); }) == ErrorKind::kInvalidArgument);
  cfg = {};
  cfg.instances_per_class = 0;
  CHECK(error_kind([&] { generate(cfg); }) == ErrorKind::kInvalidArgument);
  cfg = {};
  cfg.noise_sigma = -1;
  CHECK(error_kind([&] { generate(cfg); }) == ErrorKind::kInvalidArgument);
  CHECK(parse_rotation("identity") == Rotation::kIdentity);
  CHECK(error_kind([] { parse_rotation("spin"); }) == ErrorKind::kInvalidArgument);
}

}  // TEST_SUITE
