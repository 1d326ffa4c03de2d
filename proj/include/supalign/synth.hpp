#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string_view>
#include <vector>

#include "supalign/dataset.hpp"
#include "supalign/linalg.hpp"

namespace supalign {

enum class Rotation { kOrthogonal, kIdentity };

std::string_view to_string(Rotation rotation);
Rotation parse_rotation(std::string_view name);

struct SynthConfig {
  std::size_t subjects = 6;
  std::size_t classes = 4;
  std::size_t instances_per_class = 4;
  std::size_t instance_length = 5;
  std::size_t voxels = 50;
  double noise_sigma = 0.5;
  Rotation rotation = Rotation::kOrthogonal;
  std::uint64_t seed = 0;

  std::size_t timepoints() const { return classes * instances_per_class * instance_length; }
};

/// Throws invalid-argument on zero counts, V < L or a negative / non-finite σ.
void validate_config(const SynthConfig& cfg);

struct GroundTruth {
  /// Class per time point. Instances cycle through the classes in order,
  /// each lasting `instance_length` time points.
  std::vector<int> classes;
  Matrix signatures;              // L × L, orthonormal rows
  Matrix embedding;               // L × V, orthonormal rows
  std::vector<Matrix> rotations;  // V × V per subject
};

struct SynthResult {
  Dataset dataset;
  GroundTruth truth;
};

/// X_i = standardize(C[classes] · E · Q_i + σ·N_i). Every random draw comes
/// from a named sub-stream of `cfg.seed`, so a subject's data does not depend
/// on how many subjects are generated after it.
SynthResult generate(const SynthConfig& cfg);

/// Deterministic engine for (seed, stream name).
std::mt19937_64 substream(std::uint64_t seed, std::string_view name);

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the signs
/// of R's diagonal folded into Q.
Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng);

/// Writes ground_truth.json.
void save_ground_truth(const SynthConfig& cfg, const GroundTruth& truth,
                       const std::filesystem::path& dir);

}  // namespace supalign
