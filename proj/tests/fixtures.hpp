#pragma once

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "supalign/dataset.hpp"

namespace testing {

// S subjects of T×V Gaussian data sharing one cyclic label layout.
inline supalign::Dataset random_dataset(std::size_t s, Eigen::Index t, Eigen::Index v,
                                        std::size_t l, std::uint64_t seed,
                                        bool standardize = true) {
  std::mt19937_64 rng(seed);
  supalign::Dataset d;
  for (std::size_t c = 0; c < l; ++c) d.class_names.push_back("c" + std::to_string(c));
  std::vector<int> classes;
  for (Eigen::Index i = 0; i < t; ++i) {
    classes.push_back(static_cast<int>(i % static_cast<Eigen::Index>(l)));
  }
  const auto labels = supalign::LabelMatrix::from_classes(classes, l);
  for (std::size_t i = 0; i < s; ++i) {
    supalign::Matrix x = oracle::random_matrix(t, v, rng);
    if (standardize) x = supalign::standardize_columns(x);
    d.subjects.push_back({"s" + std::to_string(i), x});
    d.labels.push_back(labels);
  }
  return d;
}

}  // namespace testing
