#include "supalign/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "supalign/errors.hpp"

namespace supalign {

double pearson(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::kInvalidArgument,
          "pearson: shapes differ");
  require(a.size() >= 2, ErrorKind::kInvalidArgument, "pearson: need at least 2 entries");
  const Eigen::ArrayXXd ca = a.array() - a.mean();
  const Eigen::ArrayXXd cb = b.array() - b.mean();
  const double saa = (ca * ca).sum();
  const double sbb = (cb * cb).sum();
  require(saa > 0.0 && sbb > 0.0, ErrorKind::kUndefinedCorrelation,
          "pearson: zero variance input");
  const double r = (ca * cb).sum() / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

InstanceLayout InstanceLayout::from_labels(const LabelMatrix& labels) {
  InstanceLayout layout;
  layout.by_class_.resize(labels.num_classes());
  layout.timepoints_ = labels.num_timepoints();
  const auto& classes = labels.classes();
  std::size_t t = 0;
  while (t < classes.size()) {
    const int c = classes[t];
    std::size_t end = t + 1;
    while (end < classes.size() && classes[end] == c) ++end;
    if (c >= 0) {
      auto& runs = layout.by_class_[static_cast<std::size_t>(c)];
      runs.push_back({c, runs.size(), static_cast<Eigen::Index>(t),
                      static_cast<Eigen::Index>(end - t)});
      for (std::size_t r = t; r < end; ++r) layout.labeled_rows_.push_back(static_cast<Eigen::Index>(r));
    }
    t = end;
  }
  return layout;
}

std::vector<std::size_t> InstanceLayout::counts() const {
  std::vector<std::size_t> out;
  out.reserve(by_class_.size());
  for (const auto& runs : by_class_) out.push_back(runs.size());
  return out;
}

std::size_t psi1(std::size_t s) { return s * (s - 1) / 2; }

std::size_t psi2(std::size_t s, std::span<const std::size_t> counts) {
  return psi1(s) * std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

std::size_t psi3(std::size_t s, std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c * c - c;
  return psi1(s) * total;
}

std::size_t psi4(std::size_t s, std::span<const std::size_t> counts) {
  const std::size_t all = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::size_t total = 0;
  for (auto c : counts) total += c * (all - c);
  return psi1(s) * total;
}

namespace {

void check_mapped(std::span<const Matrix> mapped) {
  require(mapped.size() >= 2, ErrorKind::kInvalidArgument,
          "correlation metrics need at least 2 subjects");
  for (const auto& m : mapped) {
    require(m.rows() == mapped.front().rows() && m.cols() == mapped.front().cols(),
            ErrorKind::kInvalidArgument, "correlation metrics: mapped shapes differ");
  }
}

// Accumulates correlations per subject pair; the mean runs over every
// correlation, the std over the per-pair means.
class PairAccumulator {
 public:
  explicit PairAccumulator(std::size_t subject_pairs) : sums_(subject_pairs, 0.0), counts_(subject_pairs, 0) {}

  void add(std::size_t pair, double r) {
    sums_[pair] += r;
    ++counts_[pair];
  }

  CorrelationStat finish() const {
    CorrelationStat stat;
    const std::size_t n = std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
    stat.pairs = n;
    if (n == 0) return stat;
    stat.defined = true;
    stat.mean = std::accumulate(sums_.begin(), sums_.end(), 0.0) / static_cast<double>(n);
    std::vector<double> pair_means;
    for (std::size_t p = 0; p < sums_.size(); ++p) {
      if (counts_[p]) pair_means.push_back(sums_[p] / static_cast<double>(counts_[p]));
    }
    const double mu = std::accumulate(pair_means.begin(), pair_means.end(), 0.0) /
                      static_cast<double>(pair_means.size());
    double var = 0.0;
    for (double m : pair_means) var += (m - mu) * (m - mu);
    stat.std = std::sqrt(var / static_cast<double>(pair_means.size()));
    return stat;
  }

 private:
  std::vector<double> sums_;
  std::vector<std::size_t> counts_;
};

// Centered, unit-norm flattening of every instance block, so equal-length
// block correlations reduce to dot products.
struct StandardizedBlocks {
  // [subject][class][ordinal]
  std::vector<std::vector<std::vector<Vector>>> blocks;
};

Vector standardize_block(const Matrix& block) {
  Vector flat = Eigen::Map<const Vector>(block.data(), block.size());
  flat.array() -= flat.mean();
  const double norm = flat.norm();
  require(norm > 0.0, ErrorKind::kUndefinedCorrelation,
          "correlation metrics: an instance block has zero variance");
  return flat / norm;
}

StandardizedBlocks standardize_all(std::span<const Matrix> mapped, const InstanceLayout& layout) {
  StandardizedBlocks out;
  out.blocks.resize(mapped.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    out.blocks[i].resize(layout.num_classes());
    for (std::size_t m = 0; m < layout.num_classes(); ++m) {
      for (const auto& inst : layout.instances(m)) {
        out.blocks[i][m].push_back(
            standardize_block(mapped[i].middleRows(inst.begin, inst.length)));
      }
    }
  }
  return out;
}

class InstanceCorrelator {
 public:
  InstanceCorrelator(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories)
      : mapped_(mapped), layout_(layout), advisories_(advisories),
        standardized_(standardize_all(mapped, layout)) {
    require(static_cast<std::size_t>(mapped.front().rows()) == layout.num_timepoints(),
            ErrorKind::kInvalidArgument,
            "correlation metrics: mapped rows do not match the label layout");
    if (advisories_) {
      const auto counts = layout.counts();
      for (std::size_t m = 0; m < counts.size(); ++m) {
        if (counts[m] == 0) {
          note("class " + std::to_string(m) + " has no instances and is excluded");
        }
      }
    }
  }

  double corr(std::size_t i, std::size_t m, std::size_t n, std::size_t j, std::size_t mm,
              std::size_t nn) {
    const auto& a = layout_.instances(m)[n];
    const auto& b = layout_.instances(mm)[nn];
    if (a.length == b.length) {
      return std::clamp(standardized_.blocks[i][m][n].dot(standardized_.blocks[j][mm][nn]), -1.0,
                        1.0);
    }
    const Eigen::Index len = std::min(a.length, b.length);
    note("instances of unequal length are truncated to the shorter one");
    return pearson(mapped_[i].middleRows(a.begin, len), mapped_[j].middleRows(b.begin, len));
  }

 private:
  void note(const std::string& message) {
    if (!advisories_) return;
    if (std::find(advisories_->begin(), advisories_->end(), message) == advisories_->end()) {
      advisories_->push_back(message);
    }
  }

  std::span<const Matrix> mapped_;
  const InstanceLayout& layout_;
  std::vector<std::string>* advisories_;
  StandardizedBlocks standardized_;
};

enum class InstanceRelation { kSamePosition, kSameClassOtherPosition, kOtherClass };

CorrelationStat instance_metric(std::span<const Matrix> mapped, const InstanceLayout& layout,
                                std::vector<std::string>* advisories, InstanceRelation relation) {
  check_mapped(mapped);
  InstanceCorrelator correlator(mapped, layout, advisories);
  const std::size_t s = mapped.size();
  const std::size_t l = layout.num_classes();
  PairAccumulator acc(psi1(s));
  std::size_t pair = 0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j, ++pair) {
      for (std::size_t m = 0; m < l; ++m) {
        const std::size_t lm = layout.instances(m).size();
        switch (relation) {
          case InstanceRelation::kSamePosition:
            for (std::size_t n = 0; n < lm; ++n) acc.add(pair, correlator.corr(i, m, n, j, m, n));
            break;
          case InstanceRelation::kSameClassOtherPosition:
            for (std::size_t n = 0; n < lm; ++n) {
              for (std::size_t o = 0; o < lm; ++o) {
                if (n != o) acc.add(pair, correlator.corr(i, m, n, j, m, o));
              }
            }
            break;
          case InstanceRelation::kOtherClass:
            for (std::size_t mm = 0; mm < l; ++mm) {
              if (mm == m) continue;
              for (std::size_t n = 0; n < lm; ++n) {
                for (std::size_t o = 0; o < layout.instances(mm).size(); ++o) {
                  acc.add(pair, correlator.corr(i, m, n, j, mm, o));
                }
              }
            }
            break;
        }
      }
    }
  }
  return acc.finish();
}

}  // namespace

CorrelationStat rho1(std::span<const Matrix> mapped, const std::vector<Eigen::Index>* rows) {
  check_mapped(mapped);
  std::vector<Matrix> selected;
  if (rows) {
    require(!rows->empty(), ErrorKind::kInvalidArgument, "rho1: empty row selection");
    for (const auto& m : mapped) selected.push_back(m(*rows, Eigen::all));
    mapped = selected;
  }
  const std::size_t s = mapped.size();
  PairAccumulator acc(psi1(s));
  std::size_t pair = 0;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j, ++pair) acc.add(pair, pearson(mapped[i], mapped[j]));
  }
  return acc.finish();
}

CorrelationStat rho2(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories) {
  return instance_metric(mapped, layout, advisories, InstanceRelation::kSamePosition);
}

CorrelationStat rho3(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories) {
  return instance_metric(mapped, layout, advisories, InstanceRelation::kSameClassOtherPosition);
}

CorrelationStat rho4(std::span<const Matrix> mapped, const InstanceLayout& layout,
                     std::vector<std::string>* advisories) {
  return instance_metric(mapped, layout, advisories, InstanceRelation::kOtherClass);
}

CorrelationReport correlation_report(std::span<const Matrix> mapped, const LabelMatrix& labels,
                                     bool include_rest_in_rho1) {
  CorrelationReport report;
  const InstanceLayout layout = InstanceLayout::from_labels(labels);
  report.rho1 = include_rest_in_rho1 || !labels.has_rest() ? rho1(mapped)
                                                           : rho1(mapped, &layout.labeled_rows());
  report.rho2 = rho2(mapped, layout, &report.advisories);
  report.rho3 = rho3(mapped, layout, &report.advisories);
  report.rho4 = rho4(mapped, layout, &report.advisories);
  if (!report.rho3.defined) {
    report.advisories.push_back("rho3 undefined: no class has two or more instances");
  }
  if (!report.rho4.defined) {
    report.advisories.push_back("rho4 undefined: fewer than two classes have instances");
  }
  return report;
}

double roc_auc(std::span<const double> score, std::span<const bool> positive) {
  require(score.size() == positive.size(), ErrorKind::kInvalidArgument,
          "roc_auc: length mismatch");
  const std::size_t n = score.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  // Mann-Whitney U with mid-ranks for ties.
  double rank_sum = 0.0;
  std::size_t pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && score[order[j + 1]] == score[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (positive[order[k]]) {
        rank_sum += mid_rank;
        ++pos;
      }
    }
    i = j + 1;
  }
  const std::size_t neg = n - pos;
  require(pos > 0 && neg > 0, ErrorKind::kUndefinedCorrelation,
          "roc_auc: need both positive and negative samples");
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

ClassificationScores classification_scores(std::span<const int> predicted,
                                           std::span<const int> truth, std::size_t num_classes,
                                           const Matrix* scores) {
  require(predicted.size() == truth.size(), ErrorKind::kInvalidArgument,
          "classification_scores: length mismatch");
  require(!truth.empty(), ErrorKind::kInvalidArgument, "classification_scores: no samples");
  require(num_classes >= 2, ErrorKind::kInvalidArgument,
          "classification_scores: need at least 2 classes");
  if (scores) {
    require(scores->rows() == static_cast<Eigen::Index>(truth.size()) &&
                scores->cols() == static_cast<Eigen::Index>(num_classes),
            ErrorKind::kInvalidArgument, "classification_scores: score matrix has wrong shape");
  }

  ClassificationScores out;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += predicted[i] == truth[i];
  out.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());

  auto auc_for = [&](std::size_t c) -> std::optional<double> {
    std::vector<bool> pos(truth.size());
    std::size_t npos = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      pos[i] = truth[i] == static_cast<int>(c);
      npos += pos[i];
    }
    if (npos == 0 || npos == truth.size()) return std::nullopt;
    std::vector<double> s(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      s[i] = scores ? (*scores)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c))
                    : (predicted[i] == static_cast<int>(c) ? 1.0 : 0.0);
    }
    std::unique_ptr<bool[]> flags(new bool[pos.size()]);
    for (std::size_t i = 0; i < pos.size(); ++i) flags[i] = pos[i];
    return roc_auc(s, std::span<const bool>(flags.get(), pos.size()));
  };

  if (num_classes == 2) {
    out.auc = auc_for(1);
  } else {
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
      if (auto a = auc_for(c)) {
        total += *a;
        ++used;
      }
    }
    if (used) out.auc = total / static_cast<double>(used);
  }
  if (!out.auc) out.advisories.push_back("AUC undefined: truth contains a single class");
  return out;
}

}  // namespace supalign
