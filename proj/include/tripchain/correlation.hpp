#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

enum class NormalizationMode {
  kGlobal,      // f*(i,j) = f(i,j) / sum over all unordered pairs
  kEq6Literal,  // f*(i,j) = f(i,j) / (0.5 * (col_sum(j) + row_sum(i)))
};

// Normalized pairwise co-occurrence scores over a trip vocabulary.
class CooccurrenceTable {
 public:
  static CooccurrenceTable build(const TripVocabulary& vocab, NormalizationMode mode);

  double normalized(int i, int j) const;
  NormalizationMode mode() const { return mode_; }
  std::size_t size() const { return size_; }

 private:
  std::vector<double> values_;  // dense size_ x size_, symmetric, zero diagonal
  std::size_t size_ = 0;
  NormalizationMode mode_ = NormalizationMode::kGlobal;
};

struct ChainScore {
  double total = 0.0;
  double probability_term = 0.0;   // mean p over members (or the empty score)
  double correlation_term = 0.0;   // mean normalized co-occurrence over pairs
  std::vector<int> trip_indices;   // ascending
};

struct AssemblyLimits {
  double min_probability = 0.2;  // candidate cutoff
  int max_candidates = 12;       // strongest candidates kept (by probability)
  double empty_score = 0.5;      // score assigned to predicting no travel
};

// Picks the trip subset maximizing mean probability + lambda * mean pairwise
// co-occurrence by exhaustive enumeration over the candidate set (including
// the empty set). Ties prefer fewer trips, then lexicographic indices.
std::pair<TripChain, ChainScore> assemble_chain(const Eigen::VectorXd& probabilities,
                                                const TripVocabulary& vocab,
                                                const CooccurrenceTable& table, double lambda,
                                                const AssemblyLimits& limits = {});

// Ablation path: no correlation module, keep trips with probability > 0.5.
TripChain disable_correlation_predict(const Eigen::VectorXd& probabilities,
                                      const TripVocabulary& vocab);

}  // namespace tripchain
