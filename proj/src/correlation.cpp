#include "tripchain/correlation.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <stdexcept>

namespace tripchain {

CooccurrenceTable CooccurrenceTable::build(const TripVocabulary& vocab, NormalizationMode mode) {
  CooccurrenceTable table;
  table.size_ = vocab.size();
  table.mode_ = mode;
  const std::size_t m = table.size_;
  table.values_.assign(m * m, 0.0);
  if (m == 0) return table;

  if (mode == NormalizationMode::kGlobal) {
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        total += vocab.cooccurrence(static_cast<int>(i), static_cast<int>(j));
      }
    }
    if (total > 0.0) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
          double v = vocab.cooccurrence(static_cast<int>(i), static_cast<int>(j)) / total;
          table.values_[i * m + j] = v;
          table.values_[j * m + i] = v;
        }
      }
    }
    return table;
  }

  // Literal per-pair normalization: half the sum of j's column total and i's
  // row total (the table is symmetric, so both are marginals).
  std::vector<double> marginal(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      marginal[i] += vocab.cooccurrence(static_cast<int>(i), static_cast<int>(j));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double denom = 0.5 * (marginal[i] + marginal[j]);
      double v = denom > 0.0
                     ? vocab.cooccurrence(static_cast<int>(i), static_cast<int>(j)) / denom
                     : 0.0;
      table.values_[i * m + j] = v;
      table.values_[j * m + i] = v;
    }
  }
  return table;
}

double CooccurrenceTable::normalized(int i, int j) const {
  auto ui = static_cast<std::size_t>(i);
  auto uj = static_cast<std::size_t>(j);
  if (ui >= size_ || uj >= size_) throw std::out_of_range("trip index out of range");
  return values_[ui * size_ + uj];
}

std::pair<TripChain, ChainScore> assemble_chain(const Eigen::VectorXd& probabilities,
                                                const TripVocabulary& vocab,
                                                const CooccurrenceTable& table, double lambda,
                                                const AssemblyLimits& limits) {
  if (static_cast<std::size_t>(probabilities.size()) != vocab.size() ||
      vocab.size() != table.size()) {
    throw std::invalid_argument("probability vector, vocabulary, and table sizes must agree");
  }

  // Candidate trips: probability floor, then strongest max_candidates.
  std::vector<int> candidates;
  for (int i = 0; i < probabilities.size(); ++i) {
    if (probabilities(i) >= limits.min_probability) candidates.push_back(i);
  }
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    if (probabilities(a) != probabilities(b)) return probabilities(a) > probabilities(b);
    return a < b;
  });
  if (candidates.size() > static_cast<std::size_t>(limits.max_candidates)) {
    candidates.resize(static_cast<std::size_t>(limits.max_candidates));
  }
  std::sort(candidates.begin(), candidates.end());

  const int c = static_cast<int>(candidates.size());
  ChainScore best;
  best.total = limits.empty_score;
  best.probability_term = limits.empty_score;
  std::uint32_t best_mask = 0;

  auto indices_of = [&](std::uint32_t mask) {
    std::vector<int> out;  // ascending: masked bits are cleared lowest-first
    for (std::uint32_t r = mask; r != 0; r &= r - 1) {
      out.push_back(candidates[static_cast<std::size_t>(std::countr_zero(r))]);
    }
    return out;
  };

  if (c > 0) {
    const std::uint32_t n_subsets = 1u << c;
    // prob_sum[S] and pair_sum[S] grow incrementally from S minus its lowest
    // set bit, making the full enumeration linear in subsets x members.
    std::vector<double> prob_sum(n_subsets, 0.0), pair_sum(n_subsets, 0.0);
    for (std::uint32_t mask = 1; mask < n_subsets; ++mask) {
      int low = std::countr_zero(mask);
      std::uint32_t rest = mask & (mask - 1);
      double cross = 0.0;
      for (std::uint32_t r = rest; r != 0; r &= r - 1) {
        int other = std::countr_zero(r);
        cross += table.normalized(candidates[static_cast<std::size_t>(low)],
                                  candidates[static_cast<std::size_t>(other)]);
      }
      prob_sum[mask] = prob_sum[rest] + probabilities(candidates[static_cast<std::size_t>(low)]);
      pair_sum[mask] = pair_sum[rest] + cross;

      int k = std::popcount(mask);
      double prob_term = prob_sum[mask] / k;
      double corr_term = k >= 2 ? pair_sum[mask] / (0.5 * k * (k - 1)) : 0.0;
      double total = prob_term + lambda * corr_term;

      bool better = total > best.total;
      if (!better && total == best.total && best_mask != 0) {
        // Exact ties: fewer trips first, then lexicographic index sets.
        int best_k = std::popcount(best_mask);
        if (k != best_k) {
          better = k < best_k;
        } else {
          better = indices_of(mask) < indices_of(best_mask);
        }
      }
      if (better) {
        best.total = total;
        best.probability_term = prob_term;
        best.correlation_term = corr_term;
        best_mask = mask;
      }
    }
  }

  best.trip_indices.clear();
  std::vector<Trip> trips;
  for (std::uint32_t r = best_mask; r != 0; r &= r - 1) {
    int idx = candidates[static_cast<std::size_t>(std::countr_zero(r))];
    best.trip_indices.push_back(idx);
    trips.push_back(vocab.trip(idx));
  }
  if (best_mask == 0) {
    best.probability_term = limits.empty_score;
    best.correlation_term = 0.0;
    best.total = limits.empty_score;
  }
  return {TripChain(std::move(trips)), std::move(best)};
}

TripChain disable_correlation_predict(const Eigen::VectorXd& probabilities,
                                      const TripVocabulary& vocab) {
  if (static_cast<std::size_t>(probabilities.size()) != vocab.size()) {
    throw std::invalid_argument("probability vector must cover the vocabulary");
  }
  std::vector<Trip> trips;
  for (int i = 0; i < probabilities.size(); ++i) {
    if (probabilities(i) > 0.5) trips.push_back(vocab.trip(i));
  }
  return TripChain(std::move(trips));
}

}  // namespace tripchain
