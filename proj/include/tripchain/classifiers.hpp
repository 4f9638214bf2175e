#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// Iterative label diffusion over the day graph. Each sweep updates every row
// from the previous iterate:
//   f_i <- alpha * (sum_{j in n_i} w_ij f_j / sum_{j in n_i} w_ij) + (1-alpha) * f_i
// where n_i is the K strongest neighbors of i, then rows flagged `known` are
// reset to their ground-truth labels. Rows whose neighbor weights sum to zero
// keep their current value. Stops when the largest per-entry change falls
// below tol or after max_iter sweeps.
//
// known_labels rows are read only where known[i] is true; unknown rows start
// at unknown_init (one prior per column).
Eigen::MatrixXd label_propagation(const Eigen::MatrixXd& weights, const std::vector<bool>& known,
                                  const Eigen::MatrixXd& known_labels,
                                  const Eigen::VectorXd& unknown_init, int neighbor_count,
                                  double alpha, double tol = 1e-6, int max_iter = 100);

// Solves the same clamped fixpoint directly as a linear system:
// (I - P_UU) f_U = P_UK y_K over the unknown rows, column by column. Rows with
// zero neighbor weight are held at their initialization. Throws if the system
// is singular (an unknown region with no path to any clamped value).
Eigen::MatrixXd label_propagation_fixpoint(const Eigen::MatrixXd& weights,
                                           const std::vector<bool>& known,
                                           const Eigen::MatrixXd& known_labels,
                                           const Eigen::VectorXd& unknown_init,
                                           int neighbor_count);

enum class EigenOrder { kSmallest, kLargest };

struct Embedding {
  Eigen::MatrixXd coordinates;  // n_days × k, one row per day
  Eigen::VectorXd eigenvalues;  // k, ascending
};

// Eigenvector coordinates of the graph Laplacian L = D - W. `order` selects
// which end of the spectrum supplies the k coordinates (columns stay in
// ascending-eigenvalue order either way).
Embedding spectral_embed(const Eigen::MatrixXd& weights, int k,
                         EigenOrder order = EigenOrder::kSmallest);

struct ForestParams {
  int tree_count = 100;
  int max_depth = 8;
  int min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

// Bagged binary decision trees with Gini splits over sqrt(d) random feature
// subsets per node. The forest probability is the fraction of trees voting
// positive.
class RandomForest {
 public:
  static RandomForest fit(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                          const ForestParams& params);
  Eigen::VectorXd predict(const Eigen::MatrixXd& features) const;
  std::size_t tree_count() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int vote = 0;
  };
  struct Tree {
    std::vector<Node> nodes;
  };
  std::vector<Tree> trees_;
  Eigen::Index n_features_ = 0;
};

// Includes each vocabulary trip in each future day independently with
// probability n1/n_train (its training-day frequency).
std::vector<TripChain> baseline_random_guess(const TripVocabulary& vocab, std::size_t horizon,
                                             std::uint64_t seed);

// Tiles the last seven known days across the horizon: future day h receives
// the chain of known day n-7+(h mod 7). Requires at least 7 known days.
std::vector<TripChain> baseline_last_week(std::span<const TripChain> known, std::size_t horizon);

// Greedy generation from an add-one-smoothed Markov model over per-day token
// sequences (trips in canonical order between day-start/day-end markers).
// Every future day receives the same argmax walk, capped at 10 trips.
std::vector<TripChain> baseline_ngram(std::span<const TripChain> known,
                                      const TripVocabulary& vocab, std::size_t horizon,
                                      int order = 2);

}  // namespace tripchain
