#include "tripchain/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "tripchain/evaluation.hpp"
#include "tripchain/similarity.hpp"

namespace tripchain {

namespace {

struct NeighborRow {
  std::vector<std::size_t> indices;
  std::vector<double> weights;
  double total = 0.0;
};

std::vector<NeighborRow> neighbor_rows(const Eigen::MatrixXd& weights, int k) {
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<NeighborRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].indices = k_nearest(weights, i, k);
    for (std::size_t j : rows[i].indices) {
      double w = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      rows[i].weights.push_back(w);
      rows[i].total += w;
    }
  }
  return rows;
}

void validate_propagation_args(const Eigen::MatrixXd& weights, const std::vector<bool>& known,
                               const Eigen::MatrixXd& known_labels,
                               const Eigen::VectorXd& unknown_init, int neighbor_count,
                               double alpha) {
  if (weights.rows() != weights.cols()) throw std::invalid_argument("weight matrix must be square");
  auto n = weights.rows();
  if (static_cast<Eigen::Index>(known.size()) != n || known_labels.rows() != n) {
    throw std::invalid_argument("label matrix and known mask must match the graph size");
  }
  if (known_labels.cols() != unknown_init.size()) {
    throw std::invalid_argument("unknown-row initialization must cover every label column");
  }
  if (neighbor_count < 1) throw std::invalid_argument("neighbor count must be at least 1");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
}

Eigen::MatrixXd initial_scores(const std::vector<bool>& known, const Eigen::MatrixXd& known_labels,
                               const Eigen::VectorXd& unknown_init) {
  Eigen::MatrixXd f(known_labels.rows(), known_labels.cols());
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    if (known[static_cast<std::size_t>(i)]) {
      f.row(i) = known_labels.row(i);
    } else {
      f.row(i) = unknown_init.transpose();
    }
  }
  return f;
}

}  // namespace

Eigen::MatrixXd label_propagation(const Eigen::MatrixXd& weights, const std::vector<bool>& known,
                                  const Eigen::MatrixXd& known_labels,
                                  const Eigen::VectorXd& unknown_init, int neighbor_count,
                                  double alpha, double tol, int max_iter) {
  validate_propagation_args(weights, known, known_labels, unknown_init, neighbor_count, alpha);
  const auto n = weights.rows();
  auto neighbors = neighbor_rows(weights, neighbor_count);

  Eigen::MatrixXd f = initial_scores(known, known_labels, unknown_init);
  Eigen::MatrixXd next = f;
  for (int iter = 0; iter < max_iter; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& row = neighbors[static_cast<std::size_t>(i)];
      if (row.total <= 0.0) {
        next.row(i) = f.row(i);
        continue;
      }
      Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(f.cols());
      for (std::size_t a = 0; a < row.indices.size(); ++a) {
        acc += row.weights[a] * f.row(static_cast<Eigen::Index>(row.indices[a]));
      }
      next.row(i) = alpha * (acc / row.total) + (1.0 - alpha) * f.row(i);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (known[static_cast<std::size_t>(i)]) next.row(i) = known_labels.row(i);
    }
    double delta = (next - f).cwiseAbs().maxCoeff();
    f.swap(next);
    if (delta < tol) break;
  }
  return f;
}

Eigen::MatrixXd label_propagation_fixpoint(const Eigen::MatrixXd& weights,
                                           const std::vector<bool>& known,
                                           const Eigen::MatrixXd& known_labels,
                                           const Eigen::VectorXd& unknown_init,
                                           int neighbor_count) {
  validate_propagation_args(weights, known, known_labels, unknown_init, neighbor_count, 0.5);
  const auto n = weights.rows();
  auto neighbors = neighbor_rows(weights, neighbor_count);

  // Free rows are unknown rows with positive neighbor weight; everything else
  // is fixed (clamped truth, or zero-weight rows parked at initialization).
  std::vector<Eigen::Index> free_rows;
  std::vector<Eigen::Index> free_slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!known[static_cast<std::size_t>(i)] &&
        neighbors[static_cast<std::size_t>(i)].total > 0.0) {
      free_slot[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(free_rows.size());
      free_rows.push_back(i);
    }
  }
  Eigen::MatrixXd result = initial_scores(known, known_labels, unknown_init);
  if (free_rows.empty()) return result;

  const auto u = static_cast<Eigen::Index>(free_rows.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(u, u);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(u, result.cols());
  for (Eigen::Index r = 0; r < u; ++r) {
    const auto& row = neighbors[static_cast<std::size_t>(free_rows[r])];
    for (std::size_t a = 0; a < row.indices.size(); ++a) {
      double p = row.weights[a] / row.total;
      auto j = static_cast<Eigen::Index>(row.indices[a]);
      if (free_slot[row.indices[a]] >= 0) {
        system(r, free_slot[row.indices[a]]) -= p;
      } else {
        rhs.row(r) += p * result.row(j);
      }
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "propagation fixpoint is not unique: an unknown region reaches no clamped value");
  }
  Eigen::MatrixXd solution = lu.solve(rhs);
  for (Eigen::Index r = 0; r < u; ++r) result.row(free_rows[r]) = solution.row(r);
  return result;
}

Embedding spectral_embed(const Eigen::MatrixXd& weights, int k, EigenOrder order) {
  if (weights.rows() != weights.cols()) throw std::invalid_argument("weight matrix must be square");
  const auto n = weights.rows();
  if (k < 2 || static_cast<Eigen::Index>(k) > n) {
    throw std::invalid_argument("embedding dimension must satisfy 2 <= k <= n_days");
  }
  Eigen::MatrixXd laplacian = -weights;
  laplacian.diagonal() = weights.rowwise().sum();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("Laplacian eigendecomposition did not converge");
  }
  Eigen::Index start = order == EigenOrder::kSmallest ? 0 : n - k;
  Embedding out;
  out.coordinates = solver.eigenvectors().middleCols(start, k);
  out.eigenvalues = solver.eigenvalues().segment(start, k);
  return out;
}

RandomForest RandomForest::fit(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                               const ForestParams& params) {
  const auto n = features.rows();
  if (n < 1) throw std::invalid_argument("decision forest needs at least one training row");
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw std::invalid_argument("label count must match training rows");
  }
  if (params.tree_count < 1 || params.max_depth < 0 || params.min_samples_leaf < 1) {
    throw std::invalid_argument("invalid forest parameters");
  }
  const auto d = features.cols();
  const int mtry =
      std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(d)))));

  RandomForest forest;
  forest.n_features_ = d;
  forest.trees_.resize(static_cast<std::size_t>(params.tree_count));

  struct Builder {
    const Eigen::MatrixXd& x;
    const std::vector<int>& y;
    const ForestParams& params;
    int mtry;
    std::mt19937_64 rng;
    Tree* tree;

    int build(std::vector<int>& samples, int depth) {
      int node_index = static_cast<int>(tree->nodes.size());
      tree->nodes.emplace_back();
      int size = static_cast<int>(samples.size());
      int pos = 0;
      for (int s : samples) pos += y[static_cast<std::size_t>(s)];

      auto make_leaf = [&](int idx) {
        tree->nodes[static_cast<std::size_t>(idx)].vote = 2 * pos > size ? 1 : 0;
        return idx;
      };
      if (depth >= params.max_depth || pos == 0 || pos == size ||
          size < 2 * params.min_samples_leaf) {
        return make_leaf(node_index);
      }

      // Sample mtry distinct candidate features.
      std::vector<int> feats(static_cast<std::size_t>(x.cols()));
      std::iota(feats.begin(), feats.end(), 0);
      for (int i = 0; i < mtry && i + 1 < static_cast<int>(feats.size()); ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(feats.size()) - 1);
        std::swap(feats[static_cast<std::size_t>(i)], feats[static_cast<std::size_t>(pick(rng))]);
      }
      feats.resize(static_cast<std::size_t>(std::min<int>(mtry, static_cast<int>(x.cols()))));

      double best_impurity = std::numeric_limits<double>::infinity();
      int best_feature = -1;
      double best_threshold = 0.0;
      std::vector<std::pair<double, int>> ordered;
      for (int f : feats) {
        ordered.clear();
        for (int s : samples) {
          ordered.emplace_back(x(s, f), y[static_cast<std::size_t>(s)]);
        }
        std::sort(ordered.begin(), ordered.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        int left_n = 0, left_pos = 0;
        for (int i = 0; i + 1 < size; ++i) {
          left_n += 1;
          left_pos += ordered[static_cast<std::size_t>(i)].second;
          if (ordered[static_cast<std::size_t>(i)].first ==
              ordered[static_cast<std::size_t>(i + 1)].first) {
            continue;  // can't split between equal values
          }
          if (left_n < params.min_samples_leaf || size - left_n < params.min_samples_leaf) {
            continue;
          }
          int right_n = size - left_n, right_pos = pos - left_pos;
          auto gini = [](int cnt, int positives) {
            double p = static_cast<double>(positives) / cnt;
            return 2.0 * p * (1.0 - p);
          };
          double impurity = (left_n * gini(left_n, left_pos) + right_n * gini(right_n, right_pos)) /
                            static_cast<double>(size);
          if (impurity < best_impurity) {
            best_impurity = impurity;
            best_feature = f;
            best_threshold = 0.5 * (ordered[static_cast<std::size_t>(i)].first +
                                    ordered[static_cast<std::size_t>(i + 1)].first);
          }
        }
      }
      if (best_feature < 0) return make_leaf(node_index);

      std::vector<int> left, right;
      for (int s : samples) {
        (x(s, best_feature) < best_threshold ? left : right).push_back(s);
      }
      if (left.empty() || right.empty()) return make_leaf(node_index);

      samples.clear();
      samples.shrink_to_fit();
      int left_child = build(left, depth + 1);
      int right_child = build(right, depth + 1);
      auto& node = tree->nodes[static_cast<std::size_t>(node_index)];
      node.feature = best_feature;
      node.threshold = best_threshold;
      node.left = left_child;
      node.right = right_child;
      return node_index;
    }
  };

  for (int t = 0; t < params.tree_count; ++t) {
    Builder builder{features, labels, params, mtry,
                    std::mt19937_64(mix_seed(params.seed, static_cast<std::uint64_t>(t))),
                    &forest.trees_[static_cast<std::size_t>(t)]};
    std::vector<int> bootstrap(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(n) - 1);
    for (auto& s : bootstrap) s = pick(builder.rng);
    builder.build(bootstrap, 0);
  }
  return forest;
}

Eigen::VectorXd RandomForest::predict(const Eigen::MatrixXd& features) const {
  if (features.cols() != n_features_) {
    throw std::invalid_argument("feature dimension differs from the fitted forest");
  }
  Eigen::VectorXd probs = Eigen::VectorXd::Zero(features.rows());
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    int votes = 0;
    for (const auto& tree : trees_) {
      int node = 0;
      while (tree.nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        node = features(r, nd.feature) < nd.threshold ? nd.left : nd.right;
      }
      votes += tree.nodes[static_cast<std::size_t>(node)].vote;
    }
    probs(r) = static_cast<double>(votes) / static_cast<double>(trees_.size());
  }
  return probs;
}

std::vector<TripChain> baseline_random_guess(const TripVocabulary& vocab, std::size_t horizon,
                                             std::uint64_t seed) {
  if (vocab.training_days() < 1) {
    throw std::invalid_argument("random-guess baseline needs at least one training day");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double n_train = static_cast<double>(vocab.training_days());
  std::vector<TripChain> out;
  out.reserve(horizon);
  for (std::size_t day = 0; day < horizon; ++day) {
    std::vector<Trip> trips;
    for (std::size_t l = 0; l < vocab.size(); ++l) {
      double p = vocab.occurrences(static_cast<int>(l)) / n_train;
      if (unit(rng) < p) trips.push_back(vocab.trip(static_cast<int>(l)));
    }
    out.push_back(TripChain(std::move(trips)));
  }
  return out;
}

std::vector<TripChain> baseline_last_week(std::span<const TripChain> known, std::size_t horizon) {
  if (known.size() < 7) {
    throw std::invalid_argument("last-week baseline needs at least 7 known days");
  }
  std::vector<TripChain> out;
  out.reserve(horizon);
  for (std::size_t h = 0; h < horizon; ++h) {
    out.push_back(known[known.size() - 7 + (h % 7)]);
  }
  return out;
}

std::vector<TripChain> baseline_ngram(std::span<const TripChain> known,
                                      const TripVocabulary& vocab, std::size_t horizon,
                                      int order) {
  if (order < 1) throw std::invalid_argument("n-gram order must be at least 1");
  const int m = static_cast<int>(vocab.size());
  const int kEnd = m;        // generated to terminate a day
  const int kStart = m + 1;  // context padding, never generated

  // Transition counts: context (previous `order` tokens) -> next-token counts.
  std::map<std::vector<int>, std::map<int, int>> counts;
  std::vector<int> context;
  for (const auto& chain : known) {
    context.assign(static_cast<std::size_t>(order), kStart);
    auto step = [&](int token) {
      counts[context][token] += 1;
      context.erase(context.begin());
      context.push_back(token);
    };
    for (const auto& trip : chain) step(*vocab.index_of(trip));
    step(kEnd);
  }

  // Greedy argmax walk. Add-one smoothing never changes the argmax of a seen
  // context, so ties break toward the lowest trip token; a context with no
  // observations (unreachable when following observed transitions) ends the
  // day. Generation is capped to keep degenerate loops finite.
  constexpr int kMaxTrips = 10;
  std::vector<Trip> generated;
  context.assign(static_cast<std::size_t>(order), kStart);
  for (int produced = 0; produced < kMaxTrips; ++produced) {
    const auto it = counts.find(context);
    int best_token = kEnd;
    if (it != counts.end()) {
      int best_count = -1;
      for (int token = 0; token <= m; ++token) {
        auto found = it->second.find(token);
        int c = found == it->second.end() ? 0 : found->second;
        if (c > best_count) {
          best_count = c;
          best_token = token;
        }
      }
    }
    if (best_token == kEnd) break;
    generated.push_back(vocab.trip(best_token));
    context.erase(context.begin());
    context.push_back(best_token);
  }
  TripChain prediction(std::move(generated));
  return std::vector<TripChain>(horizon, prediction);
}

}  // namespace tripchain
