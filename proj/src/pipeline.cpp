#include "tripchain/pipeline.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "tripchain/evaluation.hpp"
#include "tripchain/similarity.hpp"

namespace tripchain {

SimilarityParams effective_similarity(const HyperParams& params) {
  SimilarityParams sim = params.similarity;
  if (params.ablation.drop_feature1) sim.a1 = 0.0;
  if (params.ablation.drop_feature2) sim.a2 = 0.0;
  if (params.ablation.drop_feature3) sim.a3 = 0.0;
  return sim;
}

Eigen::MatrixXd propagate_probabilities(const Eigen::MatrixXd& weights,
                                        std::span<const TripChain> known_chains,
                                        const TripVocabulary& vocab, int neighbor_count,
                                        double alpha, double tol, int max_iter) {
  const std::size_t n = static_cast<std::size_t>(weights.rows());
  const std::size_t known_count = known_chains.size();
  if (known_count == 0 || known_count >= n) {
    throw std::invalid_argument("need a nonempty known prefix and at least one day to predict");
  }
  const std::size_t m = vocab.size();
  const std::size_t unknown_count = n - known_count;
  if (m == 0) return Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unknown_count), 0);

  std::vector<bool> known(n, false);
  Eigen::MatrixXd labels = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                 static_cast<Eigen::Index>(m));
  for (std::size_t d = 0; d < known_count; ++d) {
    known[d] = true;
    for (std::size_t t = 0; t < m; ++t) {
      if (known_chains[d].contains(vocab.trip(static_cast<int>(t)))) {
        labels(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(t)) = 1.0;
      }
    }
  }
  Eigen::VectorXd init(static_cast<Eigen::Index>(m));
  for (std::size_t t = 0; t < m; ++t) {
    init(static_cast<Eigen::Index>(t)) =
        static_cast<double>(vocab.occurrences(static_cast<int>(t))) /
        static_cast<double>(vocab.training_days());
  }

  const Eigen::MatrixXd scores =
      label_propagation(weights, known, labels, init, neighbor_count, alpha, tol, max_iter);
  return scores.bottomRows(static_cast<Eigen::Index>(unknown_count));
}

Eigen::MatrixXd forest_probabilities(const Eigen::MatrixXd& coordinates,
                                     std::size_t known_count,
                                     std::span<const TripChain> known_chains,
                                     const TripVocabulary& vocab, const ForestParams& forest,
                                     std::uint64_t seed) {
  const std::size_t n = static_cast<std::size_t>(coordinates.rows());
  if (known_chains.size() != known_count || known_count == 0 || known_count >= n) {
    throw std::invalid_argument("coordinates must cover the known prefix plus the days to predict");
  }
  const std::size_t m = vocab.size();
  const std::size_t unknown_count = n - known_count;
  Eigen::MatrixXd probabilities =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(unknown_count),
                            static_cast<Eigen::Index>(m));
  if (m == 0) return probabilities;

  const Eigen::MatrixXd train = coordinates.topRows(static_cast<Eigen::Index>(known_count));
  const Eigen::MatrixXd test = coordinates.bottomRows(static_cast<Eigen::Index>(unknown_count));
  std::vector<int> labels(known_count);
  for (std::size_t t = 0; t < m; ++t) {
    const Trip& trip = vocab.trip(static_cast<int>(t));
    for (std::size_t d = 0; d < known_count; ++d) {
      labels[d] = known_chains[d].contains(trip) ? 1 : 0;
    }
    ForestParams per_trip = forest;
    per_trip.seed = mix_seed(seed, t);
    const RandomForest model = RandomForest::fit(train, labels, per_trip);
    probabilities.col(static_cast<Eigen::Index>(t)) = model.predict(test);
  }
  return probabilities;
}

std::vector<DayPrediction> assemble_predictions(const Eigen::MatrixXd& probabilities,
                                                const TripVocabulary& vocab,
                                                const CooccurrenceTable& table, double lambda,
                                                const AssemblyLimits& limits,
                                                bool correlation_disabled) {
  std::vector<DayPrediction> days;
  days.reserve(static_cast<std::size_t>(probabilities.rows()));
  for (Eigen::Index d = 0; d < probabilities.rows(); ++d) {
    DayPrediction prediction;
    prediction.probabilities = probabilities.row(d);
    if (correlation_disabled) {
      prediction.chain = disable_correlation_predict(prediction.probabilities, vocab);
      double total = 0.0;
      for (const Trip& trip : prediction.chain.trips()) {
        const auto index = vocab.index_of(trip);
        total += prediction.probabilities(*index);
        prediction.score.trip_indices.push_back(*index);
      }
      const std::size_t kept = prediction.chain.trips().size();
      prediction.score.probability_term =
          kept == 0 ? limits.empty_score : total / static_cast<double>(kept);
      prediction.score.total = prediction.score.probability_term;
    } else {
      auto [chain, score] =
          assemble_chain(prediction.probabilities, vocab, table, lambda, limits);
      prediction.chain = std::move(chain);
      prediction.score = std::move(score);
    }
    days.push_back(std::move(prediction));
  }
  return days;
}

PipelineResult run_pipeline(const Calendar& calendar, std::span<const TripChain> known_chains,
                            std::size_t predict_end, const HyperParams& params,
                            const PipelineOptions& options) {
  const std::size_t known_count = known_chains.size();
  if (predict_end > calendar.size()) {
    throw std::invalid_argument("predict_end exceeds the calendar");
  }
  if (known_count == 0 || known_count >= predict_end) {
    throw std::invalid_argument("need a nonempty known prefix before the days to predict");
  }

  std::vector<CalendarDay> window(calendar.begin(),
                                  calendar.begin() + static_cast<std::ptrdiff_t>(predict_end));
  const Calendar graph_days = Calendar::from_days(std::move(window));
  const Eigen::MatrixXd weights = build_graph(graph_days, effective_similarity(params));

  PipelineResult result;
  result.vocabulary = TripVocabulary::build(known_chains);

  Eigen::MatrixXd probabilities;
  if (params.pipeline == Pipeline::kLabelPropagation) {
    probabilities =
        propagate_probabilities(weights, known_chains, result.vocabulary,
                                params.neighbor_count, params.refresh_rate, options.lp_tol,
                                options.lp_max_iter);
  } else {
    const int n = static_cast<int>(predict_end);
    const int dim = std::min(params.embedding_dim, n);
    const Embedding embedding = spectral_embed(weights, dim, options.eigen_order);
    probabilities = forest_probabilities(embedding.coordinates, known_count, known_chains,
                                         result.vocabulary, options.forest, options.seed);
  }

  const CooccurrenceTable table =
      CooccurrenceTable::build(result.vocabulary, options.normalization);
  result.days =
      assemble_predictions(probabilities, result.vocabulary, table,
                           params.correlation_weight, options.limits,
                           params.ablation.disable_correlation);
  return result;
}

}  // namespace tripchain
