#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "tripchain/classifiers.hpp"
#include "tripchain/core.hpp"
#include "tripchain/correlation.hpp"

namespace tripchain {

// Knobs shared by every end-to-end run; the per-user HyperParams carry the
// searched values, these carry the fixed environment.
struct PipelineOptions {
  NormalizationMode normalization = NormalizationMode::kGlobal;
  AssemblyLimits limits;
  EigenOrder eigen_order = EigenOrder::kSmallest;
  ForestParams forest;  // per-trip seeds derive from `seed`, not forest.seed
  std::uint64_t seed = 0;
  double lp_tol = 1e-6;
  int lp_max_iter = 100;
};

struct DayPrediction {
  TripChain chain;
  ChainScore score;
  Eigen::VectorXd probabilities;  // one entry per vocabulary trip
};

struct PipelineResult {
  TripVocabulary vocabulary;
  std::vector<DayPrediction> days;  // predicted days in calendar order
};

// Per-trip membership probabilities for the unlabeled tail of the graph.
// `weights` spans all days (known prefix + days to predict); labels come
// from the known chains only. Rows of the result are the unlabeled days.
Eigen::MatrixXd propagate_probabilities(const Eigen::MatrixXd& weights,
                                        std::span<const TripChain> known_chains,
                                        const TripVocabulary& vocab, int neighbor_count,
                                        double alpha, double tol = 1e-6, int max_iter = 100);

// Same contract, but classifying each trip with a random forest over the
// day coordinates (one row per day, known prefix first).
Eigen::MatrixXd forest_probabilities(const Eigen::MatrixXd& coordinates,
                                     std::size_t known_count,
                                     std::span<const TripChain> known_chains,
                                     const TripVocabulary& vocab, const ForestParams& forest,
                                     std::uint64_t seed);

// Turns per-day trip probabilities into chains. With `correlation_disabled`
// the co-occurrence table is bypassed and trips above 0.5 are kept.
std::vector<DayPrediction> assemble_predictions(const Eigen::MatrixXd& probabilities,
                                                const TripVocabulary& vocab,
                                                const CooccurrenceTable& table, double lambda,
                                                const AssemblyLimits& limits,
                                                bool correlation_disabled);

// End-to-end prediction of calendar days [known_chains.size(), predict_end):
// graph over all days up to predict_end, vocabulary/labels/co-occurrence
// from the known prefix only, classifier chosen by params.pipeline, chain
// assembly through the correlation module (unless ablated).
PipelineResult run_pipeline(const Calendar& calendar, std::span<const TripChain> known_chains,
                            std::size_t predict_end, const HyperParams& params,
                            const PipelineOptions& options);

// The similarity weights actually used by run_pipeline: ablation flags pin
// the corresponding feature weight to zero.
SimilarityParams effective_similarity(const HyperParams& params);

}  // namespace tripchain
