#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tripchain/core.hpp"
#include "tripchain/pipeline.hpp"

namespace tripchain {

// Search space for per-user hyperparameter selection. The label-propagation
// grid spans (a1, a2, a3, K, alpha, lambda); the embedding-forest grid spans
// (a1, a2, a3, k, lambda). Dropped similarity features collapse their axis.
struct GridSpec {
  std::vector<double> weekday_weights{0.1, 1.0, 10.0};     // a1
  std::vector<double> workday_weights{0.1, 1.0, 10.0};     // a2
  std::vector<double> recency_weights{0.1, 1.0, 10.0};     // a3
  std::vector<int> neighbor_counts{1, 2, 4};               // K
  std::vector<double> refresh_rates{0.1, 0.2};             // alpha
  std::vector<int> embedding_dims{8, 16, 32};              // k
  std::vector<double> correlation_weights{0.5, 1.0, 2.0};  // lambda
};

struct TraceRow {
  HyperParams params;
  double accuracy = 0.0;       // mean over validation days
  double edit_distance = 0.0;  // mean over validation days
};

struct CalibrationResult {
  HyperParams best;
  double best_accuracy = 0.0;
  double best_edit_distance = 0.0;
  std::vector<TraceRow> trace;  // one row per configuration, grid order
};

struct CalibrationOptions {
  std::size_t validation_days = 30;
  std::size_t workers = 1;
  PipelineOptions pipeline;
};

// Marks the last `validation_days` known days as the holdout; everything
// before is training. Throws if the history has no training day left.
SplitMarkers split_history(const UserHistory& history, std::size_t validation_days = 30);

// Evaluates every configuration on the validation holdout of the known
// prefix [0, known_end): the day graph covers all known days, labels and
// trip counts come from the training part only, and each configuration is
// scored by mean chain accuracy (ties: lower edit distance, then
// lexicographic (a1,a2,a3,K,alpha,k,lambda)). The similarity graph is built
// once per (a1,a2,a3) and shared by the inner grid.
CalibrationResult grid_search(const UserHistory& history, std::size_t known_end,
                              const GridSpec& grid, Pipeline pipeline, AblationFlags ablation,
                              const CalibrationOptions& options);

// Grid search on the known prefix, then a final fit on all known days to
// predict [known_end, predict_end) with the selected configuration.
PipelineResult predict_with_calibration(const UserHistory& history, std::size_t known_end,
                                        std::size_t predict_end, const GridSpec& grid,
                                        Pipeline pipeline, AblationFlags ablation,
                                        const CalibrationOptions& options,
                                        HyperParams* chosen = nullptr);

// CSV export of the full trace (one line per configuration).
std::string trace_to_csv(const CalibrationResult& result);

}  // namespace tripchain
