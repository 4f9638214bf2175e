#include "tripchain/calibration.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <stdexcept>
#include <tuple>

#include "tripchain/evaluation.hpp"
#include "tripchain/parallel.hpp"
#include "tripchain/similarity.hpp"

namespace tripchain {
namespace {

void require_axis(const std::vector<double>& values, const char* name, bool strictly_positive) {
  if (values.empty()) throw std::invalid_argument(std::string(name) + " grid axis is empty");
  for (const double v : values) {
    if (strictly_positive ? v <= 0.0 : v < 0.0) {
      throw std::invalid_argument(std::string(name) + " grid axis has a non-positive value");
    }
  }
}

void validate_grid(const GridSpec& grid, Pipeline pipeline) {
  require_axis(grid.weekday_weights, "a1", true);
  require_axis(grid.workday_weights, "a2", true);
  require_axis(grid.recency_weights, "a3", true);
  require_axis(grid.correlation_weights, "lambda", false);
  if (pipeline == Pipeline::kLabelPropagation) {
    if (grid.neighbor_counts.empty()) throw std::invalid_argument("K grid axis is empty");
    for (const int k : grid.neighbor_counts) {
      if (k < 1) throw std::invalid_argument("K grid axis has a value below 1");
    }
    require_axis(grid.refresh_rates, "alpha", true);
    for (const double a : grid.refresh_rates) {
      if (a >= 1.0) throw std::invalid_argument("alpha grid axis has a value >= 1");
    }
  } else {
    if (grid.embedding_dims.empty()) throw std::invalid_argument("k grid axis is empty");
    for (const int k : grid.embedding_dims) {
      if (k < 2) throw std::invalid_argument("k grid axis has a value below 2");
    }
  }
}

// Tie-break order across configurations with equal scores.
std::tuple<double, double, double, int, double, int, double> grid_key(const HyperParams& p) {
  return {p.similarity.a1, p.similarity.a2, p.similarity.a3,      p.neighbor_count,
          p.refresh_rate,  p.embedding_dim, p.correlation_weight};
}

// Forest seeds hang off the configuration values (not its grid position) so
// a configuration scores the same whether evaluated alone or in a full grid.
std::uint64_t config_stream(double a1, double a2, double a3, int dim) {
  std::uint64_t h = mix_seed(std::bit_cast<std::uint64_t>(a1), std::bit_cast<std::uint64_t>(a2));
  h = mix_seed(h, std::bit_cast<std::uint64_t>(a3));
  return mix_seed(h, static_cast<std::uint64_t>(dim));
}

Calendar calendar_prefix(const Calendar& calendar, std::size_t length) {
  std::vector<CalendarDay> days(calendar.begin(),
                                calendar.begin() + static_cast<std::ptrdiff_t>(length));
  return Calendar::from_days(std::move(days));
}

}  // namespace

SplitMarkers split_history(const UserHistory& history, std::size_t validation_days) {
  const std::size_t n = history.chains.size();
  if (n <= validation_days) {
    throw std::invalid_argument("history of " + std::to_string(n) +
                                " days cannot spare " + std::to_string(validation_days) +
                                " validation days");
  }
  SplitMarkers split;
  split.train_end = n - validation_days;
  split.validation_end = n;
  split.test_end = n;
  return split;
}

CalibrationResult grid_search(const UserHistory& history, std::size_t known_end,
                              const GridSpec& grid, Pipeline pipeline, AblationFlags ablation,
                              const CalibrationOptions& options) {
  if (known_end > history.chains.size() || known_end > history.calendar.size()) {
    throw std::invalid_argument("known_end exceeds the history");
  }
  if (known_end <= options.validation_days) {
    throw std::invalid_argument("known prefix leaves no training day before validation");
  }
  validate_grid(grid, pipeline);

  const std::size_t train_end = known_end - options.validation_days;
  const std::span<const TripChain> train_chains(history.chains.data(), train_end);
  const TripVocabulary vocab = TripVocabulary::build(train_chains);
  const CooccurrenceTable table =
      CooccurrenceTable::build(vocab, options.pipeline.normalization);
  const Calendar graph_days = calendar_prefix(history.calendar, known_end);

  // Ablated features contribute nothing, so their axis collapses to one value.
  const std::vector<double> one{1.0};
  const std::vector<double>& a1s = ablation.drop_feature1 ? one : grid.weekday_weights;
  const std::vector<double>& a2s = ablation.drop_feature2 ? one : grid.workday_weights;
  const std::vector<double>& a3s = ablation.drop_feature3 ? one : grid.recency_weights;
  const std::vector<double>& lambdas =
      ablation.disable_correlation ? one : grid.correlation_weights;

  struct Combo {
    double a1, a2, a3;
  };
  std::vector<Combo> combos;
  for (const double a1 : a1s) {
    for (const double a2 : a2s) {
      for (const double a3 : a3s) combos.push_back({a1, a2, a3});
    }
  }

  const bool lp = pipeline == Pipeline::kLabelPropagation;
  const std::size_t inner =
      lp ? grid.neighbor_counts.size() * grid.refresh_rates.size() * lambdas.size()
         : grid.embedding_dims.size() * lambdas.size();

  CalibrationResult result;
  result.trace.resize(combos.size() * inner);

  auto score_rows = [&](const Eigen::MatrixXd& probabilities, double lambda,
                        bool correlation_disabled, TraceRow& row) {
    const auto days = assemble_predictions(probabilities, vocab, table, lambda,
                                           options.pipeline.limits, correlation_disabled);
    double accuracy = 0.0;
    double edits = 0.0;
    for (std::size_t v = 0; v < days.size(); ++v) {
      const DayScore score = score_day(days[v].chain, history.chains[train_end + v]);
      accuracy += score.accuracy;
      edits += static_cast<double>(score.edit_distance);
    }
    const double count = static_cast<double>(days.size());
    row.accuracy = accuracy / count;
    row.edit_distance = edits / count;
  };

  parallel_for_index(combos.size(), options.workers, [&](std::size_t c) {
    HyperParams base;
    base.similarity = {combos[c].a1, combos[c].a2, combos[c].a3};
    base.pipeline = pipeline;
    base.ablation = ablation;
    const Eigen::MatrixXd weights = build_graph(graph_days, effective_similarity(base));

    std::size_t row_index = c * inner;
    if (lp) {
      for (const int neighbors : grid.neighbor_counts) {
        for (const double alpha : grid.refresh_rates) {
          const Eigen::MatrixXd probabilities = propagate_probabilities(
              weights, train_chains, vocab, neighbors, alpha, options.pipeline.lp_tol,
              options.pipeline.lp_max_iter);
          for (const double lambda : lambdas) {
            TraceRow& row = result.trace[row_index++];
            row.params = base;
            row.params.neighbor_count = neighbors;
            row.params.refresh_rate = alpha;
            row.params.correlation_weight = lambda;
            score_rows(probabilities, lambda, ablation.disable_correlation, row);
          }
        }
      }
    } else {
      for (const int dim : grid.embedding_dims) {
        const int effective_dim = std::min<int>(dim, static_cast<int>(known_end));
        const Embedding embedding =
            spectral_embed(weights, effective_dim, options.pipeline.eigen_order);
        const Eigen::MatrixXd probabilities = forest_probabilities(
            embedding.coordinates, train_end, train_chains, vocab, options.pipeline.forest,
            mix_seed(options.pipeline.seed,
                     config_stream(combos[c].a1, combos[c].a2, combos[c].a3, dim)));
        for (const double lambda : lambdas) {
          TraceRow& row = result.trace[row_index++];
          row.params = base;
          row.params.embedding_dim = dim;
          row.params.correlation_weight = lambda;
          score_rows(probabilities, lambda, ablation.disable_correlation, row);
        }
      }
    }
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < result.trace.size(); ++r) {
    const TraceRow& row = result.trace[r];
    const TraceRow& incumbent = result.trace[best];
    if (row.accuracy > incumbent.accuracy) {
      best = r;
    } else if (row.accuracy == incumbent.accuracy) {
      if (row.edit_distance < incumbent.edit_distance ||
          (row.edit_distance == incumbent.edit_distance &&
           grid_key(row.params) < grid_key(incumbent.params))) {
        best = r;
      }
    }
  }
  result.best = result.trace[best].params;
  result.best_accuracy = result.trace[best].accuracy;
  result.best_edit_distance = result.trace[best].edit_distance;
  return result;
}

PipelineResult predict_with_calibration(const UserHistory& history, std::size_t known_end,
                                        std::size_t predict_end, const GridSpec& grid,
                                        Pipeline pipeline, AblationFlags ablation,
                                        const CalibrationOptions& options,
                                        HyperParams* chosen) {
  const CalibrationResult calibration =
      grid_search(history, known_end, grid, pipeline, ablation, options);
  if (chosen != nullptr) *chosen = calibration.best;
  const std::span<const TripChain> known(history.chains.data(), known_end);
  return run_pipeline(history.calendar, known, predict_end, calibration.best,
                      options.pipeline);
}

std::string trace_to_csv(const CalibrationResult& result) {
  std::string csv =
      "a1,a2,a3,neighbor_count,refresh_rate,embedding_dim,correlation_weight,"
      "accuracy,edit_distance\n";
  char line[256];
  for (const TraceRow& row : result.trace) {
    const HyperParams& p = row.params;
    std::snprintf(line, sizeof(line), "%g,%g,%g,%d,%g,%d,%g,%.6f,%.6f\n", p.similarity.a1,
                  p.similarity.a2, p.similarity.a3, p.neighbor_count, p.refresh_rate,
                  p.embedding_dim, p.correlation_weight, row.accuracy, row.edit_distance);
    csv += line;
  }
  return csv;
}

}  // namespace tripchain
