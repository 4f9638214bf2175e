#include "tripchain/methods.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace tripchain {
namespace {

std::vector<TripChain> chains_of(const PipelineResult& result) {
  std::vector<TripChain> chains;
  chains.reserve(result.days.size());
  for (const auto& day : result.days) {
    chains.push_back(day.chain);
  }
  return chains;
}

std::vector<TripChain> run_graph_method(const MethodConfig& config, Pipeline pipeline,
                                        bool calibrate, HyperParams fixed,
                                        const UserHistory& history, std::size_t known_end,
                                        std::size_t horizon, std::uint64_t seed) {
  const std::size_t predict_end = known_end + horizon;
  if (calibrate) {
    CalibrationOptions options = config.calibration;
    options.pipeline.seed = seed;
    return chains_of(predict_with_calibration(history, known_end, predict_end, config.grid,
                                              pipeline, config.ablation, options));
  }
  fixed.pipeline = pipeline;
  fixed.ablation = config.ablation;
  PipelineOptions options = config.calibration.pipeline;
  options.seed = seed;
  const std::span<const TripChain> known(history.chains.data(), known_end);
  return chains_of(run_pipeline(history.calendar, known, predict_end, fixed, options));
}

}  // namespace

Method make_random_guess_method() {
  return {"random-guess", [](const UserHistory& history, std::size_t known_end,
                             std::size_t horizon, std::uint64_t seed) {
            const TripVocabulary vocab =
                TripVocabulary::build({history.chains.data(), known_end});
            return baseline_random_guess(vocab, horizon, seed);
          }};
}

Method make_last_week_method() {
  return {"last-week", [](const UserHistory& history, std::size_t known_end, std::size_t horizon,
                          std::uint64_t) {
            return baseline_last_week({history.chains.data(), known_end}, horizon);
          }};
}

Method make_ngram_method(int order) {
  return {"ngram", [order](const UserHistory& history, std::size_t known_end,
                           std::size_t horizon, std::uint64_t) {
            const std::span<const TripChain> known(history.chains.data(), known_end);
            const TripVocabulary vocab = TripVocabulary::build(known);
            return baseline_ngram(known, vocab, horizon, order);
          }};
}

Method make_lp_method(const MethodConfig& config) {
  return {"lp", [config](const UserHistory& history, std::size_t known_end, std::size_t horizon,
                         std::uint64_t seed) {
            return run_graph_method(config, Pipeline::kLabelPropagation, config.calibrate_lp,
                                    config.fixed_lp, history, known_end, horizon, seed);
          }};
}

Method make_embed_method(const MethodConfig& config) {
  return {"embed", [config](const UserHistory& history, std::size_t known_end,
                            std::size_t horizon, std::uint64_t seed) {
            return run_graph_method(config, Pipeline::kEmbedForest, config.calibrate_embed,
                                    config.fixed_embed, history, known_end, horizon, seed);
          }};
}

std::vector<Method> standard_methods(const MethodConfig& config) {
  std::vector<Method> methods;
  methods.push_back(make_random_guess_method());
  methods.push_back(make_last_week_method());
  methods.push_back(make_ngram_method(config.ngram_order));
  methods.push_back(make_lp_method(config));
  methods.push_back(make_embed_method(config));
  return methods;
}

}  // namespace tripchain
