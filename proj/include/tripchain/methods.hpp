#pragma once

#include <vector>

#include "tripchain/calibration.hpp"
#include "tripchain/evaluation.hpp"
#include "tripchain/pipeline.hpp"

namespace tripchain {

// Shared configuration for the standard benchmark methods. The graph methods
// can run per-user grid search or a fixed configuration; baselines ignore
// everything except the n-gram order.
struct MethodConfig {
  bool calibrate_lp = true;
  bool calibrate_embed = false;  // grid-searched forests are costly; default off
  GridSpec grid;
  HyperParams fixed_lp;     // used when calibrate_lp is false
  HyperParams fixed_embed;  // used when calibrate_embed is false
  CalibrationOptions calibration;
  AblationFlags ablation;  // applied to both graph methods
  int ngram_order = 2;
};

Method make_random_guess_method();
Method make_last_week_method();
Method make_ngram_method(int order = 2);
Method make_lp_method(const MethodConfig& config);
Method make_embed_method(const MethodConfig& config);

// random-guess, last-week, ngram, lp, embed — the evaluation lineup.
std::vector<Method> standard_methods(const MethodConfig& config);

}  // namespace tripchain
