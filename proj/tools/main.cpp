// Command-line front end for the trip-chain prediction library.
//
// Subcommands:
//   synth      generate a synthetic smart-card corpus (records + calendar CSV)
//   ingest     parse record/calendar CSVs into a self-contained archive
//   patterns   similarity statistics and significance tests over an archive
//   predict    per-user future day prediction (calibrated or fixed params)
//   evaluate   method comparison (baselines vs graph pipelines)
//   cluster    per-user hyperparameter selection and traveler classes
//   simmatrix  one user's day-by-day chain-similarity matrix
//
// Exit codes: 0 success, 1 usage or configuration error, 2 malformed data,
// 3 internal error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tripchain/archive.hpp"
#include "tripchain/calibration.hpp"
#include "tripchain/core.hpp"
#include "tripchain/evaluation.hpp"
#include "tripchain/ingest.hpp"
#include "tripchain/methods.hpp"
#include "tripchain/patterns.hpp"
#include "tripchain/pipeline.hpp"
#include "tripchain/similarity.hpp"
#include "tripchain/synthetic.hpp"

namespace tc = tripchain;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int workers = 1;
};

// Options shared by the prediction-flavored subcommands.
struct ModelOptions {
  std::string pipeline = "lp";
  std::string normalization = "global";
  std::vector<std::string> ablate;
  std::size_t validation_days = 30;
  int trees = 100;
  // Grid axes (empty = library default axis).
  std::vector<double> grid_weekday;
  std::vector<double> grid_workday;
  std::vector<double> grid_recency;
  std::vector<int> grid_neighbors;
  std::vector<double> grid_refresh;
  std::vector<int> grid_dims;
  std::vector<double> grid_lambda;
  // Fixed-parameter run (predict --no-calibrate, evaluate uncalibrated arms).
  double a1 = 1.0;
  double a2 = 1.0;
  double a3 = 1.0;
  int neighbors = 4;
  double refresh = 0.2;
  int dim = 16;
  double lambda = 1.0;
};

tc::Pipeline parse_pipeline(const std::string& name) {
  return name == "embed" ? tc::Pipeline::kEmbedForest : tc::Pipeline::kLabelPropagation;
}

tc::NormalizationMode parse_normalization(const std::string& name) {
  return name == "eq6-literal" ? tc::NormalizationMode::kEq6Literal
                               : tc::NormalizationMode::kGlobal;
}

tc::AblationFlags parse_ablation(const std::vector<std::string>& names) {
  tc::AblationFlags flags;
  for (const std::string& name : names) {
    if (name == "f1") {
      flags.drop_feature1 = true;
    } else if (name == "f2") {
      flags.drop_feature2 = true;
    } else if (name == "f3") {
      flags.drop_feature3 = true;
    } else if (name == "corr") {
      flags.disable_correlation = true;
    } else {
      throw std::invalid_argument("unknown ablation '" + name + "'");
    }
  }
  return flags;
}

tc::GridSpec build_grid(const ModelOptions& opts) {
  tc::GridSpec grid;
  if (!opts.grid_weekday.empty()) grid.weekday_weights = opts.grid_weekday;
  if (!opts.grid_workday.empty()) grid.workday_weights = opts.grid_workday;
  if (!opts.grid_recency.empty()) grid.recency_weights = opts.grid_recency;
  if (!opts.grid_neighbors.empty()) grid.neighbor_counts = opts.grid_neighbors;
  if (!opts.grid_refresh.empty()) grid.refresh_rates = opts.grid_refresh;
  if (!opts.grid_dims.empty()) grid.embedding_dims = opts.grid_dims;
  if (!opts.grid_lambda.empty()) grid.correlation_weights = opts.grid_lambda;
  return grid;
}

tc::HyperParams build_fixed_params(const ModelOptions& opts) {
  tc::HyperParams params;
  params.similarity = {opts.a1, opts.a2, opts.a3};
  params.pipeline = parse_pipeline(opts.pipeline);
  params.neighbor_count = opts.neighbors;
  params.refresh_rate = opts.refresh;
  params.embedding_dim = opts.dim;
  params.correlation_weight = opts.lambda;
  params.ablation = parse_ablation(opts.ablate);
  return params;
}

tc::PipelineOptions build_pipeline_options(const ModelOptions& opts, std::uint64_t seed) {
  tc::PipelineOptions options;
  options.normalization = parse_normalization(opts.normalization);
  options.forest.tree_count = opts.trees;
  options.seed = seed;
  return options;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tc::DataError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw tc::DataError("failed while writing '" + path.string() + "'");
}

ordered_json chain_to_json(const tc::TripChain& chain, const tc::StationTable& stations) {
  ordered_json trips = ordered_json::array();
  for (const tc::Trip& t : chain) {
    trips.push_back({t.hour, stations.token(t.origin), stations.token(t.destination)});
  }
  return trips;
}

ordered_json params_to_json(const tc::HyperParams& p) {
  return ordered_json{{"a1", p.similarity.a1},
                      {"a2", p.similarity.a2},
                      {"a3", p.similarity.a3},
                      {"neighbor_count", p.neighbor_count},
                      {"refresh_rate", p.refresh_rate},
                      {"embedding_dim", p.embedding_dim},
                      {"correlation_weight", p.correlation_weight}};
}

const tc::UserHistory& find_user(const tc::Archive& archive, const std::string& id) {
  for (const tc::UserHistory& user : archive.users) {
    if (user.user_id == id) return user;
  }
  throw tc::DataError("user '" + id + "' not present in archive");
}

// ---------------------------------------------------------------- synth ----

struct SynthArgs {
  std::string spec_path;
  std::string records_path;
  std::string calendar_path;
};

double require_number(const ordered_json& node, const char* key) {
  if (!node.contains(key) || !node[key].is_number()) {
    throw tc::DataError(std::string("synth spec: missing numeric field '") + key + "'");
  }
  return node[key].get<double>();
}

void cmd_synth(const SynthArgs& args, const GlobalOptions& global) {
  ordered_json spec;
  {
    std::ifstream in(args.spec_path, std::ios::binary);
    if (!in) throw tc::DataError("cannot open spec '" + args.spec_path + "'");
    try {
      in >> spec;
    } catch (const nlohmann::json::exception& e) {
      throw tc::DataError("spec is not valid JSON: " + std::string(e.what()));
    }
  }
  if (!spec.contains("start_date") || !spec["start_date"].is_string()) {
    throw tc::DataError("synth spec: missing string field 'start_date'");
  }
  const auto start = tc::parse_date(spec["start_date"].get<std::string>());
  const auto n_days = static_cast<std::size_t>(require_number(spec, "days"));
  const auto n_users = static_cast<std::size_t>(require_number(spec, "users"));
  if (n_days == 0 || n_users == 0) throw tc::DataError("synth spec: days and users must be positive");

  std::vector<std::size_t> festivals;
  if (spec.contains("festivals")) {
    for (const auto& f : spec["festivals"]) {
      if (!f.is_number_unsigned()) throw tc::DataError("synth spec: festivals must be day indices");
      const auto day = f.get<std::size_t>();
      if (day >= n_days) throw tc::DataError("synth spec: festival index out of range");
      festivals.push_back(day);
    }
  }

  if (!spec.contains("mix") || !spec["mix"].is_array() || spec["mix"].empty()) {
    throw tc::DataError("synth spec: missing non-empty array 'mix'");
  }
  std::vector<std::pair<tc::ArchetypeSpec, double>> mix;
  for (const auto& entry : spec["mix"]) {
    tc::ArchetypeSpec aspec;
    if (!entry.contains("archetype") || !entry["archetype"].is_string()) {
      throw tc::DataError("synth spec: each mix entry needs an 'archetype' string");
    }
    aspec.archetype = tc::archetype_from_string(entry["archetype"].get<std::string>());
    const double weight = require_number(entry, "weight");
    if (entry.contains("noise_rate")) aspec.noise_rate = entry["noise_rate"].get<double>();
    if (entry.contains("drift_rate")) aspec.drift_rate = entry["drift_rate"].get<double>();
    if (entry.contains("station_count")) aspec.station_count = entry["station_count"].get<int>();
    if (entry.contains("max_weekday_extras")) {
      aspec.max_weekday_extras = entry["max_weekday_extras"].get<int>();
    }
    if (entry.contains("shared_commute")) {
      aspec.shared_commute = entry["shared_commute"].get<bool>();
    }
    if (entry.contains("changepoints")) {
      for (const auto& c : entry["changepoints"]) {
        aspec.changepoints.push_back(c.get<std::size_t>());
      }
    }
    mix.emplace_back(std::move(aspec), weight);
  }

  try {
    const tc::Calendar calendar = tc::make_synthetic_calendar(start, n_days, festivals);
    tc::StationTable stations;
    const std::vector<tc::UserHistory> users =
        tc::generate_population(mix, n_users, calendar, global.seed, stations);
    tc::write_corpus_csv(users, stations, args.records_path, args.calendar_path);
  } catch (const std::invalid_argument& e) {
    // Bad values came from the spec file, so surface them as a data problem.
    throw tc::DataError("synth spec: " + std::string(e.what()));
  }
  std::printf("wrote %zu users x %zu days -> %s, %s\n", n_users, n_days,
              args.records_path.c_str(), args.calendar_path.c_str());
}

// --------------------------------------------------------------- ingest ----

struct IngestArgs {
  std::string records_path;
  std::string calendar_path;
  std::string output_path;
  std::string rejects_path;
  std::size_t min_active_days = 50;
};

void cmd_ingest(const IngestArgs& args) {
  const tc::Calendar calendar = tc::load_calendar(args.calendar_path);
  const tc::ParseResult parsed = tc::parse_records(args.records_path);
  if (!args.rejects_path.empty()) {
    tc::write_rejects_csv(args.rejects_path, parsed.rejects);
  } else if (!parsed.rejects.empty()) {
    std::fprintf(stderr, "warning: %zu malformed rows dropped (use --rejects to keep them)\n",
                 parsed.rejects.size());
  }
  tc::StationTable stations;
  const std::vector<tc::UserHistory> users =
      tc::assemble_all(parsed.records, calendar, stations, args.min_active_days);
  if (users.empty()) {
    throw tc::DataError("no card meets the --min-active-days threshold");
  }
  tc::save_archive(args.output_path, users, stations);
  std::printf("archived %zu users over %zu days (%zu records, %zu rejected) -> %s\n",
              users.size(), calendar.size(), parsed.records.size(), parsed.rejects.size(),
              args.output_path.c_str());
}

// -------------------------------------------------------------- patterns ----

struct PatternsArgs {
  std::string input_path;
  std::string output_path;
  std::string gap_curve_path;
  std::size_t pairs = 20000;
  bool exclude_empty_days = false;
  std::vector<std::size_t> gaps;
};

void cmd_patterns(const PatternsArgs& args, const GlobalOptions& global) {
  const tc::Archive archive = tc::load_archive(args.input_path);
  tc::PatternConfig config;
  config.pair_count = args.pairs;
  config.seed = global.seed;
  config.include_empty_days = !args.exclude_empty_days;
  if (!args.gaps.empty()) config.gaps = args.gaps;
  const tc::PatternReport report = tc::verify_patterns(archive.users, config);
  write_text_file(args.output_path, tc::pattern_report_to_json(report));
  if (!args.gap_curve_path.empty()) {
    write_text_file(args.gap_curve_path, tc::gap_curve_to_csv(report));
  }
  for (const tc::PatternTestRow& row : report.tests) {
    std::printf("%-8s mean=%.4f baseline=%.4f t=%+.3f p=%.4g\n", row.label.c_str(), row.mean_x,
                row.mean_y, row.test.t, row.test.p);
  }
}

// --------------------------------------------------------------- predict ----

struct PredictArgs {
  std::string input_path;
  std::string output_path;
  std::vector<std::string> users;
  std::size_t horizon = 7;
  std::size_t known_days = 0;  // 0: calendar length minus horizon
  bool no_calibrate = false;
  bool emit_probabilities = false;
};

void cmd_predict(const PredictArgs& args, const ModelOptions& model,
                 const GlobalOptions& global) {
  const tc::Archive archive = tc::load_archive(args.input_path);
  if (args.horizon == 0) throw std::invalid_argument("--horizon must be positive");

  const std::size_t n_days = archive.calendar.size();
  if (args.horizon >= n_days) {
    throw std::invalid_argument("--horizon leaves no known day in the archive");
  }
  const std::size_t known_end = args.known_days == 0 ? n_days - args.horizon : args.known_days;
  if (known_end == 0 || known_end + args.horizon > n_days) {
    throw std::invalid_argument(
        "--known-days and --horizon must fit inside the archive calendar");
  }

  std::vector<std::size_t> selected;
  if (args.users.empty()) {
    selected.resize(archive.users.size());
    for (std::size_t i = 0; i < selected.size(); ++i) selected[i] = i;
  } else {
    for (const std::string& id : args.users) {
      const tc::UserHistory& user = find_user(archive, id);
      selected.push_back(static_cast<std::size_t>(&user - archive.users.data()));
    }
  }

  const tc::Pipeline pipeline = parse_pipeline(model.pipeline);
  const tc::AblationFlags ablation = parse_ablation(model.ablate);
  const tc::GridSpec grid = build_grid(model);
  tc::HyperParams fixed = build_fixed_params(model);

  ordered_json out{{"format", "tripchain-predictions-v1"},
                   {"pipeline", model.pipeline},
                   {"normalization", model.normalization},
                   {"horizon", args.horizon},
                   {"known_days", known_end},
                   {"calibrated", !args.no_calibrate},
                   {"seed", global.seed},
                   {"ablation", model.ablate},
                   {"users", ordered_json::array()}};

  for (const std::size_t index : selected) {
    const tc::UserHistory& user = archive.users[index];
    const std::uint64_t user_seed = tc::mix_seed(global.seed, index);

    tc::HyperParams chosen = fixed;
    tc::PipelineResult result = [&] {
      if (args.no_calibrate) {
        const std::span<const tc::TripChain> known(user.chains.data(), known_end);
        return tc::run_pipeline(user.calendar, known, known_end + args.horizon, fixed,
                                build_pipeline_options(model, user_seed));
      }
      tc::CalibrationOptions options;
      options.validation_days = model.validation_days;
      options.workers = static_cast<std::size_t>(global.workers);
      options.pipeline = build_pipeline_options(model, user_seed);
      return tc::predict_with_calibration(user, known_end, known_end + args.horizon, grid,
                                          pipeline, ablation, options, &chosen);
    }();

    ordered_json user_json{{"id", user.user_id},
                           {"hyperparameters", params_to_json(chosen)},
                           {"days", ordered_json::array()}};
    double accuracy_sum = 0.0;
    double edit_sum = 0.0;
    for (std::size_t h = 0; h < result.days.size(); ++h) {
      const tc::DayPrediction& day = result.days[h];
      const std::size_t day_index = known_end + h;
      const tc::TripChain& actual = user.chains[day_index];
      const tc::DayScore score = tc::score_day(day.chain, actual);
      accuracy_sum += score.accuracy;
      edit_sum += score.edit_distance;
      ordered_json day_json{{"date", tc::format_date(user.calendar[day_index].date)},
                            {"predicted", chain_to_json(day.chain, archive.stations)},
                            {"actual", chain_to_json(actual, archive.stations)},
                            {"accuracy", score.accuracy},
                            {"edit_distance", score.edit_distance},
                            {"score",
                             {{"total", day.score.total},
                              {"probability", day.score.probability_term},
                              {"correlation", day.score.correlation_term}}}};
      if (args.emit_probabilities) {
        ordered_json probs = ordered_json::array();
        for (int t = 0; t < static_cast<int>(result.vocabulary.size()); ++t) {
          const tc::Trip& trip = result.vocabulary.trip(t);
          probs.push_back({{"trip", {trip.hour, archive.stations.token(trip.origin),
                                     archive.stations.token(trip.destination)}},
                           {"p", day.probabilities(t)}});
        }
        day_json["probabilities"] = std::move(probs);
      }
      user_json["days"].push_back(std::move(day_json));
    }
    const double n = static_cast<double>(result.days.size());
    user_json["mean_accuracy"] = accuracy_sum / n;
    user_json["mean_edit_distance"] = edit_sum / n;
    out["users"].push_back(std::move(user_json));
  }

  write_text_file(args.output_path, out.dump(2) + "\n");
  for (const auto& user_json : out["users"]) {
    std::printf("%s accuracy=%.6f edit=%.6f\n", user_json["id"].get<std::string>().c_str(),
                user_json["mean_accuracy"].get<double>(),
                user_json["mean_edit_distance"].get<double>());
  }
}

// -------------------------------------------------------------- evaluate ----

struct EvaluateArgs {
  std::string input_path;
  std::string output_path;
  std::string breakdown_path;
  std::vector<int> horizons{1, 7, 14, 28};
  std::vector<std::string> methods;  // empty: full lineup
  std::string calibrate = "lp";      // none | lp | embed | both
  int ngram_order = 2;
};

void cmd_evaluate(const EvaluateArgs& args, const ModelOptions& model,
                  const GlobalOptions& global) {
  const tc::Archive archive = tc::load_archive(args.input_path);

  tc::MethodConfig config;
  config.calibrate_lp = args.calibrate == "lp" || args.calibrate == "both";
  config.calibrate_embed = args.calibrate == "embed" || args.calibrate == "both";
  config.grid = build_grid(model);
  config.fixed_lp = build_fixed_params(model);
  config.fixed_lp.pipeline = tc::Pipeline::kLabelPropagation;
  config.fixed_embed = config.fixed_lp;
  config.fixed_embed.pipeline = tc::Pipeline::kEmbedForest;
  config.calibration.validation_days = model.validation_days;
  config.calibration.workers = 1;  // outer loop parallelizes over users
  config.calibration.pipeline = build_pipeline_options(model, global.seed);
  config.ablation = parse_ablation(model.ablate);
  config.ngram_order = args.ngram_order;

  std::vector<tc::Method> lineup = tc::standard_methods(config);
  if (!args.methods.empty()) {
    std::vector<tc::Method> kept;
    for (tc::Method& method : lineup) {
      if (std::find(args.methods.begin(), args.methods.end(), method.name) !=
          args.methods.end()) {
        kept.push_back(std::move(method));
      }
    }
    lineup = std::move(kept);
  }
  if (lineup.empty()) throw std::invalid_argument("--methods selected nothing");

  const tc::Report report =
      tc::compare_methods(archive.users, lineup, args.horizons, global.seed, global.workers);
  const std::string csv = tc::report_to_csv(report);
  write_text_file(args.output_path, csv);
  if (!args.breakdown_path.empty()) {
    std::string breakdown = "user,method,horizon,accuracy,edit_distance\n";
    char line[160];
    for (const tc::UserBreakdownRow& row : report.per_user) {
      std::snprintf(line, sizeof(line), "%s,%s,%d,%.6f,%.6f\n", row.user_id.c_str(),
                    row.method.c_str(), row.horizon, row.accuracy, row.edit_distance);
      breakdown += line;
    }
    write_text_file(args.breakdown_path, breakdown);
  }
  std::fputs(csv.c_str(), stdout);
}

// --------------------------------------------------------------- cluster ----

struct ClusterArgs {
  std::string input_path;
  std::string output_path;
  std::string distribution_path;
};

std::string traveler_class(const tc::HyperParams& params) {
  if (params.similarity.a2 > params.similarity.a3) return "repeat-dominated";
  if (params.similarity.a2 < params.similarity.a3) return "evolve-dominated";
  return "balanced";
}

void cmd_cluster(const ClusterArgs& args, const ModelOptions& model,
                 const GlobalOptions& global) {
  const tc::Archive archive = tc::load_archive(args.input_path);
  const tc::Pipeline pipeline = parse_pipeline(model.pipeline);
  const tc::GridSpec grid = build_grid(model);

  tc::CalibrationOptions options;
  options.validation_days = model.validation_days;
  options.workers = static_cast<std::size_t>(global.workers);

  std::string csv =
      "user,a1,a2,a3,neighbor_count,refresh_rate,embedding_dim,correlation_weight,"
      "accuracy,class\n";
  std::map<std::string, std::size_t> class_counts;
  // axis label -> (value label -> count)
  std::map<std::string, std::map<std::string, std::size_t>> distribution;
  auto tally = [&distribution](const std::string& axis, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", value);
    ++distribution[axis][buf];
  };

  for (std::size_t index = 0; index < archive.users.size(); ++index) {
    const tc::UserHistory& user = archive.users[index];
    options.pipeline = build_pipeline_options(model, tc::mix_seed(global.seed, index));
    const tc::CalibrationResult result =
        tc::grid_search(user, user.chains.size(), grid, pipeline, {}, options);
    const tc::HyperParams& best = result.best;
    const std::string label = traveler_class(best);
    ++class_counts[label];
    tally("a1", best.similarity.a1);
    tally("a2", best.similarity.a2);
    tally("a3", best.similarity.a3);
    if (pipeline == tc::Pipeline::kLabelPropagation) {
      tally("neighbor_count", best.neighbor_count);
      tally("refresh_rate", best.refresh_rate);
    } else {
      tally("embedding_dim", best.embedding_dim);
    }
    tally("correlation_weight", best.correlation_weight);
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%g,%g,%g,%d,%g,%d,%g,%.6f,%s\n", user.user_id.c_str(),
                  best.similarity.a1, best.similarity.a2, best.similarity.a3,
                  best.neighbor_count, best.refresh_rate, best.embedding_dim,
                  best.correlation_weight, result.best_accuracy, label.c_str());
    csv += line;
  }
  write_text_file(args.output_path, csv);

  if (!args.distribution_path.empty()) {
    std::string table = "hyperparameter,value,share\n";
    const double total = static_cast<double>(archive.users.size());
    char line[128];
    for (const auto& [axis, values] : distribution) {
      for (const auto& [value, count] : values) {
        std::snprintf(line, sizeof(line), "%s,%s,%.2f\n", axis.c_str(), value.c_str(),
                      100.0 * static_cast<double>(count) / total);
        table += line;
      }
    }
    write_text_file(args.distribution_path, table);
  }

  for (const auto& [label, count] : class_counts) {
    std::printf("%s: %zu users (%.1f%%)\n", label.c_str(), count,
                100.0 * static_cast<double>(count) / static_cast<double>(archive.users.size()));
  }
}

// -------------------------------------------------------------- simmatrix ----

struct SimmatrixArgs {
  std::string input_path;
  std::string output_path;
  std::string user_id;
};

void cmd_simmatrix(const SimmatrixArgs& args) {
  const tc::Archive archive = tc::load_archive(args.input_path);
  const tc::UserHistory& user = find_user(archive, args.user_id);
  const std::size_t n = user.chains.size();
  std::string csv;
  csv.reserve(n * n * 9);
  char cell[32];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::snprintf(cell, sizeof(cell), j + 1 < n ? "%.6f," : "%.6f\n",
                    tc::chain_similarity(user.chains[i], user.chains[j]));
      csv += cell;
    }
  }
  write_text_file(args.output_path, csv);
  std::printf("%zu x %zu similarity matrix for %s -> %s\n", n, n, args.user_id.c_str(),
              args.output_path.c_str());
}

void add_model_options(CLI::App* cmd, ModelOptions& model, bool with_grid) {
  cmd->add_option("--pipeline", model.pipeline, "Graph classifier")
      ->check(CLI::IsMember({"lp", "embed"}))
      ->capture_default_str();
  cmd->add_option("--normalization", model.normalization, "Co-occurrence normalization")
      ->check(CLI::IsMember({"global", "eq6-literal"}))
      ->capture_default_str();
  cmd->add_option("--ablate", model.ablate, "Disable components (f1, f2, f3, corr)")
      ->delimiter(',')
      ->check(CLI::IsMember({"f1", "f2", "f3", "corr"}));
  cmd->add_option("--validation-days", model.validation_days,
                  "Holdout days for hyperparameter selection")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--trees", model.trees, "Random-forest size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_grid) {
    cmd->add_option("--grid-weekday", model.grid_weekday, "Weekday-weight axis (a1)")
        ->delimiter(',');
    cmd->add_option("--grid-workday", model.grid_workday, "Workday-weight axis (a2)")
        ->delimiter(',');
    cmd->add_option("--grid-recency", model.grid_recency, "Recency-weight axis (a3)")
        ->delimiter(',');
    cmd->add_option("--grid-neighbors", model.grid_neighbors, "Neighbor-count axis (K)")
        ->delimiter(',');
    cmd->add_option("--grid-refresh", model.grid_refresh, "Refresh-rate axis (alpha)")
        ->delimiter(',');
    cmd->add_option("--grid-dims", model.grid_dims, "Embedding-dimension axis (k)")
        ->delimiter(',');
    cmd->add_option("--grid-lambda", model.grid_lambda, "Correlation-weight axis (lambda)")
        ->delimiter(',');
  }
  cmd->add_option("--a1", model.a1, "Fixed weekday weight")->capture_default_str();
  cmd->add_option("--a2", model.a2, "Fixed workday weight")->capture_default_str();
  cmd->add_option("--a3", model.a3, "Fixed recency weight")->capture_default_str();
  cmd->add_option("--neighbors", model.neighbors, "Fixed neighbor count")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--refresh", model.refresh, "Fixed refresh rate")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--dim", model.dim, "Fixed embedding dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--lambda", model.lambda, "Fixed correlation weight")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trip-chain prediction toolkit: similarity graphs over travel days,"
               " label propagation / spectral embedding, and chain assembly."};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI-style key=value file");

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base random seed")->capture_default_str();
  app.add_option("--workers", global.workers, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  // Let `tripchain predict --seed 7 ...` reach the app-level options.
  app.fallthrough();

  SynthArgs synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth_cmd->add_option("--spec", synth.spec_path, "Population spec (JSON)")->required();
  synth_cmd->add_option("--records", synth.records_path, "Output records CSV")->required();
  synth_cmd->add_option("--calendar", synth.calendar_path, "Output calendar CSV")->required();

  IngestArgs ingest;
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "Build an archive from raw CSVs");
  ingest_cmd->add_option("--records", ingest.records_path, "Records CSV")->required();
  ingest_cmd->add_option("--calendar", ingest.calendar_path, "Calendar CSV")->required();
  ingest_cmd->add_option("--output", ingest.output_path, "Archive JSON to write")->required();
  ingest_cmd->add_option("--rejects", ingest.rejects_path, "Write rejected rows here");
  ingest_cmd->add_option("--min-active-days", ingest.min_active_days,
                         "Keep users with at least this many travel days")
      ->capture_default_str();

  PatternsArgs patterns;
  CLI::App* patterns_cmd =
      app.add_subcommand("patterns", "Similarity statistics and significance tests");
  patterns_cmd->add_option("--input", patterns.input_path, "Archive JSON")->required();
  patterns_cmd->add_option("--output", patterns.output_path, "Report JSON to write")->required();
  patterns_cmd->add_option("--gap-curve", patterns.gap_curve_path, "Gap-curve CSV to write");
  patterns_cmd->add_option("--pairs", patterns.pairs, "Sampled day pairs per set")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  patterns_cmd->add_flag("--exclude-empty-days", patterns.exclude_empty_days,
                         "Skip no-travel days when sampling");
  patterns_cmd->add_option("--gaps", patterns.gaps, "Gap-curve day offsets")->delimiter(',');

  PredictArgs predict;
  ModelOptions predict_model;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Predict each user's future days");
  predict_cmd->add_option("--input", predict.input_path, "Archive JSON")->required();
  predict_cmd->add_option("--output", predict.output_path, "Predictions JSON to write")
      ->required();
  predict_cmd->add_option("--user", predict.users, "Restrict to these user ids")->delimiter(',');
  predict_cmd->add_option("--horizon", predict.horizon, "Days to predict")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  predict_cmd->add_option("--known-days", predict.known_days,
                          "Known prefix length (default: calendar minus horizon)");
  predict_cmd->add_flag("--no-calibrate", predict.no_calibrate,
                        "Use the fixed parameters instead of per-user grid search");
  predict_cmd->add_flag("--probabilities", predict.emit_probabilities,
                        "Include per-trip probabilities in the output");
  add_model_options(predict_cmd, predict_model, /*with_grid=*/true);

  EvaluateArgs evaluate;
  ModelOptions evaluate_model;
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Compare prediction methods");
  evaluate_cmd->add_option("--input", evaluate.input_path, "Archive JSON")->required();
  evaluate_cmd->add_option("--output", evaluate.output_path, "Report CSV to write")->required();
  evaluate_cmd->add_option("--breakdown", evaluate.breakdown_path, "Per-user CSV to write");
  evaluate_cmd->add_option("--horizons", evaluate.horizons, "Prediction horizons")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate_cmd
      ->add_option("--methods", evaluate.methods,
                   "Subset of random-guess, last-week, ngram, lp, embed")
      ->delimiter(',')
      ->check(CLI::IsMember({"random-guess", "last-week", "ngram", "lp", "embed"}));
  evaluate_cmd->add_option("--calibrate", evaluate.calibrate, "Which graph methods grid-search")
      ->check(CLI::IsMember({"none", "lp", "embed", "both"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--ngram-order", evaluate.ngram_order, "Markov order")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_model_options(evaluate_cmd, evaluate_model, /*with_grid=*/true);

  ClusterArgs cluster;
  ModelOptions cluster_model;
  CLI::App* cluster_cmd =
      app.add_subcommand("cluster", "Classify users by their selected hyperparameters");
  cluster_cmd->add_option("--input", cluster.input_path, "Archive JSON")->required();
  cluster_cmd->add_option("--output", cluster.output_path, "Per-user CSV to write")->required();
  cluster_cmd->add_option("--distribution", cluster.distribution_path,
                          "Hyperparameter distribution CSV to write");
  add_model_options(cluster_cmd, cluster_model, /*with_grid=*/true);

  SimmatrixArgs simmatrix;
  CLI::App* simmatrix_cmd =
      app.add_subcommand("simmatrix", "Day-by-day chain-similarity matrix for one user");
  simmatrix_cmd->add_option("--input", simmatrix.input_path, "Archive JSON")->required();
  simmatrix_cmd->add_option("--user", simmatrix.user_id, "User id")->required();
  simmatrix_cmd->add_option("--output", simmatrix.output_path, "Matrix CSV to write")
      ->required();

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) cmd_synth(synth, global);
    if (ingest_cmd->parsed()) cmd_ingest(ingest);
    if (patterns_cmd->parsed()) cmd_patterns(patterns, global);
    if (predict_cmd->parsed()) cmd_predict(predict, predict_model, global);
    if (evaluate_cmd->parsed()) cmd_evaluate(evaluate, evaluate_model, global);
    if (cluster_cmd->parsed()) cmd_cluster(cluster, cluster_model, global);
    if (simmatrix_cmd->parsed()) cmd_simmatrix(simmatrix);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const tc::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
