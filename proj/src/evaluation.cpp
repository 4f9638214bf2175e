#include "tripchain/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tripchain/parallel.hpp"

namespace tripchain {

double chain_accuracy(const TripChain& pred, const TripChain& truth) {
  if (pred.empty() && truth.empty()) return 1.0;
  if (pred.empty() || truth.empty()) return 0.0;
  return 2.0 * static_cast<double>(intersection_size(pred, truth)) /
         static_cast<double>(pred.size() + truth.size());
}

namespace {

// Hours map below zero, stations at/above zero, so an hour can never match a
// station token.
std::vector<int> token_sequence(const TripChain& chain) {
  std::vector<int> tokens;
  tokens.reserve(chain.size() * 3);
  for (const auto& trip : chain) {
    tokens.push_back(-(trip.hour + 1));
    tokens.push_back(trip.origin.value);
    tokens.push_back(trip.destination.value);
  }
  return tokens;
}

double sample_stderr(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return sd / std::sqrt(static_cast<double>(n));
}

double mean_of(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

int edit_distance(const TripChain& pred, const TripChain& truth) {
  auto a = token_sequence(pred);
  auto b = token_sequence(truth);
  const std::size_t m = a.size(), n = b.size();
  std::vector<int> prev(n + 1), cur(n + 1);
  for (std::size_t j = 0; j <= n; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= n; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[n];
}

DayScore score_day(const TripChain& pred, const TripChain& truth) {
  return DayScore{chain_accuracy(pred, truth), edit_distance(pred, truth)};
}

HorizonScore evaluate_horizon(std::span<const TripChain> predictions,
                              std::span<const TripChain> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("evaluate_horizon: prediction/truth length mismatch");
  }
  HorizonScore out;
  std::vector<double> accs, eds;
  accs.reserve(predictions.size());
  eds.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out.per_day.push_back(score_day(predictions[i], truths[i]));
    accs.push_back(out.per_day.back().accuracy);
    eds.push_back(static_cast<double>(out.per_day.back().edit_distance));
  }
  out.mean_accuracy = mean_of(accs);
  out.stderr_accuracy = sample_stderr(accs);
  out.mean_edit_distance = mean_of(eds);
  out.stderr_edit_distance = sample_stderr(eds);
  return out;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t x = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Report compare_methods(std::span<const UserHistory> histories, std::span<const Method> methods,
                       std::span<const int> horizons, std::uint64_t seed, int workers) {
  if (horizons.empty() || methods.empty()) return {};
  int max_horizon = *std::max_element(horizons.begin(), horizons.end());
  if (max_horizon < 1) throw std::invalid_argument("horizons must be positive");

  // per_user[u][m][h] = (mean accuracy, mean edit distance) for that user.
  struct Cell {
    double accuracy = 0.0;
    double edit = 0.0;
  };
  std::vector<std::vector<std::vector<Cell>>> per_user(
      histories.size(),
      std::vector<std::vector<Cell>>(methods.size(), std::vector<Cell>(horizons.size())));

  parallel_for_index(histories.size(), workers, [&](std::size_t u) {
    const auto& history = histories[u];
    if (history.chains.size() <= static_cast<std::size_t>(max_horizon)) {
      throw std::invalid_argument("history '" + history.user_id +
                                  "' shorter than the longest horizon");
    }
    std::size_t known_end = history.chains.size() - static_cast<std::size_t>(max_horizon);
    std::uint64_t user_seed = mix_seed(seed, u);
    for (std::size_t m = 0; m < methods.size(); ++m) {
      for (std::size_t h = 0; h < horizons.size(); ++h) {
        auto horizon = static_cast<std::size_t>(horizons[h]);
        auto preds = methods[m].predict(history, known_end, horizon, mix_seed(user_seed, m));
        if (preds.size() != horizon) {
          throw std::logic_error("method '" + methods[m].name +
                                 "' returned wrong number of predictions");
        }
        auto truth = std::span<const TripChain>(history.chains).subspan(known_end, horizon);
        auto scored = evaluate_horizon(preds, truth);
        per_user[u][m][h] = Cell{scored.mean_accuracy, scored.mean_edit_distance};
      }
    }
  });

  Report report;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    for (std::size_t h = 0; h < horizons.size(); ++h) {
      std::vector<double> accs, eds;
      for (std::size_t u = 0; u < histories.size(); ++u) {
        accs.push_back(per_user[u][m][h].accuracy);
        eds.push_back(per_user[u][m][h].edit);
        report.per_user.push_back(UserBreakdownRow{histories[u].user_id, methods[m].name,
                                                   horizons[h], per_user[u][m][h].accuracy,
                                                   per_user[u][m][h].edit});
      }
      ReportRow row;
      row.method = methods[m].name;
      row.horizon = horizons[h];
      row.accuracy_mean = mean_of(accs);
      row.accuracy_stderr = sample_stderr(accs);
      row.edit_distance_mean = mean_of(eds);
      row.edit_distance_stderr = sample_stderr(eds);
      row.n_users = histories.size();
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

std::string report_to_csv(const Report& report) {
  std::string out = "method,horizon,metric,mean,stderr,n\n";
  char buf[160];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,accuracy,%.6f,%.6f,%zu\n", row.method.c_str(),
                  row.horizon, row.accuracy_mean, row.accuracy_stderr, row.n_users);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%s,%d,edit_distance,%.6f,%.6f,%zu\n", row.method.c_str(),
                  row.horizon, row.edit_distance_mean, row.edit_distance_stderr, row.n_users);
    out += buf;
  }
  return out;
}

}  // namespace tripchain
