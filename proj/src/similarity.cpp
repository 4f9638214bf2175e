#include "tripchain/similarity.hpp"

#include <algorithm>

namespace tripchain {

double chain_similarity(const TripChain& a, const TripChain& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  auto shared = static_cast<double>(intersection_size(a, b));
  return 0.5 * (shared / static_cast<double>(a.size()) + shared / static_cast<double>(b.size()));
}

double day_similarity(const SimilarityParams& params, const CalendarDay& a, const CalendarDay& b,
                      std::size_t gap) {
  double s = 0.0;
  if (a.weekday == b.weekday) s += params.a1;
  if (a.is_workday == b.is_workday) s += params.a2;
  s += params.a3 / (static_cast<double>(gap) + 1.0);
  return s;
}

Eigen::MatrixXd build_graph(const Calendar& calendar, const SimilarityParams& params) {
  const auto n = static_cast<Eigen::Index>(calendar.size());
  Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      auto ui = static_cast<std::size_t>(i);
      auto uj = static_cast<std::size_t>(j);
      double w = day_similarity(params, calendar[ui], calendar[uj], calendar.day_gap(ui, uj));
      weights(i, j) = w;
      weights(j, i) = w;
    }
  }
  return weights;
}

std::vector<std::size_t> k_nearest(const Eigen::MatrixXd& weights, std::size_t i, int k) {
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<std::size_t> order;
  order.reserve(n > 0 ? n - 1 : 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) order.push_back(j);
  }
  auto gap = [i](std::size_t j) { return i > j ? i - j : j - i; };
  auto ei = static_cast<Eigen::Index>(i);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double wa = weights(ei, static_cast<Eigen::Index>(a));
    double wb = weights(ei, static_cast<Eigen::Index>(b));
    if (wa != wb) return wa > wb;
    if (gap(a) != gap(b)) return gap(a) < gap(b);
    return a < b;
  });
  if (k < 0) k = 0;
  if (order.size() > static_cast<std::size_t>(k)) order.resize(static_cast<std::size_t>(k));
  return order;
}

}  // namespace tripchain
