#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "tripchain/core.hpp"

namespace tripchain {

// Overlap score of two trip sets: 0.5 * (|a∩b|/|a| + |a∩b|/|b|).
// Two empty chains are identical (1.0); empty vs non-empty shares nothing (0.0).
double chain_similarity(const TripChain& a, const TripChain& b);

// Pairwise day affinity: a1 if the weekdays match, plus a2 if both are
// workdays or both are not, plus a3 / (gap + 1) where gap = |i - j| in days.
double day_similarity(const SimilarityParams& params, const CalendarDay& a, const CalendarDay& b,
                      std::size_t gap);

// Dense symmetric day-affinity matrix over the calendar, zero diagonal.
Eigen::MatrixXd build_graph(const Calendar& calendar, const SimilarityParams& params);

// Indices of the K strongest neighbors of row i (never i itself), at most
// n-1 of them. Ties broken toward the closer day, then the smaller index.
std::vector<std::size_t> k_nearest(const Eigen::MatrixXd& weights, std::size_t i, int k);

}  // namespace tripchain
