#pragma once

#include <cstddef>
#include <vector>

#include "matrix.hpp"

namespace tsforge {

// Bounded SMAPE: mean over all elements of 200·|f−a| / (|a|+|f|), a 0/0 term
// counting as 0. Result lies in [0, 200].
double smape(const Matrix& actual, const Matrix& forecast);

double mae(const Matrix& actual, const Matrix& forecast);

// Ordinal ranking: smallest score gets rank 1, ties broken by input order.
// Returned ranks are a permutation of 1..n aligned with the input.
std::vector<std::size_t> rank_scores(const std::vector<double>& scores);

}  // namespace tsforge
