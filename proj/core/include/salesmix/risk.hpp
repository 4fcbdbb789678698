#pragma once

#include <cstddef>
#include <vector>

namespace salesmix {

// Discrete profit distribution; probabilities sum to 1.
struct ProfitDistribution {
  std::vector<double> value;
  std::vector<double> probability;
};

// Probability-weighted mean (compensated, fixed index order).
double expected(const ProfitDistribution& d);

// Lower-tail conditional expectation at mass `beta` in (0, 1]: the mean of
// the worst-profit atoms filling exactly beta of probability, with the
// boundary atom weighted fractionally.  A safety measure: larger is better,
// cvar(d, beta) <= expected(d), and cvar(d, 1) == expected(d).
double cvar(const ProfitDistribution& d, double beta);

// Futures price minus expected spot price.  Negative means the futures
// contract trades below the expected spot price.
double risk_premium(double futures_price, double expected_spot_price);

// Index maximizing lambda*expected + (1-lambda)*cvar; exact score ties go to
// the smaller qft.  All vectors are parallel; rows must be finite (filter
// infeasible points before calling).
std::size_t select_optimal(const std::vector<double>& expected_profit,
                           const std::vector<double>& cvar_profit,
                           const std::vector<double>& qft, double lambda);

}  // namespace salesmix
