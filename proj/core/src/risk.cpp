#include "salesmix/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "salesmix/errors.hpp"
#include "salesmix/numeric.hpp"

namespace salesmix {

namespace {

void require_distribution(const ProfitDistribution& d) {
  if (d.value.empty() || d.value.size() != d.probability.size())
    throw ConfigError("profit distribution must be non-empty with parallel arrays");
  KahanSum total;
  for (const double p : d.probability) {
    if (!(p >= 0.0)) throw ConfigError("probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total.value() - 1.0) > 1e-9)
    throw ConfigError("probabilities must sum to 1");
}

}  // namespace

double expected(const ProfitDistribution& d) {
  require_distribution(d);
  KahanSum s;
  for (std::size_t i = 0; i < d.value.size(); ++i)
    s += d.value[i] * d.probability[i];
  return s.value();
}

double cvar(const ProfitDistribution& d, double beta) {
  require_distribution(d);
  if (!(beta > 0.0) || !(beta <= 1.0))
    throw ConfigError("cvar level must be in (0, 1]");

  std::vector<std::size_t> order(d.value.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return d.value[a] < d.value[b];
  });

  // Weight each atom by take/beta as it is consumed: a point mass then gets
  // weight exactly 1.0, so cvar of a degenerate distribution returns the
  // atom's value bit-for-bit at every level.
  KahanSum tail;
  double mass = 0.0;
  for (const std::size_t i : order) {
    const double room = beta - mass;
    if (room <= 0.0) break;
    const double take = std::min(d.probability[i], room);
    tail += d.value[i] * (take / beta);
    mass += take;
  }
  return tail.value();
}

double risk_premium(double futures_price, double expected_spot_price) {
  return futures_price - expected_spot_price;
}

std::size_t select_optimal(const std::vector<double>& expected_profit,
                           const std::vector<double>& cvar_profit,
                           const std::vector<double>& qft, double lambda) {
  if (expected_profit.empty() || expected_profit.size() != cvar_profit.size() ||
      expected_profit.size() != qft.size())
    throw ConfigError("selection inputs must be non-empty parallel vectors");
  if (!(lambda >= 0.0) || !(lambda <= 1.0))
    throw ConfigError("lambda must be in [0, 1]");

  std::size_t best = 0;
  double best_score =
      lambda * expected_profit[0] + (1.0 - lambda) * cvar_profit[0];
  for (std::size_t i = 1; i < expected_profit.size(); ++i) {
    const double score =
        lambda * expected_profit[i] + (1.0 - lambda) * cvar_profit[i];
    if (score > best_score || (score == best_score && qft[i] < qft[best])) {
      best = i;
      best_score = std::max(best_score, score);
    }
  }
  return best;
}

}  // namespace salesmix
