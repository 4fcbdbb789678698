#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace salesmix {

// Compensated (Kahan) accumulator.  Every aggregation whose value is part of
// an output contract feeds this in a fixed index order, so results do not
// depend on thread count or chunking.
class KahanSum {
 public:
  KahanSum() = default;

  KahanSum& operator+=(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
    return *this;
  }

  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Compensated sum of v[i] * w[i] over ascending i.
double weighted_sum(const std::vector<double>& v, const std::vector<double>& w);

// Shortest decimal representation that parses back to exactly the same
// double (locale-independent).  Used for every floating-point field written
// to CSV or JSON sidecars.
std::string format_double(double x);

// Strict double parser; throws ParseError mentioning `where` on any
// non-numeric or trailing garbage.
double parse_double(const std::string& field, const std::string& where);

}  // namespace salesmix
