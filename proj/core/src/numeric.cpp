#include "salesmix/numeric.hpp"

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <system_error>

#include "salesmix/errors.hpp"

namespace salesmix {

double weighted_sum(const std::vector<double>& v, const std::vector<double>& w) {
  if (v.size() != w.size())
    throw ConfigError("weighted_sum: size mismatch");
  KahanSum s;
  for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * w[i];
  return s.value();
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& field, const std::string& where) {
  double out = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw ParseError(where + ": not a number: '" + field + "'");
  return out;
}

}  // namespace salesmix
