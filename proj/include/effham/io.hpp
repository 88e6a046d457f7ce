#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "effham/expansion.hpp"
#include "effham/potential.hpp"
#include "effham/rigidity.hpp"

namespace effham {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {"dim": n, "mean": a, "modes": [{"k": [..], "re": x, "im": y}, ...]}
TrigPotential potential_from_json(const json& j);
json potential_to_json(const TrigPotential& v);
TrigPotential load_potential(const std::string& path);

json expansion_to_json(const ExpansionResult& r);
json verdict_to_json(const Verdict& v);
json transform_to_json(const Transform& t);

/// "p/q" or "p"
std::string rational_to_string(const Rational& r);
Rational parse_rational(const std::string& s);

/// 17 significant digits.
std::string format_double(double x);

/// "1,0.7" -> {1, 0.7}
std::vector<double> parse_real_list(const std::string& s);
std::vector<Rational> parse_rational_list(const std::string& s);

/// "min:max:step" -> min, min + step, ... up to max (inclusive within step/1e6).
std::vector<double> parse_range(const std::string& s);

/// Writes rows of numbers as CSV with 17 significant digits.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace effham
