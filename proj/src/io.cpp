#include "effham/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <boost/algorithm/string.hpp>

namespace effham {

namespace {

std::vector<std::string> split_fields(const std::string& s, const char* sep) {
  std::vector<std::string> parts;
  boost::split(parts, s, boost::is_any_of(sep));
  for (auto& p : parts) boost::trim(p);
  return parts;
}

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ParseError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ParseError("not a number: '" + s + "'");
  return x;
}

}  // namespace

TrigPotential potential_from_json(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("potential must be a JSON object");
    const auto dim = j.at("dim").get<std::int64_t>();
    if (dim < 1) throw ParseError("dim must be positive");
    const double mean = j.value("mean", 0.0);
    std::vector<FourierMode> modes;
    for (const auto& m : j.value("modes", json::array())) {
      FourierMode fm;
      fm.k = m.at("k").get<IntVec>();
      fm.amplitude = Complex(m.value("re", 0.0), m.value("im", 0.0));
      modes.push_back(std::move(fm));
    }
    return TrigPotential(static_cast<std::size_t>(dim), mean, std::move(modes));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed potential: ") + e.what());
  }
}

json potential_to_json(const TrigPotential& v) {
  json modes = json::array();
  for (const auto& m : v.modes()) {
    modes.push_back({{"k", m.k}, {"re", m.amplitude.real()}, {"im", m.amplitude.imag()}});
  }
  return {{"dim", v.dim()}, {"mean", v.mean()}, {"modes", modes}};
}

TrigPotential load_potential(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return potential_from_json(j);
}

json expansion_to_json(const ExpansionResult& r) {
  return {{"schema", kSchemaVersion},
          {"Q", r.Q},
          {"order", r.order},
          {"a", r.a},
          {"min_denominator", r.min_denominator}};
}

json transform_to_json(const Transform& t) {
  return {{"c", rational_to_string(t.c)}, {"x0", t.x0}, {"orientation", t.orientation}};
}

json verdict_to_json(const Verdict& v) {
  json out{{"schema", kSchemaVersion},
           {"tag", to_string(v.tag)},
           {"witness", v.witness == Witness::None ? json(nullptr) : json(to_string(v.witness))},
           {"reason", v.reason}};
  if (v.transform) {
    out["c"] = rational_to_string(v.transform->c);
    out["x0"] = v.transform->x0;
    out["orientation"] = v.transform->orientation;
  }
  json pairing = json::array();
  for (const auto& p : v.pairing) {
    pairing.push_back({{"first", p.first}, {"second", p.second}, {"scaling", rational_to_string(p.scaling)}});
  }
  out["mode_pairing"] = pairing;
  return out;
}

std::string rational_to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
  const auto parts = split_fields(s, "/");
  try {
    if (parts.size() == 1) return Rational(std::stoll(parts[0]));
    if (parts.size() == 2) {
      const long long den = std::stoll(parts[1]);
      if (den == 0) throw ParseError("zero denominator in '" + s + "'");
      return Rational(std::stoll(parts[0]), den);
    }
  } catch (const std::logic_error&) {
  }
  throw ParseError("not a rational: '" + s + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split_fields(s, ",")) out.push_back(parse_double(p));
  return out;
}

std::vector<Rational> parse_rational_list(const std::string& s) {
  std::vector<Rational> out;
  for (const auto& p : split_fields(s, ",")) out.push_back(parse_rational(p));
  return out;
}

std::vector<double> parse_range(const std::string& s) {
  const auto parts = split_fields(s, ":");
  if (parts.size() != 3) throw ParseError("range must be min:max:step, got '" + s + "'");
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]), step = parse_double(parts[2]);
  if (!(step > 0.0)) throw ParseError("range step must be positive");
  if (hi < lo) throw ParseError("range max is below min");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-6));
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  os << boost::algorithm::join(header, ",") << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_double(row[i]);
    }
    os << '\n';
  }
}

}  // namespace effham
