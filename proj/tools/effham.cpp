// effham: effective Hamiltonians of trigonometric potentials from the command line.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "effham/expansion.hpp"
#include "effham/homogenize.hpp"
#include "effham/io.hpp"
#include "effham/potential.hpp"
#include "effham/rigidity.hpp"
#include "effham/verify.hpp"

using namespace effham;

namespace {

constexpr int kInputError = 3;

std::vector<RealVec> cartesian(const std::vector<double>& axis, std::size_t dim) {
  std::vector<RealVec> out{RealVec{}};
  for (std::size_t d = 0; d < dim; ++d) {
    std::vector<RealVec> next;
    for (const auto& prefix : out) {
      for (double x : axis) {
        RealVec p = prefix;
        p.push_back(x);
        next.push_back(std::move(p));
      }
    }
    out = std::move(next);
  }
  return out;
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective Hamiltonians of mechanical Hamiltonians with trigonometric potentials"};
  app.require_subcommand(1);

  std::string potential_path, a_path, b_path;

  auto* eval = app.add_subcommand("eval", "Evaluate a potential and its gradient at a point");
  std::string x_text;
  eval->add_option("--potential", potential_path, "Potential JSON")->required();
  eval->add_option("--x", x_text, "Point, comma separated")->required();

  auto* expand = app.add_subcommand("expand", "Large-momentum expansion coefficients along Q");
  std::string q_text;
  int order = 4;
  expand->add_option("--potential", potential_path, "Potential JSON")->required();
  expand->add_option("--Q", q_text, "Direction, comma separated")->required();
  expand->add_option("--order", order, "Expansion order")->check(CLI::Range(0, 12));

  auto* hbar = app.add_subcommand("hbar", "Effective Hamiltonian on a momentum grid (CSV)");
  std::string p_grid = "-3:3:0.5";
  SolverConfig solver;
  double horizon = 0.0;
  hbar->add_option("--potential", potential_path, "Potential JSON")->required();
  hbar->add_option("--p-grid", p_grid, "min:max:step, applied to every coordinate");
  hbar->add_option("--grid", solver.grid_points_per_dim, "Grid points per dimension")
      ->check(CLI::Range(4, 4096));
  hbar->add_option("--horizon", horizon, "Final time T2 (default scales with 1/(1+|p|))");
  hbar->add_option("--cfl", solver.cfl, "CFL number")->check(CLI::Range(0.01, 1.0));

  auto* dec = app.add_subcommand("decide", "Decide whether two potentials share an effective Hamiltonian");
  dec->add_option("--a", a_path, "First potential JSON")->required();
  dec->add_option("--b", b_path, "Second potential JSON")->required();

  auto* mf = app.add_subcommand("mfunc", "Trace of the phase function M(t) (CSV)");
  std::string r_text = "1,1,1", alpha_text = "1,1", range_text = "0:6.2832:0.01";
  mf->add_option("--r", r_text, "Amplitudes r1,r2,r3");
  mf->add_option("--alpha", alpha_text, "Rational coordinates a1,a2 (e.g. 1/2,1/3)");
  mf->add_option("--range", range_text, "t range min:max:step");

  auto* ver = app.add_subcommand("verify", "Cross-check the verdict against numerics (JSON report)");
  VerifyConfig vcfg;
  ver->add_option("--a", a_path, "First potential JSON")->required();
  ver->add_option("--b", b_path, "Second potential JSON")->required();
  ver->add_option("--grid", vcfg.grid, "Grid points per dimension")->check(CLI::Range(8, 1024));
  ver->add_option("--seed", vcfg.seed, "Seed for sampled momenta and directions");
  ver->add_option("--hbar-tol", vcfg.hbar_tol, "H-bar agreement for equivalent pairs");
  ver->add_option("--max-gap-tol", vcfg.max_gap_tol, "Torus-max gap for phase failures");
  ver->add_option("--horizon-scale", vcfg.horizon_scale, "T2 = scale / (1 + |p|)");
  ver->add_option("--p-samples", vcfg.p_samples, "Random momenta besides p = 0");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*eval) {
      const auto v = load_potential(potential_path);
      const auto x = parse_real_list(x_text);
      if (x.size() != v.dim()) throw DimensionMismatch("point dimension does not match potential");
      RealVec grad, hess;
      v.derivatives(x, grad, hess);
      print_json({{"x", x}, {"value", v.eval(x)}, {"gradient", grad}});
      return 0;
    }
    if (*expand) {
      const auto v = load_potential(potential_path);
      const auto q = parse_real_list(q_text);
      if (q.size() != v.dim()) throw DimensionMismatch("Q dimension does not match potential");
      const auto r = corrector_recursion(v, q, order);
      print_json(expansion_to_json(r));
      return 0;
    }
    if (*hbar) {
      const auto v = load_potential(potential_path);
      if (horizon > 0.0) solver.horizon_T2 = horizon;
      const auto ps = cartesian(parse_range(p_grid), v.dim());
      std::vector<std::string> header;
      for (std::size_t i = 0; i < v.dim(); ++i) header.push_back("p" + std::to_string(i + 1));
      header.push_back("hbar");
      header.push_back("error_estimate");
      std::vector<std::vector<double>> rows;
      for (const auto& s : hbar_grid(v, ps, solver)) {
        auto row = s.p;
        row.push_back(s.value);
        row.push_back(s.error_estimate);
        rows.push_back(std::move(row));
      }
      write_csv(std::cout, header, rows);
      return 0;
    }
    if (*dec) {
      const auto v = decide(load_potential(a_path), load_potential(b_path));
      print_json(verdict_to_json(v));
      std::cerr << to_string(v.tag) << ": " << v.reason << '\n';
      if (v.tag == VerdictTag::OutOfScope) return 2;
      return v.equivalent() ? 0 : 1;
    }
    if (*mf) {
      const auto r = parse_real_list(r_text);
      const auto alpha = parse_rational_list(alpha_text);
      if (r.size() != 3 || alpha.size() != 2) {
        throw ParseError("--r needs three amplitudes and --alpha two rationals");
      }
      MFunctionParams params{r[0], r[1], r[2], alpha[0], alpha[1]};
      const Rational l = params.half_period();
      std::cout << "# l/pi = " << rational_to_string(l) << ", l = "
                << format_double(kTwoPi / 2.0 * boost::rational_cast<double>(l)) << '\n';
      std::vector<std::vector<double>> rows;
      for (const auto& [t, m] : run_mfunc(params, parse_range(range_text))) rows.push_back({t, m});
      write_csv(std::cout, {"t", "M"}, rows);
      return 0;
    }
    if (*ver) {
      const auto report = run_verify(load_potential(a_path), load_potential(b_path), vcfg);
      print_json(report_to_json(report));
      std::cerr << to_string(report.verdict.tag) << ", consistent: " << std::boolalpha
                << report.consistent << '\n';
      return report.consistent ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
