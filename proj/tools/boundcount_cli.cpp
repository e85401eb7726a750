// boundcount: exact bound-state counts and analytic limits for central
// potentials (units 2m = hbar = 1).

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boundcount/check.hpp"
#include "boundcount/exact_counter.hpp"
#include "boundcount/limits.hpp"
#include "boundcount/limits_total.hpp"
#include "boundcount/report.hpp"

namespace bc = boundcount;

namespace {

enum Exit : int { kOk = 0, kBadInput = 1, kNumerical = 2, kInapplicable = 3, kInvariant = 4 };

constexpr const char* kCsvHelp =
    "CSV columns (count, limits): version,command,potential,ell,exact,limit_id,kind,strictness,"
    "applicable,raw,integer_statement,table_value,reason,wall_time_s. One row per limit.";

struct Common {
  std::string output;
  std::string format = "text";
  bc::Tolerances tol;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--output,-o", c.output, "Write to this file instead of stdout");
  app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app->add_option("--tol-quad-rel", c.tol.quad_rel, "Relative quadrature tolerance");
  app->add_option("--tol-quad-abs", c.tol.quad_abs, "Absolute quadrature tolerance");
  app->add_option("--tol-root", c.tol.root_tol, "Root-finding tolerance");
  app->add_option("--tol-ode-rel", c.tol.ode_rel, "Relative ODE tolerance");
  app->add_option("--tol-tail", c.tol.tail_tol, "Semi-infinite tail tolerance");
  app->add_option("--tol-origin-eps", c.tol.origin_eps, "ODE start radius in units of R");
  app->add_option("--tol-max-steps", c.tol.max_steps, "ODE step budget");
}

void emit(const Common& c, const std::string& text) {
  if (c.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw bc::ConfigError("cannot open '" + c.output + "' for writing");
  f << text;
}

std::vector<std::string> split_ids(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string render(const bc::RunRecord& r, const std::string& format) {
  if (format == "json") return r.to_json() + "\n";
  if (format == "csv") return bc::RunRecord::csv_header() + "\n" + r.to_csv_rows();
  std::ostringstream os;
  os << "potential: " << r.potential << "\n";
  if (r.ell >= 0) os << "ell: " << r.ell << "\n";
  if (r.exact) os << "exact: " << *r.exact << "\n";
  for (const auto& w : r.warnings) os << "warning: " << w << "\n";
  for (const auto& v : r.limits) {
    os << "  " << v.id << " (" << bc::to_string(v.kind) << ")";
    if (!v.applicable) {
      os << ": not applicable, " << v.reason << "\n";
      continue;
    }
    os << ": raw " << *v.raw << ", integer " << v.table_value() << "\n";
    for (const auto& w : v.warnings) os << "    warning: " << w << "\n";
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact bound-state counts and analytic limits for central potentials"};
  app.footer(std::string(kCsvHelp) +
             "\nPotential specs: morse:g=5,R=1,alpha=1 | exponential:g=8,R=1 | yukawa:g=8,R=1 | "
             "square_well:g=4,R=1 | saturating:g=10,R=1,ell=0,delta=0.1,N=3 | expr:'-g^2*exp(-r)':g=3"
             "\nExit codes: 0 ok, 1 invalid input, 2 numerical failure, 3 inapplicable request, "
             "4 invariant violation.");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bc::kToolVersion));

  Common common;
  std::string potential;
  int ell = 0;

  auto* count = app.add_subcommand("count", "Exact number of bound states in one partial wave");
  count->add_option("--potential,-p", potential, "Potential spec")->required();
  count->add_option("--ell,-l", ell, "Angular momentum")->check(CLI::NonNegativeNumber);
  add_common(count, common);

  std::string only;
  bool totals = false;
  auto* limits = app.add_subcommand("limits", "Evaluate limits for one partial wave");
  limits->add_option("--potential,-p", potential, "Potential spec")->required();
  limits->add_option("--ell,-l", ell, "Angular momentum")->check(CLI::NonNegativeNumber);
  limits->add_option("--only", only, "Comma-separated limit ids (default: all)");
  limits->add_flag("--totals", totals, "Also evaluate the L and N bounds");
  add_common(limits, common);

  int which = 1;
  std::string csv_out;
  auto* table = app.add_subcommand("table", "Reproduce a comparison table and mark mismatches");
  table->add_option("which", which, "1 (exponential) or 2 (Yukawa)")->required()->check(CLI::IsMember({1, 2}));
  table->add_option("--csv", csv_out, "Also write the cells as CSV to this file");
  add_common(table, common);

  std::string g_range, quantities;
  int threads = 0;
  auto* sweep = app.add_subcommand("sweep", "CSV of exact counts and limits over a g range");
  sweep->add_option("--potential,-p", potential, "Family spec without g, e.g. exponential:R=1")->required();
  sweep->add_option("--g-range", g_range, "lo:hi:step")->required();
  sweep->add_option("--quantities,-q", quantities,
                    "Comma-separated: N0, L, N, limit ids, L/N bound ids, or limits, L_bounds, N_bounds");
  sweep->add_option("--ell,-l", ell, "Channel for per-channel quantities")->check(CLI::NonNegativeNumber);
  sweep->add_option("--threads", threads, "Worker threads (0: hardware)");
  add_common(sweep, common);

  bool self_test = false;
  unsigned seed = 1;
  std::string check_grid;
  auto* check = app.add_subcommand("check", "Run the invariant suites");
  check->add_flag("--self-test", self_test, "Inject a loose tolerance (1e-1); a working checker exits 4");
  check->add_option("--seed", seed, "Seed for the random expression potentials");
  check->add_option("--g-range", check_grid, "Coupling grid lo:hi:step for the sandwich suite");
  add_common(check, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    common.tol.validate();
    const auto t0 = std::chrono::steady_clock::now();

    if (*count || *limits) {
      const bc::Potential p = bc::parse_potential_spec(potential);
      bc::RunRecord rec;
      rec.command = *count ? "count" : "limits";
      rec.potential = potential;
      rec.ell = ell;
      rec.tol = common.tol;
      const bc::CountResult cr = bc::count_partial_wave(p, ell, common.tol);
      rec.exact = cr.N;
      rec.warnings = cr.solution.warnings;
      bool all_inapplicable = false;
      if (*limits) {
        const auto ids = split_ids(only);
        rec.limits = bc::evaluate_all(bc::make_channel(p, ell, common.tol), ids);
        if (totals) {
          for (auto& v : bc::l_bounds(p, common.tol)) rec.limits.push_back(std::move(v));
          for (auto& v : bc::total_bounds(p, common.tol)) rec.limits.push_back(std::move(v));
        }
        all_inapplicable = !ids.empty() && std::none_of(rec.limits.begin(), rec.limits.end(),
                                                        [](const bc::LimitValue& v) { return v.applicable; });
      }
      rec.wall_time_s = since(t0);
      if (*count && common.format == "text") {
        std::ostringstream os;
        os << "N=" << cr.N << "\n";
        for (const auto& d : cr.solution.diagnostics) os << "  " << d << "\n";
        for (const auto& w : cr.solution.warnings) os << "warning: " << w << "\n";
        emit(common, os.str());
      } else {
        emit(common, render(rec, common.format));
      }
      if (all_inapplicable) {
        std::cerr << "error: none of the requested limits applies to this potential\n";
        return kInapplicable;
      }
      return kOk;
    }

    if (*table) {
      const bc::TableResult t = bc::compute_table(which, common.tol);
      if (common.format == "csv") emit(common, bc::table_csv(t));
      else emit(common, bc::format_table(t));
      if (!csv_out.empty()) {
        std::ofstream f(csv_out);
        if (!f) throw bc::ConfigError("cannot open '" + csv_out + "' for writing");
        f << bc::table_csv(t);
      }
      return kOk;
    }

    if (*sweep) {
      const bc::SweepRange r = bc::parse_range(g_range);
      emit(common, bc::sweep_csv(potential, r, split_ids(quantities), ell, common.tol, threads));
      return kOk;
    }

    if (*check) {
      bc::CheckOptions opt;
      opt.tol = common.tol;
      opt.seed = seed;
      if (!check_grid.empty()) opt.g_values = bc::parse_range(check_grid).values();
      if (self_test) {
        bc::Tolerances loose;
        loose.quad_rel = loose.quad_abs = loose.root_tol = loose.ode_rel = loose.tail_tol = 1e-1;
        loose.origin_eps = 1e-1;
        opt.probe_tol = loose;
      }
      const bc::CheckReport rep = bc::run_checks(opt);
      if (common.format == "json") {
        emit(common, rep.to_json() + "\n");
      } else {
        std::ostringstream os;
        os << "statements checked: " << rep.statements << "\nviolations: " << rep.violations.size() << "\n";
        for (const auto& v : rep.violations)
          os << "  [" << v.suite << "] " << v.potential << " l=" << v.ell << " " << v.limit << ": " << v.detail
             << "\n";
        emit(common, os.str());
      }
      if (!rep.ok()) std::cerr << rep.to_json() << "\n";
      return rep.ok() ? kOk : kInvariant;
    }
  } catch (const bc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  } catch (const bc::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const bc::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return kInvariant;
  } catch (const std::domain_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
