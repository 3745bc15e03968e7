#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "disq/bounds.hpp"
#include "disq/embedded.hpp"
#include "disq/errors.hpp"
#include "disq/model.hpp"
#include "disq/oracle.hpp"
#include "disq/series.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Emission {
  ordered_json meta = ordered_json::object();
  std::vector<std::string> columns;
  std::vector<ordered_json> rows;  // objects keyed by column name

  void add_row(std::initializer_list<std::pair<std::string, ordered_json>> cells) {
    ordered_json row = ordered_json::object();
    for (const auto& [k, v] : cells) row[k] = v;
    rows.push_back(std::move(row));
  }

  void write(std::ostream& out, const std::string& format) const {
    if (format == "json") {
      ordered_json j;
      j["meta"] = meta;
      j["rows"] = rows;
      out << j.dump(1, ' ') << '\n';
      return;
    }
    for (const auto& [key, value] : meta.items()) {
      out << "# " << key << "=";
      if (value.is_string())
        out << value.get<std::string>();
      else if (value.is_number_float())
        out << format_double(value.get<double>());
      else
        out << value.dump();
      out << '\n';
    }
    for (size_t c = 0; c < columns.size(); ++c) out << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
      for (size_t c = 0; c < columns.size(); ++c) {
        const auto& v = row.at(columns[c]);
        if (v.is_string())
          out << v.get<std::string>();
        else if (v.is_number_float())
          out << format_double(v.get<double>());
        else
          out << v.dump();
        out << (c + 1 < columns.size() ? "," : "\n");
      }
    }
  }
};

void emit(const Emission& e, const std::string& format, const std::string& output_path) {
  if (output_path.empty()) {
    e.write(std::cout, format);
    return;
  }
  std::ofstream out(output_path);
  if (!out) throw std::runtime_error("cannot open output file '" + output_path + "'");
  e.write(out, format);
}

struct CommonOpts {
  std::string format = "csv";
  std::string output;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--output,-o", opts.output, "Output file (default: stdout)");
}

disq::PrecisionPolicy make_policy(unsigned precision_bits, double eps) {
  disq::PrecisionPolicy policy;
  policy.target_tolerance = eps;
  if (precision_bits > 0) {
    policy.mode = disq::PrecisionMode::BigFloat;
    policy.float_precision_bits = precision_bits;
  }
  return policy;
}

disq::TransientResult run_series(const disq::ModelParams& params, const disq::Rational& tau,
                                 int kmax, double eps, unsigned precision_bits, int depth) {
  return disq::evaluate_transient_auto(params, tau, kmax, make_policy(precision_bits, eps),
                                       depth > 0 ? depth : 0);
}

int cmd_transient(const std::string& lambda_s, const std::string& mu_s,
                  const std::optional<std::string>& t_s, const std::optional<std::string>& tau_s,
                  int kmax, double eps, unsigned precision_bits, int depth,
                  const CommonOpts& opts) {
  auto params = disq::make_params(disq::parse_rational(lambda_s), disq::parse_rational(mu_s));
  disq::Rational tau = tau_s ? disq::parse_rational(*tau_s)
                             : disq::rescale_time(params, disq::parse_rational(*t_s));
  auto res = run_series(params, tau, kmax, eps, precision_bits, depth);

  Emission e;
  e.meta["tool"] = std::string("disq ") + kVersion;
  e.meta["command"] = "transient";
  e.meta["lambda"] = lambda_s;
  e.meta["mu"] = mu_s;
  e.meta["tau"] = disq::to_fraction_string(tau);
  e.meta["kmax"] = kmax;
  e.meta["eps"] = eps;
  e.meta["mode"] = precision_bits > 0 ? "big-float" : "exact-rational";
  e.meta["precision_bits"] = res.working_precision_bits;
  e.meta["truncation_order"] = res.truncation_order;
  e.columns = {"k", "p", "tail_bound"};
  for (int k = 0; k <= kmax; ++k)
    e.add_row({{"k", k}, {"p", res.probabilities[k]}, {"tail_bound", res.tail_bounds[k]}});
  emit(e, opts.format, opts.output);
  return 0;
}

int cmd_embedded(const std::string& lambda_s, const std::string& mu_s,
                 const std::string& rates_path, int n, const std::string& method,
                 const CommonOpts& opts) {
  std::optional<disq::BirthDeathRates> rates;
  if (!rates_path.empty()) {
    rates = disq::BirthDeathRates::from_json_file(rates_path);
  } else {
    auto params = disq::make_params(disq::parse_rational(lambda_s), disq::parse_rational(mu_s));
    rates = disq::BirthDeathRates::discouragement(params, n + n / 2 + 2);
  }

  std::optional<disq::EmbeddedTable> direct, closed;
  if (method == "recursion" || method == "both") direct = disq::embedded_recursion(*rates, n);
  if (method == "closed" || method == "both") closed = disq::closed_form(*rates, n).table;
  const disq::EmbeddedTable& table = direct ? *direct : *closed;

  Emission e;
  e.meta["tool"] = std::string("disq ") + kVersion;
  e.meta["command"] = "embedded";
  if (rates_path.empty()) {
    e.meta["lambda"] = lambda_s;
    e.meta["mu"] = mu_s;
  } else {
    e.meta["rates_file"] = rates_path;
  }
  e.meta["n"] = n;
  e.meta["method"] = method;
  if (direct && closed) {
    bool equal = true;
    for (int row = 0; row <= n && equal; ++row)
      for (int k = 0; k <= row; ++k)
        if (direct->p[row][k] != closed->p[row][k]) {
          equal = false;
          break;
        }
    e.meta["verdict"] = equal ? "equal" : "mismatch";
  }
  e.columns = {"n", "k", "p_num", "p_den", "p_float"};
  for (int row = 0; row <= n; ++row)
    for (int k = 0; k <= row; ++k) {
      const auto& q = table.p[row][k];
      e.add_row({{"n", row},
                 {"k", k},
                 {"p_num", numerator(q).str()},
                 {"p_den", denominator(q).str()},
                 {"p_float", disq::to_double(q)}});
    }
  emit(e, opts.format, opts.output);
  if (direct && closed && e.meta["verdict"] != "equal") return 1;
  return 0;
}

int cmd_bessel(int depth, bool with_triangle, const CommonOpts& opts) {
  auto numbers = disq::bessel_numbers(depth);
  Emission e;
  e.meta["tool"] = std::string("disq ") + kVersion;
  e.meta["command"] = "bessel";
  e.meta["depth"] = depth;
  e.columns = {"i", "bessel"};
  for (int i = 0; i <= depth; ++i) e.add_row({{"i", i}, {"bessel", numbers[i].str()}});
  if (with_triangle) {
    auto tri = disq::build_m_triangle(depth);
    auto rows = ordered_json::array();
    for (int i = 0; i <= depth; ++i) {
      auto r = ordered_json::array();
      for (int k = 0; k <= i; ++k) r.push_back(disq::to_fraction_string(tri.at(i, k)));
      rows.push_back(std::move(r));
    }
    e.meta["triangle"] = std::move(rows);
  }
  emit(e, opts.format, opts.output);
  return 0;
}

int cmd_validate(const std::string& lambda_s, const std::string& mu_s, const std::string& tau_s,
                 int kmax, double tol, double oracle_eps, unsigned precision_bits, int depth,
                 const CommonOpts& opts) {
  auto params = disq::make_params(disq::parse_rational(lambda_s), disq::parse_rational(mu_s));
  disq::Rational tau = disq::parse_rational(tau_s);
  double series_eps = std::min(tol / 100, 1e-10);
  auto series = run_series(params, tau, kmax, series_eps, precision_bits, depth);

  double t = disq::to_double(tau / params.lambda);
  int boundary = std::max(disq::choose_truncation(params, t, oracle_eps), kmax + 2);
  auto oracle = disq::transient_uniformization(disq::discouragement_generator(params, boundary), t,
                                               oracle_eps);

  Emission e;
  e.meta["tool"] = std::string("disq ") + kVersion;
  e.meta["command"] = "validate";
  e.meta["lambda"] = lambda_s;
  e.meta["mu"] = mu_s;
  e.meta["tau"] = tau_s;
  e.meta["kmax"] = kmax;
  e.meta["tol"] = tol;
  e.meta["oracle_eps"] = oracle_eps;
  e.meta["truncation_order"] = series.truncation_order;
  e.meta["oracle_states"] = boundary + 1;
  e.meta["boundary_mass"] = oracle.boundary_mass;
  e.columns = {"k", "series", "oracle", "abs_diff", "tail_bound", "verdict"};
  bool all_pass = true;
  for (int k = 0; k <= kmax; ++k) {
    double diff = std::fabs(series.probabilities[k] - oracle.p[k]);
    bool pass = diff <= tol;
    all_pass = all_pass && pass;
    e.add_row({{"k", k},
               {"series", series.probabilities[k]},
               {"oracle", oracle.p[k]},
               {"abs_diff", diff},
               {"tail_bound", series.tail_bounds[k]},
               {"verdict", pass ? "pass" : "fail"}});
  }
  e.meta["verdict"] = all_pass ? "pass" : "fail";
  emit(e, opts.format, opts.output);
  return all_pass ? 0 : 1;
}

int cmd_simulate(const std::string& lambda_s, const std::string& mu_s,
                 const std::optional<double>& t, const std::optional<int>& steps, long paths,
                 std::uint64_t seed, const CommonOpts& opts) {
  auto params = disq::make_params(disq::parse_rational(lambda_s), disq::parse_rational(mu_s));
  disq::SimConfig cfg;
  cfg.seed = seed;
  cfg.paths = paths;
  disq::SimMode mode = t ? disq::SimMode::Continuous : disq::SimMode::Embedded;
  if (t)
    cfg.t_end = *t;
  else
    cfg.steps = *steps;
  auto emp = disq::simulate_paths(params, cfg, mode);

  Emission e;
  e.meta["tool"] = std::string("disq ") + kVersion;
  e.meta["command"] = "simulate";
  e.meta["lambda"] = lambda_s;
  e.meta["mu"] = mu_s;
  e.meta["mode"] = t ? "continuous" : "embedded";
  if (t)
    e.meta["t"] = *t;
  else
    e.meta["steps"] = *steps;
  e.meta["paths"] = paths;
  e.meta["seed"] = seed;
  e.columns = {"k", "count", "p_hat", "stderr"};
  for (int k = 0; k < static_cast<int>(emp.counts.size()); ++k)
    e.add_row({{"k", k},
               {"count", emp.counts[k]},
               {"p_hat", emp.p_hat(k)},
               {"stderr", emp.standard_error(k)}});
  emit(e, opts.format, opts.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact transient analysis of the discouragement queue and its embedded chain"};
  app.require_subcommand(1);

  // transient
  auto* transient = app.add_subcommand("transient", "Taylor-series transient distribution");
  std::string tr_lambda, tr_mu;
  std::optional<std::string> tr_t, tr_tau;
  int tr_kmax = 10, tr_depth = 0;
  double tr_eps = 1e-10;
  unsigned tr_bits = 0;
  CommonOpts tr_opts;
  transient->add_option("--lambda", tr_lambda, "Arrival rate (rational)")->required();
  transient->add_option("--mu", tr_mu, "Service rate (rational)")->required();
  auto* opt_t = transient->add_option("--t", tr_t, "Physical time (rational)");
  auto* opt_tau = transient->add_option("--tau", tr_tau, "Rescaled time tau = lambda t");
  opt_t->excludes(opt_tau);
  transient->add_option("--kmax", tr_kmax, "Largest state to report");
  transient->add_option("--eps", tr_eps, "Target tolerance per state");
  transient->add_option("--precision-bits", tr_bits, "Big-float working precision (0 = exact)");
  transient->add_option("--depth", tr_depth, "Triangle depth (0 = auto)");
  add_common(transient, tr_opts);

  // embedded
  auto* embedded = app.add_subcommand("embedded", "Embedded jump-chain transient distribution");
  std::string em_lambda, em_mu, em_rates, em_method = "both";
  int em_n = 0;
  CommonOpts em_opts;
  auto* em_l = embedded->add_option("--lambda", em_lambda, "Arrival rate (rational)");
  auto* em_m = embedded->add_option("--mu", em_mu, "Service rate (rational)");
  auto* em_r = embedded->add_option("--rates", em_rates, "Rates file (JSON)");
  em_r->excludes(em_l)->excludes(em_m);
  em_l->needs(em_m);
  embedded->add_option("--n", em_n, "Step horizon")->required();
  embedded->add_option("--method", em_method, "recursion, closed or both")
      ->check(CLI::IsMember({"recursion", "closed", "both"}));
  add_common(embedded, em_opts);

  // bessel
  auto* bessel = app.add_subcommand("bessel", "Bessel numbers and the M-triangle");
  int be_depth = 10;
  bool be_triangle = false;
  CommonOpts be_opts;
  bessel->add_option("--depth", be_depth, "Largest index");
  bessel->add_flag("--triangle", be_triangle, "Include the full triangle (JSON meta)");
  add_common(bessel, be_opts);

  // validate
  auto* validate = app.add_subcommand("validate", "Series vs uniformization cross-check");
  std::string va_lambda, va_mu, va_tau;
  int va_kmax = 10, va_depth = 120;
  double va_tol = 1e-8, va_eps = 1e-10;
  unsigned va_bits = 0;
  CommonOpts va_opts;
  validate->add_option("--lambda", va_lambda, "Arrival rate (rational)")->required();
  validate->add_option("--mu", va_mu, "Service rate (rational)")->required();
  validate->add_option("--tau", va_tau, "Rescaled time")->required();
  validate->add_option("--kmax", va_kmax, "Largest state to compare");
  validate->add_option("--tol", va_tol, "Per-state pass threshold");
  validate->add_option("--eps", va_eps, "Oracle Poisson-tail epsilon");
  validate->add_option("--precision-bits", va_bits, "Big-float working precision (0 = exact)");
  validate->add_option("--depth", va_depth, "Triangle depth");
  add_common(validate, va_opts);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Seeded Monte Carlo");
  std::string si_lambda, si_mu;
  std::optional<double> si_t;
  std::optional<int> si_steps;
  long si_paths = 100000;
  std::uint64_t si_seed = 12345;
  CommonOpts si_opts;
  simulate->add_option("--lambda", si_lambda, "Arrival rate (rational)")->required();
  simulate->add_option("--mu", si_mu, "Service rate (rational)")->required();
  auto* si_ot = simulate->add_option("--t", si_t, "End time (continuous mode)");
  auto* si_os = simulate->add_option("--steps", si_steps, "Step count (embedded mode)");
  si_ot->excludes(si_os);
  simulate->add_option("--paths", si_paths, "Number of paths");
  simulate->add_option("--seed", si_seed, "Master seed");
  add_common(simulate, si_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*transient) {
      if (!tr_t && !tr_tau) throw std::invalid_argument("one of --t/--tau is required");
      return cmd_transient(tr_lambda, tr_mu, tr_t, tr_tau, tr_kmax, tr_eps, tr_bits, tr_depth,
                           tr_opts);
    }
    if (*embedded) {
      if (em_rates.empty() && (em_lambda.empty() || em_mu.empty()))
        throw std::invalid_argument("either --rates or --lambda/--mu is required");
      return cmd_embedded(em_lambda, em_mu, em_rates, em_n, em_method, em_opts);
    }
    if (*bessel) return cmd_bessel(be_depth, be_triangle, be_opts);
    if (*validate)
      return cmd_validate(va_lambda, va_mu, va_tau, va_kmax, va_tol, va_eps, va_bits, va_depth,
                          va_opts);
    if (*simulate) {
      if (!si_t && !si_steps) throw std::invalid_argument("one of --t/--steps is required");
      return cmd_simulate(si_lambda, si_mu, si_t, si_steps, si_paths, si_seed, si_opts);
    }
  } catch (const disq::InsufficientDepth& e) {
    std::cerr << "error: " << e.what() << "\n"
              << "recommended depth: " << e.recommended_depth << "\n";
    if (e.recommended_bits > 0)
      std::cerr << "recommended precision bits: " << e.recommended_bits << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
