#pragma once

/// Command front end shared by the `rlq` binary and the CLI tests: a parsed
/// RunConfig goes in, formatted output (CSV or JSON) comes out, and every
/// failure is mapped to a stable exit code (2 invalid input, 3 numerical).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rlq/oracles.hpp"
#include "rlq/parse.hpp"
#include "rlq/portfolio.hpp"
#include "rlq/reproduce.hpp"
#include "rlq/robust.hpp"

namespace rlq {

struct RunConfig {
  std::string command;
  std::string dist;    ///< baseline spec for `quantile`
  std::string set;     ///< uncertainty-set spec
  std::string lambda;  ///< level-function spec
  std::string kind;    ///< one of the four kinds, or "all"; empty picks the
                       ///< command default (qminus, qtildeminus for portfolio)
  std::string dir = "sup";
  std::string grid;    ///< lo:hi:step window for `envelope`
  std::string out;     ///< output path; empty means stdout
  std::string format;  ///< csv | json; empty picks the command default
  std::string mu;      ///< portfolio mean vector, comma-separated
  std::string sigma;   ///< portfolio covariance, rows separated by ';'
  int assets = 2;      ///< aggregation portfolio size
  int points = 201;    ///< portfolio profile resolution
  int table = 0;
  int figure = 0;
  int samples = 200;   ///< verify sample budget
  std::uint64_t seed = 20250825;
  double tol = 1e-9;
};

/// Seed precedence: --seed flag > RLQ_SEED env var > fixed default.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("RLQ_SEED")) {
    try {
      return static_cast<std::uint64_t>(std::stoull(env));
    } catch (const std::exception&) {
      throw invalid_input("RLQ_SEED: not an unsigned integer");
    }
  }
  return 20250825ULL;
}

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline ordered_json json_value(double v) {
  if (is_pos_inf(v)) return "inf";
  if (is_neg_inf(v)) return "-inf";
  return v;
}

inline ordered_json result_json(const RobustResult& r) {
  ordered_json j;
  j["value"] = json_value(r.value);
  j["exactness"] = to_string(r.exactness);
  j["kind"] = to_string(r.kind);
  j["direction"] = to_string(r.direction);
  j["envelope"] = to_string(r.envelope_used);
  if (r.clip_level) j["clip_level"] = *r.clip_level;
  return j;
}

inline void emit(const RunConfig& cfg, std::ostream& fallback,
                 const std::string& text) {
  if (cfg.out.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  require(static_cast<bool>(f), "cannot open output path " + cfg.out);
  f << text;
}

inline std::vector<QuantileKind> expand_kinds(const std::string& spec) {
  if (spec.empty()) return {QuantileKind::QMinus};
  if (spec == "all")
    return {QuantileKind::QMinus, QuantileKind::QPlus, QuantileKind::QTildeMinus,
            QuantileKind::QTildePlus};
  return {parse_kind(spec)};
}

inline int cmd_quantile(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.dist.empty(), "quantile: --dist is required");
  require(!cfg.lambda.empty(), "quantile: --lambda is required");
  MonotoneCurve f = MonotoneCurve::from_distribution(parse_distribution(cfg.dist));
  StepLambda lam = parse_lambda(cfg.lambda);
  auto kinds = expand_kinds(cfg.kind);
  if (cfg.format == "json") {
    ordered_json j;
    for (QuantileKind k : kinds) j[to_string(k)] = json_value(lambda_quantile(f, lam, k));
    emit(cfg, out, j.dump() + "\n");
  } else if (cfg.format == "csv" || kinds.size() > 1) {
    std::string text = "kind,value\n";
    for (QuantileKind k : kinds) {
      text += to_string(k);
      text += ',';
      text += fmt_num(lambda_quantile(f, lam, k));
      text += '\n';
    }
    emit(cfg, out, text);
  } else {
    emit(cfg, out, fmt_num(lambda_quantile(f, lam, kinds[0])) + "\n");
  }
  return 0;
}

inline int cmd_envelope(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.set.empty(), "envelope: --set is required");
  require(!cfg.grid.empty(), "envelope: --grid lo:hi:step is required");
  UncertaintySet set = parse_set(cfg.set);
  GridWindow g = parse_grid(cfg.grid);
  MonotoneCurve lower = extremal_curve(set, EnvelopeSide::Lower);
  MonotoneCurve upper = extremal_curve(set, EnvelopeSide::Upper);
  std::vector<double> xs;
  for (double x = g.lo; x <= g.hi + 1e-12 * std::max(1.0, std::fabs(g.hi));
       x += g.step)
    xs.push_back(x);
  if (cfg.format == "json") {
    ordered_json j;
    j["x"] = ordered_json::array();
    j["lower"] = ordered_json::array();
    j["upper"] = ordered_json::array();
    for (double x : xs) {
      j["x"].push_back(x);
      j["lower"].push_back(lower.eval(x));
      j["upper"].push_back(upper.eval(x));
    }
    emit(cfg, out, j.dump() + "\n");
  } else {
    std::string text = "x,lower,upper\n";
    for (double x : xs) {
      text += fmt_num(x);
      text += ',';
      text += fmt_num(lower.eval(x));
      text += ',';
      text += fmt_num(upper.eval(x));
      text += '\n';
    }
    emit(cfg, out, text);
  }
  return 0;
}

inline int cmd_robust(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.set.empty(), "robust: --set is required");
  require(!cfg.lambda.empty(), "robust: --lambda is required");
  UncertaintySet set = parse_set(cfg.set);
  StepLambda lam = parse_lambda(cfg.lambda);
  OptDirection dir = parse_direction(cfg.dir);
  auto kinds = expand_kinds(cfg.kind);
  if (cfg.format == "csv") {
    std::string text = "kind,value,exactness,direction,envelope\n";
    for (QuantileKind k : kinds) {
      RobustResult r = robust_lambda_quantile(set, lam, k, dir);
      text += std::string(to_string(k)) + ',' + fmt_num(r.value) + ',' +
              to_string(r.exactness) + ',' + to_string(r.direction) + ',' +
              to_string(r.envelope_used) + '\n';
    }
    emit(cfg, out, text);
    return 0;
  }
  if (kinds.size() == 1) {
    emit(cfg, out, result_json(robust_lambda_quantile(set, lam, kinds[0], dir)).dump() + "\n");
    return 0;
  }
  ordered_json arr = ordered_json::array();
  for (QuantileKind k : kinds)
    arr.push_back(result_json(robust_lambda_quantile(set, lam, k, dir)));
  emit(cfg, out, arr.dump() + "\n");
  return 0;
}

inline std::vector<double> parse_vector(const std::string& spec,
                                        const std::string& what) {
  std::vector<double> v;
  for (const auto& tok : split(spec, ','))
    v.push_back(parse_number(tok, what));
  require(!v.empty(), what + ": empty vector");
  return v;
}

inline Matrix parse_matrix(const std::string& spec, const std::string& what) {
  Matrix m;
  for (const auto& row : split(spec, ';'))
    m.push_back(parse_vector(row, what));
  return m;
}

/// Portfolio baselines are location-scale families: norm ↦ N(loc, scale²),
/// t:ν ↦ scaled Student-t, unif ↦ uniform with matching mean and variance.
inline std::function<Distribution(double, double)> parse_base_family(
    const std::string& spec) {
  if (spec == "norm")
    return [](double loc, double sc) { return Distribution::normal(loc, sc); };
  if (spec == "unif")
    return [](double loc, double sc) {
      double h = sc * std::sqrt(3.0);
      return Distribution::uniform(loc - h, loc + h);
    };
  if (spec.rfind("t:", 0) == 0) {
    double tau = parse_number(spec.substr(2), "baseline dof");
    return [tau](double loc, double sc) {
      return Distribution::student_t(tau, loc, sc);
    };
  }
  throw invalid_input("portfolio baseline must be norm, unif, or t:<dof>");
}

inline PortfolioProblem parse_portfolio(const RunConfig& cfg) {
  require(!cfg.set.empty(), "portfolio: --set is required");
  require(!cfg.lambda.empty(), "portfolio: --lambda is required");
  PortfolioObjective obj{parse_lambda(cfg.lambda), QuantileKind::QTildeMinus};
  if (!cfg.kind.empty()) obj.kind = parse_kind(cfg.kind);
  require(parse_direction(cfg.dir) == OptDirection::Sup,
          "portfolio: only the worst case (--dir sup) is optimized");

  auto colon = cfg.set.find(':');
  std::string family = cfg.set.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : cfg.set.substr(colon + 1);
  if (family == "moment") {
    for (const auto& tok : split(rest, ',')) {
      if (tok.empty()) continue;
      require(tok == "p=2", "portfolio moment market: only p=2 is supported");
    }
    return PortfolioProblem::moment(parse_vector(cfg.mu, "portfolio mean"),
                                    parse_matrix(cfg.sigma, "portfolio covariance"),
                                    std::move(obj));
  }
  if (family == "wass") {
    double p = 1.0, a = 2.0, eps = 0.1;
    std::function<Distribution(double, double)> base;
    auto bpos = rest.find("base=");
    if (bpos != std::string::npos) {
      base = parse_base_family(rest.substr(bpos + 5));
      rest = rest.substr(0, bpos);
      if (!rest.empty() && rest.back() == ',') rest.pop_back();
    }
    require(static_cast<bool>(base), "portfolio transport market: base= is required");
    for (const auto& tok : split(rest, ',')) {
      if (tok.empty()) continue;
      auto eq = tok.find('=');
      require(eq != std::string::npos, "portfolio transport market: expected key=value");
      std::string key = tok.substr(0, eq);
      double val = parse_number(tok.substr(eq + 1), "portfolio transport market");
      if (key == "p")
        p = val;
      else if (key == "a")
        a = val;
      else if (key == "eps")
        eps = val;
      else
        throw invalid_input("portfolio transport market: unknown key " + key);
    }
    return PortfolioProblem::wasserstein(parse_vector(cfg.mu, "portfolio mean"),
                                         parse_matrix(cfg.sigma, "portfolio covariance"),
                                         std::move(base), a, p, eps, std::move(obj));
  }
  if (family == "agg") {
    std::optional<double> clip;
    auto tpos = rest.rfind(",t=");
    if (tpos != std::string::npos) {
      clip = parse_number(rest.substr(tpos + 3), "aggregation clip level");
      rest = rest.substr(0, tpos);
    }
    return PortfolioProblem::aggregation(parse_distribution(rest),
                                         static_cast<std::size_t>(cfg.assets),
                                         std::move(obj), clip);
  }
  throw invalid_input("portfolio market must be moment:, wass:, or agg:");
}

inline int cmd_portfolio(const RunConfig& cfg, std::ostream& out,
                         std::ostream& err) {
  PortfolioProblem prob = parse_portfolio(cfg);
  OptimizeResult res = optimize(prob, cfg.points);

  ordered_json j;
  j["weights"] = res.weights.get();
  j["value"] = json_value(res.result.value);
  j["exactness"] = to_string(res.result.exactness);

  if (cfg.format == "json") {
    ordered_json prof = ordered_json::array();
    for (const auto& pt : res.profile) {
      ordered_json row;
      row["w"] = pt.w;
      row["value"] = json_value(pt.value);
      row["exactness"] = to_string(pt.exactness);
      prof.push_back(std::move(row));
    }
    j["profile"] = std::move(prof);
    emit(cfg, out, j.dump() + "\n");
    return 0;
  }

  std::string text;
  for (std::size_t i = 0; i < prob.assets(); ++i)
    text += "w" + std::to_string(i + 1) + ",";
  text += "value,exactness\n";
  for (const auto& pt : res.profile) {
    for (double wi : pt.w) {
      text += fmt_num(wi);
      text += ',';
    }
    text += fmt_num(pt.value);
    text += ',';
    text += to_string(pt.exactness);
    text += '\n';
  }
  emit(cfg, out, text);
  // keep stdout parseable when the profile goes there: the optimizer summary
  // moves to stderr unless --out redirects the CSV to a file
  (cfg.out.empty() ? err : out) << j.dump() << "\n";
  return 0;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.set.empty(), "verify: --set is required");
  require(!cfg.lambda.empty(), "verify: --lambda is required");
  VerifyReport rep = verify_set(parse_set(cfg.set), parse_lambda(cfg.lambda),
                                cfg.samples, cfg.seed);
  ordered_json j;
  j["samples"] = rep.samples;
  j["violations"] = rep.violations;
  j["max_gap"] = rep.max_gap;
  emit(cfg, out, j.dump() + "\n");
  return 0;
}

inline int cmd_reproduce(const RunConfig& cfg, std::ostream& out,
                         std::ostream& err) {
  require((cfg.table != 0) != (cfg.figure != 0),
          "reproduce: pass exactly one of --table {1..4} or --figure {1..4}");
  if (cfg.figure != 0) {
    emit(cfg, out, figure_csv(reproduce_figure(cfg.figure, cfg.points)));
    return 0;
  }
  TableReport rep = reproduce_table(cfg.table);
  emit(cfg, out, table_csv(rep));
  std::ostream& log = cfg.out.empty() ? err : out;
  log << "table " << rep.id << ": " << rep.cells.size() << " cells, "
      << rep.flagged() << " flagged non-normative\n";
  for (const auto& c : rep.cells) {
    if (c.normative) continue;
    log << "  " << c.row << " " << to_string(c.kind) << ": printed "
        << fmt_num(c.reference) << " diverges; computed " << fmt_num(c.computed)
        << ", derived target " << fmt_num(c.derived) << "\n";
  }
  return 0;
}

}  // namespace detail

/// Dispatch a parsed configuration. Returns the process exit code and never
/// throws: invalid input maps to 2, numerical failures to 3.
inline int run_cli(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "quantile") return detail::cmd_quantile(cfg, out);
    if (cfg.command == "envelope") return detail::cmd_envelope(cfg, out);
    if (cfg.command == "robust") return detail::cmd_robust(cfg, out);
    if (cfg.command == "portfolio") return detail::cmd_portfolio(cfg, out, err);
    if (cfg.command == "verify") return detail::cmd_verify(cfg, out);
    if (cfg.command == "reproduce") return detail::cmd_reproduce(cfg, out, err);
    throw invalid_input("unknown command: " + cfg.command);
  } catch (const numerical_error& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const invalid_input& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace rlq
