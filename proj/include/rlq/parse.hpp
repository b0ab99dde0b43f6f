#pragma once

/// String parsers shared by the command-line front end: distribution and
/// uncertainty-set descriptors, quantile kinds, directions, grid windows.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rlq/aggregation_set.hpp"
#include "rlq/distribution.hpp"
#include "rlq/lambda.hpp"
#include "rlq/moment_set.hpp"
#include "rlq/numeric.hpp"
#include "rlq/robust.hpp"
#include "rlq/wasserstein_ball.hpp"

namespace rlq {
namespace detail {

inline double parse_number(const std::string& tok, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    require(used == tok.size(), what + ": bad number '" + tok + "'");
    return v;
  } catch (const std::invalid_argument&) {
    throw invalid_input(what + ": bad number '" + tok + "'");
  } catch (const std::out_of_range&) {
    throw invalid_input(what + ": number out of range '" + tok + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace detail

/// `norm:mu,sigma` | `exp:rate` | `unif:a,b` | `t:tau[,loc[,scale]]` |
/// `pareto:shape,scale` | `point:c` | `emp:FILE`.
inline Distribution parse_distribution(const std::string& spec) {
  auto colon = spec.find(':');
  require(colon != std::string::npos,
          "distribution spec '" + spec + "': expected family:params");
  const std::string family = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (family == "emp") return Distribution::empirical_from_file(rest);
  std::vector<double> ps;
  for (const auto& tok : detail::split(rest, ','))
    ps.push_back(detail::parse_number(tok, "distribution spec"));
  auto arity = [&](std::size_t lo, std::size_t hi) {
    require(ps.size() >= lo && ps.size() <= hi,
            "distribution spec '" + spec + "': wrong parameter count");
  };
  if (family == "norm") {
    arity(2, 2);
    return Distribution::normal(ps[0], ps[1]);
  }
  if (family == "exp") {
    arity(1, 1);
    return Distribution::exponential(ps[0]);
  }
  if (family == "unif") {
    arity(2, 2);
    return Distribution::uniform(ps[0], ps[1]);
  }
  if (family == "t") {
    arity(1, 3);
    return Distribution::student_t(ps[0], ps.size() > 1 ? ps[1] : 0.0,
                                   ps.size() > 2 ? ps[2] : 1.0);
  }
  if (family == "pareto") {
    arity(2, 2);
    return Distribution::pareto(ps[0], ps[1]);
  }
  if (family == "point") {
    arity(1, 1);
    return Distribution::point_mass(ps[0]);
  }
  throw invalid_input("distribution spec '" + spec + "': unknown family '" +
                      family + "'");
}

/// `moment:p=2,m=1,v=1` | `wass:p=1,eps=0.1,base=DIST` (base last — it
/// consumes the remainder, since distribution specs contain commas) |
/// `agg:DIST+DIST[+…][,t=LEVEL]`.
inline UncertaintySet parse_set(const std::string& spec) {
  auto colon = spec.find(':');
  require(colon != std::string::npos,
          "set spec '" + spec + "': expected type:params");
  const std::string head = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);

  if (head == "moment") {
    double p = kNaN, m = kNaN, v = kNaN;
    for (const auto& tok : detail::split(body, ',')) {
      auto eq = tok.find('=');
      require(eq != std::string::npos, "moment spec: expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      double val = detail::parse_number(tok.substr(eq + 1), "moment spec");
      if (key == "p")
        p = val;
      else if (key == "m")
        m = val;
      else if (key == "v")
        v = val;
      else
        throw invalid_input("moment spec: unknown key '" + key + "'");
    }
    require(!std::isnan(p) && !std::isnan(m) && !std::isnan(v),
            "moment spec: needs p=, m= and v=");
    return UncertaintySet::moment(MomentSet(p, m, v));
  }

  if (head == "wass") {
    auto bpos = body.find("base=");
    require(bpos != std::string::npos, "wass spec: missing base=DIST (must come last)");
    const std::string base_spec = body.substr(bpos + 5);
    std::string prefix = body.substr(0, bpos);
    if (!prefix.empty() && prefix.back() == ',') prefix.pop_back();
    double p = kNaN, eps = kNaN;
    for (const auto& tok : detail::split(prefix, ',')) {
      if (tok.empty()) continue;
      auto eq = tok.find('=');
      require(eq != std::string::npos, "wass spec: expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      double val = detail::parse_number(tok.substr(eq + 1), "wass spec");
      if (key == "p")
        p = val;
      else if (key == "eps")
        eps = val;
      else
        throw invalid_input("wass spec: unknown key '" + key + "'");
    }
    require(!std::isnan(p) && !std::isnan(eps), "wass spec: needs p= and eps=");
    return UncertaintySet::wasserstein(WassersteinBall(p, parse_distribution(base_spec), eps));
  }

  if (head == "agg") {
    std::optional<double> clip;
    std::string list = body;
    auto tpos = body.rfind(",t=");
    if (tpos != std::string::npos) {
      clip = detail::parse_number(body.substr(tpos + 3), "agg spec");
      list = body.substr(0, tpos);
    }
    // split marginals at '+' only when it starts a new family name, so
    // exponent signs inside numbers survive
    std::vector<std::string> specs;
    std::size_t start = 0;
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] == '+' && i + 1 < list.size() &&
          std::isalpha(static_cast<unsigned char>(list[i + 1]))) {
        specs.push_back(list.substr(start, i - start));
        start = i + 1;
      }
    }
    specs.push_back(list.substr(start));
    std::vector<Distribution> marginals;
    for (const auto& s : specs) marginals.push_back(parse_distribution(s));
    return UncertaintySet::aggregation(AggregationSet(std::move(marginals), clip));
  }

  throw invalid_input("set spec '" + spec + "': unknown set type '" + head + "'");
}

inline QuantileKind parse_kind(const std::string& s) {
  if (s == "qminus") return QuantileKind::QMinus;
  if (s == "qplus") return QuantileKind::QPlus;
  if (s == "qtildeminus") return QuantileKind::QTildeMinus;
  if (s == "qtildeplus") return QuantileKind::QTildePlus;
  throw invalid_input("kind: expected qminus, qplus, qtildeminus or qtildeplus, got '" + s + "'");
}

inline OptDirection parse_direction(const std::string& s) {
  if (s == "sup") return OptDirection::Sup;
  if (s == "inf") return OptDirection::Inf;
  throw invalid_input("dir: expected sup or inf, got '" + s + "'");
}

struct GridWindow {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.01;
};

/// `lo:hi:step`, e.g. `-5:5:0.01`.
inline GridWindow parse_grid(const std::string& spec) {
  auto parts = detail::split(spec, ':');
  require(parts.size() == 3, "grid spec '" + spec + "': expected lo:hi:step");
  GridWindow g{detail::parse_number(parts[0], "grid spec"),
               detail::parse_number(parts[1], "grid spec"),
               detail::parse_number(parts[2], "grid spec")};
  require(g.step > 0.0 && g.hi > g.lo, "grid spec: needs hi > lo and step > 0");
  return g;
}

}  // namespace rlq
