#pragma once
// File formats: CSV and JSON emitters with floating-point output fixed to 17
// significant digits (re-running a command with the same config and seed must
// reproduce files byte for byte), parsers for the CLI round trip, and the
// INI run configuration.
//
// JSON reports are emitted by hand in a fixed key order so the byte layout is
// fully pinned; parsing uses the vendored nlohmann reader.

#include <fmt/format.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mg1bayes/arrival_inference.hpp"
#include "mg1bayes/asymptotics.hpp"
#include "mg1bayes/errors.hpp"
#include "mg1bayes/grid_cdf.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/service_inference.hpp"
#include "mg1bayes/transforms.hpp"

namespace mg1bayes::io {

inline std::string format_double(double x) { return fmt::format("{:.17g}", x); }

inline std::string json_num(double x) {
  return std::isfinite(x) ? format_double(x) : std::string("null");
}

inline std::string json_array(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += json_num(v[i]);
  }
  s += ']';
  return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << content;
  if (!out.good()) throw Error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline double parse_number(std::string_view field, const std::string& where) {
  double x = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc{} || ptr != last) {
    throw DataError(fmt::format("{}: invalid number '{}'", where, std::string(field)));
  }
  return x;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SampleData CSV: header `a,s,censored`, one row per customer. Datasets with
// more service than arrival observations pad `a` with empty fields and vice
// versa, so censored-only service studies still fit the format.

inline std::string sample_to_csv(const SampleData& data) {
  data.validate();
  std::string out = "a,s,censored\n";
  std::size_t rows = std::max(data.inter_arrivals.size(), data.services.size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i < data.inter_arrivals.size()) out += format_double(data.inter_arrivals[i]);
    out += ',';
    if (i < data.services.size()) {
      out += format_double(data.services[i]);
      out += ',';
      out += data.censored[i] ? '1' : '0';
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

inline SampleData parse_sample_csv(const std::string& text, const std::string& name) {
  SampleData data;
  std::size_t lineno = 0;
  std::size_t start = 0;
  bool saw_header = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    start = end + 1;
    ++lineno;
    line = detail::trim(line);
    if (line.empty()) continue;
    if (!saw_header) {
      if (line != "a,s,censored") {
        throw DataError(fmt::format("{}:{}: expected header 'a,s,censored'", name, lineno));
      }
      saw_header = true;
      continue;
    }
    auto fields = detail::split(line, ',');
    if (fields.size() != 3) {
      throw DataError(fmt::format("{}:{}: expected 3 fields, got {}", name, lineno,
                                  fields.size()));
    }
    std::string_view a = detail::trim(fields[0]);
    std::string_view s = detail::trim(fields[1]);
    std::string_view c = detail::trim(fields[2]);
    if (!a.empty()) {
      data.inter_arrivals.push_back(
          detail::parse_number(a, fmt::format("{}:{}", name, lineno)));
    }
    if (!s.empty()) {
      data.services.push_back(detail::parse_number(s, fmt::format("{}:{}", name, lineno)));
      if (c == "0") {
        data.censored.push_back(false);
      } else if (c == "1") {
        data.censored.push_back(true);
      } else {
        throw DataError(fmt::format("{}:{}: censored flag must be 0 or 1", name, lineno));
      }
    } else if (!c.empty()) {
      throw DataError(fmt::format("{}:{}: censored flag without a service time", name, lineno));
    }
  }
  if (!saw_header) throw DataError(name + ": empty file, expected header 'a,s,censored'");
  data.validate();
  return data;
}

inline void write_sample_csv(const std::string& path, const SampleData& data) {
  write_text_file(path, sample_to_csv(data));
}

inline SampleData read_sample_csv(const std::string& path) {
  return parse_sample_csv(read_text_file(path), path);
}

// ---------------------------------------------------------------------------
// GridCdf CSV `t,F`: the cdf value at each grid point (atoms included).

inline std::string grid_cdf_to_csv(const GridCdf& cdf) {
  std::string out = "t,F\n";
  for (std::size_t k = 0; k < cdf.size(); ++k) {
    out += format_double(cdf.t[k]);
    out += ',';
    out += format_double(cdf.full[k]);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Transform table CSV `z,g,w,q,n` over the union of the waiting-LST and pgf
// grids. Cells outside an evaluator's domain (q and n above z = 1, w draws
// with nonpositive denominator, any evaluator under an unstable estimate)
// stay empty.

inline std::string transforms_to_csv(const TransformSet& set,
                                     const std::vector<double>& waiting_grid,
                                     const std::vector<double>& pgf_grid) {
  std::vector<double> zs;
  zs.reserve(waiting_grid.size() + pgf_grid.size());
  zs.insert(zs.end(), waiting_grid.begin(), waiting_grid.end());
  zs.insert(zs.end(), pgf_grid.begin(), pgf_grid.end());
  std::sort(zs.begin(), zs.end());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());

  std::string out = "z,g,w,q,n\n";
  for (double z : zs) {
    out += format_double(z);
    out += ',';
    out += format_double(set.g(z));
    out += ',';
    try {
      auto w = set.w(z);
      if (w) out += format_double(*w);
    } catch (const InstabilityError&) {
    }
    out += ',';
    if (z <= 1.0) {
      try {
        out += format_double(set.q(z));
        out += ',';
        out += format_double(set.n(z));
      } catch (const InstabilityError&) {
        out += ',';
      }
    } else {
      out += ',';
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Consistency table CSV.

inline std::string consistency_to_csv(const std::vector<ConsistencyRow>& rows) {
  std::string out = "n,seed,err_G,err_g,err_w,err_q,err_n,err_mu,err_lambda,err_rho\n";
  for (const ConsistencyRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.n, r.seed, format_double(r.err_G),
                       format_double(r.err_g), format_double(r.err_w), format_double(r.err_q),
                       format_double(r.err_n), format_double(r.err_mu),
                       format_double(r.err_lambda), format_double(r.err_rho));
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON reports, fixed key order.

inline std::string stability_to_json(const StabilityReport& rep) {
  return fmt::format("{{\"p_stable\":{},\"se\":{},\"k\":{}}}\n", json_num(rep.p_stable),
                     json_num(rep.se), rep.k);
}

inline std::string bvm_lambda_to_json(const BvmLambdaReport& rep) {
  return fmt::format("{{\"n\":{},\"k\":{},\"ks\":{},\"target_sd\":{}}}\n", rep.n, rep.k,
                     json_num(rep.ks), json_num(rep.target_sd));
}

inline std::string bvm_report_to_json(const BvmReport& rep) {
  return fmt::format(
      "{{\"kind\":\"{}\",\"n\":{},\"draws\":{},\"grid\":{},\"emp\":{},\"theory\":{},"
      "\"emp_mean\":{},\"max_abs_dev\":{},\"max_rel_dev\":{}}}\n",
      rep.kind, rep.n, rep.draws, json_array(rep.grid), json_array(rep.emp),
      json_array(rep.theory), json_array(rep.emp_mean), json_num(rep.max_abs_dev),
      json_num(rep.max_rel_dev));
}

struct InferSummary {
  double lambda_hat = 0.0;
  double mu_hat = 0.0;
  bool mu_tail_warning = false;
  std::size_t n_arrivals = 0;
  std::size_t n_services = 0;
  double rho_hat = 0.0;
  StabilityReport stability;
};

inline std::string infer_summary_to_json(const InferSummary& s) {
  return fmt::format(
      "{{\"lambda_hat\":{},\"mu_hat\":{},\"mu_tail_warning\":{},\"n_arrivals\":{},"
      "\"n_services\":{},\"p_stable\":{},\"rho_hat\":{},\"se\":{},\"stability_draws\":{}}}\n",
      json_num(s.lambda_hat), json_num(s.mu_hat), s.mu_tail_warning ? "true" : "false",
      s.n_arrivals, s.n_services, json_num(s.stability.p_stable), json_num(s.rho_hat),
      json_num(s.stability.se), s.stability.k);
}

// ---------------------------------------------------------------------------
// Service distributions in configs and posterior files. Families are
// identified by name; p1/p2 follow the ServiceDist parameter layout.

inline std::string family_name(ServiceFamily f) {
  switch (f) {
    case ServiceFamily::exponential: return "exponential";
    case ServiceFamily::weibull: return "weibull";
    case ServiceFamily::gamma: return "gamma";
    case ServiceFamily::lognormal: return "lognormal";
    case ServiceFamily::uniform: return "uniform";
    case ServiceFamily::grid: return "grid";
  }
  throw ConfigError("unknown service family");
}

inline ServiceDist service_from_params(const std::string& family, double p1, double p2,
                                       std::optional<double> trunc) {
  ServiceDist d;
  if (family == "exponential") {
    d = ServiceDist::exponential(p1);
  } else if (family == "weibull") {
    d = ServiceDist::weibull(p1, p2);
  } else if (family == "gamma") {
    d = ServiceDist::gamma_family(p1, p2);
  } else if (family == "lognormal") {
    d = ServiceDist::lognormal(p1, p2);
  } else if (family == "uniform") {
    d = ServiceDist::uniform(p1, p2);
  } else {
    throw ConfigError("unknown service family '" + family + "'");
  }
  if (trunc) d = d.truncated(*trunc);
  return d;
}

// Parametric prior specification behind a beta-Stacy state built by the CLI:
// a Dirichlet process with total mass c_total and guess `guess`.
struct ServicePriorSpec {
  double c_total = 1.0;
  ServiceDist guess = ServiceDist::exponential(1.0);
  int cells = kDefaultGridCells;
  std::optional<double> trunc_M;
};

inline BetaStacyState make_service_prior(const ServicePriorSpec& spec) {
  return dirichlet_as_beta_stacy(spec.c_total, spec.guess, spec.cells, spec.trunc_M);
}

// ---------------------------------------------------------------------------
// Posterior file: everything needed to reconstruct both posteriors exactly
// (parametric prior spec + raw data), plus the grid/c/H/atoms arrays of the
// fitted state for external consumers.

inline std::string posterior_to_json(const GammaPosterior& lam_post,
                                     const BetaStacyState& bs_post,
                                     const ServicePriorSpec& spec) {
  if (spec.guess.family == ServiceFamily::grid) {
    throw ConfigError("posterior files require a parametric prior guess");
  }
  std::string trunc = spec.trunc_M ? json_num(*spec.trunc_M) : std::string("null");
  GridCdf ghat = bayes_cdf(bs_post);
  std::string out = "{\"lambda_posterior\":{\"a\":" + json_num(lam_post.a) +
                    ",\"b\":" + json_num(lam_post.b) + "},";
  out += fmt::format("\"service_prior\":{{\"c\":{},\"family\":\"{}\",\"p1\":{},\"p2\":{},"
                     "\"trunc_M\":{},\"cells\":{}}},",
                     json_num(spec.c_total), family_name(spec.guess.family),
                     json_num(spec.guess.p1), json_num(spec.guess.p2), trunc, spec.cells);
  out += "\"data\":{\"obs\":" + json_array(bs_post.obs) + ",\"cens\":" +
         json_array(bs_post.cens) + "},";
  out += "\"beta_stacy\":{\"grid\":" + json_array(bs_post.grid) + ",\"c\":" +
         json_array(bs_post.cgrid) + ",\"H\":" + json_array(bs_post.H.cont) +
         ",\"atoms\":{\"t\":" + json_array(ghat.atom_t) + ",\"m\":" + json_array(ghat.atom_m) +
         "}}}\n";
  return out;
}

inline std::pair<GammaPosterior, BetaStacyState> parse_posterior_json(const std::string& text,
                                                                      const std::string& name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(name + ": " + e.what());
  }
  try {
    GammaPosterior lam{j.at("lambda_posterior").at("a").get<double>(),
                       j.at("lambda_posterior").at("b").get<double>()};
    lam.validate();
    const auto& sp = j.at("service_prior");
    ServicePriorSpec spec;
    spec.c_total = sp.at("c").get<double>();
    spec.cells = sp.at("cells").get<int>();
    if (!sp.at("trunc_M").is_null()) spec.trunc_M = sp.at("trunc_M").get<double>();
    spec.guess = service_from_params(sp.at("family").get<std::string>(),
                                     sp.at("p1").get<double>(), sp.at("p2").get<double>(),
                                     spec.trunc_M);
    BetaStacyState st = make_service_prior(spec);
    SampleData data;
    for (const auto& v : j.at("data").at("obs")) {
      data.services.push_back(v.get<double>());
      data.censored.push_back(false);
    }
    for (const auto& v : j.at("data").at("cens")) {
      data.services.push_back(v.get<double>());
      data.censored.push_back(true);
    }
    if (!data.services.empty()) st = posterior_update(st, data);
    return {lam, st};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(name + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Run configuration: INI sections [truth], [lambda_prior], [service_prior],
// [experiment]; every key optional with the defaults below.

struct RunConfig {
  MG1Truth truth{0.5, ServiceDist::exponential(1.0)};
  GammaPosterior lambda_prior{1.0, 1.0};
  ServicePriorSpec service_prior;
  std::size_t n = 200;
  std::size_t draws = 1000;
  std::vector<std::size_t> n_list{50, 500, 5000};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> bvm_grid{0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> w_grid{0.5, 1.0, 2.0};
};

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& where) {
  std::vector<T> out;
  for (std::string_view field : split(text, ',')) {
    field = trim(field);
    if (field.empty()) continue;
    if constexpr (std::is_same_v<T, double>) {
      out.push_back(parse_number(field, where));
    } else {
      T value{};
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ConfigError(fmt::format("{}: invalid integer '{}'", where, std::string(field)));
      }
      out.push_back(value);
    }
  }
  if (out.empty()) throw ConfigError(where + ": empty list");
  return out;
}

inline ServiceDist service_from_section(const boost::property_tree::ptree& pt,
                                        const std::string& section) {
  auto get = [&pt, &section](const std::string& key) {
    auto v = pt.get_optional<double>(key);
    if (!v) throw ConfigError("config: missing key " + key + " for " + section);
    return *v;
  };
  std::string family = pt.get<std::string>(section + ".family", "exponential");
  ServiceDist d;
  if (family == "exponential") {
    d = ServiceDist::exponential(pt.get<double>(section + ".rate", 1.0));
  } else if (family == "weibull") {
    d = ServiceDist::weibull(get(section + ".shape"), get(section + ".scale"));
  } else if (family == "gamma") {
    d = ServiceDist::gamma_family(get(section + ".shape"), get(section + ".rate"));
  } else if (family == "lognormal") {
    d = ServiceDist::lognormal(get(section + ".log_location"), get(section + ".log_scale"));
  } else if (family == "uniform") {
    d = ServiceDist::uniform(get(section + ".lo"), get(section + ".hi"));
  } else {
    throw ConfigError("config: unknown family '" + family + "' in [" + section + "]");
  }
  auto trunc = pt.get_optional<double>(section + ".trunc_M");
  if (trunc) d = d.truncated(*trunc);
  return d;
}

}  // namespace detail

inline RunConfig parse_config(const boost::property_tree::ptree& pt) {
  RunConfig cfg;
  cfg.truth.lambda0 = pt.get<double>("truth.lambda0", cfg.truth.lambda0);
  if (pt.get_child_optional("truth")) {
    cfg.truth.service = detail::service_from_section(pt, "truth");
  }
  cfg.lambda_prior.a = pt.get<double>("lambda_prior.a", cfg.lambda_prior.a);
  cfg.lambda_prior.b = pt.get<double>("lambda_prior.b", cfg.lambda_prior.b);
  cfg.lambda_prior.validate();
  cfg.service_prior.c_total = pt.get<double>("service_prior.c", cfg.service_prior.c_total);
  cfg.service_prior.cells = pt.get<int>("service_prior.cells", cfg.service_prior.cells);
  if (pt.get_child_optional("service_prior")) {
    cfg.service_prior.guess = detail::service_from_section(pt, "service_prior");
    cfg.service_prior.trunc_M = cfg.service_prior.guess.trunc;
  }
  cfg.n = pt.get<std::size_t>("experiment.n", cfg.n);
  cfg.draws = pt.get<std::size_t>("experiment.draws", cfg.draws);
  if (auto v = pt.get_optional<std::string>("experiment.n_list")) {
    cfg.n_list = detail::parse_list<std::size_t>(*v, "experiment.n_list");
  }
  if (auto v = pt.get_optional<std::string>("experiment.seeds")) {
    cfg.seeds = detail::parse_list<std::uint64_t>(*v, "experiment.seeds");
  }
  if (auto v = pt.get_optional<std::string>("experiment.bvm_grid")) {
    cfg.bvm_grid = detail::parse_list<double>(*v, "experiment.bvm_grid");
  }
  if (auto v = pt.get_optional<std::string>("experiment.w_grid")) {
    cfg.w_grid = detail::parse_list<double>(*v, "experiment.w_grid");
  }
  cfg.truth.validate();
  return cfg;
}

inline RunConfig load_config(const std::optional<std::string>& path) {
  if (!path) return RunConfig{};
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(*path, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return parse_config(pt);
}

}  // namespace mg1bayes::io
