// bfw: fit, compare, sample and tabulate the beta flexible Weibull model.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bfw/bfw.hpp"

namespace {

using nlohmann::json;

enum ExitCode { ok = 0, usage = 2, data = 3, convergence = 4, numeric = 5 };

struct Options {
  std::string command;
  std::string data;
  std::string family = "bfw";
  std::vector<std::string> families{"bfw", "fw", "weibull"};
  std::string weibull_form = "scale";
  std::vector<double> params;
  long long n = -1;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string format = "csv";
  double level = 0.95;
  int starts = 16;
  double tol = 1e-6;
  std::string output;
};

class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bfw::FamilyId parse_family(const std::string& s) {
  if (s == "bfw") return bfw::FamilyId::bfw;
  if (s == "fw") return bfw::FamilyId::fw;
  if (s == "weibull") return bfw::FamilyId::weibull;
  throw usage_error("unknown family '" + s + "' (expected bfw, fw or weibull)");
}

bfw::WeibullForm parse_form(const std::string& s) {
  return s == "rate" ? bfw::WeibullForm::rate : bfw::WeibullForm::scale;
}

std::unique_ptr<bfw::ModelFamily> family_of(const std::string& name, const Options& o) {
  return bfw::make_family(parse_family(name), parse_form(o.weibull_form));
}

bfw::FitConfig fit_config(const Options& o) {
  bfw::FitConfig cfg;
  cfg.starts = o.starts;
  cfg.score_tol = o.tol;
  cfg.level = o.level;
  return cfg;
}

json config_echo(const Options& o) {
  json c = json::object();
  if (!o.data.empty()) c["data"] = o.data;
  if (o.command == "fit" || o.command == "eval") c["family"] = o.family;
  if (o.command == "compare") c["families"] = o.families;
  if (o.command == "fit" || o.command == "compare" || o.command == "eval") {
    c["weibull_form"] = o.weibull_form;
  }
  if (!o.params.empty()) c["params"] = o.params;
  if (o.n >= 0) c["n"] = o.n;
  if (!o.grid.empty()) c["grid"] = o.grid;
  if (o.command == "fit" || o.command == "compare") {
    c["level"] = o.level;
    c["starts"] = o.starts;
    c["tol"] = o.tol;
  }
  c["format"] = o.format;
  return c;
}

json meta(const Options& o) {
  return {{"command", o.command},
          {"version", bfw::version},
          {"seed", o.seed ? json(*o.seed) : json(nullptr)},
          {"config", config_echo(o)}};
}

json criteria_json(const bfw::ComparisonRow& r) {
  return {{"aic", jnum(r.aic)},
          {"aicc", r.aicc ? jnum(*r.aicc) : json(nullptr)},
          {"bic", jnum(r.bic)},
          {"hqic", jnum(r.hqic)}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(jnum(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

// ---- fit -------------------------------------------------------------------

int run_fit(const Options& o, std::ostream& out) {
  bfw::Dataset ds = bfw::ingest(o.data);
  // Same canonical order as compare, so both commands print identical numbers.
  std::sort(ds.times.begin(), ds.times.end());
  const auto fam = family_of(o.family, o);
  const bfw::FitConfig cfg = fit_config(o);
  const int k = fam->parameter_count();
  if (static_cast<int>(ds.size()) < k + 1) {
    throw bfw::domain_error(fam->name() + ": need at least " + std::to_string(k + 1) +
                            " observations");
  }
  const bfw::FittedModel m = fam->fit(ds, cfg);
  const auto names = fam->parameter_names();
  const auto ic = bfw::information_criteria(m.log_likelihood, k, static_cast<int>(ds.size()));
  const double ks = bfw::ks_statistic(ds, [&](double x) { return fam->cdf(x, m.estimates); });

  if (o.format == "json") {
    json est = json::object();
    json ci = json::object();
    for (int i = 0; i < k; ++i) {
      est[names[i]] = m.estimates[i];
      const auto& iv = m.confidence_intervals[i];
      ci[names[i]] = iv ? json::array({iv->lower, iv->upper}) : json(nullptr);
    }
    json result = {{"dataset", {{"label", ds.label}, {"n", ds.size()}}},
                   {"family", fam->name()},
                   {"parameter_names", names},
                   {"estimates", est},
                   {"log_likelihood", m.log_likelihood},
                   {"minus_two_ll", -2.0 * m.log_likelihood},
                   {"criteria",
                    {{"aic", ic.aic},
                     {"aicc", ic.aicc ? json(*ic.aicc) : json(nullptr)},
                     {"bic", ic.bic},
                     {"hqic", ic.hqic}}},
                   {"ks_statistic", ks},
                   {"observed_information", matrix_json(m.observed_information)},
                   {"covariance", m.covariance ? matrix_json(*m.covariance) : json(nullptr)},
                   {"ci", {{"level", o.level}, {"intervals", ci}}},
                   {"converged", m.converged},
                   {"iterations", m.iterations}};
    if (m.bfw_detail) {
      const auto& d = *m.bfw_detail;
      result["diagnostics"] = {
          {"score_at_optimum",
           {d.score_at_optimum[0], d.score_at_optimum[1], d.score_at_optimum[2],
            d.score_at_optimum[3]}},
          {"information_positive_definite", d.information_positive_definite},
          {"condition_number", jnum(d.condition_number)},
          {"multistart_best_of", d.multistart_best_of},
          {"starts_converged", d.starts_converged}};
    }
    out << json{{"meta", meta(o)}, {"result", result}}.dump(2) << '\n';
  } else {
    out << "field,value\n";
    out << "family," << fam->name() << '\n';
    out << "n," << ds.size() << '\n';
    for (int i = 0; i < k; ++i) out << "estimate." << names[i] << ',' << num(m.estimates[i]) << '\n';
    out << "log_likelihood," << num(m.log_likelihood) << '\n';
    out << "minus_two_ll," << num(-2.0 * m.log_likelihood) << '\n';
    out << "aic," << num(ic.aic) << '\n';
    out << "aicc," << (ic.aicc ? num(*ic.aicc) : "") << '\n';
    out << "bic," << num(ic.bic) << '\n';
    out << "hqic," << num(ic.hqic) << '\n';
    out << "ks_statistic," << num(ks) << '\n';
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        out << "covariance." << names[i] << '.' << names[j] << ','
            << (m.covariance ? num((*m.covariance)(i, j)) : "") << '\n';
      }
    }
    out << "ci.level," << num(o.level) << '\n';
    for (int i = 0; i < k; ++i) {
      const auto& iv = m.confidence_intervals[i];
      out << "ci." << names[i] << ".lower," << (iv ? num(iv->lower) : "") << '\n';
      out << "ci." << names[i] << ".upper," << (iv ? num(iv->upper) : "") << '\n';
    }
    out << "converged," << (m.converged ? "true" : "false") << '\n';
    out << "iterations," << m.iterations << '\n';
  }
  return m.converged ? ok : convergence;
}

// ---- compare ---------------------------------------------------------------

int run_compare(const Options& o, std::ostream& out) {
  const bfw::Dataset ds = bfw::ingest(o.data);
  std::vector<std::unique_ptr<bfw::ModelFamily>> fams;
  for (const auto& f : o.families) fams.push_back(family_of(f, o));
  const auto rows = bfw::compare_models(ds, fams, fit_config(o));

  if (o.format == "json") {
    json jr = json::array();
    for (const auto& r : rows) {
      json est = json::object();
      for (std::size_t i = 0; i < r.estimates.size(); ++i) est[r.parameter_names[i]] = r.estimates[i];
      json row = {{"model", r.model},
                  {"parameters", est},
                  {"log_likelihood", jnum(r.log_likelihood)},
                  {"minus_two_ll", jnum(r.minus_two_ll)},
                  {"criteria", criteria_json(r)},
                  {"ks_statistic", jnum(r.ks_statistic)},
                  {"converged", r.converged},
                  {"error", r.error.empty() ? json(nullptr) : json(r.error)}};
      jr.push_back(row);
    }
    out << json{{"meta", meta(o)},
                {"result", {{"dataset", {{"label", ds.label}, {"n", ds.size()}}}, {"rows", jr}}}}
               .dump(2)
        << '\n';
  } else {
    out << "model,parameters,log_likelihood,minus_two_ll,aic,aicc,bic,hqic,ks_statistic,error\n";
    for (const auto& r : rows) {
      std::string prm;
      for (std::size_t i = 0; i < r.estimates.size(); ++i) {
        if (i) prm += ';';
        prm += r.parameter_names[i] + '=' + num(r.estimates[i]);
      }
      const bool failed = !r.error.empty();
      auto cell = [&](double v) { return failed ? std::string() : num(v); };
      out << r.model << ',' << csv_field(prm) << ',' << cell(r.log_likelihood) << ','
          << cell(r.minus_two_ll) << ',' << cell(r.aic) << ','
          << (r.aicc && !failed ? num(*r.aicc) : "") << ',' << cell(r.bic) << ','
          << cell(r.hqic) << ',' << cell(r.ks_statistic) << ',' << csv_field(r.error) << '\n';
    }
  }
  for (const auto& r : rows) {
    if (r.error.empty()) return ok;
  }
  return convergence;
}

// ---- sample ----------------------------------------------------------------

int run_sample(const Options& o, std::ostream& out) {
  if (o.params.size() != 4) throw usage_error("sample: --params needs alpha,beta,p,q");
  if (o.n < 0) throw usage_error("sample: --n is required");
  if (!o.seed) throw usage_error("sample: --seed is required");
  const bfw::BFWParams prm{o.params[0], o.params[1], o.params[2], o.params[3]};
  const auto xs = bfw::bfw_sample(static_cast<std::size_t>(o.n), prm, *o.seed);
  if (o.format == "json") {
    out << json{{"meta", meta(o)},
                {"result", {{"n", xs.size()}, {"params", o.params}, {"values", xs}}}}
               .dump(2)
        << '\n';
  } else {
    // No header, so the file can be read back as a dataset.
    for (double x : xs) out << num(x) << '\n';
  }
  return ok;
}

// ---- eval ------------------------------------------------------------------

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw usage_error("--grid must be start:stop:count");
  double a = 0.0;
  double b = 0.0;
  long long count = 0;
  try {
    std::size_t used = 0;
    a = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("start");
    b = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("stop");
    count = std::stoll(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw usage_error("--grid must be start:stop:count with numeric fields");
  }
  if (count < 1) throw usage_error("--grid count must be >= 1");
  if (count > 1 && !(b > a)) throw usage_error("--grid stop must exceed start");
  if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw bfw::domain_error("--grid points must be positive and finite");
  }
  std::vector<double> xs(count);
  for (long long i = 0; i < count; ++i) {
    xs[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  xs.back() = count == 1 ? a : b;
  return xs;
}

int run_eval(const Options& o, std::ostream& out) {
  const auto fam = family_of(o.family, o);
  if (static_cast<int>(o.params.size()) != fam->parameter_count()) {
    throw usage_error("eval: --params needs " + std::to_string(fam->parameter_count()) +
                      " values for family " + o.family);
  }
  if (o.grid.empty()) throw usage_error("eval: --grid is required");
  const auto xs = parse_grid(o.grid);

  struct Row {
    double x, pdf, cdf, survival;
    std::optional<double> hazard;
  };
  std::vector<Row> rows;
  rows.reserve(xs.size());
  for (double x : xs) {
    Row r{x, fam->pdf(x, o.params), fam->cdf(x, o.params), fam->survival(x, o.params), {}};
    try {
      r.hazard = fam->hazard(x, o.params);
    } catch (const bfw::saturation_error&) {
    }
    rows.push_back(r);
  }
  if (o.format == "json") {
    json jr = json::array();
    for (const auto& r : rows) {
      jr.push_back({{"x", r.x},
                    {"pdf", r.pdf},
                    {"cdf", r.cdf},
                    {"survival", r.survival},
                    {"hazard", r.hazard ? jnum(*r.hazard) : json(nullptr)}});
    }
    out << json{{"meta", meta(o)}, {"result", {{"family", fam->name()}, {"rows", jr}}}}.dump(2)
        << '\n';
  } else {
    out << "x,pdf,cdf,survival,hazard\n";
    for (const auto& r : rows) {
      out << num(r.x) << ',' << num(r.pdf) << ',' << num(r.cdf) << ',' << num(r.survival) << ','
          << (r.hazard ? num(*r.hazard) : "") << '\n';
    }
  }
  return ok;
}

// ---- km --------------------------------------------------------------------

int run_km(const Options& o, std::ostream& out) {
  const bfw::Dataset ds = bfw::ingest(o.data);
  const auto km = bfw::kaplan_meier(ds);
  const auto ec = bfw::ecdf(ds);
  if (o.format == "json") {
    json jr = json::array();
    jr.push_back({{"time", 0.0}, {"survival", km.initial_value}, {"ecdf", ec.initial_value}});
    for (std::size_t i = 0; i < km.breakpoints.size(); ++i) {
      jr.push_back({{"time", km.breakpoints[i].first},
                    {"survival", km.breakpoints[i].second},
                    {"ecdf", ec.breakpoints[i].second}});
    }
    out << json{{"meta", meta(o)},
                {"result", {{"dataset", {{"label", ds.label}, {"n", ds.size()}}}, {"rows", jr}}}}
               .dump(2)
        << '\n';
  } else {
    out << "time,survival,ecdf\n";
    out << num(0.0) << ',' << num(km.initial_value) << ',' << num(ec.initial_value) << '\n';
    for (std::size_t i = 0; i < km.breakpoints.size(); ++i) {
      out << num(km.breakpoints[i].first) << ',' << num(km.breakpoints[i].second) << ','
          << num(ec.breakpoints[i].second) << '\n';
    }
  }
  return ok;
}

// ---- dispatch --------------------------------------------------------------

struct Failure {
  int code;
  std::string type;
};

Failure classify(const std::exception& e) {
  if (dynamic_cast<const usage_error*>(&e)) return {usage, "usage"};
  if (dynamic_cast<const bfw::parse_error*>(&e)) return {data, "parse"};
  if (dynamic_cast<const bfw::io_error*>(&e)) return {data, "io"};
  if (dynamic_cast<const bfw::domain_error*>(&e)) return {data, "domain"};
  if (dynamic_cast<const bfw::convergence_error*>(&e)) return {convergence, "convergence"};
  return {numeric, "numeric"};
}

int run(const Options& o, std::ostream& out) {
  if (o.command == "fit") return run_fit(o, out);
  if (o.command == "compare") return run_compare(o, out);
  if (o.command == "sample") return run_sample(o, out);
  if (o.command == "eval") return run_eval(o, out);
  return run_km(o, out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beta flexible Weibull lifetime model: fitting, comparison, sampling, curves"};
  app.set_version_flag("--version", std::string(bfw::version));
  app.require_subcommand(1);
  Options o;

  auto add_format = [&](CLI::App* sc) {
    sc->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sc->add_option("--output,-o", o.output, "Write to this file instead of stdout");
  };
  auto add_data = [&](CLI::App* sc) {
    sc->add_option("--data", o.data, "Data file, or a built-in name: pumps, pumps-hundreds")
        ->required();
  };
  auto add_fit_opts = [&](CLI::App* sc) {
    sc->add_option("--level", o.level, "Confidence level for intervals")
        ->check(CLI::Range(0.0, 1.0));
    sc->add_option("--starts", o.starts, "Multi-start count for BFW")->check(CLI::PositiveNumber);
    sc->add_option("--tol", o.tol, "Score tolerance for convergence")->check(CLI::PositiveNumber);
  };
  auto add_form = [&](CLI::App* sc) {
    sc->add_option("--weibull-form", o.weibull_form, "Weibull parameterization")
        ->check(CLI::IsMember({"scale", "rate"}));
  };
  const auto family_check = CLI::IsMember({"bfw", "fw", "weibull"});

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of one family");
  add_data(fit);
  fit->add_option("--family", o.family, "bfw, fw or weibull")->check(family_check);
  add_form(fit);
  add_fit_opts(fit);
  add_format(fit);

  auto* cmp = app.add_subcommand("compare", "Fit several families and rank them by AIC");
  add_data(cmp);
  cmp->add_option("--families", o.families, "Comma-separated list of families")
      ->delimiter(',')
      ->check(family_check);
  add_form(cmp);
  add_fit_opts(cmp);
  add_format(cmp);

  auto* smp = app.add_subcommand("sample", "Draw BFW variates");
  smp->add_option("--params", o.params, "alpha,beta,p,q")->delimiter(',')->required();
  smp->add_option("--n", o.n, "Number of draws")->required()->check(CLI::NonNegativeNumber);
  smp->add_option("--seed", o.seed, "Generator seed")->required();
  add_format(smp);

  auto* ev = app.add_subcommand("eval", "Tabulate pdf, cdf, survival and hazard on a grid");
  ev->add_option("--family", o.family, "bfw, fw or weibull")->check(family_check);
  add_form(ev);
  ev->add_option("--params", o.params, "Comma-separated parameters")->delimiter(',')->required();
  ev->add_option("--grid", o.grid, "start:stop:count")->required();
  add_format(ev);

  auto* km = app.add_subcommand("km", "Kaplan-Meier and empirical CDF step curves");
  add_data(km);
  add_format(km);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return usage;
  }
  o.command = app.get_subcommands().front()->get_name();
  if (o.command == "fit" || o.command == "compare") {
    if (!(o.level > 0.0 && o.level < 1.0)) {
      std::cerr << "error: --level must lie in (0, 1)\n";
      return usage;
    }
  }

  std::ostringstream buffer;
  int code = ok;
  try {
    code = run(o, buffer);
  } catch (const std::exception& e) {
    const Failure f = classify(e);
    std::cerr << "error: " << e.what() << '\n';
    if (const auto* ce = dynamic_cast<const bfw::convergence_error*>(&e)) {
      for (const auto& d : ce->diagnostics()) std::cerr << "  " << d << '\n';
    }
    if (o.format != "json") return f.code;
    json err = {{"type", f.type}, {"message", e.what()}, {"exit_code", f.code}};
    if (const auto* pe = dynamic_cast<const bfw::parse_error*>(&e)) {
      err["line"] = pe->line();
      err["column"] = pe->column();
    }
    if (const auto* ce = dynamic_cast<const bfw::convergence_error*>(&e)) {
      err["diagnostics"] = ce->diagnostics();
    }
    buffer.str("");
    buffer << json{{"meta", meta(o)}, {"error", err}}.dump(2) << '\n';
    code = f.code;
  }

  if (o.output.empty()) {
    std::cout << buffer.str();
    std::cout.flush();
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f || !(f << buffer.str())) {
      std::cerr << "error: cannot write '" << o.output << "'\n";
      return data;
    }
  }
  return code;
}
