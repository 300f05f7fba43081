#pragma once

// CSV ingestion/emission and the JSON run report.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "betarc/diagnostics.hpp"
#include "betarc/errors.hpp"
#include "betarc/estimation.hpp"
#include "betarc/model.hpp"
#include "betarc/montecarlo.hpp"

namespace betarc {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::optional<double> parse_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace detail

/// A series file: header row, a `y` column with values in (0,1), an optional
/// `date` column, and any remaining columns as covariates in header order.
/// The `t` and `mu` columns written by the simulate command are skipped.
struct DataFile {
  SeriesSample sample;
  std::vector<std::string> covariate_names;
};

inline DataFile read_data_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("data file is empty");
  const auto header = detail::split_csv_line(line);
  std::optional<std::size_t> y_col, date_col;
  std::vector<std::size_t> cov_cols;
  DataFile df;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string h = detail::lower(header[i]);
    if (h == "y") y_col = i;
    else if (h == "date") date_col = i;
    else if (h == "t" || h == "mu") continue;
    else {
      cov_cols.push_back(i);
      df.covariate_names.push_back(header[i]);
    }
  }
  if (!y_col) throw DataError("data file has no 'y' column");

  std::vector<std::vector<double>> cov_rows;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++row;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    const auto y = detail::parse_double(cells[*y_col]);
    if (!y) throw DataError("row " + std::to_string(row) + ": cannot parse y value '" + cells[*y_col] + "'");
    if (!(*y > 0.0 && *y < 1.0)) {
      throw DataError("row " + std::to_string(row) + ": y = " + cells[*y_col] + " outside (0,1)");
    }
    df.sample.y.push_back(*y);
    if (date_col) df.sample.timestamps.push_back(cells[*date_col]);
    std::vector<double> xr;
    for (std::size_t c : cov_cols) {
      const auto v = detail::parse_double(cells[c]);
      if (!v) throw DataError("row " + std::to_string(row) + ": missing or invalid covariate '" + header[c] + "'");
      xr.push_back(*v);
    }
    cov_rows.push_back(std::move(xr));
  }
  if (df.sample.y.empty()) throw DataError("data file has no rows");
  if (!cov_cols.empty()) {
    Covariates X(cov_rows.size(), cov_cols.size());
    for (std::size_t i = 0; i < cov_rows.size(); ++i)
      for (std::size_t j = 0; j < cov_cols.size(); ++j) X(i, j) = cov_rows[i][j];
    df.sample.X = std::move(X);
  }
  return df;
}

inline DataFile read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path + "'");
  return read_data_csv(in);
}

/// Header-only numeric covariate file (no y column required).
inline Covariates read_covariates_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open covariate file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("covariate file is empty");
  const std::size_t cols = detail::split_csv_line(line).size();
  std::vector<double> data;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    ++rows;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != cols) throw DataError("covariate row " + std::to_string(rows) + " has wrong width");
    for (const auto& c : cells) {
      const auto v = detail::parse_double(c);
      if (!v) throw DataError("covariate row " + std::to_string(rows) + ": invalid value '" + c + "'");
      data.push_back(*v);
    }
  }
  Covariates X(rows, cols);
  X.data = std::move(data);
  return X;
}

/// Writes named columns of equal length.
inline void write_csv(std::ostream& out, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& columns) {
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_double(columns[j][i]);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline nlohmann::json numbers(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline std::vector<double> numbers_from(const nlohmann::json& j) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(number_from(e));
  return v;
}

}  // namespace detail

struct ModelReport {
  std::string role;
  std::vector<std::string> names;
  std::vector<double> estimates;
  std::vector<bool> estimated;
  std::vector<double> se;
  std::vector<double> p_values;
  double u0 = 0.0;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t k = 0;
  bool converged = false;
  LjungBoxResult ljung_box;
  AccuracyReport in_sample;
  std::optional<AccuracyReport> out_of_sample;
  std::vector<double> forecasts;

  friend bool operator==(const ModelReport&, const ModelReport&) = default;
};

struct SpecReport {
  std::string map;
  double theta = 0.0;
  std::size_t p = 0;
  std::size_t l = 0;
  std::string link_g;
  std::string link_h;

  friend bool operator==(const SpecReport&, const SpecReport&) = default;
};

struct RunReport {
  std::string version = kVersion;
  SpecReport spec;
  std::uint64_t seed = 0;
  std::size_t n_fit = 0;
  std::size_t holdout = 0;
  std::size_t grid_size = 1;
  bool two_stage = false;
  std::vector<ModelReport> models;
  std::optional<std::size_t> best_by_mape_in;
  std::optional<std::size_t> best_by_loglik;
  std::size_t admissible = 0;
  std::vector<std::pair<double, double>> u0_trace;
  std::optional<double> timing_seconds;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline bool operator==(const LjungBoxResult& a, const LjungBoxResult& b) {
  return a.statistic == b.statistic && a.lags == b.lags && a.dof == b.dof && a.p_value == b.p_value;
}

inline bool operator==(const AccuracyReport& a, const AccuracyReport& b) {
  return a.mape == b.mape && a.mpe == b.mpe && a.me == b.me && a.mae == b.mae && a.rmse == b.rmse &&
         a.horizon == b.horizon;
}

inline SpecReport describe(const ModelSpec& spec) {
  return {std::string(to_string(spec.map.family())), spec.map.theta(), spec.p, spec.l,
          std::string(to_string(spec.g.kind)), std::string(to_string(spec.h.kind))};
}

inline void to_json(nlohmann::json& j, const LjungBoxResult& r) {
  j = {{"statistic", detail::number(r.statistic)}, {"lags", r.lags}, {"dof", r.dof},
       {"p_value", detail::number(r.p_value)}};
}
inline void from_json(const nlohmann::json& j, LjungBoxResult& r) {
  r.statistic = detail::number_from(j.at("statistic"));
  r.lags = j.at("lags").get<std::size_t>();
  r.dof = j.at("dof").get<std::size_t>();
  r.p_value = detail::number_from(j.at("p_value"));
}

inline void to_json(nlohmann::json& j, const AccuracyReport& r) {
  j = {{"horizon", r.horizon == Horizon::InSample ? "in_sample" : "out_of_sample"},
       {"mape", detail::number(r.mape)}, {"mpe", detail::number(r.mpe)}, {"me", detail::number(r.me)},
       {"mae", detail::number(r.mae)}, {"rmse", detail::number(r.rmse)}};
}
inline void from_json(const nlohmann::json& j, AccuracyReport& r) {
  r.horizon = j.at("horizon").get<std::string>() == "in_sample" ? Horizon::InSample : Horizon::OutOfSample;
  r.mape = detail::number_from(j.at("mape"));
  r.mpe = detail::number_from(j.at("mpe"));
  r.me = detail::number_from(j.at("me"));
  r.mae = detail::number_from(j.at("mae"));
  r.rmse = detail::number_from(j.at("rmse"));
}

inline void to_json(nlohmann::json& j, const SpecReport& s) {
  j = {{"map", s.map}, {"theta", s.theta}, {"p", s.p}, {"l", s.l}, {"link_g", s.link_g}, {"link_h", s.link_h}};
}
inline void from_json(const nlohmann::json& j, SpecReport& s) {
  s.map = j.at("map").get<std::string>();
  s.theta = j.at("theta").get<double>();
  s.p = j.at("p").get<std::size_t>();
  s.l = j.at("l").get<std::size_t>();
  s.link_g = j.at("link_g").get<std::string>();
  s.link_h = j.at("link_h").get<std::string>();
}

inline void to_json(nlohmann::json& j, const ModelReport& m) {
  nlohmann::json params = nlohmann::json::array();
  for (std::size_t i = 0; i < m.names.size(); ++i) {
    params.push_back({{"name", m.names[i]},
                      {"estimate", detail::number(m.estimates[i])},
                      {"estimated", static_cast<bool>(m.estimated[i])},
                      {"se", detail::number(m.se[i])},
                      {"p_value", detail::number(m.p_values[i])}});
  }
  j = {{"role", m.role},           {"parameters", params}, {"u0", m.u0},
       {"loglik", detail::number(m.loglik)}, {"aic", detail::number(m.aic)}, {"bic", detail::number(m.bic)},
       {"k", m.k},                 {"converged", m.converged}, {"ljung_box", m.ljung_box},
       {"in_sample", m.in_sample}, {"forecasts", detail::numbers(m.forecasts)}};
  if (m.out_of_sample) j["out_of_sample"] = *m.out_of_sample;
}
inline void from_json(const nlohmann::json& j, ModelReport& m) {
  m.role = j.at("role").get<std::string>();
  m.names.clear();
  m.estimates.clear();
  m.estimated.clear();
  m.se.clear();
  m.p_values.clear();
  for (const auto& p : j.at("parameters")) {
    m.names.push_back(p.at("name").get<std::string>());
    m.estimates.push_back(detail::number_from(p.at("estimate")));
    m.estimated.push_back(p.at("estimated").get<bool>());
    m.se.push_back(detail::number_from(p.at("se")));
    m.p_values.push_back(detail::number_from(p.at("p_value")));
  }
  m.u0 = j.at("u0").get<double>();
  m.loglik = detail::number_from(j.at("loglik"));
  m.aic = detail::number_from(j.at("aic"));
  m.bic = detail::number_from(j.at("bic"));
  m.k = j.at("k").get<std::size_t>();
  m.converged = j.at("converged").get<bool>();
  m.ljung_box = j.at("ljung_box").get<LjungBoxResult>();
  m.in_sample = j.at("in_sample").get<AccuracyReport>();
  m.forecasts = detail::numbers_from(j.at("forecasts"));
  m.out_of_sample.reset();
  if (j.contains("out_of_sample")) m.out_of_sample = j.at("out_of_sample").get<AccuracyReport>();
}

inline void to_json(nlohmann::json& j, const RunReport& r) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [u0, ll] : r.u0_trace) trace.push_back({u0, detail::number(ll)});
  j = {{"version", r.version}, {"spec", r.spec},         {"seed", r.seed},
       {"n_fit", r.n_fit},     {"holdout", r.holdout},   {"grid_size", r.grid_size},
       {"two_stage", r.two_stage}, {"models", r.models}, {"admissible", r.admissible},
       {"u0_trace", trace}};
  nlohmann::json sel = nlohmann::json::object();
  sel["best_by_mape_in"] = r.best_by_mape_in ? nlohmann::json(*r.best_by_mape_in) : nlohmann::json(nullptr);
  sel["best_by_loglik"] = r.best_by_loglik ? nlohmann::json(*r.best_by_loglik) : nlohmann::json(nullptr);
  j["selection"] = sel;
  if (r.timing_seconds) j["timing_seconds"] = *r.timing_seconds;
}
inline void from_json(const nlohmann::json& j, RunReport& r) {
  r.version = j.at("version").get<std::string>();
  r.spec = j.at("spec").get<SpecReport>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.n_fit = j.at("n_fit").get<std::size_t>();
  r.holdout = j.at("holdout").get<std::size_t>();
  r.grid_size = j.at("grid_size").get<std::size_t>();
  r.two_stage = j.at("two_stage").get<bool>();
  r.models = j.at("models").get<std::vector<ModelReport>>();
  r.admissible = j.at("admissible").get<std::size_t>();
  r.u0_trace.clear();
  for (const auto& e : j.at("u0_trace")) r.u0_trace.emplace_back(e.at(0).get<double>(), detail::number_from(e.at(1)));
  const auto& sel = j.at("selection");
  r.best_by_mape_in.reset();
  r.best_by_loglik.reset();
  if (!sel.at("best_by_mape_in").is_null()) r.best_by_mape_in = sel.at("best_by_mape_in").get<std::size_t>();
  if (!sel.at("best_by_loglik").is_null()) r.best_by_loglik = sel.at("best_by_loglik").get<std::size_t>();
  r.timing_seconds.reset();
  if (j.contains("timing_seconds")) r.timing_seconds = j.at("timing_seconds").get<double>();
}

/// Report entry for one fitted candidate. `holdout_y` empty means no
/// out-of-sample section.
inline ModelReport model_report(std::string role, const ModelSpec& spec, const Candidate& c,
                                const SeriesSample& fit_sample, const std::vector<double>& holdout_y,
                                const std::optional<Covariates>& holdout_X) {
  ModelReport m;
  m.role = std::move(role);
  m.names = c.fit.names;
  m.estimates = c.fit.estimates;
  m.estimated = c.fit.free;
  m.se = c.fit.se;
  m.p_values = c.fit.p_values;
  m.u0 = c.fit.gamma_hat.u0;
  m.loglik = c.fit.loglik;
  m.aic = c.fit.aic;
  m.bic = c.fit.bic;
  m.k = c.fit.k;
  m.converged = c.fit.converged;
  m.ljung_box = c.ljung_box;
  m.in_sample = c.in_sample;
  if (!holdout_y.empty()) {
    m.forecasts = forecast(spec, c.fit, fit_sample, holdout_y.size(), holdout_X);
    m.out_of_sample = accuracy(holdout_y, m.forecasts, Horizon::OutOfSample);
  }
  return m;
}

inline nlohmann::json to_json(const MCSummary& s) {
  nlohmann::json cfg = {{"map", std::string(to_string(s.config.family))},
                        {"map_params", s.config.map_params},
                        {"u0s", s.config.u0s},
                        {"ns", s.config.ns},
                        {"nu", s.config.nu},
                        {"replicates", s.config.replicates},
                        {"seed", s.config.seed},
                        {"estimate_theta", s.config.estimate_theta}};
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : s.cells) {
    cells.push_back({{"map_param", c.map_param},
                     {"u0", c.u0},
                     {"n", c.n},
                     {"mean", detail::number(c.mean)},
                     {"sd", detail::number(c.sd)},
                     {"mape", detail::number(c.mape)},
                     {"failures", c.failures},
                     {"failed", c.failed}});
  }
  return {{"version", kVersion}, {"config", cfg}, {"cells", cells}};
}

inline MCConfig mc_config_from_json(const nlohmann::json& j) {
  MCConfig c;
  try {
    c.family = parse_map_family(j.at("map").get<std::string>());
    c.map_params = j.at("map_params").get<std::vector<double>>();
    c.u0s = j.at("u0s").get<std::vector<double>>();
    c.ns = j.at("ns").get<std::vector<std::size_t>>();
    c.nu = j.at("nu").get<double>();
    c.replicates = j.value("replicates", std::size_t{200});
    c.seed = j.value("seed", std::uint64_t{0});
    c.estimate_theta = j.value("estimate_theta", false);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid Monte Carlo config: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace betarc
