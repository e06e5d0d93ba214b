#ifndef IAPDA_TRACE_HPP
#define IAPDA_TRACE_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "iapda/linear_operator.hpp"

namespace iapda {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Metrics for iterate k. Quantities that need a saddle certificate are NaN without one.
struct TraceRow {
  long k = 1;
  double t_k = 1.0;
  double t_next = 1.0;     // t_{k+1}
  double beta_prev = 1.0;  // beta_{k-1}
  double beta_k = 1.0;
  double objective = kNaN;      // (f+g)(x_k)
  double obj_residual = kNaN;   // |(f+g)(x_k) - (f+g)(x*)|
  double feas_violation = 0.0;  // ||A x_k - b||
  double pd_gap = kNaN;         // L_rho(x_k, lambda*) - L_rho(x*, lambda*)
  double energy_total = kNaN;
  double energy_e0 = kNaN;
  double energy_e1 = kNaN;
  double energy_e2 = kNaN;
  double stationarity = kNaN;
  double x_step = 0.0;        // ||x_k - x_{k-1}||
  double lambda_step = 0.0;   // ||lambda_k - lambda_{k-1}||
  double lambda_norm = 0.0;   // ||lambda_k||
  double u_step = 0.0;        // ||u_k - u_{k-1}||
  double v_step = 0.0;        // ||v_k - v_{k-1}||
  double v_identity_error = 0.0;
  long inner_iters = 0;
  bool inner_converged = true;
  double wall_ms = 0.0;
};

/// Run-level constants a certificate check needs alongside the rows.
struct TraceHeader {
  std::string solver = "iapda";
  double rho = 0.0;
  double sigma = 1.0;
  double beta0 = 1.0;
  double t1 = 1.0;
  double lambda0_norm = 0.0;
  double lambda1_minus_lambda0_norm = 0.0;
  double feas_x1 = 0.0;  // ||A x_1 - b||
  double lambda_star_norm = kNaN;
  double lipschitz_f = 0.0;
  bool has_saddle = false;
};

enum class StopReason { MaxIter, Converged, NonFinite, Aborted };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::MaxIter: return "max_iter";
    case StopReason::Converged: return "converged";
    case StopReason::NonFinite: return "non_finite";
    case StopReason::Aborted: return "aborted";
  }
  return "unknown";
}

struct MetricsTrace {
  TraceHeader header;
  std::vector<TraceRow> rows;
  std::vector<std::string> warnings;
  std::vector<Vector> lambda_history;  // only when retention is enabled
  StopReason stop = StopReason::MaxIter;
  Vector x_final;
  Vector lambda_final;

  const TraceRow& last() const { return rows.back(); }
};

inline const char* trace_csv_header() {
  return "k,t_k,beta_k,obj_residual,feas_violation,pd_gap,energy_total,energy_e0,energy_e1,energy_e2,"
         "inner_iters,wall_ms";
}

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes the fixed-column CSV. `with_wall_time = false` writes 0 so traces are byte-reproducible.
inline void write_trace_csv(std::ostream& out, const MetricsTrace& trace, bool with_wall_time = false) {
  out << trace_csv_header() << '\n';
  for (const TraceRow& r : trace.rows) {
    out << r.k << ',' << format_double(r.t_k) << ',' << format_double(r.beta_k) << ','
        << format_double(r.obj_residual) << ',' << format_double(r.feas_violation) << ','
        << format_double(r.pd_gap) << ',' << format_double(r.energy_total) << ','
        << format_double(r.energy_e0) << ',' << format_double(r.energy_e1) << ','
        << format_double(r.energy_e2) << ',' << r.inner_iters << ','
        << format_double(with_wall_time ? r.wall_ms : 0.0) << '\n';
  }
}

inline void write_trace_csv(const std::string& path, const MetricsTrace& trace, bool with_wall_time = false) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(out, trace, with_wall_time);
}

/// Minimal CSV table: header names plus numeric columns ("nan"/"inf" accepted).
struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return columns[i];
    throw std::invalid_argument("CSV has no column '" + name + "'");
  }
  bool has(const std::string& name) const {
    for (const std::string& n : names)
      if (n == name) return true;
    return false;
  }
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

inline double parse_csv_number(const std::string& cell) {
  if (cell == "nan") return kNaN;
  if (cell == "inf") return std::numeric_limits<double>::infinity();
  if (cell == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::invalid_argument("bad CSV number '" + cell + "'");
  return v;
}

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.names.push_back(cell);
  }
  table.columns.resize(table.names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ss, cell, ',')) {
      if (i >= table.columns.size()) throw std::invalid_argument("CSV row has too many cells");
      table.columns[i++].push_back(parse_csv_number(cell));
    }
    if (i != table.columns.size()) throw std::invalid_argument("CSV row has too few cells");
  }
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace iapda

#endif  // IAPDA_TRACE_HPP
