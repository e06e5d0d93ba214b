#ifndef IAPDA_BENCH_PROBLEM_IO_HPP
#define IAPDA_BENCH_PROBLEM_IO_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "iapda/bench/matrix_market.hpp"
#include "iapda/problem.hpp"

namespace iapda::bench {

using nlohmann::json;

inline constexpr const char* kProblemFormat = "iapda-problem/1";

inline json to_json_array(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline Vector vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + ": expected a number array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = j[i].get<double>();
  return v;
}

/// Solver defaults stored next to a problem.
struct ProblemDefaults {
  std::optional<double> rho, sigma, beta0;
};

struct ProblemFile {
  CompositeProblem problem;
  ProblemDefaults defaults;
  std::optional<SaddlePointCertificate> saddle;
  std::optional<Vector> x_true;
};

/// Writes `<stem>.json` plus `<stem>.A.mtx` (and `<stem>.M.mtx` / `<stem>.Q.mtx` for matrix-valued f).
/// Matrix paths in the sidecar are relative to the sidecar's directory.
inline void write_problem(const std::filesystem::path& stem, const ProblemFile& pf) {
  const CompositeProblem& p = pf.problem;
  const std::filesystem::path dir = stem.parent_path();
  const std::string base = stem.filename().string();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  json j;
  j["format"] = kProblemFormat;
  j["n"] = p.dim_primal();
  j["m"] = p.dim_dual();
  if (p.dim_dual() > 0) {
    const std::string a_name = base + ".A.mtx";
    write_matrix_market((dir / a_name).string(), p.op());
    j["operator"] = a_name;
  } else {
    j["operator"] = nullptr;
  }
  j["b"] = to_json_array(p.rhs());

  const SmoothFunction& f = p.f();
  json jf;
  jf["lipschitz"] = f.lipschitz();
  switch (f.kind()) {
    case SmoothKind::Zero: jf["kind"] = "zero"; break;
    case SmoothKind::ScaledSqNorm:
      jf["kind"] = "sq_norm";
      jf["mu"] = f.mu();
      break;
    case SmoothKind::LeastSquares: {
      const std::string m_name = base + ".M.mtx";
      write_matrix_market((dir / m_name).string(), *f.ls_operator());
      jf["kind"] = "least_squares";
      jf["matrix"] = m_name;
      jf["rhs"] = to_json_array(*f.ls_rhs());
      break;
    }
    case SmoothKind::Quadratic: {
      const std::string q_name = base + ".Q.mtx";
      write_matrix_market((dir / q_name).string(), LinearOperator(*f.quad_matrix()));
      jf["kind"] = "quadratic";
      jf["matrix"] = q_name;
      jf["linear"] = to_json_array(*f.quad_linear());
      break;
    }
    case SmoothKind::Custom: throw FormatError("write_problem: custom smooth functions cannot be serialized");
  }
  j["f"] = jf;
  j["g"] = {{"kind", to_string(p.g().kind())}, {"l1_weight", p.g().l1_weight()}, {"sq_weight", p.g().sq_weight()}};

  json jd = json::object();
  if (pf.defaults.rho) jd["rho"] = *pf.defaults.rho;
  if (pf.defaults.sigma) jd["sigma"] = *pf.defaults.sigma;
  if (pf.defaults.beta0) jd["beta0"] = *pf.defaults.beta0;
  j["defaults"] = jd;
  if (pf.saddle) {
    j["saddle"] = {{"x", to_json_array(pf.saddle->x_star)},
                   {"lambda", to_json_array(pf.saddle->lambda_star)},
                   {"opt_value", pf.saddle->opt_value}};
  }
  if (pf.x_true) j["x_true"] = to_json_array(*pf.x_true);

  std::ofstream out(dir / (base + ".json"));
  if (!out) throw FormatError("cannot write problem sidecar for " + stem.string());
  out << j.dump(2) << '\n';
}

inline ProblemFile read_problem(const std::filesystem::path& sidecar) {
  std::ifstream in(sidecar);
  if (!in) throw FormatError("cannot open " + sidecar.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError(sidecar.string() + ": " + e.what());
  }
  try {
    if (j.value("format", std::string()) != kProblemFormat)
      throw FormatError(sidecar.string() + ": missing or unknown \"format\" (expected " + kProblemFormat + ")");
    const std::filesystem::path dir = sidecar.parent_path();
    const auto n = j.at("n").get<Index>();
    const auto m = j.at("m").get<Index>();
    LinearOperator a = LinearOperator::empty(n);
    if (m > 0) a = read_matrix_market((dir / j.at("operator").get<std::string>()).string());
    if (a.rows() != m || a.cols() != n) throw FormatError("operator shape does not match n/m");
    Vector b = m > 0 ? vector_from_json(j.at("b"), "b") : Vector(0);

    const json& jf = j.at("f");
    const std::string fk = jf.at("kind").get<std::string>();
    const double lf = jf.value("lipschitz", 0.0);
    SmoothFunction f;
    if (fk == "zero") {
      f = SmoothFunction::zero();
    } else if (fk == "sq_norm") {
      f = SmoothFunction::scaled_sq_norm(jf.at("mu").get<double>());
    } else if (fk == "least_squares") {
      f = SmoothFunction::least_squares(read_matrix_market((dir / jf.at("matrix").get<std::string>()).string()),
                                        vector_from_json(jf.at("rhs"), "f.rhs"), lf);
    } else if (fk == "quadratic") {
      f = SmoothFunction::quadratic(read_matrix_market((dir / jf.at("matrix").get<std::string>()).string()).to_dense(),
                                    vector_from_json(jf.at("linear"), "f.linear"), lf);
    } else {
      throw FormatError("unknown f kind '" + fk + "'");
    }

    const json& jg = j.at("g");
    const ProxKind gk = prox_kind_from_string(jg.at("kind").get<std::string>());
    const double w = jg.value("l1_weight", 0.0);
    const double mu = jg.value("sq_weight", 0.0);
    ProxFunction g;
    switch (gk) {
      case ProxKind::Zero: g = ProxFunction::zero(); break;
      case ProxKind::L1: g = ProxFunction::l1(w); break;
      case ProxKind::SqL2: g = ProxFunction::sq_l2(mu); break;
      case ProxKind::NonNegIndicator: g = ProxFunction::nonneg(); break;
      case ProxKind::L1SqL2: g = ProxFunction::l1_sq_l2(w, mu); break;
    }

    ProblemFile pf{CompositeProblem(std::move(f), std::move(g), std::move(a), std::move(b)), {}, std::nullopt,
                   std::nullopt};
    if (j.contains("defaults")) {
      const json& jd = j["defaults"];
      if (jd.contains("rho")) pf.defaults.rho = jd["rho"].get<double>();
      if (jd.contains("sigma")) pf.defaults.sigma = jd["sigma"].get<double>();
      if (jd.contains("beta0")) pf.defaults.beta0 = jd["beta0"].get<double>();
    }
    if (j.contains("saddle") && !j["saddle"].is_null()) {
      const json& js = j["saddle"];
      SaddlePointCertificate c;
      c.x_star = vector_from_json(js.at("x"), "saddle.x");
      c.lambda_star = m > 0 ? vector_from_json(js.at("lambda"), "saddle.lambda") : Vector(0);
      c.opt_value = js.value("opt_value", pf.problem.objective(c.x_star));
      pf.problem.check_dims(c.x_star, c.lambda_star);
      pf.saddle = std::move(c);
    }
    if (j.contains("x_true")) pf.x_true = vector_from_json(j["x_true"], "x_true");
    return pf;
  } catch (const json::exception& e) {
    throw FormatError(sidecar.string() + ": " + e.what());
  }
}

}  // namespace iapda::bench

#endif  // IAPDA_BENCH_PROBLEM_IO_HPP
