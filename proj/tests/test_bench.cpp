#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "iapda/bench/experiment.hpp"
#include "iapda/bench/generators.hpp"
#include "iapda/bench/rate_fit.hpp"
#include "iapda/bench/reference_saddle.hpp"
#include "iapda/bench/simulation.hpp"

using namespace iapda;
using namespace iapda::bench;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / ("iapda_bench_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Generators, L1L2IsDeterministic) {
  const L1L2Instance a = gen_l1l2(20, 30, 1.5, 0.2, 1e-3, 7);
  const L1L2Instance b = gen_l1l2(20, 30, 1.5, 0.2, 1e-3, 7);
  const L1L2Instance c = gen_l1l2(20, 30, 1.5, 0.2, 1e-3, 8);
  EXPECT_EQ(a.problem.op().to_dense(), b.problem.op().to_dense());
  EXPECT_EQ(a.problem.rhs(), b.problem.rhs());
  EXPECT_EQ(a.x_true, b.x_true);
  EXPECT_NE(a.problem.rhs(), c.problem.rhs());
  EXPECT_NEAR(a.noise.norm(), 1e-3, 1e-18);
  EXPECT_EQ((a.x_true.array() != 0.0).count(), 6);
  EXPECT_LE(a.x_true.cwiseAbs().maxCoeff(), 2.0);
  EXPECT_TRUE(a.warnings.empty());
}

TEST(Generators, L1L2ForcesOneNonzero) {
  const L1L2Instance a = gen_l1l2(5, 10, 1.0, 0.01, 0.0, 1);
  EXPECT_EQ((a.x_true.array() != 0.0).count(), 1);
  ASSERT_EQ(a.warnings.size(), 1u);
  EXPECT_EQ(a.noise.norm(), 0.0);
  EXPECT_THROW(gen_l1l2(5, 10, 1.0, 0.0, 0.0, 1), ConfigError);
  EXPECT_THROW(gen_l1l2(5, 10, 1.0, 0.5, -1.0, 1), ConfigError);
}

TEST(Generators, NnlsDensityAndRange) {
  const CompositeProblem p = gen_nnls(200, 300, 0.5, 3);
  const Matrix m = p.f().ls_operator()->to_dense();
  const double density = static_cast<double>((m.array() != 0.0).count()) / static_cast<double>(m.size());
  EXPECT_NEAR(density, 0.5, 0.01);
  EXPECT_GE(m.minCoeff(), 0.0);
  EXPECT_LE(m.maxCoeff(), 0.1);
  const CompositeProblem full = gen_nnls(10, 12, 1.0, 3);
  const Matrix f = full.f().ls_operator()->to_dense();
  EXPECT_FALSE(full.f().ls_operator()->is_sparse());
  EXPECT_TRUE((f.array() > 0.0).all());
  EXPECT_LE(f.maxCoeff(), 0.1);
  EXPECT_EQ(full.dim_dual(), 0);
  EXPECT_THROW(gen_nnls(10, 12, 1.5, 3), ConfigError);
}

TEST(RateFit, RecoversPowerLaws) {
  std::vector<double> ks, ys, zs;
  for (int k = 1; k <= 200; ++k) {
    ks.push_back(k);
    ys.push_back(3.0 / (static_cast<double>(k) * k));
    zs.push_back(k % 7 == 0 ? 0.0 : 5.0 * std::pow(k, -1.5));
  }
  const RateFit a = fit_rate_slope(ks, ys, 10, 200);
  EXPECT_NEAR(a.slope, -2.0, 1e-12);
  EXPECT_NEAR(std::exp(a.intercept), 3.0, 1e-10);
  EXPECT_NEAR(a.r_squared, 1.0, 1e-12);
  EXPECT_EQ(a.points, 191);
  const RateFit b = fit_rate_slope(ks, zs, 10, 200);
  EXPECT_NEAR(b.slope, -1.5, 1e-12);
  EXPECT_EQ(b.warnings.size(), 1u);
  EXPECT_THROW(fit_rate_slope(ks, ys, 0, 10), std::invalid_argument);
  EXPECT_THROW(fit_rate_slope(ks, ys, 300, 400), std::invalid_argument);
}

TEST(ReferenceSaddle, L1L2KktResidual) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const L1L2Instance inst = gen_l1l2(30, 50, 1.5, 0.1, 1e-6, seed);
    const std::optional<SaddlePointCertificate> s = solve_l1l2_saddle(inst.problem);
    ASSERT_TRUE(s.has_value());
    const KktResidual r = kkt_residual(inst.problem, s->x_star, s->lambda_star);
    EXPECT_LE(std::max(r.stationarity, r.feasibility), 1e-9);
    EXPECT_NEAR(s->opt_value, inst.problem.objective(s->x_star), 1e-12 * std::max(1.0, s->opt_value));
  }
}

TEST(Experiment, ScalarRegressionMatchesReference) {
  ExperimentSpec spec = preset("scalar");
  spec.name = "scalar_regression";
  spec.iterations = 50;
  spec.reference_csv = std::string(IAPDA_TEST_DATA) + "/scalar_reference.csv";
  spec.output_dir = scratch_dir("scalar").string();
  const ExperimentResult res = run_experiment(spec);
  EXPECT_EQ(res.exit_code, 0);
  ASSERT_EQ(res.outcomes.size(), 1u);
  EXPECT_EQ(res.outcomes[0].status, "ok") << res.outcomes[0].message;
  EXPECT_EQ(res.outcomes[0].certificate.rfind("pass", 0), 0u) << res.outcomes[0].certificate;
}

TEST(Experiment, ReferenceMismatchIsReported) {
  ExperimentSpec spec = preset("scalar");
  spec.iterations = 50;
  spec.solvers[0].alpha = 4.0;
  spec.reference_csv = std::string(IAPDA_TEST_DATA) + "/scalar_reference.csv";
  spec.output_dir = scratch_dir("mismatch").string();
  const ExperimentResult res = run_experiment(spec);
  EXPECT_EQ(res.exit_code, 1);
  EXPECT_EQ(res.outcomes[0].status, "reference_mismatch");
}

TEST(Experiment, ZeroIterationsWritesSummary) {
  ExperimentSpec spec = preset("scalar");
  spec.name = "zero";
  spec.iterations = 0;
  spec.output_dir = scratch_dir("zero").string();
  const ExperimentResult res = run_experiment(spec);
  const std::string summary = slurp(spec.output_dir + "/zero.summary.csv");
  std::istringstream lines(summary);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_NE(header.find("feas_slope"), std::string::npos);
  EXPECT_NE(row.find("iapda"), std::string::npos);
  EXPECT_EQ(res.outcomes[0].trace.rows.size(), 1u);
}

TEST(Experiment, TracesAreByteIdenticalAcrossRuns) {
  ExperimentSpec spec = preset("example5.3");
  spec.m = 30;
  spec.n = 40;
  spec.iterations = 60;
  spec.svg = true;
  spec.output_dir = scratch_dir("repeat_a").string();
  const ExperimentResult a = run_experiment(spec);
  spec.output_dir = scratch_dir("repeat_b").string();
  const ExperimentResult b = run_experiment(spec);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) {
    EXPECT_EQ(std::filesystem::path(a.files[i]).filename(), std::filesystem::path(b.files[i]).filename());
    EXPECT_EQ(slurp(a.files[i]), slurp(b.files[i])) << a.files[i];
  }
  EXPECT_EQ(a.outcomes.size(), 3u);
}

TEST(Experiment, PresetParameters) {
  const ExperimentSpec e52 = preset("example5.2");
  EXPECT_EQ(e52.m, 150);
  EXPECT_EQ(e52.n, 200);
  EXPECT_EQ(e52.iterations, 100);
  ASSERT_GE(e52.solvers.size(), 2u);
  EXPECT_EQ(e52.solvers[0].rho, 1e-4);
  EXPECT_EQ(e52.solvers[0].sigma, 10.0);
  EXPECT_EQ(*e52.solvers[0].beta0, 2.0);
  EXPECT_EQ(e52.solvers[0].rule, "cd");
  EXPECT_EQ(e52.solvers[0].alpha, 15.0);
  const ExperimentSpec full = preset("example5.2", true);
  EXPECT_EQ(full.m, 1500);
  EXPECT_EQ(full.n, 2000);
  const ExperimentSpec e53 = preset("example5.3", true);
  EXPECT_EQ(e53.m, 500);
  EXPECT_EQ(e53.n, 1000);
  EXPECT_EQ(e53.density, 0.5);
  EXPECT_THROW(preset("nope"), ConfigError);
}

TEST(Experiment, JsonOverridesAndErrors) {
  const ExperimentSpec s = experiment_from_json(json::parse(R"({"preset":"desk","iterations":12,"fit_window":[2,10]})"));
  EXPECT_EQ(s.iterations, 12);
  EXPECT_EQ(s.fit_lo, 2.0);
  EXPECT_EQ(s.fit_hi, 10.0);
  EXPECT_THROW(experiment_from_json(json::parse(R"({"kind":"weird","solvers":[{"name":"iapda"}]})")), ConfigError);
  EXPECT_THROW(experiment_from_json(json::parse(R"({"kind":"scalar","solvers":[{"name":"admm"}]})")), ConfigError);
  EXPECT_THROW(experiment_from_json(json::parse(R"({"kind":"scalar","solvers":[]})")), ConfigError);
  EXPECT_THROW(experiment_from_json(json::parse(R"({"kind":"scalar","iterations":"many"})")), ConfigError);
  EXPECT_THROW(read_experiment("/nonexistent/spec.json"), ConfigError);
}

TEST(Simulation, JsonConfigAndScalarRun) {
  const SimulationSpec s =
      simulation_from_json(json::parse(R"({"alpha":4,"beta_p":0.5,"t_end":3,"h":0.01,"output_stride":10})"));
  EXPECT_EQ(s.config.alpha, 4.0);
  EXPECT_EQ(s.config.output_stride, 10);
  const SimulationRun run = run_simulation(s);
  ASSERT_FALSE(run.trajectory.aborted);
  EXPECT_EQ(run.trajectory.records.size(), 21u);
  EXPECT_EQ(run.trajectory.records.front().state.x[0], 1.0);
  EXPECT_THROW(simulation_from_json(json::parse(R"({"alpha":3,"beta_p":1})")), ConfigError);
  EXPECT_THROW(simulation_from_json(json::parse(R"({"h":"small"})")), ConfigError);
}
