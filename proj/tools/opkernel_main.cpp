// opkernel: positivity checks, Stinespring-type factorization, kernel
// domination analysis and channel simulation for operator-valued kernels.
//
// Exit status contract:
//   0  success / affirmative decision
//   1  well-formed negative (not in the class, not dominated, check failed)
//   2  malformed input (bad file, bad shape, bad arguments)
//   3  numerical failure (a residual threshold was exceeded)

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opkernel/io.hpp"

namespace {

using namespace opk;

struct Tolerances {
  double psd = kDefaultPsdTol;
  double rank = kDefaultRankTol;
  double cert = kDefaultCertTol;
};

enum class Command {
  check,
  factor,
  dominate,
  rn,
  irreducible,
  channel_sim,
  generate,
  verify
};

const char* command_name(Command c) {
  switch (c) {
    case Command::check: return "check";
    case Command::factor: return "factor";
    case Command::dominate: return "dominate";
    case Command::rn: return "rn";
    case Command::irreducible: return "irreducible";
    case Command::channel_sim: return "channel-sim";
    case Command::generate: return "generate";
    case Command::verify: return "verify";
  }
  return "?";
}

struct RunConfig {
  Command command = Command::check;
  std::vector<std::string> input_paths;
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::string output_path;  // artifact output (factorization, certificate, ...)
  std::string report_path;  // report document; empty = standard output

  std::string fact_path;
  std::string effect_path;
  std::string reference_path;
  std::string sidecar_path;
  std::string dominated_out;
  std::vector<std::string> dominated;  // mode, optional lambda
  double scalar_lambda = -1.0;         // <0 = unset
  double verify_tol = 1e-8;
  int points = 2;
  int hdim = 1;
  int rep_mult = 1;
  std::vector<int> blocks;
  std::vector<int> mults;
  std::string algebra_path;
};

json base_report(const RunConfig& config) {
  json j;
  j["command"] = command_name(config.command);
  j["inputs"] = config.input_paths;
  j["tolerances"] = {{"psd_tol", config.tolerances.psd},
                     {"rank_tol", config.tolerances.rank},
                     {"cert_tol", config.tolerances.cert}};
  return j;
}

void emit(const RunConfig& config, const json& report) {
  if (config.report_path.empty())
    std::cout << dump_json(report);
  else
    write_json_file(config.report_path, report);
}

OperatorKernel load_kernel(const std::string& path) {
  return kernel_from_json(load_json_file(path));
}

Factorization load_or_factor(const RunConfig& config, const OperatorKernel& K) {
  if (!config.fact_path.empty())
    return factorization_from_json(load_json_file(config.fact_path), K);
  return factor(K, config.tolerances.rank, config.tolerances.psd);
}

int run_check(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  const ClassMDecision d = is_in_class_M(K, config.tolerances.psd);
  json report = base_report(config);
  report["in_class_M"] = d.in_class;
  report["lambda_min"] = d.lambda_min;
  report["lambda_max"] = d.lambda_max;
  report["witness"] = d.witness ? witness_to_json(*d.witness) : json(nullptr);
  emit(config, report);
  return d.in_class ? 0 : 1;
}

int run_factor(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  const Factorization fact =
      factor(K, config.tolerances.rank, config.tolerances.psd);
  json report = base_report(config);
  report["r"] = fact.r;
  report["diagnostics"] = {
      {"gram_truncation_error", fact.diagnostics.gram_truncation_error},
      {"pi_residual", fact.diagnostics.pi_residual},
      {"reconstruction_residual", fact.diagnostics.reconstruction_residual}};
  if (!config.output_path.empty()) {
    write_json_file(config.output_path, factorization_to_json(fact));
    report["output"] = config.output_path;
  }
  emit(config, report);
  return 0;
}

int run_dominate(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  const OperatorKernel L = load_kernel(config.input_paths[1]);
  const DominationDecision d = dominates(K, L, config.tolerances.psd);
  json report = base_report(config);
  report["dominated"] = d.dominated;
  report["difference_lambda_min"] = d.lambda_min;
  report["witness"] = d.witness ? witness_to_json(*d.witness) : json(nullptr);
  emit(config, report);
  return d.dominated ? 0 : 1;
}

int run_rn(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  const OperatorKernel L = load_kernel(config.input_paths[1]);
  const Factorization fact_L = load_or_factor(config, L);
  const DominationCertificate cert = radon_nikodym(
      K, L, fact_L, config.tolerances.cert, config.tolerances.psd);
  // irreducible representations must yield a scalar derivative
  const auto lambda = scalar_ratio(cert, config.tolerances.cert, &fact_L);

  json report = base_report(config);
  report["r"] = fact_L.r;
  report["spectrum_T_min"] =
      cert.spectrum_T.size() ? cert.spectrum_T(0) : 0.0;
  report["spectrum_T_max"] =
      cert.spectrum_T.size() ? cert.spectrum_T(cert.spectrum_T.size() - 1)
                             : 0.0;
  report["residuals"] = {{"commutant", cert.commutant_residual},
                         {"reconstruction", cert.reconstruction_residual}};
  report["lambda"] = lambda ? complex_to_json(*lambda) : json(nullptr);
  if (!config.output_path.empty()) {
    write_json_file(config.output_path, certificate_to_json(cert));
    report["output"] = config.output_path;
  }
  emit(config, report);
  return 0;
}

int run_irreducible(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  const Factorization fact = load_or_factor(config, K);
  const std::vector<Matrix> basis = commutant(fact);
  if (fact.r == 0)
    throw InvalidArgumentError("irreducible: kernel has an empty dilation");
  const bool irr = basis.size() == 1;
  json report = base_report(config);
  report["r"] = fact.r;
  report["commutant_dim"] = basis.size();
  report["irreducible"] = irr;
  emit(config, report);
  return irr ? 0 : 1;
}

int run_channel_sim(const RunConfig& config) {
  const OperatorKernel L = load_kernel(config.input_paths[0]);
  if (config.fact_path.empty())
    throw InvalidArgumentError("channel-sim: --fact is required");
  const Factorization fact_L =
      factorization_from_json(load_json_file(config.fact_path), L);

  Effect effect =
      !config.effect_path.empty()
          ? effect_from_certificate(
                certificate_from_json(load_json_file(config.effect_path)),
                config.tolerances.cert)
          : scalar_effect(config.scalar_lambda, fact_L.r);

  const OperatorKernel sim = simulate_kernel(L, fact_L, effect);

  json report = base_report(config);
  Eigen::SelfAdjointEigenSolver<Matrix> es(effect.A);
  report["effect_spectrum"] = {
      es.eigenvalues().size() ? es.eigenvalues()(0) : 0.0,
      es.eigenvalues().size()
          ? es.eigenvalues()(es.eigenvalues().size() - 1)
          : 0.0};
  if (!config.reference_path.empty()) {
    const OperatorKernel ref = load_kernel(config.reference_path);
    const OperatorKernel diff = subtract(sim, ref);
    double worst = 0.0;
    for (const Matrix& b : diff.blocks()) worst = std::max(worst, b.norm());
    report["reference_residual"] = worst / std::max(1.0, ref.tensor_norm());
  }
  if (!config.output_path.empty()) {
    write_json_file(config.output_path, kernel_to_json(sim));
    report["output"] = config.output_path;
  }
  emit(config, report);
  return 0;
}

int run_generate(const RunConfig& config) {
  GeneratedKernel gen = [&]() {
    if (!config.algebra_path.empty()) {
      AlgebraPtr alg = algebra_from_json(load_json_file(config.algebra_path));
      return random_group_kernel(alg, config.points, config.hdim,
                                 config.rep_mult, config.seed);
    }
    RandomKernelParams params;
    params.m = config.points;
    params.hdim = config.hdim;
    params.block_dims = config.blocks;
    params.feature_multiplicities =
        config.mults.empty() ? std::vector<int>(config.blocks.size(), 1)
                             : config.mults;
    params.seed = config.seed;
    return random_in_M(params);
  }();

  if (config.output_path.empty())
    throw InvalidArgumentError("generate: -o/--out is required");
  write_json_file(config.output_path, kernel_to_json(gen.kernel));

  json report = base_report(config);
  report["seed"] = config.seed;
  report["output"] = config.output_path;
  report["r"] = gen.truth.r;

  std::optional<Complex> intended_lambda;
  std::optional<Matrix> contraction;
  if (!config.dominated.empty()) {
    const std::string& mode = config.dominated[0];
    Matrix P;
    if (mode == "scalar") {
      const double lam = config.dominated.size() > 1
                             ? std::stod(config.dominated[1])
                             : 0.25;
      if (lam < 0.0 || lam > 1.0)
        throw InvalidArgumentError(
            "generate: scalar companion weight must lie in [0,1]");
      P = lam * Matrix::Identity(gen.truth.r, gen.truth.r);
      intended_lambda = Complex(lam, 0.0);
    } else if (mode == "commutant") {
      P = random_psd_commutant_contraction(gen.truth.pi, config.seed + 1);
    } else {
      throw InvalidArgumentError(
          "generate: --dominated mode must be scalar or commutant");
    }
    contraction = P;
    const OperatorKernel companion =
        build_kernel(gen.kernel.points(), gen.kernel.hdim(),
                     gen.kernel.algebra(), gen.truth.V, gen.truth.pi, &P);
    if (config.dominated_out.empty())
      throw InvalidArgumentError(
          "generate: --dominated requires --dominated-out");
    write_json_file(config.dominated_out, kernel_to_json(companion));
    report["dominated_output"] = config.dominated_out;
  }

  if (!config.sidecar_path.empty()) {
    json side;
    side["r"] = gen.truth.r;
    json V = json::object();
    for (std::size_t t = 0; t < gen.truth.V.size(); ++t)
      V[std::to_string(t + 1)] = matrix_to_json(gen.truth.V[t]);
    side["V"] = std::move(V);
    json pi = json::object();
    for (std::size_t a = 0; a < gen.truth.pi.size(); ++a)
      pi[std::to_string(a + 1)] = matrix_to_json(gen.truth.pi[a]);
    side["pi"] = std::move(pi);
    if (!gen.truth.multiplicities.empty()) {
      int cdim = 0;
      for (int mult : gen.truth.multiplicities) cdim += mult * mult;
      side["commutant_dim"] = cdim;
      side["multiplicities"] = gen.truth.multiplicities;
    } else {
      side["commutant_dim"] = commutant_basis(gen.truth.pi).size();
    }
    side["lambda"] = intended_lambda ? complex_to_json(*intended_lambda)
                                     : json(nullptr);
    side["contraction"] =
        contraction ? matrix_to_json(*contraction) : json(nullptr);
    write_json_file(config.sidecar_path, side);
    report["sidecar"] = config.sidecar_path;
  }
  emit(config, report);
  return 0;
}

int run_verify(const RunConfig& config) {
  const OperatorKernel K = load_kernel(config.input_paths[0]);
  if (config.fact_path.empty())
    throw InvalidArgumentError("verify: --fact is required");
  const Factorization fact =
      factorization_from_json(load_json_file(config.fact_path), K);
  const VerifyReport rep = verify(fact, K, config.verify_tol);

  json report = base_report(config);
  auto check_json = [](const CheckResult& c) {
    return json{{"pass", c.pass}, {"residual", c.residual}};
  };
  report["checks"] = {{"star_law", check_json(rep.star_law)},
                      {"homomorphism", check_json(rep.homomorphism)},
                      {"unitality", check_json(rep.unitality)},
                      {"reconstruction", check_json(rep.reconstruction)},
                      {"minimality", check_json(rep.minimality)}};
  report["all_pass"] = rep.all_pass();
  emit(config, report);
  return rep.all_pass() ? 0 : 1;
}

int run(const RunConfig& config) {
  switch (config.command) {
    case Command::check: return run_check(config);
    case Command::factor: return run_factor(config);
    case Command::dominate: return run_dominate(config);
    case Command::rn: return run_rn(config);
    case Command::irreducible: return run_irreducible(config);
    case Command::channel_sim: return run_channel_sim(config);
    case Command::generate: return run_generate(config);
    case Command::verify: return run_verify(config);
  }
  return 2;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::negative: return 1;
    case ErrorKind::malformed: return 2;
    case ErrorKind::numerical: return 3;
  }
  return 2;
}

void add_tolerance_options(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--psd-tol", config.tolerances.psd,
                  "positivity tolerance (default 1e-9)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--rank-tol", config.tolerances.rank,
                  "rank truncation tolerance (default 1e-10)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--cert-tol", config.tolerances.cert,
                  "certificate tolerance (default 1e-8)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--report", config.report_path,
                  "write the report here instead of standard output");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig config;
  CLI::App app{"numerical toolkit for operator-valued positive definite "
               "kernels"};
  app.require_subcommand(1);

  auto* check = app.add_subcommand("check", "test class membership");
  check->add_option("kernel", config.input_paths, "kernel file")
      ->required()
      ->expected(1);
  add_tolerance_options(check, config);

  auto* fac = app.add_subcommand("factor", "minimal Stinespring factorization");
  fac->add_option("kernel", config.input_paths, "kernel file")
      ->required()
      ->expected(1);
  fac->add_option("-o,--out", config.output_path, "factorization export path");
  add_tolerance_options(fac, config);

  auto* dom = app.add_subcommand("dominate", "test K <= L");
  dom->add_option("kernels", config.input_paths, "K file, then L file")
      ->required()
      ->expected(2);
  add_tolerance_options(dom, config);

  auto* rn = app.add_subcommand("rn", "Radon-Nikodym derivative dK/dL");
  rn->add_option("kernels", config.input_paths, "K file, then L file")
      ->required()
      ->expected(2);
  rn->add_option("--fact", config.fact_path, "factorization export of L");
  rn->add_option("-o,--out", config.output_path, "certificate export path");
  add_tolerance_options(rn, config);

  auto* irr = app.add_subcommand("irreducible",
                                 "test irreducibility of the representation");
  irr->add_option("kernel", config.input_paths, "kernel file")
      ->required()
      ->expected(1);
  irr->add_option("--fact", config.fact_path, "factorization export");
  add_tolerance_options(irr, config);

  auto* sim = app.add_subcommand("channel-sim",
                                 "simulate a dominated kernel by effect "
                                 "post-processing");
  sim->add_option("kernel", config.input_paths, "kernel file for L")
      ->required()
      ->expected(1);
  sim->add_option("--fact", config.fact_path, "factorization export of L")
      ->required();
  auto* source = sim->add_option_group("effect source");
  source->add_option("--effect", config.effect_path,
                     "certificate file supplying the effect A");
  source->add_option("--scalar", config.scalar_lambda,
                     "scalar effect A = lambda I");
  source->require_option(1);
  sim->add_option("-o,--out", config.output_path, "simulated kernel path");
  sim->add_option("--reference", config.reference_path,
                  "kernel file to compare the simulation against");
  add_tolerance_options(sim, config);

  auto* gen = app.add_subcommand("generate", "seeded random instances");
  gen->add_option("--points", config.points, "number of points (default 2)")
      ->check(CLI::PositiveNumber);
  gen->add_option("--hdim", config.hdim, "dimension of H (default 1)")
      ->check(CLI::PositiveNumber);
  gen->add_option("--blocks", config.blocks, "algebra block dimensions")
      ->delimiter(',');
  gen->add_option("--mults", config.mults,
                  "representation multiplicities per block (default all 1)")
      ->delimiter(',');
  gen->add_option("--algebra", config.algebra_path,
                  "group algebra file (alternative to --blocks)");
  gen->add_option("--rep-mult", config.rep_mult,
                  "regular-representation multiplicity for --algebra")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", config.seed, "generator seed (default 0)");
  gen->add_option("-o,--out", config.output_path, "kernel output path")
      ->required();
  gen->add_option("--sidecar", config.sidecar_path,
                  "ground-truth sidecar path (test use only)");
  gen->add_option("--dominated", config.dominated,
                  "emit a dominated companion: scalar [lambda] | commutant")
      ->expected(1, 2);
  gen->add_option("--dominated-out", config.dominated_out,
                  "companion kernel output path");
  add_tolerance_options(gen, config);

  auto* ver = app.add_subcommand("verify",
                                 "verify a factorization against its kernel");
  ver->add_option("kernel", config.input_paths, "kernel file")
      ->required()
      ->expected(1);
  ver->add_option("--fact", config.fact_path, "factorization export")
      ->required();
  ver->add_option("--tol", config.verify_tol, "verification tolerance")
      ->check(CLI::PositiveNumber);
  add_tolerance_options(ver, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  if (check->parsed()) config.command = Command::check;
  else if (fac->parsed()) config.command = Command::factor;
  else if (dom->parsed()) config.command = Command::dominate;
  else if (rn->parsed()) config.command = Command::rn;
  else if (irr->parsed()) config.command = Command::irreducible;
  else if (sim->parsed()) config.command = Command::channel_sim;
  else if (gen->parsed()) config.command = Command::generate;
  else if (ver->parsed()) config.command = Command::verify;

  try {
    return run(config);
  } catch (const NotPositiveError& e) {
    json report = base_report(config);
    report["error"] = {{"kind", "negative"}, {"message", e.what()}};
    report["witness"] = witness_to_json(e.witness());
    emit(config, report);
    return 1;
  } catch (const NotDominatedError& e) {
    json report = base_report(config);
    report["error"] = {{"kind", "negative"}, {"message", e.what()}};
    report["witness"] = witness_to_json(e.witness());
    emit(config, report);
    return 1;
  } catch (const Error& e) {
    json report = base_report(config);
    const char* kind = e.kind() == ErrorKind::negative    ? "negative"
                       : e.kind() == ErrorKind::malformed ? "malformed"
                                                          : "numerical";
    report["error"] = {{"kind", kind}, {"message", e.what()}};
    emit(config, report);
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
