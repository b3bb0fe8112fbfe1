// qrg — robustness measures, channel-discrimination games, and certification
// campaigns from the command line. Exit codes: 0 certified / all pass,
// 1 usage, parse, or numerical error, 2 infinite-robustness classification.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "qrg/certify.hpp"
#include "qrg/constructions.hpp"
#include "qrg/json_io.hpp"

namespace {

using qrg::Json;

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qrg::ArgumentError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw qrg::ArgumentError("parse error in '" + path + "': " + e.what());
  }
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qrg::ArgumentError("cannot write '" + path + "'");
  out << text;
}

void emit(const Json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

void print_ledger(const qrg::InstanceReport& inst) {
  std::printf("  seed %llu [%s] %s\n", static_cast<unsigned long long>(inst.seed),
              inst.target.c_str(), inst.pass ? "pass" : "FAIL");
  if (!inst.error.empty()) std::printf("    error: %s\n", inst.error.c_str());
  for (const auto& l : inst.ledger)
    std::printf("    %-55s value % .6e bound % .6e margin % .3e %s\n", l.name.c_str(),
                l.value, l.bound, l.margin, l.pass ? "ok" : "VIOLATED");
}

struct CommonOpts {
  std::string out_path;
  std::string format = "json";
  double tol = 1e-7;
  int verbosity = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--out", o.out_path, "output file (stdout if omitted)");
  cmd->add_option("--format", o.format, "json|pretty")
      ->check(CLI::IsMember({"json", "pretty", "csv"}));
  cmd->add_option("--tol", o.tol, "solver tolerance")->check(CLI::Range(1e-10, 1e-4));
  cmd->add_flag("-v,--verbose", o.verbosity, "verbose progress on stderr");
}

int cmd_robustness(const std::string& in_path, const CommonOpts& o) {
  const Json j = load_json(in_path);
  const qrg::DensityMatrix rho = qrg::DensityMatrix::make(qrg::mat_from_json(j.at("state")));
  const qrg::FreeSet f = qrg::free_set_from_json(j.at("free_set"));
  const qrg::RobustnessResult res = qrg::robustness(rho, f, o.tol);

  if (std::holds_alternative<qrg::InfiniteRobustness>(res)) {
    const auto& inf = std::get<qrg::InfiniteRobustness>(res);
    emit(qrg::to_json(inf), o.out_path);
    if (o.format == "pretty")
      std::printf("infinite robustness: Tr(Pρ) = %.6e\n", inf.tr_p_rho);
    return 2;
  }
  const auto& cert = std::get<qrg::RobustnessCertificate>(res);
  emit(qrg::to_json(cert), o.out_path);
  if (o.format == "pretty")
    std::printf("λ* = %.9f  gap = %.3e  dual residual = %.3e\n", cert.lambda_star, cert.gap,
                cert.slack.dual_residual);
  return 0;
}

int cmd_discriminate(const std::string& game_path, const std::string& state_path,
                     const CommonOpts& o) {
  const qrg::ChannelEnsemble game = qrg::ensemble_from_json(load_json(game_path));
  const qrg::DensityMatrix rho =
      qrg::DensityMatrix::make(qrg::mat_from_json(load_json(state_path)));
  const qrg::DiscriminationCertificate cert = qrg::optimal_success(rho, game, o.tol);
  emit(qrg::to_json(cert), o.out_path);
  std::printf("value = %.9f  gap = %.3e\n", cert.value, cert.gap);
  return 0;
}

int cmd_random(std::uint64_t seed, const std::string& target, int dim_a, int dim_c,
               int generators, const std::string& state_kind, const CommonOpts& o) {
  qrg::InstanceSpec spec;
  spec.seed = seed;
  spec.target = qrg::certify_target_from_string(target);
  spec.dim_a = dim_a;
  spec.dim_c = dim_c;
  spec.generator_count = generators;
  spec.state_kind = state_kind;
  auto [rho, f] = qrg::random_instance(spec);
  Json out;
  out["state"] = qrg::to_json(rho.mat());
  out["free_set"] = qrg::to_json(f);
  emit(out, o.out_path);
  return 0;
}

int cmd_certify(const std::string& target_str, const std::string& spec_path,
                std::uint64_t seed, int count, int dim_a, int dim_c, double epsilon,
                int n_levels, int samples, int workers, const std::string& csv_path,
                const CommonOpts& o) {
  std::vector<qrg::InstanceSpec> specs;
  if (!spec_path.empty()) {
    const Json j = load_json(spec_path);
    const Json& list = j.is_array() ? j : j.at("instances");
    for (const auto& js : list) specs.push_back(qrg::instance_spec_from_json(js));
  } else {
    qrg::InstanceSpec defaults;
    defaults.dim_a = dim_a;
    defaults.dim_c = dim_c;
    defaults.tol = o.tol;
    defaults.epsilon = epsilon;
    defaults.n_levels = n_levels;
    defaults.samples = samples;
    specs = qrg::build_campaign(qrg::certify_target_from_string(target_str), seed, count,
                                defaults);
  }

  const auto t0 = std::chrono::steady_clock::now();
  const qrg::CampaignReport report = qrg::run_campaign(specs, workers);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::fprintf(stderr, "campaign: %d pass, %d fail in %.2fs\n", report.pass_count,
               report.fail_count, secs);

  emit(qrg::to_json(report), o.out_path);
  if (!csv_path.empty()) write_text(csv_path, qrg::campaign_csv(report));
  if (o.format == "pretty")
    for (const auto& inst : report.instances) print_ledger(inst);
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"robustness of quantum states and channel-discrimination games"};
  app.require_subcommand(1);

  CommonOpts rob_opts, disc_opts, cert_opts, rand_opts;
  std::string rob_in;
  auto* rob = app.add_subcommand("robustness", "certified robustness of a state vs a free set");
  rob->add_option("--in", rob_in, "instance JSON with fields state/free_set")->required();
  add_common(rob, rob_opts);

  std::string disc_game, disc_state;
  auto* disc = app.add_subcommand("discriminate", "optimal success probability for a game");
  disc->add_option("--game", disc_game, "game JSON")->required();
  disc->add_option("--state", disc_state, "probe state JSON (matrix schema)")->required();
  add_common(disc, disc_opts);

  std::string cert_target, cert_spec, cert_csv;
  std::uint64_t cert_seed = 1;
  int cert_count = 10, cert_dim_a = 2, cert_dim_c = 2, cert_n = 8, cert_samples = 5,
      cert_workers = 0, n_max = 0;
  double cert_eps = 0.05;
  auto* cert = app.add_subcommand("certify", "run a certification campaign");
  cert->add_option("target", cert_target, "thm1|cor1|thm2|appc|appd")
      ->required()
      ->check(CLI::IsMember({"thm1", "cor1", "thm2", "appc", "appd"}));
  cert->add_option("--spec", cert_spec, "campaign spec JSON (overrides flags)");
  cert->add_option("--seed", cert_seed, "base seed");
  cert->add_option("--count", cert_count, "instance count")->check(CLI::PositiveNumber);
  cert->add_option("--dim-a", cert_dim_a, "system A levels")->check(CLI::Range(1, 16));
  cert->add_option("--dim-c", cert_dim_c, "ancilla C levels")->check(CLI::Range(1, 16));
  cert->add_option("--epsilon", cert_eps, "ancilla compilation margin")
      ->check(CLI::Range(0.0, 1.0));
  cert->add_option("--n", cert_n, "level count for divergence/structural games")
      ->check(CLI::Range(2, 256));
  cert->add_option("--samples", cert_samples, "sampled checks per instance")
      ->check(CLI::PositiveNumber);
  cert->add_option("--workers", cert_workers, "campaign worker threads (0 = auto)");
  cert->add_option("--n-max", n_max, "override the compiled-game level cap")
      ->check(CLI::Range(2, 256));
  cert->add_option("--csv", cert_csv, "also write a CSV summary");
  add_common(cert, cert_opts);

  std::string rand_target = "thm1", rand_state = "random-mixed";
  std::uint64_t rand_seed = 1;
  int rand_dim_a = 2, rand_dim_c = 2, rand_gens = 3;
  auto* rnd = app.add_subcommand("random", "generate a seeded (state, free set) instance");
  rnd->add_option("--seed", rand_seed, "seed");
  rnd->add_option("--target", rand_target, "instance family")
      ->check(CLI::IsMember({"thm1", "cor1", "thm2", "appc", "appd"}));
  rnd->add_option("--dim-a", rand_dim_a, "system A levels")->check(CLI::Range(1, 16));
  rnd->add_option("--dim-c", rand_dim_c, "ancilla C levels")->check(CLI::Range(1, 16));
  rnd->add_option("--generators", rand_gens, "random generators on top of I/d")
      ->check(CLI::PositiveNumber);
  rnd->add_option("--state-kind", rand_state, "random-mixed|random-pure|hull-point");
  add_common(rnd, rand_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // usage and parse problems are exit 1 by contract; --help stays 0
    return code == 0 ? 0 : 1;
  }

  try {
    if (rob->parsed()) return cmd_robustness(rob_in, rob_opts);
    if (disc->parsed()) return cmd_discriminate(disc_game, disc_state, disc_opts);
    if (cert->parsed()) {
      if (n_max > 0) qrg::set_game_level_cap(n_max);
      return cmd_certify(cert_target, cert_spec, cert_seed, cert_count, cert_dim_a,
                         cert_dim_c, cert_eps, cert_n, cert_samples, cert_workers, cert_csv,
                         cert_opts);
    }
    if (rnd->parsed())
      return cmd_random(rand_seed, rand_target, rand_dim_a, rand_dim_c, rand_gens, rand_state,
                        rand_opts);
  } catch (const qrg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 1;
  }
  return 1;
}
