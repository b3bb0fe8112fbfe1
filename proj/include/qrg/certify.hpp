#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qrg/freesets.hpp"
#include "qrg/games.hpp"
#include "qrg/rng.hpp"

namespace qrg {

enum class CertifyTarget { thm1, cor1, thm2, appc, appd };

const char* to_string(CertifyTarget t);
CertifyTarget certify_target_from_string(const std::string& s);

/// One seeded certification instance. The seed determines every random draw,
/// so identical specs produce identical reports.
struct InstanceSpec {
  std::uint64_t seed = 0;
  CertifyTarget target = CertifyTarget::thm1;
  int dim_a = 2;
  int dim_c = 2;               // ancilla targets
  int generator_count = 3;     // random generators drawn on top of I/d
  double tol = 1e-7;
  double epsilon = 0.05;       // ancilla compilation margin
  int n_levels = 8;            // divergence games; structural-suite game size
  int samples = 5;             // per-instance sample count for sampled checks
  std::string state_kind = "random-mixed";  // random-mixed | random-pure | hull-point | explicit
  std::optional<Mat> explicit_state;
  std::optional<FreeSet> explicit_free_set;
};

/// One certified inequality: pass iff margin ≥ 0 (value satisfies the bound
/// with the stated tolerance already folded into the margin).
struct LedgerLine {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
};

struct InstanceReport {
  std::uint64_t seed = 0;
  std::string target;
  bool pass = false;
  std::string error;  // nonempty when the instance aborted
  std::vector<LedgerLine> ledger;
  double lambda_star = 0.0;
  double gap = 0.0;
  double ratio = 0.0;
  double worst_margin = 0.0;
  GameReport game_report;
};

struct CampaignReport {
  std::vector<InstanceReport> instances;
  int pass_count = 0;
  int fail_count = 0;
  double worst_margin = 0.0;

  bool all_pass() const { return fail_count == 0; }
};

/// Seeded instance generation: mixed states are fixed-spectrum diagonals
/// conjugated by seeded unitaries; polytope generators are drawn likewise with
/// I/d always appended (so the hull has full support and finite robustness).
std::pair<DensityMatrix, FreeSet> random_instance(const InstanceSpec& spec);

InstanceReport run_instance(const InstanceSpec& spec);

/// Executes the matching pipeline per instance. Individual failures are
/// recorded and the campaign continues; construction-bug invariant errors
/// abort with the offending seed. Instance order never affects the report.
CampaignReport run_campaign(const std::vector<InstanceSpec>& specs, int workers = 0);

/// Standard seeded campaign: `count` instances with seeds base_seed+i and
/// seed-derived generator counts (polytopes of 2–5 generators, C-flexible
/// models of 2–3 A-generators, hull-point probes on odd cor1 seeds).
std::vector<InstanceSpec> build_campaign(CertifyTarget target, std::uint64_t base_seed,
                                         int count, const InstanceSpec& defaults);

}  // namespace qrg
