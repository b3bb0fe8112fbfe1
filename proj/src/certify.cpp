#include "qrg/certify.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "qrg/constructions.hpp"

namespace qrg {

const char* to_string(CertifyTarget t) {
  switch (t) {
    case CertifyTarget::thm1: return "thm1";
    case CertifyTarget::cor1: return "cor1";
    case CertifyTarget::thm2: return "thm2";
    case CertifyTarget::appc: return "appc";
    case CertifyTarget::appd: return "appd";
  }
  return "thm1";
}

CertifyTarget certify_target_from_string(const std::string& s) {
  if (s == "thm1") return CertifyTarget::thm1;
  if (s == "cor1") return CertifyTarget::cor1;
  if (s == "thm2") return CertifyTarget::thm2;
  if (s == "appc") return CertifyTarget::appc;
  if (s == "appd") return CertifyTarget::appd;
  throw ArgumentError("unknown certification target '" + s + "'");
}

namespace {

// value ≤ bound (+tol): margin = bound + tol − value.
void line_le(std::vector<LedgerLine>& led, const std::string& name, double value,
             double bound, double tol) {
  LedgerLine l;
  l.name = name;
  l.value = value;
  l.bound = bound;
  l.margin = bound + tol - value;
  l.pass = l.margin >= 0.0;
  led.push_back(std::move(l));
}

// value ≥ bound (−tol): margin = value − bound + tol.
void line_ge(std::vector<LedgerLine>& led, const std::string& name, double value,
             double bound, double tol) {
  LedgerLine l;
  l.name = name;
  l.value = value;
  l.bound = bound;
  l.margin = value - bound + tol;
  l.pass = l.margin >= 0.0;
  led.push_back(std::move(l));
}

void finalize(InstanceReport& rep) {
  rep.pass = rep.error.empty();
  rep.worst_margin = 1e300;
  for (const auto& l : rep.ledger) {
    rep.pass = rep.pass && l.pass;
    rep.worst_margin = std::min(rep.worst_margin, l.margin);
  }
  if (rep.ledger.empty()) rep.worst_margin = 0.0;
}

DensityMatrix embedded_subspace_state(Rng& rng, int dim, int rank) {
  Mat block = rng.density_with_spectrum(default_spectrum(rank), rank);
  Mat full = Mat::Zero(dim, dim);
  full.topLeftCorner(rank, rank) = block;
  return DensityMatrix::make(full);
}

std::vector<DensityMatrix> polytope_generators(Rng& rng, int dim, int count) {
  std::vector<DensityMatrix> gens;
  for (int i = 0; i < count; ++i)
    gens.push_back(DensityMatrix::make(rng.mixed_state(dim)));
  gens.push_back(DensityMatrix::make(Mat::Identity(dim, dim) / dim));
  return gens;
}

void add_robustness_lines(std::vector<LedgerLine>& led, const RobustnessCertificate& cert) {
  line_le(led, "duality gap", cert.gap, 1e-6, 0.0);
  line_le(led, "complementary slackness (weights)", cert.slack.cs_weights, 1e-6, 0.0);
  line_le(led, "complementary slackness (slack)", cert.slack.cs_slack, 1e-6, 0.0);
  line_le(led, "witness budget excess", cert.slack.witness_budget_excess, 1e-8, 0.0);
  line_ge(led, "primal slack PSD floor", cert.slack.primal_psd_floor, 0.0, 1e-7);
  line_ge(led, "witness PSD floor", cert.slack.witness_psd_floor, 0.0, 1e-9);
}

// ---------------------------------------------------------------------------

InstanceReport pipeline_polytope_game(const InstanceSpec& spec, const DensityMatrix& rho,
                                      const PolytopeFreeSet& f, bool includes_max_mixed) {
  InstanceReport rep;
  rep.seed = spec.seed;
  rep.target = to_string(spec.target);

  const RobustnessResult res = robustness(rho, FreeSet{f}, spec.tol);
  if (std::holds_alternative<InfiniteRobustness>(res)) {
    rep.error = "unexpected infinite-robustness classification";
    finalize(rep);
    return rep;
  }
  const auto& cert = std::get<RobustnessCertificate>(res);
  rep.lambda_star = cert.lambda_star;
  rep.gap = cert.gap;
  add_robustness_lines(rep.ledger, cert);

  const DirectGameCompilation comp = compile_direct_game(rho, f, cert);
  const double num = optimal_success(rho, comp.game, spec.tol).value;
  const SupOverFree den = sup_over_free(FreeSet{f}, comp.game, spec.tol);
  rep.ratio = num / den.value;
  rep.game_report.numerator_value = num;
  rep.game_report.denominator_value = den.value;
  rep.game_report.ratio = rep.ratio;
  rep.game_report.robustness_reference = cert.lambda_star;

  const double target = 1.0 + cert.lambda_star;
  line_le(rep.ledger, "relative ratio error against 1+λ*",
          std::abs(rep.ratio - target) / target, 1e-4, 0.0);
  const double tr_x_rho = (cert.dual_witness * rho.mat()).trace().real();
  line_ge(rep.ledger, "ratio dominates the witness value", rep.ratio, tr_x_rho, 1e-5);
  const CovariantDiscrimination cyc = optimal_success_cyclic(rho, comp.game, spec.tol);
  line_le(rep.ledger, "covariant reduction agrees with dense solve",
          std::abs(num - cyc.value), 1e-6, 0.0);
  rep.game_report.covariant_scalar = cyc.base_effect(0, 0).real();
  const CovarianceReport cov = covariance_check(comp.game, comp.action);
  line_le(rep.ledger, "game covariance residual", cov.worst_residual, 1e-9, 0.0);
  if (includes_max_mixed)
    line_le(rep.ledger, "level count within d+1", comp.n_levels, f.dim + 1, 0.0);

  if (spec.target == CertifyTarget::cor1) {
    // Hull points never beat the generator maximum, so the ratio against the
    // nonconvex generator list equals the ratio against its convex hull.
    Rng rng(spec.seed * 977ULL + 13ULL);
    double hull_excess = -1e300;
    for (int s = 0; s < std::max(spec.samples, 1); ++s) {
      std::vector<double> w(f.generators.size());
      double total = 0.0;
      for (auto& wi : w) {
        wi = rng.uniform() + 1e-3;
        total += wi;
      }
      Mat v = Mat::Zero(f.dim, f.dim);
      for (size_t i = 0; i < w.size(); ++i) v += (w[i] / total) * f.generators[i].mat();
      const double val = optimal_success(DensityMatrix::trusted(v), comp.game, spec.tol).value;
      hull_excess = std::max(hull_excess, val - den.value);
    }
    line_le(rep.ledger, "hull samples within generator max", hull_excess, 0.0, 1e-7);
    const double den_hull = std::max(den.value, den.value + hull_excess);
    line_le(rep.ledger, "ratio(list) matches ratio(hull)",
            std::abs(num / den.value - num / den_hull), 1e-6, 0.0);
    if (spec.state_kind == "hull-point") {
      line_le(rep.ledger, "bound resource: robustness", cert.lambda_star, 1e-7, 0.0);
      line_le(rep.ledger, "bound resource: ratio", rep.ratio, 1.0, 1e-5);
    }
  }

  finalize(rep);
  return rep;
}

InstanceReport pipeline_thm2(const InstanceSpec& spec, const DensityMatrix& rho,
                             const CFlexibleFreeSet& cf) {
  InstanceReport rep;
  rep.seed = spec.seed;
  rep.target = to_string(spec.target);

  const RobustnessResult res = robustness(rho, FreeSet{cf}, spec.tol);
  if (std::holds_alternative<InfiniteRobustness>(res)) {
    rep.error = "unexpected infinite-robustness classification";
    finalize(rep);
    return rep;
  }
  const auto& cert = std::get<RobustnessCertificate>(res);
  rep.lambda_star = cert.lambda_star;
  rep.gap = cert.gap;
  add_robustness_lines(rep.ledger, cert);
  const double lam = cert.lambda_star;

  Rng probe_rng(spec.seed * 31337ULL + 5ULL);
  for (const double eps : {spec.epsilon, 0.0}) {
    const std::string tag = eps > 0.0 ? "ε>0: " : "ε=0: ";
    const AncillaGameCompilation comp =
        compile_ancilla_game(cert, FreeSet{cf}, spec.dim_a, spec.dim_c, eps);

    const SubchannelReport sub = validate_subchannels(comp.subchannels);
    line_ge(rep.ledger, tag + "subchannel Choi PSD floor", sub.min_choi_eig, 0.0, 1e-9);
    line_le(rep.ledger, tag + "subchannel sum CPTP defect", sub.sum_tp_defect, 1e-9, 0.0);

    // Witness readout identity on the probe and on sampled states.
    double readout_defect = 0.0;
    for (int s = 0; s <= spec.samples; ++s) {
      const Mat test = (s == 0) ? rho.mat() : probe_rng.mixed_state(spec.dim_a * spec.dim_c);
      const double lhs = witness_readout(comp, DensityMatrix::trusted(test));
      const double rhs = comp.c_scale * (cert.dual_witness * test).trace().real();
      readout_defect = std::max(readout_defect, std::abs(lhs - rhs));
    }
    line_le(rep.ledger, tag + "witness readout identity", readout_defect, 1e-9, 0.0);

    const double designed = ancilla_game_designed_value(comp, rho);
    const double tr_e_rho = (comp.witness * rho.mat()).trace().real();
    line_le(rep.ledger, tag + "designed value reads the witness",
            std::abs(spec.dim_c * designed - tr_e_rho), 1e-9, 0.0);

    // The designed measurement resolves the identity. When the game is too
    // large to materialize, the sum over shift outcomes is exact and what
    // remains is the displacement twirl of the entangled base effect.
    double povm_defect;
    if (comp.psi) {
      Mat sum = Mat::Zero(comp.psi->dim(), comp.psi->dim());
      for (const auto& e : comp.psi->effects) sum += e;
      povm_defect = max_abs(sum - Mat::Identity(sum.rows(), sum.cols()));
    } else {
      const auto pauli = generalized_pauli(spec.dim_c);
      const Mat phi = max_entangled(spec.dim_c) / spec.dim_c;
      const Mat ic = Mat::Identity(spec.dim_c, spec.dim_c);
      Mat acc = Mat::Zero(spec.dim_c * spec.dim_c, spec.dim_c * spec.dim_c);
      Mat xp = Mat::Identity(spec.dim_c, spec.dim_c);
      for (int q = 0; q < spec.dim_c; ++q) {
        Mat zp = Mat::Identity(spec.dim_c, spec.dim_c);
        for (int r = 0; r < spec.dim_c; ++r) {
          const Mat w = kron(xp * zp, ic);
          acc += w * phi * w.adjoint();
          zp = pauli.clock * zp;
        }
        xp = pauli.shift * xp;
      }
      povm_defect = max_abs(acc - Mat::Identity(acc.rows(), acc.cols()));
    }
    line_le(rep.ledger, tag + "designed measurement resolves identity", povm_defect, 1e-10,
            0.0);

    if (comp.game) {
      const CovarianceReport cov = covariance_check(*comp.game, comp.action);
      line_le(rep.ledger, tag + "game covariance residual", cov.worst_residual, 1e-9, 0.0);
    } else {
      // Structured path: every channel is a conjugation of the base Choi, so
      // sample the covariance relation pairwise.
      const Mat ia = Mat::Identity(spec.dim_a, spec.dim_a);
      double worst = 0.0;
      Rng pair_rng(spec.seed * 7ULL + 99ULL);
      for (int s = 0; s < 8; ++s) {
        const int g = pair_rng.uniform_int(0, comp.action.size() - 1);
        const int h = pair_rng.uniform_int(0, comp.action.size() - 1);
        const Mat ug = kron(ia, comp.action.unitaries[g]);
        const Mat uh = kron(ia, comp.action.unitaries[h]);
        const Mat ugh = kron(ia, comp.action.unitaries[comp.action.mult[g][h]]);
        const Mat lhs = ugh * comp.base_channel.choi() * ugh.adjoint();
        const Mat rhs = ug * (uh * comp.base_channel.choi() * uh.adjoint()) * ug.adjoint();
        worst = std::max(worst, max_abs(lhs - rhs));
      }
      line_le(rep.ledger, tag + "game covariance residual (sampled)", worst, 1e-9, 0.0);
    }

    const double den_bound = (comp.witness_overlap + comp.epsilon_scaled) / spec.dim_c;
    const double ratio_bound = designed / den_bound;
    line_ge(rep.ledger, tag + "certified ratio bound", ratio_bound,
            (1.0 + lam) / (1.0 + eps), 1e-6);

    const AncillaCovariantDiscrimination opt = ancilla_game_optimal(comp, rho, spec.tol);
    line_le(rep.ledger, tag + "ancilla game value within robustness chain", opt.value,
            (1.0 + lam) * den_bound, 1e-6);
    line_ge(rep.ledger, tag + "optimal value dominates the designed measurement", opt.value,
            designed, 2e-6);

    const double seesaw = ancilla_game_seesaw(comp, cf, 4, spec.seed * 3ULL + 1ULL, spec.tol);
    line_le(rep.ledger, tag + "see-saw bound within analytic denominator", seesaw, den_bound,
            1e-6);

    const SubchannelCollection gammas =
        extract_ancilla_subchannels(comp.psi_base, comp.n_levels, spec.dim_c);
    double tail = 0.0;
    for (int n = 1; n < comp.n_levels; ++n)
      tail = std::max(tail, max_abs(gammas.maps[n].choi()));
    line_le(rep.ledger, tag + "designed extraction: identity head",
            max_abs(gammas.maps[0].choi() - CPMap::identity(spec.dim_c).choi()), 1e-9, 0.0);
    line_le(rep.ledger, tag + "designed extraction: vanishing tail", tail, 1e-9, 0.0);

    double gamma_ps = 0.0;
    for (int n = 0; n < comp.n_levels; ++n) {
      const CPMap joint = tensor(comp.subchannels.maps[n], gammas.maps[n]);
      gamma_ps += (max_entangled(spec.dim_c) * joint.apply(rho.mat())).trace().real();
    }
    line_le(rep.ledger, tag + "extracted subchannels reproduce the game value",
            std::abs(gamma_ps - spec.dim_c * designed), 1e-8, 0.0);

    if (eps == spec.epsilon) {
      rep.ratio = ratio_bound;
      rep.game_report.numerator_value = designed;
      rep.game_report.denominator_value = den_bound;
      rep.game_report.ratio = ratio_bound;
      rep.game_report.robustness_reference = lam;
    }
    if (spec.epsilon == 0.0) break;  // both branches coincide
  }

  finalize(rep);
  return rep;
}

InstanceReport pipeline_appc(const InstanceSpec& spec) {
  InstanceReport rep;
  rep.seed = spec.seed;
  rep.target = to_string(spec.target);
  Rng rng(spec.seed);

  const int da = spec.dim_a, nc = spec.dim_c, n = std::max(2, spec.n_levels);

  // Random subchannels A→C: positive Choi pieces normalized to a channel sum.
  std::vector<Mat> pieces(n);
  Mat sum = Mat::Zero(da * nc, da * nc);
  for (auto& j : pieces) {
    j = rng.psd(da * nc);
    sum += j;
  }
  const Mat s_in = partial_trace_positions(sum, {da, nc}, {0});
  const EigH es = eigh(s_in);
  Mat s_isqrt = Mat::Zero(da, da);
  for (int i = 0; i < da; ++i)
    s_isqrt += es.vectors.col(i) * es.vectors.col(i).adjoint() / std::sqrt(es.values[i]);
  const Mat scale = kron(s_isqrt, Mat::Identity(nc, nc));
  AncillaGameCompilation comp;
  comp.dim_a = da;
  comp.dim_c = nc;
  comp.n_levels = n;
  for (auto& j : pieces)
    comp.subchannels.maps.push_back(CPMap::from_choi(hermitize(scale * j * scale), da, nc));
  const SubchannelReport sub = validate_subchannels(comp.subchannels);
  line_ge(rep.ledger, "random subchannel Choi PSD floor", sub.min_choi_eig, 0.0, 1e-9);
  line_le(rep.ledger, "random subchannel sum CPTP defect", sub.sum_tp_defect, 1e-9, 0.0);

  assemble_ancilla_game(comp);
  if (!comp.game || !comp.psi) {
    rep.error = "structural suite requires a materialized game";
    finalize(rep);
    return rep;
  }

  double worst_choi = 0.0, worst_tp = 0.0;
  for (const auto& ch : comp.game->channels) {
    worst_choi = std::min(worst_choi, min_eigenvalue(ch.choi()));
    worst_tp = std::max(worst_tp,
                        max_abs(partial_trace_positions(ch.choi(), {da, n * nc}, {0}) -
                                Mat::Identity(da, da)));
  }
  line_ge(rep.ledger, "compiled channels: Choi PSD floor", worst_choi, 0.0, 1e-9);
  line_le(rep.ledger, "compiled channels: trace preservation defect", worst_tp, 1e-9, 0.0);

  const CovarianceReport cov = covariance_check(*comp.game, comp.action);
  line_le(rep.ledger, "covariance residual", cov.worst_residual, 1e-9, 0.0);

  Mat psum = Mat::Zero(comp.psi->dim(), comp.psi->dim());
  for (const auto& e : comp.psi->effects) psum += e;
  line_le(rep.ledger, "designed measurement resolves identity",
          max_abs(psum - Mat::Identity(psum.rows(), psum.cols())), 1e-10, 0.0);

  const SubchannelCollection gpsi = extract_ancilla_subchannels(comp.psi_base, n, nc);
  double tail = 0.0;
  for (int k = 1; k < n; ++k) tail = std::max(tail, max_abs(gpsi.maps[k].choi()));
  line_le(rep.ledger, "designed extraction: identity head",
          max_abs(gpsi.maps[0].choi() - CPMap::identity(nc).choi()), 1e-9, 0.0);
  line_le(rep.ledger, "designed extraction: vanishing tail", tail, 1e-9, 0.0);

  // Random symmetrized measurements: validity, preserved success probability,
  // and the extracted-subchannel evaluation identity.
  const CPMap deph = CPMap::dephasing(n);
  const int dim_meas = n * nc * nc;
  double worst_ps = 0.0, worst_valid = 0.0, worst_gamma_ps = 0.0, worst_sub = 0.0;
  for (int s = 0; s < std::max(1, spec.samples); ++s) {
    const DensityMatrix probe = DensityMatrix::make(rng.mixed_state(da * nc));
    std::vector<Mat> raw(comp.action.size());
    Mat rsum = Mat::Zero(dim_meas, dim_meas);
    for (auto& e : raw) {
      e = rng.psd(dim_meas);
      rsum += e;
    }
    const EigH res = eigh(rsum);
    Mat risq = Mat::Zero(dim_meas, dim_meas);
    for (int i = 0; i < dim_meas; ++i)
      risq += res.vectors.col(i) * res.vectors.col(i).adjoint() / std::sqrt(res.values[i]);
    Measurement povm;
    for (auto& e : raw)
      povm.effects.push_back(
          apply_to_subsystem(deph, hermitize(risq * e * risq), {n, nc * nc}, 0));

    const Measurement sym = symmetrize_measurement(povm, comp.action, *comp.game);
    const PovmReport pr = validate_povm(sym);
    worst_valid = std::max(worst_valid, pr.sum_defect);
    const double before = success_probability(probe, povm, *comp.game);
    const double after = success_probability(probe, sym, *comp.game);
    worst_ps = std::max(worst_ps, std::abs(before - after));

    const SubchannelCollection gam = extract_ancilla_subchannels(sym, comp.action, comp);
    const SubchannelReport gr = validate_subchannels(gam);
    worst_sub = std::max(worst_sub, std::max(-gr.min_choi_eig, gr.sum_tp_defect));
    double lhs = 0.0;
    for (int k = 0; k < n; ++k) {
      const CPMap joint = tensor(comp.subchannels.maps[k], gam.maps[k]);
      lhs += (max_entangled(nc) * joint.apply(probe.mat())).trace().real();
    }
    worst_gamma_ps = std::max(worst_gamma_ps, std::abs(lhs - nc * after));
  }
  line_le(rep.ledger, "symmetrization preserves success probability", worst_ps, 1e-12, 0.0);
  line_le(rep.ledger, "symmetrized measurements resolve identity", worst_valid, 1e-9, 0.0);
  line_le(rep.ledger, "extracted subchannel validity", worst_sub, 1e-9, 0.0);
  line_le(rep.ledger, "extracted subchannels reproduce the game value", worst_gamma_ps,
          1e-8, 0.0);

  finalize(rep);
  return rep;
}

InstanceReport pipeline_appd(const InstanceSpec& spec, const DensityMatrix& rho,
                             const PolytopeFreeSet& f) {
  InstanceReport rep;
  rep.seed = spec.seed;
  rep.target = to_string(spec.target);

  const RobustnessResult res = robustness(rho, FreeSet{f}, spec.tol);
  const bool infinite = std::holds_alternative<InfiniteRobustness>(res);
  line_ge(rep.ledger, "classified as infinite robustness", infinite ? 1.0 : 0.0, 1.0, 0.0);
  if (!infinite) {
    rep.error = "expected an infinite-robustness instance";
    finalize(rep);
    return rep;
  }
  const auto& inf = std::get<InfiniteRobustness>(res);
  double ray_leak = 0.0;
  for (const auto& g : f.generators)
    ray_leak = std::max(ray_leak, std::abs((inf.projector * g.mat()).trace().real()));
  line_le(rep.ledger, "divergence ray vanishes on the free set", ray_leak, 1e-9, 0.0);
  line_ge(rep.ledger, "divergence ray sees the probe state", inf.tr_p_rho, 1e-6, 0.0);

  const DivergenceGame dg = compile_divergence_game(rho, f, spec.n_levels, spec.tol);
  line_ge(rep.ledger, "ratio at N", dg.achieved_ratio, (spec.n_levels - 1) * dg.tr_p_rho,
          1e-6);
  rep.ratio = dg.achieved_ratio;
  rep.game_report.numerator_value = dg.numerator;
  rep.game_report.denominator_value = dg.denominator;
  rep.game_report.ratio = dg.achieved_ratio;

  if (2 * spec.n_levels <= game_level_cap()) {
    const DivergenceGame dg2 = compile_divergence_game(rho, f, 2 * spec.n_levels, spec.tol);
    line_ge(rep.ledger, "ratio at 2N doubles", dg2.achieved_ratio, 2.0 * dg.achieved_ratio,
            1e-6);
  }

  finalize(rep);
  return rep;
}

}  // namespace

std::pair<DensityMatrix, FreeSet> random_instance(const InstanceSpec& spec) {
  Rng rng(spec.seed);
  const int da = spec.dim_a;

  FreeSet f = [&]() -> FreeSet {
    if (spec.explicit_free_set) return *spec.explicit_free_set;
    switch (spec.target) {
      case CertifyTarget::thm2:
      case CertifyTarget::appc: {
        std::vector<DensityMatrix> ag;
        for (int i = 0; i < spec.generator_count; ++i)
          ag.push_back(DensityMatrix::make(rng.mixed_state(da)));
        ag.push_back(DensityMatrix::make(Mat::Identity(da, da) / da));
        return CFlexibleFreeSet::make(spec.dim_c, std::move(ag));
      }
      case CertifyTarget::appd: {
        const int rank = std::max(1, da - 1);
        std::vector<DensityMatrix> gens;
        for (int i = 0; i < std::max(1, spec.generator_count); ++i)
          gens.push_back(embedded_subspace_state(rng, da, rank));
        return PolytopeFreeSet::make(std::move(gens));
      }
      default:
        return PolytopeFreeSet::make(polytope_generators(rng, da, spec.generator_count));
    }
  }();

  const int state_dim =
      std::holds_alternative<CFlexibleFreeSet>(f) ? da * spec.dim_c : free_set_dim(f);
  DensityMatrix rho = [&]() {
    if (spec.state_kind == "explicit") {
      if (!spec.explicit_state) throw ArgumentError("random_instance: explicit state missing");
      return DensityMatrix::make(*spec.explicit_state);
    }
    if (spec.state_kind == "random-pure") return DensityMatrix::make(rng.pure_state(state_dim));
    if (spec.state_kind == "hull-point") {
      const auto& pf = std::get<PolytopeFreeSet>(f);
      Mat v = Mat::Zero(pf.dim, pf.dim);
      double total = 0.0;
      std::vector<double> w(pf.generators.size());
      for (auto& wi : w) {
        wi = rng.uniform() + 1e-3;
        total += wi;
      }
      for (size_t i = 0; i < pf.generators.size(); ++i)
        v += (w[i] / total) * pf.generators[i].mat();
      return DensityMatrix::make(v);
    }
    return DensityMatrix::make(rng.mixed_state(state_dim));
  }();
  return {std::move(rho), std::move(f)};
}

InstanceReport run_instance(const InstanceSpec& spec) {
  InstanceReport rep;
  rep.seed = spec.seed;
  rep.target = to_string(spec.target);
  try {
    if (spec.target == CertifyTarget::appc) return pipeline_appc(spec);
    auto [rho, f] = random_instance(spec);
    switch (spec.target) {
      case CertifyTarget::thm1:
      case CertifyTarget::cor1: {
        const auto& pf = std::get<PolytopeFreeSet>(f);
        const bool has_max_mixed = !spec.explicit_free_set.has_value();
        return pipeline_polytope_game(spec, rho, pf, has_max_mixed);
      }
      case CertifyTarget::thm2:
        return pipeline_thm2(spec, rho, std::get<CFlexibleFreeSet>(f));
      case CertifyTarget::appd:
        return pipeline_appd(spec, rho, std::get<PolytopeFreeSet>(f));
      default:
        break;
    }
  } catch (const InvariantError& e) {
    throw InvariantError("seed " + std::to_string(spec.seed) + ": " + e.what());
  } catch (const Error& e) {
    rep.error = e.what();
    rep.pass = false;
  }
  return rep;
}

std::vector<InstanceSpec> build_campaign(CertifyTarget target, std::uint64_t base_seed,
                                         int count, const InstanceSpec& defaults) {
  std::vector<InstanceSpec> specs;
  specs.reserve(count);
  for (int i = 0; i < count; ++i) {
    InstanceSpec s = defaults;
    s.target = target;
    s.seed = base_seed + static_cast<std::uint64_t>(i);
    switch (target) {
      case CertifyTarget::thm1:
      case CertifyTarget::cor1:
        s.generator_count = 1 + static_cast<int>(s.seed % 4);  // 2–5 with I/d
        if (target == CertifyTarget::cor1 && (s.seed % 2) == 1) s.state_kind = "hull-point";
        break;
      case CertifyTarget::thm2:
        s.generator_count = 1 + static_cast<int>(s.seed % 2);  // 2–3 with I/d
        break;
      default:
        break;
    }
    specs.push_back(std::move(s));
  }
  return specs;
}

CampaignReport run_campaign(const std::vector<InstanceSpec>& specs, int workers) {
  CampaignReport report;
  report.instances.resize(specs.size());
  if (specs.empty()) {
    report.worst_margin = 0.0;
    return report;
  }

  if (workers <= 0)
    workers = static_cast<int>(std::min<size_t>(
        std::max(1u, std::thread::hardware_concurrency()), specs.size()));
  workers = std::min<int>(workers, static_cast<int>(specs.size()));

  std::mutex mu;
  size_t next = 0;
  std::exception_ptr fatal;
  auto worker = [&]() {
    for (;;) {
      size_t idx;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= specs.size() || fatal) return;
        idx = next++;
      }
      try {
        report.instances[idx] = run_instance(specs[idx]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (fatal) std::rethrow_exception(fatal);

  report.worst_margin = 1e300;
  for (const auto& inst : report.instances) {
    if (inst.pass)
      ++report.pass_count;
    else
      ++report.fail_count;
    report.worst_margin = std::min(report.worst_margin, inst.worst_margin);
  }
  return report;
}

}  // namespace qrg
