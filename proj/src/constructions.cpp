#include "qrg/constructions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>

#include "qrg/rng.hpp"

namespace qrg {

namespace {
std::atomic<int> g_level_cap{0};  // 0 = not yet initialized

int env_level_cap() {
  if (const char* env = std::getenv("QRG_NMAX")) {
    const int v = std::atoi(env);
    if (v >= 2) return v;
  }
  return 256;
}
}  // namespace

int game_level_cap() {
  int cap = g_level_cap.load();
  if (cap == 0) {
    cap = env_level_cap();
    g_level_cap.store(cap);
  }
  return cap;
}

void set_game_level_cap(int cap) {
  if (cap < 2) throw ArgumentError("set_game_level_cap: cap must be ≥ 2");
  g_level_cap.store(cap);
}

namespace {

int choose_levels(double denominator, const char* what) {
  if (denominator <= 1e-10)
    throw NumericalError(std::string("compile: degenerate witness, ") + what + " = " +
                         std::to_string(denominator));
  const int n = std::max(2, static_cast<int>(std::ceil(1.0 + 1.0 / denominator)));
  if (n > game_level_cap())
    throw TooLargeError("compile: required level count " + std::to_string(n) +
                        " exceeds cap " + std::to_string(game_level_cap()) + " (" + what +
                        " = " + std::to_string(denominator) + ")");
  return n;
}

/// Channels σ ↦ Tr(gσ)|n⟩⟨n| + (1−Tr(gσ))(I−|n⟩⟨n|)/(N−1) for 0 ⪯ g ⪯ I.
ChannelEnsemble readout_ensemble(const Mat& g, int n_levels) {
  const int din = static_cast<int>(g.rows());
  const Mat gt = g.transpose();
  const Mat rest = Mat::Identity(din, din) - gt;
  std::vector<CPMap> channels;
  std::vector<double> priors(n_levels, 1.0 / n_levels);
  channels.reserve(n_levels);
  for (int n = 0; n < n_levels; ++n) {
    Mat proj = Mat::Zero(n_levels, n_levels);
    proj(n, n) = Cplx(1, 0);
    const Mat anti = (Mat::Identity(n_levels, n_levels) - proj) / (n_levels - 1.0);
    Mat choi = kron(gt, proj) + kron(rest, anti);
    channels.push_back(CPMap::from_choi_declared(std::move(choi), din, n_levels,
                                                 MapKind::cptp));
  }
  return ChannelEnsemble::make(std::move(priors), std::move(channels));
}

}  // namespace

DirectGameCompilation compile_direct_game(const DensityMatrix& rho, const PolytopeFreeSet& f,
                                          const RobustnessCertificate& cert) {
  if (rho.dim() != f.dim) throw ArgumentError("compile_direct_game: dimension mismatch");
  if (cert.gap > 1e-6)
    throw PreconditionError("compile_direct_game: certificate gap " +
                            std::to_string(cert.gap) + " too large");
  DirectGameCompilation comp;
  const double norm = opnorm_herm(cert.dual_witness);
  if (norm <= 1e-12) throw NumericalError("compile_direct_game: zero witness");
  comp.witness = cert.dual_witness / norm;

  const WitnessMax wm = max_witness_value(comp.witness, f);
  comp.omega_star = wm.maximizer;
  comp.witness_overlap = wm.value;
  comp.n_levels = choose_levels(comp.witness_overlap, "Tr(e ω*)");
  comp.game = readout_ensemble(comp.witness, comp.n_levels);
  comp.action = cyclic_action(comp.n_levels);
  comp.designed_povm = computational_povm(comp.n_levels);
  return comp;
}

DivergenceGame compile_divergence_game(const DensityMatrix& rho, const PolytopeFreeSet& f,
                                       int n_levels, double tol) {
  if (n_levels < 2 || n_levels > game_level_cap())
    throw ArgumentError("compile_divergence_game: n_levels out of [2, cap]");
  const SupportSpace ss = support_space(f);
  DivergenceGame dg;
  dg.projector = ss.complement_projector;
  dg.tr_p_rho = (dg.projector * rho.mat()).trace().real();
  if (dg.tr_p_rho <= 1e-9)
    throw ArgumentError(
        "compile_divergence_game: the probe state lies in the free support space; use the "
        "finite-robustness path");
  dg.n_levels = n_levels;
  dg.game = readout_ensemble(dg.projector, n_levels);
  dg.action = cyclic_action(n_levels);

  dg.numerator = optimal_success_cyclic(rho, dg.game, tol).value;
  dg.denominator = 0.0;
  for (const auto& gen : f.generators)
    dg.denominator = std::max(dg.denominator, optimal_success_cyclic(gen, dg.game, tol).value);
  dg.achieved_ratio = dg.numerator / dg.denominator;
  return dg;
}

// ---------------------------------------------------------------------------

AncillaGameCompilation compile_ancilla_subchannels(const RobustnessCertificate& cert,
                                                   const FreeSet& f, int dim_a, int dim_c,
                                                   double epsilon) {
  if (epsilon < 0.0) throw ArgumentError("compile_ancilla_subchannels: ε must be ≥ 0");
  const bool cflexible = std::holds_alternative<CFlexibleFreeSet>(f);
  if (epsilon == 0.0 && !cflexible)
    throw PreconditionError(
        "compile_ancilla_subchannels: ε = 0 needs the exact C-flexible model");
  if (free_set_dim(f) != dim_a * dim_c)
    throw ArgumentError("compile_ancilla_subchannels: free set does not live on A⊗C");
  if (cflexible) {
    const auto& cf = std::get<CFlexibleFreeSet>(f);
    if (cf.dim_a != dim_a || cf.dim_c != dim_c)
      throw ArgumentError("compile_ancilla_subchannels: A/C split does not match the model");
  }

  AncillaGameCompilation comp;
  comp.dim_a = dim_a;
  comp.dim_c = dim_c;
  comp.epsilon = epsilon;

  const Mat& x = cert.dual_witness;
  const Mat trc_x = partial_trace_positions(x, {dim_a, dim_c}, {0});
  const double norm = max_eigenvalue(hermitize(trc_x));
  if (norm <= 1e-12) throw NumericalError("compile_ancilla_subchannels: zero witness");
  comp.c_scale = 1.0 / norm;
  comp.witness = x * comp.c_scale;
  comp.epsilon_scaled = epsilon * comp.c_scale;

  const WitnessMax wm = max_witness_value(comp.witness, f);
  comp.witness_overlap = wm.value;
  comp.n_levels = (epsilon > 0.0) ? choose_levels(comp.epsilon_scaled, "ε′")
                                  : choose_levels(comp.witness_overlap, "Tr(e ω*)");

  // Witness readout subchannel: Choi = eᵀ with input A, output C. It is TNI
  // because Tr_C e ⪯ I_A by the chosen normalization.
  CPMap readout = CPMap::from_choi(comp.witness.transpose(), dim_a, dim_c);
  const Mat trc_e = partial_trace_positions(comp.witness, {dim_a, dim_c}, {0});
  const Mat leftover = hermitize(Mat::Identity(dim_a, dim_a) - trc_e);
  comp.tau = Mat::Identity(dim_c, dim_c) / static_cast<double>(dim_c);
  // Tail subchannels τ∘a with a(σ) = Tr[σ(I − Tr_C e)], split over N−1 slots.
  Mat tail_choi = kron(leftover.transpose(), comp.tau) / (comp.n_levels - 1.0);

  SubchannelCollection sub;
  sub.maps.push_back(std::move(readout));
  const CPMap tail = CPMap::from_choi(std::move(tail_choi), dim_a, dim_c);
  for (int n = 1; n < comp.n_levels; ++n) sub.maps.push_back(tail);
  const SubchannelReport rep = validate_subchannels(sub);
  if (!rep.pass)
    throw InvariantError("compile_ancilla_subchannels: subchannel validation failed (min "
                         "Choi eig " +
                         std::to_string(rep.min_choi_eig) + ", sum defect " +
                         std::to_string(rep.sum_tp_defect) + ")");
  comp.subchannels = std::move(sub);
  return comp;
}

void assemble_ancilla_game(AncillaGameCompilation& comp, std::uint64_t materialize_budget) {
  const int n = comp.n_levels;
  const int nc = comp.dim_c;
  const int da = comp.dim_a;
  const int out = n * nc;

  // Identity-element channel σ ↦ Σ_k |k⟩⟨k| ⊗ Λ̃_k(σ).
  Mat base = Mat::Zero(static_cast<long long>(da) * out, static_cast<long long>(da) * out);
  for (int k = 0; k < n; ++k) {
    const Mat& jk = comp.subchannels.maps[k].choi();
    for (int a = 0; a < da; ++a)
      for (int a2 = 0; a2 < da; ++a2)
        for (int c = 0; c < nc; ++c)
          for (int c2 = 0; c2 < nc; ++c2)
            base(static_cast<long long>(a) * out + (k * nc + c),
                 static_cast<long long>(a2) * out + (k * nc + c2)) =
                jk(static_cast<long long>(a) * nc + c, static_cast<long long>(a2) * nc + c2);
  }
  comp.base_channel = CPMap::from_choi_declared(std::move(base), da, out, MapKind::cptp);
  comp.action = ancilla_game_action(n, nc);
  comp.psi_base = kron(basis_ket(1, n) * basis_ket(1, n).adjoint(), max_entangled(nc)) /
                  static_cast<double>(nc);

  const int g = comp.action.size();
  const std::uint64_t per_choi = static_cast<std::uint64_t>(da) * out * da * out * 16ull;
  if (per_choi * g <= materialize_budget) {
    std::vector<CPMap> channels;
    channels.reserve(g);
    const Mat ia = Mat::Identity(da, da);
    for (int gi = 0; gi < g; ++gi) {
      const Mat u = kron(ia, comp.action.unitaries[gi]);
      channels.push_back(CPMap::from_choi_declared(
          hermitize(u * comp.base_channel.choi() * u.adjoint()), da, out, MapKind::cptp));
    }
    comp.game = ChannelEnsemble::make(std::vector<double>(g, 1.0 / g), std::move(channels), nc);

    Measurement psi;
    psi.labels = comp.action.labels;
    const Mat ianc = Mat::Identity(nc, nc);
    for (int gi = 0; gi < g; ++gi) {
      const Mat u = kron(comp.action.unitaries[gi], ianc);
      psi.effects.push_back(hermitize(u * comp.psi_base * u.adjoint()));
    }
    const PovmReport pr = validate_povm(psi, kPsdTol, 1e-9);
    if (!pr.pass)
      throw InvariantError("assemble_ancilla_game: designed measurement failed validation "
                           "(sum defect " +
                           std::to_string(pr.sum_defect) + ")");
    comp.psi = std::move(psi);
  }
}

AncillaGameCompilation compile_ancilla_game(const RobustnessCertificate& cert, const FreeSet& f,
                                            int dim_a, int dim_c, double epsilon) {
  AncillaGameCompilation comp = compile_ancilla_subchannels(cert, f, dim_a, dim_c, epsilon);
  assemble_ancilla_game(comp);
  return comp;
}

namespace {

Mat ancilla_game_output(const AncillaGameCompilation& comp, const DensityMatrix& rho) {
  if (rho.dim() != comp.dim_a * comp.dim_c)
    throw ArgumentError("ancilla game: probe state must live on A⊗C");
  return apply_to_subsystem(comp.base_channel, rho.mat(), {comp.dim_a, comp.dim_c}, 0);
}

std::vector<Mat> b_diagonal_blocks(const Mat& m, int n_levels, int block_dim) {
  std::vector<Mat> blocks(n_levels);
  for (int k = 0; k < n_levels; ++k)
    blocks[k] = hermitize(m.block(static_cast<long long>(k) * block_dim,
                                  static_cast<long long>(k) * block_dim, block_dim, block_dim));
  return blocks;
}

}  // namespace

double ancilla_game_designed_value(const AncillaGameCompilation& comp,
                                   const DensityMatrix& rho) {
  const Mat m = ancilla_game_output(comp, rho);
  return (comp.psi_base * m).trace().real();
}

AncillaCovariantDiscrimination ancilla_game_optimal(const AncillaGameCompilation& comp,
                                                    const DensityMatrix& rho, double tol) {
  const Mat m = ancilla_game_output(comp, rho);
  // Output index order is (B, C_mid, C_anc); the reduction uses the B-blocks.
  const auto blocks = b_diagonal_blocks(m, comp.n_levels, comp.dim_c * comp.dim_c);
  return ancilla_covariant_discrimination(blocks, comp.dim_c, tol);
}

double witness_readout(const AncillaGameCompilation& comp, const DensityMatrix& rho) {
  const CPMap& readout = comp.subchannels.maps[0];
  const Mat y = apply_to_subsystem(readout, rho.mat(), {comp.dim_a, comp.dim_c}, 0);
  return (max_entangled(comp.dim_c) * y).trace().real();
}

double ancilla_game_seesaw(const AncillaGameCompilation& comp, const CFlexibleFreeSet& f,
                           int restarts, std::uint64_t seed, double tol) {
  const CPMap adj = comp.base_channel.adjoint();
  double best = 0.0;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r) * 7919ULL);
    const int gi = rng.uniform_int(0, static_cast<int>(f.a_generators.size()) - 1);
    Vec beta = rng.pure_ket(f.dim_c);
    Mat omega = kron(f.a_generators[gi].mat(), beta * beta.adjoint());
    double last = -1.0;
    for (int it = 0; it < 50; ++it) {
      const auto opt = ancilla_game_optimal(comp, DensityMatrix::trusted(omega), tol);
      // Base effect of the optimal dephased covariant measurement.
      const int bc = comp.n_levels * comp.dim_c;
      Mat q = Mat::Zero(static_cast<long long>(bc) * comp.dim_c,
                        static_cast<long long>(bc) * comp.dim_c);
      const int blk = comp.dim_c * comp.dim_c;
      for (int k = 0; k < comp.n_levels; ++k)
        q.block(static_cast<long long>(k) * blk, static_cast<long long>(k) * blk, blk, blk) =
            opt.base_blocks[k];
      const Mat h =
          hermitize(apply_to_subsystem(adj, q, {bc, comp.dim_c}, 0));
      const WitnessMax wm = max_witness_value(h, f);
      omega = wm.maximizer;
      if (wm.value <= last + 1e-11) {
        last = std::max(last, wm.value);
        break;
      }
      last = wm.value;
    }
    best = std::max(best, last);
  }
  return best;
}

SubchannelCollection extract_ancilla_subchannels(const Mat& base_effect, int n_levels,
                                                 int dim_c) {
  const int d = n_levels * dim_c * dim_c;
  if (base_effect.rows() != d || base_effect.cols() != d)
    throw ArgumentError("extract_ancilla_subchannels: effect dim mismatch");
  SubchannelCollection out;
  const int cc = dim_c * dim_c;
  for (int n = 0; n < n_levels; ++n) {
    Mat choi(static_cast<long long>(dim_c) * dim_c, static_cast<long long>(dim_c) * dim_c);
    for (int i = 0; i < dim_c; ++i)
      for (int a = 0; a < dim_c; ++a)
        for (int j = 0; j < dim_c; ++j)
          for (int b = 0; b < dim_c; ++b)
            choi(static_cast<long long>(i) * dim_c + a, static_cast<long long>(j) * dim_c + b) =
                static_cast<double>(dim_c) *
                base_effect(static_cast<long long>(n) * cc + b * dim_c + j,
                            static_cast<long long>(n) * cc + a * dim_c + i);
    out.maps.push_back(CPMap::from_choi(hermitize(choi), dim_c, dim_c));
  }
  return out;
}

SubchannelCollection extract_ancilla_subchannels(const Measurement& povm_sym,
                                                 const GroupAction& action,
                                                 const AncillaGameCompilation& comp) {
  const int g = action.size();
  if (povm_sym.size() != g)
    throw ArgumentError("extract_ancilla_subchannels: outcome count != group size");
  const Mat ianc = Mat::Identity(comp.dim_c, comp.dim_c);
  const Mat& base = povm_sym.effects[action.identity];

  // Covariance of the measurement with respect to the extended action.
  double worst = 0.0;
  for (int gi = 0; gi < g; ++gi) {
    const Mat u = kron(action.unitaries[gi], ianc);
    worst = std::max(worst, max_abs(povm_sym.effects[gi] - u * base * u.adjoint()));
  }
  if (worst > 1e-9)
    throw PreconditionError("extract_ancilla_subchannels: measurement not covariant, residual " +
                            std::to_string(worst));

  // Basis-dephasing on B must leave the base effect unchanged.
  const CPMap deph = CPMap::dephasing(comp.n_levels);
  const Mat dephased = apply_to_subsystem(
      deph, base, {comp.n_levels, comp.dim_c * comp.dim_c}, 0);
  if (max_abs(dephased - base) > 1e-9)
    throw PreconditionError("extract_ancilla_subchannels: base effect is not basis-dephased");

  return extract_ancilla_subchannels(base, comp.n_levels, comp.dim_c);
}

}  // namespace qrg
