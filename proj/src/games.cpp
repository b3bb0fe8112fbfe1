#include "qrg/games.hpp"

#include <algorithm>
#include <cmath>

#include "qrg/rng.hpp"

namespace qrg {

ChannelEnsemble ChannelEnsemble::make(std::vector<double> priors, std::vector<CPMap> channels,
                                      std::optional<int> ancilla_dim) {
  if (priors.size() != channels.size() || channels.empty())
    throw ArgumentError("ChannelEnsemble: need matching nonempty priors/channels");
  double sum = 0.0;
  for (double p : priors) {
    if (p < 0.0) throw ArgumentError("ChannelEnsemble: negative prior");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-10)
    throw ArgumentError("ChannelEnsemble: priors sum to " + std::to_string(sum));
  const int in = channels[0].in_dim(), out = channels[0].out_dim();
  for (const auto& ch : channels) {
    if (ch.in_dim() != in || ch.out_dim() != out)
      throw ArgumentError("ChannelEnsemble: channels of mixed dims");
    if (ch.kind() != MapKind::cptp)
      throw ArgumentError("ChannelEnsemble: all channels must be CPTP");
  }
  if (ancilla_dim && *ancilla_dim < 1)
    throw ArgumentError("ChannelEnsemble: ancilla_dim must be ≥ 1");
  ChannelEnsemble g;
  g.priors = std::move(priors);
  g.channels = std::move(channels);
  g.ancilla_dim = ancilla_dim;
  return g;
}

GroupAction::Report GroupAction::validate() const {
  Report rep;
  const int g = size();
  if (g == 0 || static_cast<int>(mult.size()) != g || static_cast<int>(inverse.size()) != g) {
    rep.detail = "empty action or malformed tables";
    return rep;
  }
  const int d = dim();
  if (max_abs(unitaries[identity] - Mat::Identity(d, d)) > 1e-9) {
    rep.detail = "identity element does not carry the identity unitary";
    return rep;
  }
  for (int a = 0; a < g; ++a) {
    if (mult[a][inverse[a]] != identity || mult[inverse[a]][a] != identity) {
      rep.detail = "inverse table broken at " + labels[a];
      return rep;
    }
    for (int b = 0; b < g; ++b)
      if (mult[a][b] < 0 || mult[a][b] >= g) {
        rep.detail = "multiplication table leaves the group";
        return rep;
      }
  }
  // Associativity spot checks on a deterministic sample.
  for (int a = 0; a < g; a += std::max(1, g / 7))
    for (int b = 0; b < g; b += std::max(1, g / 7))
      for (int c = 0; c < g; c += std::max(1, g / 7))
        if (mult[mult[a][b]][c] != mult[a][mult[b][c]]) {
          rep.detail = "associativity violated";
          return rep;
        }
  // Homomorphism as channels: conjugations by U_gU_h and U_{gh} must agree,
  // which is exactly equality of (U_gU_h)M(U_gU_h)† and U_{gh}M U_{gh}† on a
  // matrix-unit basis; equivalently the two unitaries match up to phase.
  double worst = 0.0;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b) {
      const Mat prod = unitaries[a] * unitaries[b];
      const Mat& tgt = unitaries[mult[a][b]];
      // Remove the global phase by aligning the largest entry.
      Eigen::Index r0 = 0, c0 = 0;
      tgt.cwiseAbs().maxCoeff(&r0, &c0);
      const Cplx ratio = prod(r0, c0) / tgt(r0, c0);
      const double mag = std::abs(ratio);
      if (std::abs(mag - 1.0) > 1e-9) {
        rep.detail = "non-unimodular mismatch";
        worst = std::max(worst, std::abs(mag - 1.0));
        continue;
      }
      worst = std::max(worst, max_abs(prod - ratio * tgt));
    }
  rep.worst_residual = worst;
  rep.pass = rep.detail.empty() && worst <= 1e-9;
  return rep;
}

GroupAction cyclic_action(int order) {
  return cyclic_action(order, generalized_pauli(order).shift);
}

GroupAction cyclic_action(int order, const Mat& generator) {
  if (order < 1) throw ArgumentError("cyclic_action: order must be ≥ 1");
  GroupAction a;
  a.identity = 0;
  Mat power = Mat::Identity(generator.rows(), generator.cols());
  for (int p = 0; p < order; ++p) {
    a.labels.push_back(std::to_string(mod_index(p, order)));
    a.unitaries.push_back(power);
    power = generator * power;
    a.inverse.push_back((order - p) % order);
  }
  a.mult.assign(order, std::vector<int>(order));
  for (int g = 0; g < order; ++g)
    for (int h = 0; h < order; ++h) a.mult[g][h] = (g + h) % order;
  return a;
}

GroupAction ancilla_game_action(int n_levels, int dim_c) {
  if (n_levels < 1 || dim_c < 1) throw ArgumentError("ancilla_game_action: bad dims");
  const auto shift_b = generalized_pauli(n_levels).shift;
  const auto pauli_c = generalized_pauli(dim_c);
  const int g = n_levels * dim_c * dim_c;

  GroupAction a;
  a.identity = 0;
  a.labels.reserve(g);
  a.unitaries.reserve(g);
  a.inverse.resize(g);
  a.mult.assign(g, std::vector<int>(g));

  std::vector<Mat> shift_pows(n_levels), x_pows(dim_c), z_pows(dim_c);
  Mat acc = Mat::Identity(n_levels, n_levels);
  for (int i = 0; i < n_levels; ++i) { shift_pows[i] = acc; acc = shift_b * acc; }
  acc = Mat::Identity(dim_c, dim_c);
  for (int q = 0; q < dim_c; ++q) { x_pows[q] = acc; acc = pauli_c.shift * acc; }
  acc = Mat::Identity(dim_c, dim_c);
  for (int r = 0; r < dim_c; ++r) { z_pows[r] = acc; acc = pauli_c.clock * acc; }

  auto flat = [dim_c](int i, int q, int r) { return (i * dim_c + q) * dim_c + r; };
  for (int i = 0; i < n_levels; ++i)
    for (int q = 0; q < dim_c; ++q)
      for (int r = 0; r < dim_c; ++r) {
        a.labels.push_back("(" + std::to_string(mod_index(i, n_levels)) + "," +
                           std::to_string(mod_index(q, dim_c)) + "," +
                           std::to_string(mod_index(r, dim_c)) + ")");
        a.unitaries.push_back(kron(shift_pows[i], x_pows[q] * z_pows[r]));
        a.inverse[flat(i, q, r)] =
            flat((n_levels - i) % n_levels, (dim_c - q) % dim_c, (dim_c - r) % dim_c);
      }
  for (int g1 = 0; g1 < g; ++g1)
    for (int g2 = 0; g2 < g; ++g2) {
      const int i1 = g1 / (dim_c * dim_c), q1 = (g1 / dim_c) % dim_c, r1 = g1 % dim_c;
      const int i2 = g2 / (dim_c * dim_c), q2 = (g2 / dim_c) % dim_c, r2 = g2 % dim_c;
      a.mult[g1][g2] =
          flat((i1 + i2) % n_levels, (q1 + q2) % dim_c, (r1 + r2) % dim_c);
    }
  return a;
}

// ---------------------------------------------------------------------------

std::vector<WeightedState> game_output_states(const DensityMatrix& rho,
                                              const ChannelEnsemble& game) {
  if (rho.dim() != game.probe_dim())
    throw ArgumentError("game_output_states: probe dim " + std::to_string(rho.dim()) +
                        " != expected " + std::to_string(game.probe_dim()));
  std::vector<WeightedState> out;
  out.reserve(game.channels.size());
  for (size_t n = 0; n < game.channels.size(); ++n) {
    Mat y;
    if (game.ancilla_dim)
      y = apply_to_subsystem(game.channels[n], rho.mat(),
                             {game.in_dim(), *game.ancilla_dim}, 0);
    else
      y = game.channels[n].apply(rho.mat());
    out.push_back(WeightedState{game.priors[n], hermitize(y)});
  }
  return out;
}

double success_probability(const DensityMatrix& rho, const Measurement& povm,
                           const ChannelEnsemble& game) {
  if (povm.size() != game.size())
    throw ArgumentError("success_probability: outcome count != channel count");
  if (povm.dim() != game.measured_dim())
    throw ArgumentError("success_probability: measurement dim mismatch");
  const auto states = game_output_states(rho, game);
  double v = 0.0;
  for (size_t n = 0; n < states.size(); ++n)
    v += (povm.effects[n] * states[n].state).trace().real() * states[n].prior;
  return v;
}

DiscriminationCertificate optimal_success(const DensityMatrix& rho,
                                          const ChannelEnsemble& game, double tol) {
  return min_error_discrimination(game_output_states(rho, game), tol);
}

CovarianceReport covariance_check(const ChannelEnsemble& game, const GroupAction& action,
                                  int max_pairs) {
  CovarianceReport rep;
  const int g = action.size();
  if (game.size() != g) return rep;
  for (double p : game.priors)
    if (std::abs(p - 1.0 / g) > 1e-12) return rep;
  if (action.dim() != game.out_dim()) return rep;

  const long long all_pairs = static_cast<long long>(g) * g;
  const int stride = all_pairs > max_pairs
                         ? static_cast<int>((all_pairs + max_pairs - 1) / max_pairs)
                         : 1;
  long long counter = 0;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b) {
      if (counter++ % stride != 0) continue;
      const Mat& ug = action.unitaries[a];
      const Mat lhs = game.channels[action.mult[a][b]].choi();
      const Mat rhs = kron(Mat::Identity(game.in_dim(), game.in_dim()), ug) *
                      game.channels[b].choi() *
                      kron(Mat::Identity(game.in_dim(), game.in_dim()), ug).adjoint();
      const double resid = max_abs(lhs - rhs);
      ++rep.pairs_checked;
      if (resid > rep.worst_residual) {
        rep.worst_residual = resid;
        rep.worst_g = a;
        rep.worst_h = b;
      }
    }
  rep.pass = rep.worst_residual <= 1e-9;
  return rep;
}

Measurement symmetrize_measurement(const Measurement& povm, const GroupAction& action,
                                   const ChannelEnsemble& game) {
  const CovarianceReport cov = covariance_check(game, action);
  if (!cov.pass) {
    std::string pair = cov.worst_g >= 0 ? " at pair (" + action.labels[cov.worst_g] + ", " +
                                              action.labels[cov.worst_h] + ")"
                                        : "";
    throw PreconditionError("symmetrize_measurement: game is not covariant" + pair +
                            ", residual " + std::to_string(cov.worst_residual));
  }
  const int g = action.size();
  if (povm.size() != g)
    throw ArgumentError("symmetrize_measurement: outcome count != group size");

  std::vector<Mat> us = action.unitaries;
  if (game.ancilla_dim && *game.ancilla_dim > 1) {
    const Mat ia = Mat::Identity(*game.ancilla_dim, *game.ancilla_dim);
    for (auto& u : us) u = kron(u, ia);
  }
  if (povm.dim() != us[0].rows())
    throw ArgumentError("symmetrize_measurement: measurement dim mismatch");

  Measurement out;
  out.labels = action.labels;
  out.effects.reserve(g);
  for (int tgt = 0; tgt < g; ++tgt) {
    Mat acc = Mat::Zero(povm.dim(), povm.dim());
    for (int h = 0; h < g; ++h)
      acc += us[h] * povm.effects[action.mult[action.inverse[h]][tgt]] * us[h].adjoint();
    out.effects.push_back(hermitize(acc / static_cast<double>(g)));
  }
  return out;
}

CovariantDiscrimination optimal_success_cyclic(const DensityMatrix& rho,
                                               const ChannelEnsemble& game, double tol) {
  if (game.ancilla_dim && *game.ancilla_dim > 1)
    throw ArgumentError("optimal_success_cyclic: ancilla games use the ancilla reduction");
  if (game.out_dim() != game.size())
    throw ArgumentError("optimal_success_cyclic: needs one outcome per output level");
  const Mat base = game.channels[0].apply(rho.mat());
  return cyclic_covariant_discrimination(hermitize(base), game.size(), tol);
}

namespace {

// Σ_n p_n Λ_n†(Π_n) (extended over the ancilla), so that success probabilities
// become Tr[h·ω] as a function of the probe state.
Mat pull_back_povm(const Measurement& povm, const ChannelEnsemble& game) {
  const int pd = game.probe_dim();
  Mat h = Mat::Zero(pd, pd);
  for (int n = 0; n < game.size(); ++n) {
    const CPMap adj = game.channels[n].adjoint();
    Mat part;
    if (game.ancilla_dim)
      part = apply_to_subsystem(adj, povm.effects[n], {game.out_dim(), *game.ancilla_dim}, 0);
    else
      part = adj.apply(povm.effects[n]);
    h += game.priors[n] * part;
  }
  return hermitize(h);
}

}  // namespace

SupOverFree sup_over_free(const FreeSet& f, const ChannelEnsemble& game, double tol,
                          int restarts, std::uint64_t seed) {
  SupOverFree out;
  if (std::holds_alternative<PolytopeFreeSet>(f)) {
    const auto& pf = std::get<PolytopeFreeSet>(f);
    out.mode = "polytope-exact";
    for (size_t i = 0; i < pf.generators.size(); ++i) {
      const double v = optimal_success(pf.generators[i], game, tol).value;
      if (v > out.value) {
        out.value = v;
        out.argmax_generator = static_cast<int>(i);
      }
    }
    return out;
  }

  const auto& cf = std::get<CFlexibleFreeSet>(f);
  out.mode = "cflexible-seesaw";
  out.restarts = restarts;
  for (int r = 0; r < restarts; ++r) {
    Rng rng(seed + static_cast<std::uint64_t>(r) * 1000003ULL);
    const int gi = rng.uniform_int(0, static_cast<int>(cf.a_generators.size()) - 1);
    Vec beta = rng.pure_ket(cf.dim_c);
    Mat omega = kron(cf.a_generators[gi].mat(), beta * beta.adjoint());
    double last = -1.0;
    for (int it = 0; it < 60; ++it) {
      const auto cert = optimal_success(DensityMatrix::trusted(omega), game, tol);
      const Mat h = pull_back_povm(cert.povm, game);
      const WitnessMax wm = max_witness_value(h, cf);
      omega = wm.maximizer;
      if (wm.value <= last + 1e-11) {
        last = std::max(last, wm.value);
        break;
      }
      last = wm.value;
    }
    out.value = std::max(out.value, last);
  }
  return out;
}

}  // namespace qrg
