#include <doctest.h>

#include "qrg/constructions.hpp"
#include "qrg/rng.hpp"

using namespace qrg;

namespace {

DensityMatrix ket_state(int n, int d) {
  const Vec e = basis_ket(n, d);
  return DensityMatrix::make(e * e.adjoint());
}

DensityMatrix plus_state() {
  Mat p(2, 2);
  p << 0.5, 0.5, 0.5, 0.5;
  return DensityMatrix::make(p);
}

RobustnessCertificate certificate_for(const DensityMatrix& rho, const FreeSet& f) {
  return std::get<RobustnessCertificate>(robustness(rho, f, 1e-8));
}

}  // namespace

TEST_SUITE_BEGIN("constructions");

TEST_CASE("anchor compilation realizes the robustness as a game ratio") {
  const auto f = PolytopeFreeSet::make({ket_state(1, 2), ket_state(2, 2)});
  const DensityMatrix rho = plus_state();
  const auto cert = certificate_for(rho, FreeSet{f});
  const DirectGameCompilation comp = compile_direct_game(rho, f, cert);

  CHECK(comp.n_levels == 3);
  CHECK(max_abs(comp.witness - rho.mat()) < 1e-5);  // e = |+⟩⟨+|
  CHECK(comp.witness_overlap == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(covariance_check(comp.game, comp.action).pass);

  const double num = optimal_success(rho, comp.game, 1e-8).value;
  const SupOverFree den = sup_over_free(FreeSet{f}, comp.game, 1e-8);
  CHECK(num / den.value == doctest::Approx(2.0).epsilon(1e-5));
  // the free-set supremum of the compiled game is the witness overlap
  CHECK(std::abs(den.value - comp.witness_overlap) < 1e-6);

  // the designed projective measurement reads the witness exactly
  CHECK(success_probability(rho, comp.designed_povm, comp.game) ==
        doctest::Approx((comp.witness * rho.mat()).trace().real()).epsilon(1e-10));
  CHECK(validate_povm(comp.designed_povm).pass);
}

TEST_CASE("member probes compile to flat games") {
  const auto f = PolytopeFreeSet::make({ket_state(1, 2), ket_state(2, 2)});
  const DensityMatrix rho = ket_state(1, 2);
  const auto cert = certificate_for(rho, FreeSet{f});
  const DirectGameCompilation comp = compile_direct_game(rho, f, cert);
  const double num = optimal_success(rho, comp.game, 1e-8).value;
  const SupOverFree den = sup_over_free(FreeSet{f}, comp.game, 1e-8);
  CHECK(num / den.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("random qubit instances stay within the d+1 level bound") {
  Rng rng(137);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DensityMatrix> gens;
    for (int i = 0; i < 1 + trial % 3; ++i)
      gens.push_back(DensityMatrix::make(rng.mixed_state(2)));
    gens.push_back(DensityMatrix::make(Mat::Identity(2, 2) / 2.0));
    const auto f = PolytopeFreeSet::make(gens);
    const DensityMatrix rho = DensityMatrix::make(rng.mixed_state(2));
    const auto cert = certificate_for(rho, FreeSet{f});
    const DirectGameCompilation comp = compile_direct_game(rho, f, cert);
    CHECK(comp.n_levels <= 3);
    CHECK(comp.witness_overlap >= 0.5 - 1e-9);  // I/2 alone guarantees this
  }
}

TEST_CASE("degenerate witnesses are rejected") {
  const auto f = PolytopeFreeSet::make({ket_state(1, 2)});
  RobustnessCertificate fake;
  fake.lambda_star = 0.0;
  fake.weights = RVec::Ones(1);
  fake.gap = 0.0;
  fake.dual_witness = ket_state(2, 2).mat();  // orthogonal to every generator
  CHECK_THROWS_AS(compile_direct_game(ket_state(1, 2), f, fake), NumericalError);

  // A witness almost orthogonal to the free set normalizes to a tiny overlap
  // and demands more game levels than the cap allows.
  fake.dual_witness = ket_state(2, 2).mat() + 1e-4 * ket_state(1, 2).mat();
  CHECK_THROWS_AS(compile_direct_game(ket_state(1, 2), f, fake), TooLargeError);

  RobustnessCertificate sloppy;
  sloppy.gap = 1.0;
  sloppy.weights = RVec::Ones(1);
  sloppy.dual_witness = Mat::Identity(2, 2);
  CHECK_THROWS_AS(compile_direct_game(ket_state(1, 2), f, sloppy), PreconditionError);
}

TEST_CASE("divergence games grow linearly") {
  const auto f = PolytopeFreeSet::make({ket_state(1, 2)});
  const DivergenceGame dg = compile_divergence_game(plus_state(), f, 11, 1e-8);
  CHECK(dg.tr_p_rho == doctest::Approx(0.5));
  CHECK(dg.achieved_ratio >= 5.0 - 1e-6);
  CHECK(dg.denominator <= 1.0 / 10 + 1e-9);

  const DivergenceGame dg4 = compile_divergence_game(plus_state(), f, 4, 1e-8);
  const DivergenceGame dg8 = compile_divergence_game(plus_state(), f, 8, 1e-8);
  const DivergenceGame dg16 = compile_divergence_game(plus_state(), f, 16, 1e-8);
  CHECK(dg8.achieved_ratio >= 2.0 * dg4.achieved_ratio - 1e-6);
  CHECK(dg16.achieved_ratio >= 2.0 * dg8.achieved_ratio - 1e-6);

  CHECK_THROWS_AS(compile_divergence_game(ket_state(1, 2), f, 8, 1e-8), ArgumentError);
  CHECK_THROWS_AS(compile_divergence_game(plus_state(), f, 1, 1e-8), ArgumentError);
}

TEST_CASE("ancilla subchannels read the witness") {
  Rng rng(139);
  const auto cf = CFlexibleFreeSet::make(
      2, {DensityMatrix::make(rng.mixed_state(2)),
          DensityMatrix::make(Mat::Identity(2, 2) / 2.0)});
  const DensityMatrix rho = DensityMatrix::make(rng.mixed_state(4));
  const auto cert = certificate_for(rho, FreeSet{cf});

  const AncillaGameCompilation comp =
      compile_ancilla_subchannels(cert, FreeSet{cf}, 2, 2, 0.05);
  CHECK(validate_subchannels(comp.subchannels).pass);

  // Tr[Λ̃_1(σ)] = Tr[σ·Tr_C e] and the total trace is preserved.
  const Mat trc_e = partial_trace_positions(comp.witness, {2, 2}, {0});
  for (int trial = 0; trial < 100; ++trial) {
    const Mat sigma = rng.mixed_state(2);
    const double head = comp.subchannels.maps[0].apply(sigma).trace().real();
    CHECK(std::abs(head - (sigma * trc_e).trace().real()) < 1e-10);
    double total = 0.0;
    for (const auto& m : comp.subchannels.maps) total += m.apply(sigma).trace().real();
    CHECK(std::abs(total - 1.0) < 1e-10);
  }

  // Witness readout against the entangled probe identity.
  for (int trial = 0; trial < 100; ++trial) {
    const Mat test = rng.mixed_state(4);
    const double lhs = witness_readout(comp, DensityMatrix::trusted(test));
    const double rhs = comp.c_scale * (cert.dual_witness * test).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-9);
  }

  CHECK_THROWS_AS(compile_ancilla_subchannels(cert, FreeSet{cf}, 2, 2, -0.1), ArgumentError);
  const auto poly = PolytopeFreeSet::make({DensityMatrix::make(Mat::Identity(4, 4) / 4.0)});
  const auto cert_poly = certificate_for(rho, FreeSet{poly});
  CHECK_THROWS_AS(compile_ancilla_subchannels(cert_poly, FreeSet{poly}, 2, 2, 0.0),
                  PreconditionError);
}

TEST_CASE("assembled ancilla games and the designed measurement") {
  Rng rng(149);
  const auto cf = CFlexibleFreeSet::make(
      2, {DensityMatrix::make(Mat::Identity(2, 2) / 2.0)});
  const DensityMatrix rho = DensityMatrix::make(max_entangled(2) / 2.0);
  const auto cert = certificate_for(rho, FreeSet{cf});
  CHECK(cert.lambda_star == doctest::Approx(3.0).epsilon(1e-6));

  const AncillaGameCompilation comp = compile_ancilla_game(cert, FreeSet{cf}, 2, 2, 0.0);
  REQUIRE(comp.game.has_value());
  REQUIRE(comp.psi.has_value());

  // every compiled channel is CPTP by construction
  for (const auto& ch : comp.game->channels) {
    CHECK(ch.kind() == MapKind::cptp);
    CHECK(min_eigenvalue(ch.choi()) > -1e-9);
  }
  CHECK(validate_povm(*comp.psi, kPsdTol, 1e-10).pass);
  CHECK(covariance_check(*comp.game, comp.action).pass);

  // full-sum evaluation agrees with the covariant single-term path
  const double designed = ancilla_game_designed_value(comp, rho);
  CHECK(std::abs(success_probability(rho, *comp.psi, *comp.game) - designed) < 1e-12);
  CHECK(2 * designed == doctest::Approx((comp.witness * rho.mat()).trace().real())
                            .epsilon(1e-9));
}

TEST_CASE("ancilla covariant reduction cross-checked against the dense solve") {
  // The entangled probe against the one-generator model compiles to a small
  // three-level game, keeping the dense reference solve cheap.
  const auto cf = CFlexibleFreeSet::make(
      2, {DensityMatrix::make(Mat::Identity(2, 2) / 2.0)});
  const DensityMatrix rho = DensityMatrix::make(max_entangled(2) / 2.0);
  const auto cert = certificate_for(rho, FreeSet{cf});
  const AncillaGameCompilation comp = compile_ancilla_game(cert, FreeSet{cf}, 2, 2, 0.0);
  REQUIRE(comp.game.has_value());
  REQUIRE(comp.n_levels == 3);

  const AncillaCovariantDiscrimination cov = ancilla_game_optimal(comp, rho, 1e-8);
  const auto states = game_output_states(rho, *comp.game);
  const double dense = min_error_discrimination(states, 1e-8).value;
  CHECK(std::abs(dense - cov.value) < 2e-6);
  CHECK(cov.gap < 1e-6);
  CHECK(cov.value >= ancilla_game_designed_value(comp, rho) - 2e-6);

  // A mixed probe exercises the weakly complementary corner of the reduction.
  Rng rng(151);
  const DensityMatrix mixed = DensityMatrix::make(rng.mixed_state(4));
  const auto cert2 = certificate_for(mixed, FreeSet{cf});
  const AncillaGameCompilation comp2 = compile_ancilla_game(cert2, FreeSet{cf}, 2, 2, 0.0);
  const AncillaCovariantDiscrimination cov2 = ancilla_game_optimal(comp2, mixed, 1e-8);
  CHECK(cov2.gap < 1e-6);
  CHECK(cov2.value >= ancilla_game_designed_value(comp2, mixed) - 2e-6);
}

TEST_CASE("extraction from the designed measurement returns the identity head") {
  Rng rng(157);
  const auto cf = CFlexibleFreeSet::make(
      2, {DensityMatrix::make(rng.mixed_state(2)),
          DensityMatrix::make(Mat::Identity(2, 2) / 2.0)});
  const DensityMatrix rho = DensityMatrix::make(rng.mixed_state(4));
  const auto cert = certificate_for(rho, FreeSet{cf});
  const AncillaGameCompilation comp = compile_ancilla_game(cert, FreeSet{cf}, 2, 2, 0.0);

  const SubchannelCollection gam =
      extract_ancilla_subchannels(comp.psi_base, comp.n_levels, 2);
  CHECK(max_abs(gam.maps[0].choi() - CPMap::identity(2).choi()) < 1e-12);
  for (int n = 1; n < comp.n_levels; ++n) CHECK(max_abs(gam.maps[n].choi()) < 1e-12);

  // non-covariant and non-dephased measurements are rejected
  REQUIRE(comp.psi.has_value());
  Measurement broken = *comp.psi;
  broken.effects[1] = broken.effects[2];
  CHECK_THROWS_AS(extract_ancilla_subchannels(broken, comp.action, comp),
                  PreconditionError);
}

TEST_CASE("channels on the ancilla never help a free probe") {
  Rng rng(163);
  const auto cf = CFlexibleFreeSet::make(
      2, {DensityMatrix::make(rng.mixed_state(2)),
          DensityMatrix::make(Mat::Identity(2, 2) / 2.0)});
  const DensityMatrix rho = DensityMatrix::make(rng.mixed_state(4));
  const auto cert = certificate_for(rho, FreeSet{cf});
  const AncillaGameCompilation comp = compile_ancilla_game(cert, FreeSet{cf}, 2, 2, 0.0);

  for (int trial = 0; trial < 6; ++trial) {
    const Mat omega = kron(cf.a_generators[rng.uniform_int(0, 1)].mat(), rng.pure_state(2));
    // random channel on C
    Mat j = rng.psd(4);
    const Mat marg = partial_trace_positions(j, {2, 2}, {0});
    const EigH es = eigh(marg);
    Mat isq = Mat::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
      isq += es.vectors.col(i) * es.vectors.col(i).adjoint() / std::sqrt(es.values[i]);
    const CPMap channel = CPMap::from_choi(
        hermitize(kron(isq, Mat::Identity(2, 2)) * j * kron(isq, Mat::Identity(2, 2))), 2, 2);
    const Mat moved = apply_to_subsystem(channel, omega, {2, 2}, 1);

    const double before = ancilla_game_optimal(comp, DensityMatrix::trusted(omega)).value;
    const double after = ancilla_game_optimal(comp, DensityMatrix::trusted(moved)).value;
    CHECK(after <= before + 1e-7);
  }
}

TEST_SUITE_END();
