#include <doctest.h>

#include "qrg/channels.hpp"
#include "qrg/rng.hpp"

using namespace qrg;

namespace {

// Random CPTP map via a Haar isometry: K_k = (I⊗⟨k|) V with V from a unitary
// on in ⊗ env. Gives an honest Kraus-sum oracle for apply().
std::vector<Mat> random_kraus(Rng& rng, int in, int out, int n_kraus) {
  const int big = out * n_kraus;
  const Mat u = rng.unitary(std::max(big, in));
  std::vector<Mat> kraus(n_kraus, Mat::Zero(out, in));
  for (int k = 0; k < n_kraus; ++k)
    for (int b = 0; b < out; ++b)
      for (int a = 0; a < in; ++a) kraus[k](b, a) = u(b * n_kraus + k, a);
  return kraus;
}

}  // namespace

TEST_SUITE_BEGIN("channels");

TEST_CASE("kraus construction basics") {
  const CPMap id2 = CPMap::from_kraus({Mat::Identity(2, 2)}, 2, 2);
  CHECK(id2.kind() == MapKind::cptp);
  CHECK(max_abs(id2.choi() - max_entangled(2)) < 1e-14);

  const Vec e1 = basis_ket(1, 2);
  const CPMap meas = CPMap::from_kraus({e1 * e1.adjoint()}, 2, 2);
  CHECK(meas.kind() == MapKind::tni);
  Rng rng(3);
  const Mat rho = rng.mixed_state(2);
  CHECK(meas.apply(rho).trace().real() ==
        doctest::Approx((e1.adjoint() * rho * e1)(0, 0).real()));

  const auto pauli = generalized_pauli(2);
  const CPMap flip = CPMap::from_kraus({pauli.shift}, 2, 2);
  const Vec e2 = basis_ket(2, 2);
  CHECK(max_abs(flip.apply(e1 * e1.adjoint()) - e2 * e2.adjoint()) < 1e-14);

  CHECK_THROWS_AS(CPMap::from_kraus({Mat::Identity(3, 3)}, 2, 2), ArgumentError);
}

TEST_CASE("apply matches the Kraus sum") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto kraus = random_kraus(rng, 2, 3, 2);
    const CPMap map = CPMap::from_kraus(kraus, 2, 3);
    CHECK(map.kind() == MapKind::cptp);
    const Mat rho = rng.mixed_state(2);
    Mat expect = Mat::Zero(3, 3);
    for (const auto& k : kraus) expect += k * rho * k.adjoint();
    CHECK(max_abs(map.apply(rho) - expect) < 1e-12);
    CHECK(std::abs(map.apply(rho).trace().real() - 1.0) < 1e-10);
  }

  const CPMap dep = CPMap::depolarizing(3);
  const Mat rho = rng.mixed_state(3);
  CHECK(max_abs(dep.apply(rho) - Mat::Identity(3, 3) / 3.0) < 1e-12);
  CHECK(max_abs(CPMap::identity(3).apply(rho) - rho) < 1e-14);
}

TEST_CASE("tensor of maps") {
  const CPMap id2 = CPMap::identity(2);
  CHECK(max_abs(tensor(id2, id2).choi() - CPMap::identity(4).choi()) < 1e-13);

  Rng rng(7);
  const CPMap lam = CPMap::from_kraus(random_kraus(rng, 2, 2, 2), 2, 2);
  const CPMap t = tensor(lam, id2);
  const Mat rho_a = rng.mixed_state(2), sigma_c = rng.mixed_state(2);
  CHECK(max_abs(t.apply(kron(rho_a, sigma_c)) - kron(lam.apply(rho_a), sigma_c)) < 1e-12);

  // Entangled inputs: tensor must agree with applying to the first factor.
  const Mat rho_ac = rng.mixed_state(4);
  CHECK(max_abs(t.apply(rho_ac) - apply_to_subsystem(lam, rho_ac, {2, 2}, 0)) < 1e-12);
  CHECK(t.kind() == MapKind::cptp);

  const CPMap tni = CPMap::from_kraus({0.5 * Mat::Identity(2, 2)}, 2, 2);
  CHECK(tensor(tni, id2).kind() == MapKind::tni);
}

TEST_CASE("adjoint duality") {
  const CPMap id2 = CPMap::identity(2);
  CHECK(max_abs(id2.adjoint().choi() - id2.choi()) < 1e-14);

  const CPMap dep = CPMap::depolarizing(2);
  CHECK(max_abs(dep.adjoint().apply(Mat::Identity(2, 2)) - Mat::Identity(2, 2)) < 1e-13);

  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const CPMap map = CPMap::from_kraus(random_kraus(rng, 2, 3, 2), 2, 3);
    const CPMap adj = map.adjoint();
    const Mat x = hermitize(rng.ginibre(2, 2));
    const Mat y = hermitize(rng.ginibre(3, 3));
    const double lhs = (adj.apply(y) * x).trace().real();
    const double rhs = (y * map.apply(x)).trace().real();
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("composition") {
  Rng rng(11);
  const CPMap lam = CPMap::from_kraus(random_kraus(rng, 2, 2, 2), 2, 2);
  CHECK(max_abs(compose(CPMap::identity(2), lam).choi() - lam.choi()) < 1e-12);

  const CPMap dep = CPMap::depolarizing(2);
  CHECK(max_abs(compose(dep, dep).choi() - dep.choi()) < 1e-12);

  for (int trial = 0; trial < 5; ++trial) {
    const CPMap f = CPMap::from_kraus(random_kraus(rng, 2, 3, 2), 2, 3);
    const CPMap g = CPMap::from_kraus(random_kraus(rng, 3, 2, 3), 3, 2);
    const CPMap gf = compose(g, f);
    for (int s = 0; s < 10; ++s) {
      const Mat rho = rng.mixed_state(2);
      CHECK(max_abs(gf.apply(rho) - g.apply(f.apply(rho))) < 1e-10);
    }
  }
  CHECK_THROWS_AS(compose(CPMap::identity(3), CPMap::identity(2)), ArgumentError);
}

TEST_CASE("kind classification is monotone and verified") {
  Rng rng(13);
  const CPMap cptp = CPMap::from_kraus(random_kraus(rng, 2, 2, 2), 2, 2);
  const ChoiValidation v = CPMap::classify(cptp.choi(), 2, 2);
  CHECK(v.actual == MapKind::cptp);
  CHECK(v.tni_excess <= 1e-9);  // every CPTP also passes the TNI test
  CHECK(v.completely_positive);

  // A misdeclared kind is downgraded, with the downgrade flagged.
  ChoiValidation rep;
  const CPMap half = CPMap::from_choi_declared(0.5 * cptp.choi(), 2, 2, MapKind::cptp, &rep);
  CHECK(half.kind() == MapKind::tni);
  CHECK(rep.downgraded);

  CHECK_THROWS_AS(CPMap::from_choi(-Mat::Identity(4, 4), 2, 2), ArgumentError);
}

TEST_CASE("povm validation") {
  CHECK(validate_povm(computational_povm(3)).pass);

  Measurement halves;
  halves.effects = {0.5 * Mat::Identity(2, 2), 0.5 * Mat::Identity(2, 2)};
  CHECK(validate_povm(halves).pass);

  Measurement overfull;
  overfull.effects = {Mat::Identity(2, 2), Mat::Identity(2, 2)};
  const PovmReport rep = validate_povm(overfull);
  CHECK_FALSE(rep.pass);
  CHECK(rep.sum_defect == doctest::Approx(1.0));
}

TEST_CASE("subchannel validation") {
  Rng rng(17);
  const auto kraus = random_kraus(rng, 2, 2, 2);
  SubchannelCollection sub;
  for (const auto& k : kraus) sub.maps.push_back(CPMap::from_kraus({k}, 2, 2));
  CHECK(validate_subchannels(sub).pass);

  sub.maps.push_back(CPMap::from_kraus({0.3 * Mat::Identity(2, 2)}, 2, 2));
  CHECK_FALSE(validate_subchannels(sub).pass);
}

TEST_CASE("apply to a labeled subsystem") {
  Rng rng(19);
  const CPMap lam = CPMap::from_kraus(random_kraus(rng, 2, 2, 2), 2, 2);
  const Mat rho = rng.mixed_state(8);
  // Middle subsystem of a 2⊗2⊗2 profile: compare against the full tensor.
  const CPMap big = tensor(tensor(CPMap::identity(2), lam), CPMap::identity(2));
  CHECK(max_abs(apply_to_subsystem(lam, rho, {2, 2, 2}, 1) - big.apply(rho)) < 1e-12);
  CHECK_THROWS_AS(apply_to_subsystem(lam, rho, {2, 2, 2}, 3), ArgumentError);
  CHECK_THROWS_AS(apply_to_subsystem(lam, rho, {2, 4}, 1), ArgumentError);
}

TEST_SUITE_END();
