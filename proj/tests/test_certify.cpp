#include <doctest.h>

#include "qrg/certify.hpp"
#include "qrg/json_io.hpp"

using namespace qrg;

TEST_SUITE_BEGIN("certify");

TEST_CASE("seeded instances are reproducible bit for bit") {
  InstanceSpec spec;
  spec.seed = 99;
  spec.target = CertifyTarget::thm1;
  spec.generator_count = 3;
  auto [rho1, f1] = random_instance(spec);
  auto [rho2, f2] = random_instance(spec);
  CHECK((rho1.mat().array() == rho2.mat().array()).all());
  const auto& p1 = std::get<PolytopeFreeSet>(f1);
  const auto& p2 = std::get<PolytopeFreeSet>(f2);
  REQUIRE(p1.generators.size() == p2.generators.size());
  for (size_t i = 0; i < p1.generators.size(); ++i)
    CHECK((p1.generators[i].mat().array() == p2.generators[i].mat().array()).all());

  // generated data is valid and the polytope has full support
  CHECK_NOTHROW((void)DensityMatrix::make(rho1.mat()));
  CHECK(support_space(p1).full());
}

TEST_CASE("campaigns are deterministic as serialized bytes") {
  InstanceSpec defaults;
  defaults.tol = 1e-7;
  auto specs = build_campaign(CertifyTarget::thm1, 21, 3, defaults);
  const auto thm2_specs = build_campaign(CertifyTarget::thm2, 5, 1, defaults);
  specs.insert(specs.end(), thm2_specs.begin(), thm2_specs.end());

  const std::string once = to_json(run_campaign(specs, 2)).dump();
  const std::string twice = to_json(run_campaign(specs, 1)).dump();
  CHECK(once == twice);
}

TEST_CASE("empty campaigns produce empty reports") {
  const CampaignReport rep = run_campaign({});
  CHECK(rep.instances.empty());
  CHECK(rep.pass_count == 0);
  CHECK(rep.fail_count == 0);
  CHECK(rep.all_pass());
}

TEST_CASE("instance failures are recorded without aborting the campaign") {
  InstanceSpec bad;
  bad.seed = 1;
  bad.target = CertifyTarget::thm1;
  Mat plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  bad.state_kind = "explicit";
  bad.explicit_state = plus;
  const Vec e1 = basis_ket(1, 2);
  bad.explicit_free_set =
      FreeSet{PolytopeFreeSet::make({DensityMatrix::make(e1 * e1.adjoint())})};

  InstanceSpec good;
  good.seed = 2;
  good.target = CertifyTarget::thm1;

  const CampaignReport rep = run_campaign({bad, good}, 1);
  CHECK(rep.fail_count == 1);
  CHECK(rep.pass_count == 1);
  CHECK_FALSE(rep.instances[0].pass);
  CHECK_FALSE(rep.instances[0].error.empty());
  CHECK(rep.instances[1].pass);
}

TEST_CASE("campaign ledgers carry the certified inequality lines") {
  InstanceSpec defaults;
  const auto specs = build_campaign(CertifyTarget::thm1, 3, 2, defaults);
  const CampaignReport rep = run_campaign(specs, 1);
  REQUIRE(rep.pass_count == 2);
  for (const auto& inst : rep.instances) {
    bool has_gap = false, has_ratio = false;
    for (const auto& l : inst.ledger) {
      if (l.name == "duality gap") has_gap = true;
      if (l.name == "relative ratio error against 1+λ*") has_ratio = true;
    }
    CHECK(has_gap);
    CHECK(has_ratio);
    CHECK(inst.worst_margin >= 0.0);
  }
}

TEST_CASE("campaign CSV has one row per instance") {
  InstanceSpec defaults;
  const auto specs = build_campaign(CertifyTarget::cor1, 11, 3, defaults);
  const CampaignReport rep = run_campaign(specs, 2);
  const std::string csv = campaign_csv(rep);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);  // header + 3 rows
  CHECK(csv.rfind("seed,target,", 0) == 0);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("json");

TEST_CASE("matrix serialization is lossless") {
  Rng rng(167);
  const Mat m = rng.ginibre(3, 3);
  const Json j = to_json(m);
  const Mat back = mat_from_json(j);
  CHECK((m.array() == back.array()).all());
  CHECK(to_json(back).dump() == j.dump());

  CHECK_THROWS_AS(mat_from_json(Json{{"dim", 2}}), ArgumentError);
  Json ragged = to_json(m);
  ragged["re"][0] = Json::array({1.0});
  CHECK_THROWS_AS(mat_from_json(ragged), ArgumentError);
}

TEST_CASE("container schemas round trip") {
  Rng rng(173);

  const CPMap map = CPMap::depolarizing(2);
  const CPMap map2 = cpmap_from_json(to_json(map));
  CHECK(max_abs(map.choi() - map2.choi()) == 0.0);
  CHECK(map2.kind() == MapKind::cptp);

  const FreeSet f = FreeSet{PolytopeFreeSet::make(
      {DensityMatrix::make(rng.mixed_state(2)),
       DensityMatrix::make(Mat::Identity(2, 2) / 2.0)})};
  CHECK(to_json(free_set_from_json(to_json(f))).dump() == to_json(f).dump());

  const FreeSet cf = FreeSet{CFlexibleFreeSet::make(
      2, {DensityMatrix::make(Mat::Identity(2, 2) / 2.0)})};
  CHECK(to_json(free_set_from_json(to_json(cf))).dump() == to_json(cf).dump());

  const ChannelEnsemble game = ChannelEnsemble::make(
      {0.5, 0.5}, {CPMap::identity(2), CPMap::depolarizing(2)}, 2);
  CHECK(to_json(ensemble_from_json(to_json(game))).dump() == to_json(game).dump());

  InstanceSpec spec;
  spec.seed = 7;
  spec.target = CertifyTarget::thm2;
  spec.epsilon = 0.05;
  CHECK(to_json(instance_spec_from_json(to_json(spec))).dump() == to_json(spec).dump());
}

TEST_CASE("certificates round trip losslessly") {
  Rng rng(179);
  const FreeSet f = FreeSet{PolytopeFreeSet::make(
      {DensityMatrix::make(rng.mixed_state(2)),
       DensityMatrix::make(Mat::Identity(2, 2) / 2.0)})};
  const DensityMatrix rho = DensityMatrix::make(rng.pure_state(2));
  const auto cert = std::get<RobustnessCertificate>(robustness(rho, f, 1e-8));
  const Json j = to_json(cert);
  const RobustnessCertificate back = robustness_certificate_from_json(j);
  CHECK(to_json(back).dump() == j.dump());

  const auto disc = min_error_discrimination(
      {{0.5, rng.mixed_state(2)}, {0.5, rng.mixed_state(2)}}, 1e-8);
  const Json dj = to_json(disc);
  CHECK(to_json(discrimination_certificate_from_json(dj)).dump() == dj.dump());
}

TEST_SUITE_END();
