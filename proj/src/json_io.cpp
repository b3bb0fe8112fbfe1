#include "qrg/json_io.hpp"

namespace qrg {

Json to_json(const Mat& m) {
  Json j;
  j["dim"] = static_cast<int>(m.rows());
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rrow = Json::array(), irow = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rrow.push_back(m(r, c).real());
      irow.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im"))
    throw ArgumentError("matrix JSON needs fields dim/re/im");
  const int d = j.at("dim").get<int>();
  if (d < 1) throw ArgumentError("matrix JSON: dim must be ≥ 1");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != d || static_cast<int>(im.size()) != d)
    throw ArgumentError("matrix JSON: row count != dim");
  Mat m(d, d);
  for (int r = 0; r < d; ++r) {
    if (static_cast<int>(re[r].size()) != d || static_cast<int>(im[r].size()) != d)
      throw ArgumentError("matrix JSON: column count != dim at row " + std::to_string(r));
    for (int c = 0; c < d; ++c)
      m(r, c) = Cplx(re[r][c].get<double>(), im[r][c].get<double>());
  }
  if (!all_finite(m)) throw ArgumentError("matrix JSON: non-finite entries");
  return m;
}

Json to_json(const CPMap& m) {
  Json j;
  j["in_dim"] = m.in_dim();
  j["out_dim"] = m.out_dim();
  j["choi"] = to_json(m.choi());
  j["kind"] = to_string(m.kind());
  return j;
}

CPMap cpmap_from_json(const Json& j) {
  const int in = j.at("in_dim").get<int>();
  const int out = j.at("out_dim").get<int>();
  const Mat choi = mat_from_json(j.at("choi"));
  MapKind kind = MapKind::cp;
  if (j.contains("kind")) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "cptp") kind = MapKind::cptp;
    else if (k == "tni") kind = MapKind::tni;
    else if (k == "cp") kind = MapKind::cp;
    else throw ArgumentError("cpmap JSON: unknown kind '" + k + "'");
  }
  return CPMap::from_choi_declared(choi, in, out, kind);
}

Json to_json(const Measurement& m) {
  Json j;
  Json effects = Json::array();
  for (const auto& e : m.effects) effects.push_back(to_json(e));
  j["effects"] = std::move(effects);
  j["labels"] = m.labels;
  return j;
}

Measurement measurement_from_json(const Json& j) {
  Measurement m;
  for (const auto& e : j.at("effects")) m.effects.push_back(hermitize(mat_from_json(e)));
  if (j.contains("labels")) m.labels = j.at("labels").get<std::vector<std::string>>();
  return m;
}

Json to_json(const FreeSet& f) {
  Json j;
  if (std::holds_alternative<PolytopeFreeSet>(f)) {
    const auto& pf = std::get<PolytopeFreeSet>(f);
    j["type"] = "polytope";
    Json gens = Json::array();
    for (const auto& g : pf.generators) gens.push_back(to_json(g.mat()));
    j["generators"] = std::move(gens);
  } else {
    const auto& cf = std::get<CFlexibleFreeSet>(f);
    j["type"] = "c_flexible";
    j["dims"] = Json{{"A", cf.dim_a}, {"C", cf.dim_c}};
    Json gens = Json::array();
    for (const auto& g : cf.a_generators) gens.push_back(to_json(g.mat()));
    j["a_generators"] = std::move(gens);
  }
  return j;
}

FreeSet free_set_from_json(const Json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "polytope") {
    std::vector<DensityMatrix> gens;
    for (const auto& g : j.at("generators"))
      gens.push_back(DensityMatrix::make(mat_from_json(g)));
    return PolytopeFreeSet::make(std::move(gens));
  }
  if (type == "c_flexible") {
    const int nc = j.at("dims").at("C").get<int>();
    std::vector<DensityMatrix> gens;
    for (const auto& g : j.at("a_generators"))
      gens.push_back(DensityMatrix::make(mat_from_json(g)));
    return CFlexibleFreeSet::make(nc, std::move(gens));
  }
  throw ArgumentError("free set JSON: unknown type '" + type + "'");
}

Json to_json(const ChannelEnsemble& g) {
  Json j;
  j["priors"] = g.priors;
  Json ch = Json::array();
  for (const auto& c : g.channels) ch.push_back(to_json(c));
  j["channels"] = std::move(ch);
  if (g.ancilla_dim) j["ancilla_dim"] = *g.ancilla_dim;
  return j;
}

ChannelEnsemble ensemble_from_json(const Json& j) {
  std::vector<double> priors = j.at("priors").get<std::vector<double>>();
  std::vector<CPMap> channels;
  for (const auto& c : j.at("channels")) channels.push_back(cpmap_from_json(c));
  std::optional<int> anc;
  if (j.contains("ancilla_dim")) anc = j.at("ancilla_dim").get<int>();
  return ChannelEnsemble::make(std::move(priors), std::move(channels), anc);
}

Json to_json(const SlackReport& s) {
  Json j;
  j["primal_psd_floor"] = s.primal_psd_floor;
  j["witness_psd_floor"] = s.witness_psd_floor;
  j["witness_budget_excess"] = s.witness_budget_excess;
  j["cs_weights"] = s.cs_weights;
  j["cs_slack"] = s.cs_slack;
  j["dual_residual"] = s.dual_residual;
  return j;
}

Json to_json(const RobustnessCertificate& c) {
  Json j;
  j["lambda_star"] = c.lambda_star;
  if (c.weights.size() > 0) {
    std::vector<double> w(c.weights.data(), c.weights.data() + c.weights.size());
    j["primal_weights"] = w;
  }
  if (!c.weight_blocks.empty()) {
    Json blocks = Json::array();
    for (const auto& b : c.weight_blocks) blocks.push_back(to_json(b));
    j["primal_weight_blocks"] = std::move(blocks);
  }
  j["dual_witness"] = to_json(c.dual_witness);
  j["gap"] = c.gap;
  j["slack_report"] = to_json(c.slack);
  j["iterations"] = c.iterations;
  return j;
}

RobustnessCertificate robustness_certificate_from_json(const Json& j) {
  RobustnessCertificate c;
  c.lambda_star = j.at("lambda_star").get<double>();
  if (j.contains("primal_weights")) {
    const auto w = j.at("primal_weights").get<std::vector<double>>();
    c.weights = Eigen::Map<const RVec>(w.data(), static_cast<long>(w.size()));
  }
  if (j.contains("primal_weight_blocks"))
    for (const auto& b : j.at("primal_weight_blocks"))
      c.weight_blocks.push_back(hermitize(mat_from_json(b)));
  c.dual_witness = hermitize(mat_from_json(j.at("dual_witness")));
  c.gap = j.at("gap").get<double>();
  const auto& s = j.at("slack_report");
  c.slack.primal_psd_floor = s.at("primal_psd_floor").get<double>();
  c.slack.witness_psd_floor = s.at("witness_psd_floor").get<double>();
  c.slack.witness_budget_excess = s.at("witness_budget_excess").get<double>();
  c.slack.cs_weights = s.at("cs_weights").get<double>();
  c.slack.cs_slack = s.at("cs_slack").get<double>();
  c.slack.dual_residual = s.at("dual_residual").get<double>();
  c.iterations = j.at("iterations").get<int>();
  return c;
}

Json to_json(const InfiniteRobustness& r) {
  Json j;
  j["classification"] = "infinite";
  j["projector"] = to_json(r.projector);
  j["tr_p_rho"] = r.tr_p_rho;
  return j;
}

Json to_json(const DiscriminationCertificate& c) {
  Json j;
  j["value"] = c.value;
  j["povm"] = to_json(c.povm);
  j["dual_y"] = to_json(c.dual_y);
  j["gap"] = c.gap;
  j["optimality_defect"] = c.optimality_defect;
  j["iterations"] = c.iterations;
  return j;
}

DiscriminationCertificate discrimination_certificate_from_json(const Json& j) {
  DiscriminationCertificate c;
  c.value = j.at("value").get<double>();
  c.povm = measurement_from_json(j.at("povm"));
  c.dual_y = hermitize(mat_from_json(j.at("dual_y")));
  c.gap = j.at("gap").get<double>();
  c.optimality_defect = j.at("optimality_defect").get<double>();
  c.iterations = j.at("iterations").get<int>();
  return c;
}

Json to_json(const GameReport& r) {
  Json j;
  j["numerator_value"] = r.numerator_value;
  j["denominator_value"] = r.denominator_value;
  j["ratio"] = r.ratio;
  if (r.covariant_scalar) j["covariant_scalar"] = *r.covariant_scalar;
  if (r.robustness_reference) j["robustness_reference"] = *r.robustness_reference;
  return j;
}

Json to_json(const InstanceSpec& s) {
  Json j;
  j["seed"] = s.seed;
  j["target"] = to_string(s.target);
  j["dims"] = Json{{"A", s.dim_a}, {"C", s.dim_c}};
  j["generators"] = s.generator_count;
  j["tol"] = s.tol;
  j["epsilon"] = s.epsilon;
  j["n_levels"] = s.n_levels;
  j["samples"] = s.samples;
  j["state"] = s.state_kind;
  if (s.explicit_state) j["explicit_state"] = to_json(*s.explicit_state);
  if (s.explicit_free_set) j["explicit_free_set"] = to_json(*s.explicit_free_set);
  return j;
}

InstanceSpec instance_spec_from_json(const Json& j) {
  InstanceSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.target = certify_target_from_string(j.at("target").get<std::string>());
  if (j.contains("dims")) {
    s.dim_a = j.at("dims").at("A").get<int>();
    if (j.at("dims").contains("C")) s.dim_c = j.at("dims").at("C").get<int>();
  }
  if (j.contains("generators")) s.generator_count = j.at("generators").get<int>();
  if (j.contains("tol")) s.tol = j.at("tol").get<double>();
  if (j.contains("epsilon")) s.epsilon = j.at("epsilon").get<double>();
  if (j.contains("n_levels")) s.n_levels = j.at("n_levels").get<int>();
  if (j.contains("samples")) s.samples = j.at("samples").get<int>();
  if (j.contains("state")) s.state_kind = j.at("state").get<std::string>();
  if (j.contains("explicit_state")) s.explicit_state = mat_from_json(j.at("explicit_state"));
  if (j.contains("explicit_free_set"))
    s.explicit_free_set = free_set_from_json(j.at("explicit_free_set"));
  return s;
}

Json to_json(const LedgerLine& l) {
  Json j;
  j["name"] = l.name;
  j["value"] = l.value;
  j["bound"] = l.bound;
  j["margin"] = l.margin;
  j["pass"] = l.pass;
  return j;
}

Json to_json(const InstanceReport& r) {
  Json j;
  j["seed"] = r.seed;
  j["target"] = r.target;
  j["pass"] = r.pass;
  if (!r.error.empty()) j["error"] = r.error;
  j["lambda_star"] = r.lambda_star;
  j["gap"] = r.gap;
  j["ratio"] = r.ratio;
  j["worst_margin"] = r.worst_margin;
  j["game"] = to_json(r.game_report);
  Json ledger = Json::array();
  for (const auto& l : r.ledger) ledger.push_back(to_json(l));
  j["ledger"] = std::move(ledger);
  return j;
}

Json to_json(const CampaignReport& r) {
  Json j;
  j["schema_version"] = 1;
  j["pass_count"] = r.pass_count;
  j["fail_count"] = r.fail_count;
  j["worst_margin"] = r.worst_margin;
  Json inst = Json::array();
  for (const auto& i : r.instances) inst.push_back(to_json(i));
  j["instances"] = std::move(inst);
  return j;
}

std::string campaign_csv(const CampaignReport& r) {
  std::string csv = "seed,target,lambda_star,gap,ratio,worst_margin,pass\n";
  for (const auto& i : r.instances) {
    csv += std::to_string(i.seed) + "," + i.target + "," + Json(i.lambda_star).dump() + "," +
           Json(i.gap).dump() + "," + Json(i.ratio).dump() + "," + Json(i.worst_margin).dump() +
           "," + (i.pass ? "1" : "0") + "\n";
  }
  return csv;
}

}  // namespace qrg
