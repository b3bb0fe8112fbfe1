#pragma once

#include <json.hpp>

#include "qrg/certify.hpp"
#include "qrg/constructions.hpp"
#include "qrg/games.hpp"
#include "qrg/solvers.hpp"

namespace qrg {

/// Insertion-ordered JSON keeps serialization byte-stable across runs.
using Json = nlohmann::ordered_json;

// Matrix schema: {"dim": n, "re": [[...]], "im": [[...]]}, row-major doubles.
Json to_json(const Mat& m);
Mat mat_from_json(const Json& j);

Json to_json(const CPMap& m);
CPMap cpmap_from_json(const Json& j);

Json to_json(const Measurement& m);
Measurement measurement_from_json(const Json& j);

Json to_json(const FreeSet& f);
FreeSet free_set_from_json(const Json& j);

Json to_json(const ChannelEnsemble& g);
ChannelEnsemble ensemble_from_json(const Json& j);

Json to_json(const SlackReport& s);
Json to_json(const RobustnessCertificate& c);
RobustnessCertificate robustness_certificate_from_json(const Json& j);
Json to_json(const InfiniteRobustness& r);

Json to_json(const DiscriminationCertificate& c);
DiscriminationCertificate discrimination_certificate_from_json(const Json& j);

Json to_json(const GameReport& r);

Json to_json(const InstanceSpec& s);
InstanceSpec instance_spec_from_json(const Json& j);

Json to_json(const LedgerLine& l);
Json to_json(const InstanceReport& r);
Json to_json(const CampaignReport& r);

/// CSV summary: one row per instance (seed, target, lambda, gap, ratio,
/// worst margin, pass).
std::string campaign_csv(const CampaignReport& r);

}  // namespace qrg
