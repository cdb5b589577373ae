#pragma once

#include <json.hpp>

#include "crnf/invariants.hpp"
#include "crnf/normalform.hpp"
#include "crnf/symmetry.hpp"

namespace crnf {

using Json = nlohmann::ordered_json;

Json json_pair(const InvariantPair& p);
Json json_triple(const Triple& t);
Json json_gauss(const GaussRat& v);
Json json_profile(const InvariantProfile& p);
Json json_group(const TorusSubgroup& g);
Json json_symmetry_block(const LambdaInput& lambda);
Json json_normalization(const NormalizationResult& r);
Json json_normalization(const BasicNormalizationResult<CBall>& r);
Json json_map_check(const MapCheck& c);
Json json_equivalence(const EquivalenceResult& r);
Json json_error(const ToolkitError& e);

}  // namespace crnf
