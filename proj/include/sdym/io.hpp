#pragma once

#include <json.hpp>

#include "sdym/deform.hpp"

namespace sdym {

using json = nlohmann::json;

json to_json(cplx c);
cplx cplx_from_json(const json& j);
json to_json(const CMat& m);
CMat cmat_from_json(const json& j);

json to_json(const OneInstantonParams& p);
OneInstantonParams params_from_json(const json& j);

json to_json(const ADHMData& d);
ADHMData adhm_from_json(const json& j);

json to_json(const TwistorPoly& T);
TwistorPoly twistor_poly_from_json(const json& j);

// {"type": "scaling", "lam0", "flow_k"} | {"type": "affine", "lam0", "dlam", "dalpha", "dbeta"} | {"type": "frame", "lam0"}
ADHMFamily family_from_json(const json& j);
// compact command-line form: "scaling:lam0=1,k=1", "affine:dalpha=1", "frame"
json family_spec_from_string(const std::string& s);

// samples as [[re, im] x 4] per point
json to_json(const LoopMatrix& l);

json load_json_file(const std::string& path);

}  // namespace sdym
