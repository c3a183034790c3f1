#pragma once

// JSON readers and writers for the CLI-facing file formats.
//
//   curve     {"model": "hyperelliptic-odd"|"hyperelliptic-even", "coeffs": ["1", "0", "-3/2", ...]}
//   divisor   [{"place": {"x": "1/2"|"inf0"|"inf1", "sheet": 1|-1|"branch"}, "mult": 2}, ...]
//             entries may also be {"fiber": "x0", "mult": k} (both points over x0) or a raw fibre entry
//             {"entry": {"kind": "branch"|"split"|"symmetric", "q": [...], "r": [...], "mult": k, "mult_minus": k}}
//   function  {"a": [...], "b": [...], "h": [...]}   meaning (a(x) + b(x) y) / h(x)
//   weierstrass
//     {"domain": "plane"|"torus", "phi": {"num": [...], "den": [...]}, "omega": {"num": [...], "den": [...]},
//      "punctures": [[re, im], ...]}
//     {"domain": <curve>, "phi": <function>, "omega": <function f, omega = f dx/y>}
//   complex coefficients are numbers or [re, im] pairs.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spectralab/conformal_max.hpp"
#include "spectralab/curve.hpp"
#include "spectralab/harmonic_ledger.hpp"
#include "spectralab/spectral.hpp"
#include "spectralab/weierstrass.hpp"

namespace spectralab::io {

using nlohmann::json;

/// Throws InputError on missing files or malformed JSON.
json read_json(const std::string& path);
void write_json(const json& j, const std::string& path);

/// 64-bit FNV-1a of the file bytes, as 16 hex digits.
std::string fnv1a_file(const std::string& path);
std::string fnv1a(const std::string& bytes);

Poly poly_from_json(const json& j);
json poly_to_json(const Poly& p);

curve::HyperellipticCurve curve_from_json(const json& j);
json curve_to_json(const curve::HyperellipticCurve& c);

curve::Divisor divisor_from_json(const curve::HyperellipticCurve& c, const json& j);
/// Rational places are written as places, other fibres as raw entries.
json divisor_to_json(const curve::Divisor& d);

curve::MeromorphicFunction function_from_json(const curve::HyperellipticCurve& c, const json& j);
json function_to_json(const curve::MeromorphicFunction& f);

struct WeierstrassInput {
  weierstrass::Domain domain = weierstrass::Domain::Plane;
  std::optional<weierstrass::PlanarData> planar;
  std::optional<weierstrass::CurveData> curve;
};
WeierstrassInput weierstrass_from_json(const json& j);
json weierstrass_to_json(const weierstrass::PlanarData& d, weierstrass::Domain domain = weierstrass::Domain::Plane);
json weierstrass_to_json(const weierstrass::CurveData& d);

weierstrass::Complex complex_from_json(const json& j);
json complex_to_json(weierstrass::Complex z);

ledger::HarmonicMapRecord record_from_json(const json& j);
json record_to_json(const ledger::HarmonicMapRecord& r);
/// Accepts a single record, a list, or {"records": [...]}.
std::vector<ledger::HarmonicMapRecord> records_from_json(const json& j);

json to_json(const ledger::BoundReport& b);
json to_json(const spectral::YangYauReport& r);
json to_json(const spectral::IndexResult& r);
json to_json(const curve::RiemannRochReport& r);

/// Unknown keys are rejected; missing keys keep their defaults.
conformal::MaximizeConfig config_from_json(const json& j);
json config_to_json(const conformal::MaximizeConfig& c);

}  // namespace spectralab::io
