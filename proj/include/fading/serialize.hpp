#pragma once

// JSON forms of states, channels and reports. Parsing is strict: unknown
// fields are rejected and errors name the offending field path.

#include <complex>
#include <filesystem>
#include <initializer_list>
#include <set>
#include <string>

#include <json.hpp>

#include "fading/channel.hpp"
#include "fading/gaussian_state.hpp"
#include "fading/pdt.hpp"
#include "fading/witness.hpp"

namespace fading {

using nlohmann::json;

/// Reads fields of a JSON object, remembering which were used, so that
/// finish() can reject anything left over.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path);

  bool has(const std::string& key) const;
  const json& required(const std::string& key);
  const json* optional(const std::string& key);
  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  std::string string(const std::string& key);
  std::string field_path(const std::string& key) const;
  const std::string& path() const { return path_; }
  void finish() const;

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json to_json(std::complex<double> z);
std::complex<double> complex_from_json(const json& j, const std::string& path);

json to_json(const GaussianState<double>& state);
GaussianState<double> state_from_json(const json& j, const std::string& path = "state");

json to_json(const ChannelMoments<double>& m);
ChannelMoments<double> moments_from_json(const json& j,
                                         const std::string& path = "moments");

json to_json(const WitnessReport<double>& r);
json to_json(const DuanReport<double>& r);
json to_json(const MomentEstimate& e);

json to_json(const Marginal& m);
Marginal marginal_from_json(const json& j, const std::string& path);

/// Channel spec:
/// {"kind": ..., "params": {...}, "quadrature": {"tol": ...}, "mc": {...}}.
/// Relative CSV paths for empirical samples resolve against base_dir.
json to_json(const PdtModel& model);
PdtModel pdt_from_json(const json& j, const std::string& path = "channel",
                       const std::filesystem::path& base_dir = {});

}  // namespace fading
