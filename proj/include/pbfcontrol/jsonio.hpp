#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pbfcontrol/enkf.hpp"
#include "pbfcontrol/fem.hpp"
#include "pbfcontrol/geometry.hpp"
#include "pbfcontrol/system.hpp"

namespace pbf {

using json = nlohmann::json;

/// Config parse errors carry the offending key path; the CLI maps them to
/// exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Strict readers: unknown keys are rejected, required keys must be present,
/// numbers must be finite where physics demands it.
BuildGeometry geometry_from_json(const json& j);
json geometry_to_json(const BuildGeometry& g);

Material material_from_json(const json& j);
json material_to_json(const Material& m);

std::vector<LaserConfig> lasers_from_json(const json& j);
CameraConfig camera_from_json(const json& j);
RampConfig ramp_from_json(const json& j);

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);

/// Minimal CSV emitters; all series files share the layout
/// "name_1,...,name_k" header then one row per record.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace pbf
