#pragma once

#include <optional>
#include <string>

#include "hardylab/field.hpp"
#include "hardylab/geometry.hpp"

namespace hardylab {

// Domain from a JSON descriptor:
//   {"kind":"polygon","vertices":[[x,y],...]}
//   {"kind":"koch","level":5}
//   {"kind":"cantor_complement","ratio":0.333,"level":5,"width":1.0,"center":[x,y]}
//   {"kind":"point_complement","point":[x,y]}
Domain domain_from_json(const std::string& json_text);

// ScalarField generators:
//   {"kind":"bump","center":[x,y],"radius":r,"amplitude":a}
//   {"kind":"poly","coeffs":[[ax,ay,c],...]}
//   {"kind":"coordinate","axis":0}
ScalarField field_from_json(const std::string& json_text);

// Batch experiment runner. Writes one CSV per task plus summary.json into
// out_dir. Returns the process exit status: 0 success, 1 configuration
// error, 2 mathematical-invariant violation detected mid-run. On failure a
// single-line diagnostic is stored in *diagnostic. A nonempty task_override
// (the CLI subcommand) must agree with the config's task when both exist.
int run_experiment(const std::string& config_json, const std::string& out_dir,
                   int jobs = 0, std::optional<uint64_t> seed_override = {},
                   std::string* diagnostic = nullptr,
                   const std::string& task_override = "");

}  // namespace hardylab
