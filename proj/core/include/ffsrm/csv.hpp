#pragma once

#include <string>
#include <vector>

#include "ffsrm/geometry.hpp"

namespace ffsrm::io {

// Plain CSV with a header row. Values containing commas or quotes are
// quoted; numbers should be pre-formatted by the caller.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::vector<std::vector<std::string>> read_csv(const std::string& path);

// Ground-truth emitter table:
// emitter_id,geometry_id,x_nm,y_nm,z_nm,rate
void write_ground_truth_csv(const sim::EmitterSet& set, const std::string& path);

}  // namespace ffsrm::io
