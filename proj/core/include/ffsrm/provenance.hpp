#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ffsrm/image.hpp"

namespace ffsrm::io {

uint64_t fnv1a64(const void* data, size_t bytes);
uint64_t hash_stack(const ImageStack& stack);
uint64_t hash_image(const Image& image);

// Sidecar describing how an artifact was produced. Parameters keep their
// insertion order in the JSON so reruns serialize identically.
struct ProvenanceRecord {
    std::string command;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string input_path;
    uint64_t input_hash = 0;
    bool has_input = false;
    std::string output_path;
    uint64_t output_hash = 0;
    uint64_t seed = 0;
    bool has_seed = false;
};

void write_provenance(const ProvenanceRecord& record, const std::string& path);
ProvenanceRecord read_provenance(const std::string& path);

}  // namespace ffsrm::io
