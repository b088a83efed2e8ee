#include "ffsrm/provenance.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ffsrm::io {

uint64_t fnv1a64(const void* data, size_t bytes) {
    const uint8_t* p = static_cast<const uint8_t*>(data);
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (size_t i = 0; i < bytes; ++i) {
        hash ^= p[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

uint64_t hash_stack(const ImageStack& stack) {
    uint64_t h = fnv1a64(stack.data.data(), stack.data.size() * sizeof(double));
    const int dims[3] = {stack.frames, stack.height, stack.width};
    h ^= fnv1a64(dims, sizeof(dims));
    return h;
}

uint64_t hash_image(const Image& image) {
    uint64_t h = fnv1a64(image.data.data(), image.data.size() * sizeof(double));
    const int dims[2] = {image.height, image.width};
    h ^= fnv1a64(dims, sizeof(dims));
    return h;
}

namespace {

std::string hex64(uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

uint64_t parse_hex64(const std::string& s) {
    return std::stoull(s, nullptr, 16);
}

}  // namespace

void write_provenance(const ProvenanceRecord& record, const std::string& path) {
    nlohmann::ordered_json j;
    j["tool"] = "ffsrm";
    j["version"] = "0.1.0";
    j["command"] = record.command;
    nlohmann::ordered_json params = nlohmann::ordered_json::array();
    for (const auto& [k, v] : record.parameters) params.push_back({k, v});
    j["parameters"] = params;
    if (record.has_input) {
        j["input"]["path"] = record.input_path;
        j["input"]["fnv1a64"] = hex64(record.input_hash);
    }
    j["output"]["path"] = record.output_path;
    j["output"]["fnv1a64"] = hex64(record.output_hash);
    if (record.has_seed) j["seed"] = record.seed;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("provenance: cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("provenance: write failed: " + path);
}

ProvenanceRecord read_provenance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("provenance: cannot open: " + path);
    nlohmann::json j;
    in >> j;

    ProvenanceRecord record;
    record.command = j.at("command").get<std::string>();
    for (const auto& pair : j.at("parameters"))
        record.parameters.emplace_back(pair.at(0).get<std::string>(),
                                       pair.at(1).get<std::string>());
    if (j.contains("input")) {
        record.has_input = true;
        record.input_path = j["input"].at("path").get<std::string>();
        record.input_hash = parse_hex64(j["input"].at("fnv1a64").get<std::string>());
    }
    record.output_path = j.at("output").at("path").get<std::string>();
    record.output_hash = parse_hex64(j.at("output").at("fnv1a64").get<std::string>());
    if (j.contains("seed")) {
        record.has_seed = true;
        record.seed = j["seed"].get<uint64_t>();
    }
    return record;
}

}  // namespace ffsrm::io
