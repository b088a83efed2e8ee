#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ffsrm/image.hpp"

namespace ffsrm {

enum class Method { Esi, Sofi, Srrf, Sacd, Musical };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Output of one reconstruction run. parameters keeps insertion order so
// provenance records serialize stably.
struct ReconstructionResult {
    Image image;
    Method method = Method::Sofi;
    int input_frames = 0;
    std::vector<std::pair<std::string, std::string>> parameters;

    void param(const std::string& key, const std::string& value) {
        parameters.emplace_back(key, value);
    }
    void param(const std::string& key, double value);
    void param(const std::string& key, int value);
};

}  // namespace ffsrm
