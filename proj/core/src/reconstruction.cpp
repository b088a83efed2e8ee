#include "ffsrm/reconstruction.hpp"

#include <sstream>
#include <stdexcept>

namespace ffsrm {

const char* method_name(Method m) {
    switch (m) {
        case Method::Esi: return "esi";
        case Method::Sofi: return "sofi";
        case Method::Srrf: return "srrf";
        case Method::Sacd: return "sacd";
        case Method::Musical: return "musical";
    }
    return "unknown";
}

Method method_from_name(const std::string& name) {
    if (name == "esi") return Method::Esi;
    if (name == "sofi") return Method::Sofi;
    if (name == "srrf") return Method::Srrf;
    if (name == "sacd") return Method::Sacd;
    if (name == "musical") return Method::Musical;
    throw std::invalid_argument("unknown method: " + name);
}

void ReconstructionResult::param(const std::string& key, double value) {
    std::ostringstream os;
    os.precision(17);
    os << value;
    parameters.emplace_back(key, os.str());
}

void ReconstructionResult::param(const std::string& key, int value) {
    parameters.emplace_back(key, std::to_string(value));
}

}  // namespace ffsrm
