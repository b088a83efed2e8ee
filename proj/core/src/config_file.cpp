#include "ffsrm/config_file.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace ffsrm {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << origin << ":" << lineno << ": expected key=value, got '" << line << "'";
            throw std::invalid_argument(os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument(origin + ": empty key");
        if (cfg.values_.count(key))
            throw std::invalid_argument(origin + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

bool ConfigFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string ConfigFile::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw std::invalid_argument(origin_ + ": missing required key '" + key + "'");
    consumed_.insert(key);
    return it->second;
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    return raw(key);
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return require_double(key);
}

double ConfigFile::require_double(const std::string& key) const {
    const std::string v = raw(key);
    size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(origin_ + ": key '" + key + "' is not a number: " + v);
    }
    if (pos != v.size())
        throw std::invalid_argument(origin_ + ": key '" + key + "' has trailing text: " + v);
    return out;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    return require_int(key);
}

int ConfigFile::require_int(const std::string& key) const {
    const double d = require_double(key);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw std::invalid_argument(origin_ + ": key '" + key + "' must be an integer");
    return i;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    std::string v = raw(key);
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(origin_ + ": key '" + key + "' is not a boolean: " + v);
}

std::vector<std::string> ConfigFile::get_list(const std::string& key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    std::istringstream in(raw(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void ConfigFile::reject_unknown_keys() const {
    for (const auto& [key, value] : values_) {
        (void)value;
        if (!consumed_.count(key))
            throw std::invalid_argument(origin_ + ": unknown key '" + key + "'");
    }
}

}  // namespace ffsrm
