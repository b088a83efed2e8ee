#include "ffsrm/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ffsrm::io {

namespace {

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_row(std::ofstream& out, const std::vector<std::string>& row) {
    for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << escape(row[i]);
    }
    out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open for writing: " + path);
    write_row(out, header);
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("csv: row width differs from header");
        write_row(out, row);
    }
    if (!out) throw std::runtime_error("csv: write failed: " + path);
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        std::string field;
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                row.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        row.push_back(field);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_ground_truth_csv(const sim::EmitterSet& set, const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(set.emitters.size());
    for (size_t i = 0; i < set.emitters.size(); ++i) {
        const sim::Emitter& e = set.emitters[i];
        std::ostringstream x, y, z, rate;
        x.precision(17);
        y.precision(17);
        z.precision(17);
        rate.precision(17);
        x << e.x_nm;
        y << e.y_nm;
        z << e.z_nm;
        rate << e.rate;
        rows.push_back({std::to_string(i), std::to_string(e.geometry_id), x.str(),
                        y.str(), z.str(), rate.str()});
    }
    write_csv(path, {"emitter_id", "geometry_id", "x_nm", "y_nm", "z_nm", "rate"}, rows);
}

}  // namespace ffsrm::io
