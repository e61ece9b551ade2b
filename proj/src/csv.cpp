#include "rdsig/csv.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "rdsig/errors.hpp"

namespace rdsig {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

std::string join_doubles(const std::vector<double>& v, char sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out.push_back(sep);
        out += format_double(v[i]);
    }
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::string& metadata,
                     const std::vector<std::string>& header) {
    if (!path.parent_path().empty()) {
        std::filesystem::create_directories(path.parent_path());
    }
    out_.open(path);
    if (!out_) {
        throw ConfigError("cannot open output file: " + path.string());
    }
    out_ << "# " << metadata << "\n";
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << "\n";
}

std::vector<double> read_observation_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open trace file: " + path.string());
    }
    std::vector<double> x;
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            saw_header = true;
            if (line.find("t,x") != std::string::npos ||
                line.find("t, x") != std::string::npos) {
                continue;  // header row
            }
        }
        std::istringstream row(line);
        std::string t_cell, x_cell;
        if (!std::getline(row, t_cell, ',') || !std::getline(row, x_cell)) {
            throw ConfigError("trace file " + path.string() + ": malformed row at line " +
                              std::to_string(line_no));
        }
        try {
            x.push_back(std::stod(x_cell));
        } catch (const std::exception&) {
            throw ConfigError("trace file " + path.string() +
                              ": bad numeric value at line " + std::to_string(line_no));
        }
    }
    if (x.empty()) {
        throw ConfigError("trace file " + path.string() + ": no data rows");
    }
    return x;
}

void write_observation_csv(const std::filesystem::path& path,
                           const std::string& metadata,
                           const std::vector<double>& x) {
    CsvWriter w(path, metadata, {"t", "x"});
    for (size_t i = 0; i < x.size(); ++i) {
        w.row({std::to_string(i + 1), format_double(x[i])});
    }
}

void write_phase_sequence_csv(const std::filesystem::path& path,
                              const std::string& metadata,
                              const PhaseSequence& seq) {
    CsvWriter w(path, metadata, {"phase_index", "state", "duration", "censored"});
    const auto& phases = seq.phases();
    for (size_t i = 0; i < phases.size(); ++i) {
        bool censored = (i + 1 == phases.size()) && seq.last_censored();
        w.row({std::to_string(i + 1), std::to_string(phases[i].state),
               std::to_string(phases[i].duration), censored ? "1" : "0"});
    }
}

}  // namespace rdsig
