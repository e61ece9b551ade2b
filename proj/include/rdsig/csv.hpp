#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rdsig/model.hpp"

namespace rdsig {

// Shortest round-trip decimal form; byte-stable across runs.
std::string format_double(double v);

std::string join_doubles(const std::vector<double>& v, char sep = ',');

// CSV with one leading '#' metadata comment line, a header row, then data
// rows. Comma separated, '.' decimal.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& metadata,
              const std::vector<std::string>& header);

    void row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

// Rows of an observation trace `t,x`. '#' lines and the header are skipped;
// malformed rows raise ConfigError naming the line number.
std::vector<double> read_observation_csv(const std::filesystem::path& path);

void write_observation_csv(const std::filesystem::path& path,
                           const std::string& metadata,
                           const std::vector<double>& x);

void write_phase_sequence_csv(const std::filesystem::path& path,
                              const std::string& metadata,
                              const PhaseSequence& seq);

}  // namespace rdsig
