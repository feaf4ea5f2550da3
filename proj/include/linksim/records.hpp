#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace linksim {

// One measurement row. The CSV schema is fixed:
//   system,variant,M,train_snr_db,ebn0_db,metric,value,errors,trials,seed
// Optional fields render as empty columns. All numbers are written with
// round-trip precision.
struct SweepRecord {
    std::string system;   // app | nn_demapper | ae_cnn | ae_dnn | theory
    std::string variant;  // "" | cnn | dnn | ber_paper | ber_gray
    int order = 0;
    std::optional<double> train_snr_db;
    double ebn0_db = 0.0;
    std::string metric;  // ber | ser
    double value = 0.0;
    std::optional<long long> errors;
    std::optional<long long> trials;
    std::optional<std::uint64_t> seed;
};

// Round-trip formatting of a double (shortest representation that parses
// back to the same value).
std::string format_double(double value);

void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<SweepRecord>& records);

}  // namespace linksim
