#include "linksim/records.hpp"

#include <charconv>
#include <fstream>

#include "linksim/errors.hpp"

namespace linksim {

std::string format_double(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_records_csv(std::ostream& out, const std::vector<SweepRecord>& records) {
    out << "system,variant,M,train_snr_db,ebn0_db,metric,value,errors,trials,seed\n";
    for (const auto& r : records) {
        out << r.system << ',' << r.variant << ',' << r.order << ',';
        if (r.train_snr_db) out << format_double(*r.train_snr_db);
        out << ',' << format_double(r.ebn0_db) << ',' << r.metric << ','
            << format_double(r.value) << ',';
        if (r.errors) out << *r.errors;
        out << ',';
        if (r.trials) out << *r.trials;
        out << ',';
        if (r.seed) out << *r.seed;
        out << '\n';
    }
}

void write_records_csv_file(const std::string& path, const std::vector<SweepRecord>& records) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_records_csv(out, records);
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace linksim
