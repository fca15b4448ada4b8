#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

namespace schwarzlin {

void emit_csv(const std::vector<IterationRecord>& records, const std::string& path) {
    if (records.empty()) raise(Errc::usage, "no records to write");
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) raise(Errc::io, "cannot write " + path);
    out << "iter,energy,abs_error,rel_error,rate\n";
    char buf[160];
    for (const IterationRecord& r : records) {
        if (r.rate)
            std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e,%.16e,%.16e\n", r.iter, r.energy,
                          r.abs_error, r.rel_error, *r.rate);
        else
            std::snprintf(buf, sizeof(buf), "%d,%.16e,%.16e,%.16e,\n", r.iter, r.energy,
                          r.abs_error, r.rel_error);
        out << buf;
    }
    if (!out) raise(Errc::io, "write failed on " + path);
}

std::vector<IterationRecord> parse_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::io, "cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line != "iter,energy,abs_error,rel_error,rate")
        raise(Errc::io, "bad csv header in " + path);
    std::vector<IterationRecord> records;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        IterationRecord r;
        std::getline(ss, field, ',');
        r.iter = std::atoi(field.c_str());
        std::getline(ss, field, ',');
        r.energy = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        r.abs_error = std::strtod(field.c_str(), nullptr);
        std::getline(ss, field, ',');
        r.rel_error = std::strtod(field.c_str(), nullptr);
        if (std::getline(ss, field, ',') && !field.empty())
            r.rate = std::strtod(field.c_str(), nullptr);
        records.push_back(r);
    }
    return records;
}

}  // namespace schwarzlin
