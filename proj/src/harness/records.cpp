#include <cmath>
#include <cstdio>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

namespace schwarzlin {

std::vector<IterationRecord> make_records(const std::vector<double>& energies, double ref_energy) {
    std::vector<IterationRecord> records;
    records.reserve(energies.size());
    const double scale = std::fabs(ref_energy);
    for (std::size_t i = 0; i < energies.size(); ++i) {
        IterationRecord r;
        r.iter = static_cast<int>(i);
        r.energy = energies[i];
        r.abs_error = energies[i] - ref_energy;
        r.rel_error = scale > 0.0 ? r.abs_error / scale : r.abs_error;
        if (i > 0 && records.back().abs_error > 0.0)
            r.rate = r.abs_error / records.back().abs_error;
        records.push_back(r);
    }
    return records;
}

double noise_floor(double ref_energy) {
    const double a = std::fabs(ref_energy);
    return 1e3 * (std::nextafter(a, std::numeric_limits<double>::infinity()) - a);
}

double geometric_mean_rate(const std::vector<IterationRecord>& records, int iters) {
    if (records.size() < 2) raise(Errc::insufficient_data, "need at least two records");
    const double ref = records[0].energy - records[0].abs_error;
    const double floor = noise_floor(ref);
    if (!(records[0].abs_error >= floor))
        raise(Errc::insufficient_data, "initial error already at the noise floor");
    int k = 0;
    while (k + 1 < static_cast<int>(records.size()) && k + 1 <= iters &&
           records[k + 1].abs_error >= floor)
        ++k;
    if (k < 1) raise(Errc::insufficient_data, "fewer than two records above the noise floor");
    if (k < iters)
        std::fprintf(stderr, "geometric_mean_rate: only %d of %d steps above the noise floor\n", k,
                     iters);
    return std::pow(records[k].abs_error / records[0].abs_error, 1.0 / k);
}

}  // namespace schwarzlin
