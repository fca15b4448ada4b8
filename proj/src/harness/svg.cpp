#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "schwarzlin/errors.hpp"
#include "schwarzlin/harness.hpp"

namespace schwarzlin {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
constexpr int kW = 860, kH = 560, kL = 70, kR = 24, kT = 24, kB = 48;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void emit_svg_decay_plot(const std::vector<PlotSeries>& series, const std::string& path) {
    if (series.empty()) raise(Errc::usage, "no series to plot");

    int max_iter = 1;
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const PlotSeries& s : series) {
        for (const IterationRecord& r : s.records) {
            max_iter = std::max(max_iter, r.iter);
            if (r.rel_error > 0.0) {
                const double lg = std::log10(r.rel_error);
                if (!any) {
                    lo = hi = lg;
                    any = true;
                } else {
                    lo = std::min(lo, lg);
                    hi = std::max(hi, lg);
                }
            }
        }
    }
    if (!any) raise(Errc::usage, "no positive rel_error values to plot");
    int dec_lo = static_cast<int>(std::floor(lo));
    int dec_hi = static_cast<int>(std::ceil(hi));
    if (dec_hi == dec_lo) ++dec_hi;

    auto xpix = [&](double it) { return kL + (kW - kL - kR) * it / max_iter; };
    auto ypix = [&](double lg) {
        return kT + (kH - kT - kB) * (dec_hi - lg) / (dec_hi - dec_lo);
    };

    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::io, "cannot write " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
        << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";

    // decade grid and y labels
    for (int d = dec_lo; d <= dec_hi; ++d) {
        const std::string y = fmt(ypix(d));
        out << "<line x1=\"" << kL << "\" y1=\"" << y << "\" x2=\"" << kW - kR << "\" y2=\"" << y
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << kL - 6 << "\" y=\"" << fmt(ypix(d) + 4)
            << "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">1e" << d
            << "</text>\n";
    }
    // x ticks every max(1, max_iter/10) iterations
    const int xstep = std::max(1, max_iter / 10);
    for (int it = 0; it <= max_iter; it += xstep) {
        const std::string x = fmt(xpix(it));
        out << "<line x1=\"" << x << "\" y1=\"" << kH - kB << "\" x2=\"" << x << "\" y2=\""
            << kH - kB + 5 << "\" stroke=\"#333333\"/>\n";
        out << "<text x=\"" << x << "\" y=\"" << kH - kB + 20
            << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << it
            << "</text>\n";
    }
    out << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\""
        << kH - kT - kB << "\" fill=\"none\" stroke=\"#333333\"/>\n";
    out << "<text x=\"" << (kL + kW - kR) / 2 << "\" y=\"" << kH - 8
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">iteration"
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << (kT + kH - kB) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << (kT + kH - kB) / 2 << ")\">relative energy error"
        << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        bool first = true;
        for (const IterationRecord& r : series[s].records) {
            if (r.rel_error <= 0.0) continue;  // at or below the noise floor
            if (!first) out << " ";
            out << fmt(xpix(r.iter)) << "," << fmt(ypix(std::log10(r.rel_error)));
            first = false;
        }
        out << "\"/>\n";
        const int ly = kT + 16 + 16 * static_cast<int>(s);
        out << "<rect x=\"" << kW - kR - 150 << "\" y=\"" << ly - 9
            << "\" width=\"10\" height=\"10\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << kW - kR - 136 << "\" y=\"" << ly
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) raise(Errc::io, "write failed on " + path);
}

}  // namespace schwarzlin
