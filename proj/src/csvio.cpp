#include "cavitykit/csvio.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavitykit::csvio {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write file: " + path);
    return out;
}

struct CsvReader {
    std::ifstream in;
    std::string path;
    int lineno = 0;

    explicit CsvReader(const std::string& p) : in(p), path(p) {
        if (!in) throw std::invalid_argument("cannot open file: " + p);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": " + msg);
    }

    std::string expect_header(const std::vector<std::string>& allowed) {
        std::string line;
        if (!std::getline(in, line)) fail("empty file");
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        for (const auto& h : allowed)
            if (line == h) return h;
        fail("unexpected header '" + line + "', expected '" + allowed.front() + "'");
    }

    bool next_row(std::vector<double>& fields, std::size_t n) {
        std::string line;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            fields.clear();
            std::size_t pos = 0;
            while (pos <= line.size()) {
                const auto comma = line.find(',', pos);
                const std::string cell =
                    line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
                char* end = nullptr;
                const double v = std::strtod(cell.c_str(), &end);
                if (end == cell.c_str() || *end != '\0') fail("bad numeric cell '" + cell + "'");
                fields.push_back(v);
                if (comma == std::string::npos) break;
                pos = comma + 1;
            }
            if (fields.size() != n)
                fail("expected " + std::to_string(n) + " columns, got " +
                     std::to_string(fields.size()));
            return true;
        }
        return false;
    }
};

double uniform_rate(const std::vector<double>& t, const std::string& path) {
    if (t.size() < 2) throw std::invalid_argument(path + ": need at least 2 rows");
    const double dt = t[1] - t[0];
    if (!(dt > 0)) throw std::invalid_argument(path + ": time column not increasing");
    for (std::size_t i = 2; i < t.size(); ++i)
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
            throw std::invalid_argument(path + ": non-uniform sampling");
    return 1.0 / dt;
}

}  // namespace

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_table(const std::string& path, const std::string& header,
                 const std::vector<std::vector<double>>& columns) {
    if (columns.empty()) throw std::invalid_argument("write_table: no columns");
    const std::size_t n = columns.front().size();
    for (const auto& c : columns)
        if (c.size() != n) throw std::invalid_argument("write_table: ragged columns");
    auto out = open_out(path);
    out << header << "\n";
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_number(columns[c][i]);
        out << "\n";
    }
}

void write_time_trace(const std::string& path, const trace::TimeTrace& t) {
    t.validate();
    std::vector<double> time(t.samples.size());
    for (std::size_t i = 0; i < time.size(); ++i) time[i] = static_cast<double>(i) / t.sample_rate;
    write_table(path, "time_s,intensity", {time, t.samples});
}

trace::TimeTrace read_time_trace(const std::string& path) {
    CsvReader r(path);
    r.expect_header({"time_s,intensity"});
    std::vector<double> time, intensity, row;
    while (r.next_row(row, 2)) {
        time.push_back(row[0]);
        intensity.push_back(row[1]);
    }
    trace::TimeTrace t;
    t.sample_rate = uniform_rate(time, path);
    t.samples = std::move(intensity);
    t.validate();
    return t;
}

void write_spectrum(const std::string& path, const trace::Spectrum& s) {
    s.validate();
    std::vector<double> nm(s.wavelength.size());
    for (std::size_t i = 0; i < nm.size(); ++i) nm[i] = s.wavelength[i] * 1e9;
    write_table(path, "wavelength_nm,counts", {nm, s.counts});
}

trace::Spectrum read_spectrum(const std::string& path) {
    CsvReader r(path);
    r.expect_header({"wavelength_nm,counts"});
    trace::Spectrum s;
    std::vector<double> row;
    while (r.next_row(row, 2)) {
        s.wavelength.push_back(row[0] * 1e-9);
        s.counts.push_back(row[1]);
    }
    s.validate();
    return s;
}

void write_dispersion(const std::string& path, const trace::DispersionScan& scan) {
    scan.validate();
    auto out = open_out(path);
    out << "z_set_nm,wavelength_nm,counts\n";
    for (std::size_t i = 0; i < scan.z_set.size(); ++i) {
        const auto& sp = scan.spectra[i];
        for (std::size_t j = 0; j < sp.wavelength.size(); ++j)
            out << format_number(scan.z_set[i] * 1e9) << ","
                << format_number(sp.wavelength[j] * 1e9) << "," << format_number(sp.counts[j])
                << "\n";
    }
}

trace::DispersionScan read_dispersion(const std::string& path) {
    CsvReader r(path);
    r.expect_header({"z_set_nm,wavelength_nm,counts"});
    trace::DispersionScan scan;
    std::vector<double> row;
    bool have_z = false;
    double cur_z = 0.0;
    trace::Spectrum cur;
    while (r.next_row(row, 3)) {
        const double z = row[0] * 1e-9;
        if (!have_z || z != cur_z) {
            if (have_z) {
                scan.z_set.push_back(cur_z);
                scan.spectra.push_back(std::move(cur));
                cur = trace::Spectrum{};
            }
            cur_z = z;
            have_z = true;
        }
        cur.wavelength.push_back(row[1] * 1e-9);
        cur.counts.push_back(row[2]);
    }
    if (have_z) {
        scan.z_set.push_back(cur_z);
        scan.spectra.push_back(std::move(cur));
    }
    if (scan.z_set.size() >= 2) scan.step_size = scan.z_set[1] - scan.z_set[0];
    scan.validate();
    return scan;
}

void write_decay(const std::string& path, const trace::DecayHistogram& h) {
    h.validate();
    std::vector<double> ns(h.time.size());
    for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = h.time[i] * 1e9;
    if (h.irf.empty())
        write_table(path, "time_ns,counts", {ns, h.counts});
    else
        write_table(path, "time_ns,counts,irf", {ns, h.counts, h.irf});
}

trace::DecayHistogram read_decay(const std::string& path) {
    CsvReader r(path);
    const std::string header = r.expect_header({"time_ns,counts", "time_ns,counts,irf"});
    const bool with_irf = header == "time_ns,counts,irf";
    trace::DecayHistogram h;
    std::vector<double> row;
    while (r.next_row(row, with_irf ? 3 : 2)) {
        h.time.push_back(row[0] * 1e-9);
        h.counts.push_back(row[1]);
        if (with_irf) h.irf.push_back(row[2]);
    }
    h.validate();
    return h;
}

void write_g2(const std::string& path, const trace::CoincidenceHistogram& h) {
    h.validate();
    std::vector<double> ns(h.delay.size());
    for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = h.delay[i] * 1e9;
    write_table(path, "delay_ns,coincidences", {ns, h.counts});
}

trace::CoincidenceHistogram read_g2(const std::string& path, double rep_period) {
    CsvReader r(path);
    r.expect_header({"delay_ns,coincidences"});
    trace::CoincidenceHistogram h;
    h.rep_period = rep_period;
    std::vector<double> row;
    while (r.next_row(row, 2)) {
        h.delay.push_back(row[0] * 1e-9);
        h.counts.push_back(row[1]);
    }
    h.validate();
    return h;
}

}  // namespace cavitykit::csvio
