#pragma once

#include <string>
#include <vector>

#include "cavitykit/trace_analysis.hpp"

namespace cavitykit::csvio {

// Fixed-schema CSV readers and writers for the measurement records. Headers
// are exact; readers reject files whose header does not match.

// header: time_s,intensity
void write_time_trace(const std::string& path, const trace::TimeTrace& t);
trace::TimeTrace read_time_trace(const std::string& path);

// header: wavelength_nm,counts
void write_spectrum(const std::string& path, const trace::Spectrum& s);
trace::Spectrum read_spectrum(const std::string& path);

// header: z_set_nm,wavelength_nm,counts (long form, one row per sample)
void write_dispersion(const std::string& path, const trace::DispersionScan& scan);
trace::DispersionScan read_dispersion(const std::string& path);

// header: time_ns,counts or time_ns,counts,irf
void write_decay(const std::string& path, const trace::DecayHistogram& h);
trace::DecayHistogram read_decay(const std::string& path);

// header: delay_ns,coincidences; the repetition period is not part of the
// schema and must be supplied by the caller
void write_g2(const std::string& path, const trace::CoincidenceHistogram& h);
trace::CoincidenceHistogram read_g2(const std::string& path, double rep_period);

// generic writer for plot-ready output, same number formatting as above
void write_table(const std::string& path, const std::string& header,
                 const std::vector<std::vector<double>>& columns);

// deterministic shortest-roundtrip formatting used by all writers
std::string format_number(double v);

}  // namespace cavitykit::csvio
