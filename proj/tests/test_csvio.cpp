#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "cavitykit/csvio.hpp"

namespace csvio = cavitykit::csvio;
namespace trace = cavitykit::trace;

namespace {

std::string tmp_file(const char* name) {
    return std::string("csvio_test_") + name;
}

std::string first_line(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("time trace: header and exact round trip") {
    trace::TimeTrace t;
    t.sample_rate = 4096.0;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> dist(1.0, 0.01);
    for (int i = 0; i < 1000; ++i) t.samples.push_back(dist(rng));
    const auto path = tmp_file("trace.csv");
    csvio::write_time_trace(path, t);
    CHECK(first_line(path) == "time_s,intensity");
    const auto back = csvio::read_time_trace(path);
    CHECK(back.sample_rate == doctest::Approx(t.sample_rate).epsilon(1e-9));
    REQUIRE(back.samples.size() == t.samples.size());
    // shortest-roundtrip formatting preserves every bit
    CHECK(back.samples == t.samples);
    std::remove(path.c_str());
}

TEST_CASE("spectrum: nm on disk, meters in memory") {
    trace::Spectrum s;
    for (int i = 0; i < 50; ++i) {
        s.wavelength.push_back((1300.0 + 0.5 * i) * 1e-9);
        s.counts.push_back(100.0 + i);
    }
    const auto path = tmp_file("spec.csv");
    csvio::write_spectrum(path, s);
    CHECK(first_line(path) == "wavelength_nm,counts");
    const auto back = csvio::read_spectrum(path);
    REQUIRE(back.wavelength.size() == s.wavelength.size());
    for (std::size_t i = 0; i < s.wavelength.size(); ++i)
        CHECK(back.wavelength[i] == doctest::Approx(s.wavelength[i]).epsilon(1e-12));
    CHECK(back.counts == s.counts);
    std::remove(path.c_str());
}

TEST_CASE("decay histogram with and without IRF column") {
    trace::DecayHistogram h;
    for (int i = 0; i < 100; ++i) {
        h.time.push_back(i * 20e-12);
        h.counts.push_back(double(1000 - 5 * i));
    }
    const auto path = tmp_file("decay.csv");
    csvio::write_decay(path, h);
    CHECK(first_line(path) == "time_ns,counts");
    auto back = csvio::read_decay(path);
    CHECK(back.irf.empty());
    CHECK(back.counts == h.counts);

    for (int i = 0; i < 100; ++i) h.irf.push_back(i < 10 ? 50.0 : 0.0);
    csvio::write_decay(path, h);
    CHECK(first_line(path) == "time_ns,counts,irf");
    back = csvio::read_decay(path);
    CHECK(back.irf == h.irf);
    std::remove(path.c_str());
}

TEST_CASE("g2 histogram round trip keeps the caller-supplied period") {
    trace::CoincidenceHistogram h;
    h.rep_period = 12.5e-9;
    for (int i = -50; i <= 50; ++i) {
        h.delay.push_back(i * 0.5e-9);
        h.counts.push_back(std::abs(i) % 25 == 0 ? 900.0 : 2.0);
    }
    const auto path = tmp_file("g2.csv");
    csvio::write_g2(path, h);
    CHECK(first_line(path) == "delay_ns,coincidences");
    const auto back = csvio::read_g2(path, 12.5e-9);
    CHECK(back.rep_period == 12.5e-9);
    CHECK(back.counts == h.counts);
    std::remove(path.c_str());
}

TEST_CASE("dispersion scan long-form round trip") {
    trace::DispersionScan scan;
    for (int z = 0; z < 3; ++z) {
        scan.z_set.push_back(z * 20e-9);
        trace::Spectrum s;
        for (int i = 0; i < 20; ++i) {
            s.wavelength.push_back((1300.0 + i) * 1e-9);
            s.counts.push_back(z * 100.0 + i);
        }
        scan.spectra.push_back(s);
    }
    const auto path = tmp_file("disp.csv");
    csvio::write_dispersion(path, scan);
    CHECK(first_line(path) == "z_set_nm,wavelength_nm,counts");
    const auto back = csvio::read_dispersion(path);
    REQUIRE(back.z_set.size() == 3);
    REQUIRE(back.spectra.size() == 3);
    CHECK(back.spectra[2].counts == scan.spectra[2].counts);
    std::remove(path.c_str());
}

TEST_CASE("wrong header is a data error naming the file") {
    const auto path = tmp_file("wrong.csv");
    {
        std::ofstream out(path);
        out << "time,intensity\n0,1\n";
    }
    try {
        csvio::read_time_trace(path);
        FAIL("expected header rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find(path) != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("number formatting is deterministic and minimal") {
    CHECK(csvio::format_number(1.0) == "1");
    CHECK(csvio::format_number(0.5) == "0.5");
    CHECK(csvio::format_number(0.1) == "0.1");
}
