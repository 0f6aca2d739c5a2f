#include <doctest.h>

#include <cmath>

#include "cavitykit/parallel.hpp"

using cavitykit::Exec;
using cavitykit::parallel_map;

TEST_CASE("serial and parallel policies give bitwise identical results") {
    auto work = [](std::size_t i) {
        double x = 0.1 * double(i + 1);
        for (int k = 0; k < 50; ++k) x = std::sin(x) + std::sqrt(x);
        return x;
    };
    const auto s = parallel_map<double>(10000, work, Exec::serial);
    const auto p = parallel_map<double>(10000, work, Exec::parallel);
    CHECK(s == p);
}

TEST_CASE("empty range") {
    const auto v = parallel_map<int>(0, [](std::size_t) { return 1; });
    CHECK(v.empty());
}
