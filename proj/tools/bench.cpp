// Timing comparison of the serial and OpenMP execution policies on the three
// sweep kernels. Also checks that both policies give bitwise identical output.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "cavitykit/dipole_mirror.hpp"
#include "cavitykit/layered_media.hpp"
#include "cavitykit/parallel.hpp"
#include "cavitykit/purcell.hpp"

namespace ck = cavitykit;

namespace {

template <typename Fn>
double time_once(Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

ck::layered::LayerStack quarter_wave_stack(int pairs) {
    ck::layered::LayerStack s;
    s.incident_medium = {3.41, 0.0};
    const double lam = 1310e-9;
    for (int i = 0; i < pairs; ++i) {
        s.layers.push_back({"alas", lam / (4.0 * 2.91), {2.91, 0.0}, false});
        s.layers.push_back({"gaas", lam / (4.0 * 3.41), {3.41, 0.0}, false});
    }
    s.exit_medium = {3.41, 0.0};
    return s;
}

void report(const char* name, double ts, double tp, bool identical) {
    std::printf("%-18s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name,
                ts * 1e3, tp * 1e3, ts / tp, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
    // wavelength sweep of a 35-pair mirror
    {
        const auto stack = quarter_wave_stack(35);
        std::vector<double> grid(20000);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = (1100.0 + 0.02 * i) * 1e-9;
        auto sweep = [&](ck::Exec e) {
            return ck::parallel_map<double>(
                grid.size(), [&](std::size_t i) { return ck::layered::solve_stack(stack, grid[i]).R; },
                e);
        };
        std::vector<double> rs, rp;
        const double ts = time_once([&] { rs = sweep(ck::Exec::serial); });
        const double tp = time_once([&] { rp = sweep(ck::Exec::parallel); });
        report("tmm spectrum", ts, tp,
               std::memcmp(rs.data(), rp.data(), rs.size() * sizeof(double)) == 0);
    }

    // Purcell factor over a finesse grid with several jitter levels
    {
        ck::EmitterParams em;
        em.gamma0 = 1.0 / 1.007e-9;
        em.linewidth_em = 7.4e9;
        em.wavelength = 1306.2e-9;
        ck::CavityParams cav;
        cav.finesse = 1788.0;
        cav.L_eff = 7.25e-6;
        cav.w0 = 2.28e-6;
        cav.n_mem = 3.41;
        std::vector<double> grid(5000);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 100.0 + 6.0 * i;
        const std::vector<double> sigmas = {56e-12, 300e-12, 850e-12};
        ck::purcell::PurcellCurve cs, cp;
        const double ts =
            time_once([&] { cs = ck::purcell::purcell_curve(em, cav, sigmas, grid, ck::Exec::serial); });
        const double tp =
            time_once([&] { cp = ck::purcell::purcell_curve(em, cav, sigmas, grid, ck::Exec::parallel); });
        bool same = cs.ideal == cp.ideal && cs.jittered == cp.jittered;
        report("purcell curve", ts, tp, same);
    }

    // dipole rate near a 20-pair mirror over a distance grid
    {
        const auto stack = quarter_wave_stack(20);
        std::vector<double> d(96);
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = (5.0 + 5.0 * i) * 1e-9;
        ck::dipole::EnhancementCurve cs, cp;
        const double ts = time_once(
            [&] { cs = ck::dipole::enhancement_curve(stack, d, 1310e-9, 3.41, {}, ck::Exec::serial); });
        const double tp = time_once(
            [&] { cp = ck::dipole::enhancement_curve(stack, d, 1310e-9, 3.41, {}, ck::Exec::parallel); });
        bool same = cs.parallel == cp.parallel && cs.perpendicular == cp.perpendicular;
        report("dipole curve", ts, tp, same);
    }
    return 0;
}
