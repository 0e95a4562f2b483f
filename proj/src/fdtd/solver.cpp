#include "hemicav/fdtd/solver.hpp"

#include <cmath>
#include <sstream>

#include "hemicav/constants.hpp"
#include "hemicav/error.hpp"

namespace hcav::fdtd {

double SourceSpec::envelope_width_fs() const {
    // exp(-(t/tau)^2) has spectral amplitude exp(-(pi f tau)^2); its full
    // 1/e width is 2/(pi tau).
    return 2.0 / (constants::pi * bandwidth_thz) * 1e3;
}

double SourceSpec::delay_fs() const { return 4.0 * envelope_width_fs(); }

double SourceSpec::value(double t_fs) const {
    if (t_fs < 0.0 || t_fs > end_fs()) return 0.0;
    const double tau = envelope_width_fs();
    const double x = (t_fs - delay_fs()) / tau;
    return amplitude * std::exp(-x * x) * std::sin(2.0 * constants::pi * center_thz * 1e-3 * (t_fs - delay_fs()));
}

GridPoint locate(const SimulationDomain& d, Component c, double r_um, double z_um) {
    const double h = d.cell_um;
    // Half-integer offsets of each component on the (r, z) lattice.
    const bool r_half = c == Component::Er || c == Component::Hphi || c == Component::Hz;
    const bool z_half = c == Component::Ez || c == Component::Hr || c == Component::Hphi;
    const int i = static_cast<int>(std::floor(r_um / h + (r_half ? 0.0 : 0.5)));
    const int k = static_cast<int>(std::floor(z_um / h + (z_half ? 0.0 : 0.5)));
    const int imax = r_half ? d.nr - 1 : d.nr;
    const int kmax = z_half ? d.nz - 1 : d.nz;
    if (r_um < 0.0 || z_um < 0.0 || i < 0 || k < 0 || i > imax || k > kmax) {
        std::ostringstream msg;
        msg << "point (" << r_um << ", " << z_um << ") um lies outside the domain";
        throw BuildError(msg.str());
    }
    return {i, k};
}

Simulation::Simulation(const SimulationDomain& domain, bool serial_reference)
    : domain_(domain),
      dt_(courant_time_step(domain)),
      coefficients_(make_coefficients(domain, dt_)),
      fields_(domain.nr, domain.nz),
      serial_(serial_reference) {}

void Simulation::set_source(const SourceSpec& source) {
    if (!(source.bandwidth_thz > 0.0)) throw BuildError("source bandwidth must be positive");
    if (!(source.center_thz > 0.0)) throw BuildError("source frequency must be positive");
    injections_.clear();
    auto live = [&](Component c, const GridPoint& p) {
        const std::size_t a = fields_.at(p.i, p.k);
        switch (c) {
            case Component::Er: return coefficients_.cer[a] != 0.0;
            case Component::Ephi: return coefficients_.cep[a] != 0.0;
            case Component::Ez: return coefficients_.cez[a] != 0.0;
            default: return true;
        }
    };
    if (source.kind == SourceKind::Point) {
        const GridPoint p = locate(domain_, source.component, source.r_um, source.z_um);
        if (!live(source.component, p)) throw BuildError("source sits on a conductor or a wall");
        injections_.push_back({fields_.at(p.i, p.k), source.component, 1.0});
    } else {
        if (domain_.azimuthal_order != 1) throw BuildError("an x-polarized sheet needs azimuthal order 1");
        const GridPoint p = locate(domain_, Component::Er, 0.0, source.z_um);
        for (int i = 0; (i + 0.5) * domain_.cell_um < source.sheet_radius_um && i < domain_.nr; ++i)
            if (live(Component::Er, {i, p.k})) injections_.push_back({fields_.at(i, p.k), Component::Er, 1.0});
        for (int i = 1; i * domain_.cell_um < source.sheet_radius_um && i < domain_.nr; ++i)
            if (live(Component::Ephi, {i, p.k})) injections_.push_back({fields_.at(i, p.k), Component::Ephi, -1.0});
        if (injections_.empty()) throw BuildError("sheet source covers no live edge");
    }
    source_ = source;
    has_source_ = true;
}

void Simulation::clear_source() {
    has_source_ = false;
    injections_.clear();
}

void Simulation::inject(double value) {
    for (const auto& j : injections_) fields_.component(j.component)[j.index] += j.weight * value;
}

void Simulation::step() {
    if (serial_)
        reference::step(fields_, domain_, dt_);
    else
        fdtd::step(fields_, coefficients_);
    if (has_source_) {
        const double v = source_.value(time_fs());
        if (v != 0.0) inject(v);
    }
}

void Simulation::run(long steps) {
    for (long n = 0; n < steps; ++n) step();
}

double Simulation::sample(Component component, const GridPoint& p) const {
    return fields_.component(component)[fields_.at(p.i, p.k)];
}

ProbeRecord run_ringdown(const SimulationDomain& domain, const SourceSpec& source,
                         const std::vector<ProbeSpec>& probes, double duration_cycles, bool serial_reference) {
    if (!(duration_cycles > 0.0)) throw BuildError("duration must be positive");
    Simulation sim(domain, serial_reference);
    std::vector<GridPoint> points;
    for (const auto& p : probes) points.push_back(locate(domain, p.component, p.r_um, p.z_um));
    sim.set_source(source);

    ProbeRecord rec;
    rec.dt_fs = sim.dt_fs();
    rec.source_end_fs = source.end_fs();
    rec.probes = probes;
    rec.series.assign(probes.size(), {});
    if (duration_cycles < 2000.0) {
        std::ostringstream msg;
        msg << "ringdown of " << duration_cycles << " cycles is shorter than 2000; Q above ~1e4 is unresolved";
        rec.warnings.push_back(msg.str());
    }
    const double period_fs = 1e3 / source.center_thz;
    const long steps = static_cast<long>(std::ceil(duration_cycles * period_fs / rec.dt_fs));
    if (rec.source_end_fs >= steps * rec.dt_fs) rec.warnings.push_back("source pulse outlasts the run");
    for (auto& s : rec.series) s.reserve(static_cast<std::size_t>(steps));
    for (long n = 0; n < steps; ++n) {
        sim.step();
        for (std::size_t p = 0; p < points.size(); ++p) rec.series[p].push_back(sim.sample(probes[p].component, points[p]));
    }
    return rec;
}

}  // namespace hcav::fdtd
