#pragma once

// Time stepping with a soft pulsed source and point probes.

#include <string>
#include <vector>

#include "hemicav/fdtd/domain.hpp"
#include "hemicav/fdtd/kernel.hpp"

namespace hcav::fdtd {

/// Unit conversions for the normalized time axis (c = 1, micrometres).
inline constexpr double fs_per_time_unit = 3.3356409519815204;
inline constexpr double thz_per_frequency_unit = 299.792458;

enum class SourceKind {
    Point,  // one edge of `component`
    SheetX  // m = 1 only: uniform x-polarized sheet Er = +s, Ephi = -s for r < sheet_radius
};

struct SourceSpec {
    SourceKind kind = SourceKind::Point;
    Component component = Component::Er;
    double r_um = 0.0;
    double z_um = 0.0;
    double sheet_radius_um = 0.0;
    double center_thz = 400.0;
    double bandwidth_thz = 100.0;  // full width at 1/e of the spectral amplitude
    double amplitude = 1.0;

    /// Gaussian-modulated sinusoid, exactly zero after 2 * delay.
    double envelope_width_fs() const;
    double delay_fs() const;
    double end_fs() const { return 2.0 * delay_fs(); }
    double value(double t_fs) const;
};

struct ProbeSpec {
    double r_um = 0.0;
    double z_um = 0.0;
    Component component = Component::Er;
};

struct ProbeRecord {
    double dt_fs = 0.0;
    double source_end_fs = 0.0;
    std::vector<ProbeSpec> probes;
    std::vector<std::vector<double>> series;  // one per probe, sample n at (n+1) dt
    std::vector<std::string> warnings;
};

/// Grid location nearest to (r, z) for a component; throws BuildError when
/// it falls outside the arrays.
struct GridPoint {
    int i;
    int k;
};
GridPoint locate(const SimulationDomain& domain, Component component, double r_um, double z_um);

class Simulation {
public:
    /// `serial_reference` routes every step through the plain reference kernel.
    explicit Simulation(const SimulationDomain& domain, bool serial_reference = false);

    void set_source(const SourceSpec& source);
    void clear_source();
    void step();
    void run(long steps);

    double time_fs() const { return fields_.step_index * dt_ * fs_per_time_unit; }
    double dt() const { return dt_; }
    double dt_fs() const { return dt_ * fs_per_time_unit; }
    double energy() const { return discrete_energy(fields_, coefficients_); }
    double sample(Component component, const GridPoint& p) const;

    const SimulationDomain& domain() const { return domain_; }
    const UpdateCoefficients& coefficients() const { return coefficients_; }
    const Fields& fields() const { return fields_; }
    Fields& fields() { return fields_; }

private:
    struct Injection {
        std::size_t index;
        Component component;
        double weight;
    };
    void inject(double value);

    SimulationDomain domain_;
    double dt_;
    UpdateCoefficients coefficients_;
    Fields fields_;
    bool serial_;
    bool has_source_ = false;
    SourceSpec source_;
    std::vector<Injection> injections_;
};

/// Runs a pulse and records probes for `duration_cycles` periods of the
/// source center frequency. Short runs are flagged in `warnings`.
ProbeRecord run_ringdown(const SimulationDomain& domain, const SourceSpec& source,
                         const std::vector<ProbeSpec>& probes, double duration_cycles,
                         bool serial_reference = false);

}  // namespace hcav::fdtd
