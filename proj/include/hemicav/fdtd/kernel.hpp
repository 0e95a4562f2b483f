#pragma once

// Staggered-grid update for azimuthal order m in normalized units
// (c = 1, lengths and times in micrometres).
//
// Field ansatz, with the azimuthal factor written next to each amplitude:
//   Er cos(m phi) at (i+1/2, k)     Hr   sin(m phi) at (i, k+1/2)
//   Ep sin(m phi) at (i, k)         Hphi cos(m phi) at (i+1/2, k+1/2)
//   Ez cos(m phi) at (i, k+1/2)     Hz   sin(m phi) at (i+1/2, k)
// For m = 0 the sin group is the decoupled TE set with factor 1.
//
// On the axis Ep and Hr are not unknowns, nor is Ez for m >= 1. The m = 0
// axial Ez uses the circulation of Hphi around a disc of radius cell/2.
// Every array is (nz+1) x (nr+1), row-major in z.

#include <cstddef>
#include <vector>

#include "hemicav/fdtd/domain.hpp"

namespace hcav::fdtd {

enum class Component : int { Er = 0, Ephi = 1, Ez = 2, Hr = 3, Hphi = 4, Hz = 5 };

const char* to_string(Component c);
Component component_from_string(const char* name);

struct Fields {
    int nr = 0;
    int nz = 0;
    long step_index = 0;  // E is at t = step_index * dt, H half a step earlier
    std::vector<double> er, ep, ez, hr, hp, hz;

    Fields() = default;
    Fields(int nr_, int nz_);
    std::size_t stride() const { return static_cast<std::size_t>(nr) + 1; }
    std::size_t at(int i, int k) const { return static_cast<std::size_t>(k) * stride() + i; }
    std::vector<double>& component(Component c);
    const std::vector<double>& component(Component c) const;
    void clear();
};

/// Largest stable step: 0.99 of the smaller of cell/sqrt(2) and the
/// Gershgorin bound of the discrete curl-curl operator for this m.
double courant_time_step(const SimulationDomain& domain, double courant_factor = 0.99);

struct UpdateCoefficients {
    double dt = 0.0;
    double cell = 0.0;
    int m = 0;
    int nr = 0;
    int nz = 0;
    std::vector<double> cer, cep, cez;  // dt / eps on live edges, 0 on conductors and walls
    std::vector<double> eps_er, eps_ep, eps_ez;
    std::vector<double> r_node, r_half, inv_r_node, inv_r_half;  // per column
};

UpdateCoefficients make_coefficients(const SimulationDomain& domain, double dt);

/// H from n-1/2 to n+1/2, then E from n to n+1. Rows run in parallel with
/// a barrier between the two halves.
void update_h(Fields& f, const UpdateCoefficients& c);
void update_e(Fields& f, const UpdateCoefficients& c);
void step(Fields& f, const UpdateCoefficients& c);

/// Conserved quadratic form 1/2 (sum eps w e^2 + sum w h^(n-1/2) h^(n+1/2)),
/// with w the per-radian dual-cell area r dr dz.
double discrete_energy(const Fields& f, const UpdateCoefficients& c);

namespace reference {
/// Plain serial update that derives every coefficient from the domain on
/// the fly. Kept to cross-check the optimized kernel.
void step(Fields& f, const SimulationDomain& domain, double dt);
}  // namespace reference

}  // namespace hcav::fdtd
