#include "hemicav/fdtd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "hemicav/error.hpp"

namespace hcav::fdtd {

const char* to_string(Component c) {
    switch (c) {
        case Component::Er: return "Er";
        case Component::Ephi: return "Ephi";
        case Component::Ez: return "Ez";
        case Component::Hr: return "Hr";
        case Component::Hphi: return "Hphi";
        case Component::Hz: return "Hz";
    }
    return "?";
}

Component component_from_string(const char* name) {
    for (int i = 0; i < 6; ++i)
        if (std::strcmp(name, to_string(static_cast<Component>(i))) == 0) return static_cast<Component>(i);
    throw InputDomainError(std::string("unknown field component '") + name + "'");
}

Fields::Fields(int nr_, int nz_) : nr(nr_), nz(nz_) {
    const std::size_t n = static_cast<std::size_t>(nr + 1) * (nz + 1);
    for (auto* v : {&er, &ep, &ez, &hr, &hp, &hz}) v->assign(n, 0.0);
}

std::vector<double>& Fields::component(Component c) {
    switch (c) {
        case Component::Er: return er;
        case Component::Ephi: return ep;
        case Component::Ez: return ez;
        case Component::Hr: return hr;
        case Component::Hphi: return hp;
        case Component::Hz: return hz;
    }
    return er;
}

const std::vector<double>& Fields::component(Component c) const {
    return const_cast<Fields*>(this)->component(c);
}

void Fields::clear() {
    for (auto* v : {&er, &ep, &ez, &hr, &hp, &hz}) std::fill(v->begin(), v->end(), 0.0);
    step_index = 0;
}

double courant_time_step(const SimulationDomain& domain, double courant_factor) {
    const double h = domain.cell_um;
    const double m = domain.azimuthal_order;
    const double inv = 1.0 / h;
    double bound = 8.0 * inv * inv;
    for (int i = 0; i <= domain.nr; ++i) {
        const double rh = (i + 0.5) * h;
        bound = std::max(bound, (m / rh) * (2.0 * inv + m / rh) + 8.0 * inv * inv);
        if (i >= 1) {
            const double ri = i * h;
            const double rl = (i - 0.5) * h;
            const double s_ep = 2.0 * inv * (m / ri + 2.0 * inv) + inv * (2.0 * inv + m / rh) +
                                inv * (2.0 * inv + m / rl);
            const double s_ez = 8.0 * inv * inv + (m / ri) * (m / ri + 2.0 * inv);
            bound = std::max({bound, s_ep, s_ez});
        }
    }
    if (domain.azimuthal_order == 0) bound = std::max(bound, 16.0 * inv * inv);
    return courant_factor * std::min(h / std::sqrt(2.0), 2.0 / std::sqrt(bound));
}

namespace {

// Mean permittivity of the cells touching an edge; 0 if any is a conductor.
double edge_eps(const SimulationDomain& d, std::initializer_list<std::pair<int, int>> cells) {
    double sum = 0.0;
    int count = 0;
    for (auto [i, k] : cells) {
        if (i < 0 || k < 0 || i >= d.nr || k >= d.nz) continue;
        if (d.is_pec(i, k)) return 0.0;
        sum += d.eps(i, k);
        ++count;
    }
    return count ? sum / count : 0.0;
}

double eps_er(const SimulationDomain& d, int i, int k) {
    if (k <= 0 || k >= d.nz || i >= d.nr) return 0.0;
    return edge_eps(d, {{i, k - 1}, {i, k}});
}

double eps_ep(const SimulationDomain& d, int i, int k) {
    if (i <= 0 || i >= d.nr || k <= 0 || k >= d.nz) return 0.0;
    return edge_eps(d, {{i - 1, k - 1}, {i, k - 1}, {i - 1, k}, {i, k}});
}

double eps_ez(const SimulationDomain& d, int i, int k) {
    if (i >= d.nr || k >= d.nz) return 0.0;
    if (i == 0) return d.azimuthal_order == 0 ? edge_eps(d, {{0, k}}) : 0.0;
    return edge_eps(d, {{i - 1, k}, {i, k}});
}

}  // namespace

UpdateCoefficients make_coefficients(const SimulationDomain& d, double dt) {
    UpdateCoefficients c;
    c.dt = dt;
    c.cell = d.cell_um;
    c.m = d.azimuthal_order;
    c.nr = d.nr;
    c.nz = d.nz;
    const std::size_t stride = static_cast<std::size_t>(d.nr) + 1;
    const std::size_t n = stride * (d.nz + 1);
    for (auto* v : {&c.cer, &c.cep, &c.cez, &c.eps_er, &c.eps_ep, &c.eps_ez}) v->assign(n, 0.0);
    for (int k = 0; k <= d.nz; ++k) {
        for (int i = 0; i <= d.nr; ++i) {
            const std::size_t idx = static_cast<std::size_t>(k) * stride + i;
            c.eps_er[idx] = eps_er(d, i, k);
            c.eps_ep[idx] = eps_ep(d, i, k);
            c.eps_ez[idx] = eps_ez(d, i, k);
            c.cer[idx] = c.eps_er[idx] > 0.0 ? dt / c.eps_er[idx] : 0.0;
            c.cep[idx] = c.eps_ep[idx] > 0.0 ? dt / c.eps_ep[idx] : 0.0;
            c.cez[idx] = c.eps_ez[idx] > 0.0 ? dt / c.eps_ez[idx] : 0.0;
        }
    }
    c.r_node.resize(stride + 1);
    c.r_half.resize(stride + 1);
    c.inv_r_node.resize(stride + 1);
    c.inv_r_half.resize(stride + 1);
    for (std::size_t i = 0; i <= stride; ++i) {
        c.r_node[i] = static_cast<double>(i) * d.cell_um;
        c.r_half[i] = (static_cast<double>(i) + 0.5) * d.cell_um;
        c.inv_r_node[i] = i == 0 ? 0.0 : 1.0 / c.r_node[i];
        c.inv_r_half[i] = 1.0 / c.r_half[i];
    }
    return c;
}

void update_h(Fields& f, const UpdateCoefficients& c) {
    const int nr = c.nr, nz = c.nz;
    const std::size_t s = f.stride();
    const double dt = c.dt, inv = 1.0 / c.cell, m = c.m;
    const double* er = f.er.data();
    const double* ep = f.ep.data();
    const double* ez = f.ez.data();
    double* hr = f.hr.data();
    double* hp = f.hp.data();
    double* hz = f.hz.data();
    const double* rn = c.r_node.data();
    const double* irn = c.inv_r_node.data();
    const double* irh = c.inv_r_half.data();

#pragma omp parallel for schedule(static)
    for (int k = 0; k <= nz; ++k) {
        const std::size_t row = static_cast<std::size_t>(k) * s;
        if (k < nz) {
            for (int i = 0; i < nr; ++i) {
                const std::size_t a = row + i;
                hp[a] -= dt * inv * ((er[a + s] - er[a]) - (ez[a + 1] - ez[a]));
            }
            for (int i = 1; i < nr; ++i) {
                const std::size_t a = row + i;
                hr[a] += dt * (m * ez[a] * irn[i] + (ep[a + s] - ep[a]) * inv);
            }
        }
        for (int i = 0; i < nr; ++i) {
            const std::size_t a = row + i;
            hz[a] -= dt * irh[i] * ((rn[i + 1] * ep[a + 1] - rn[i] * ep[a]) * inv + m * er[a]);
        }
    }
}

void update_e(Fields& f, const UpdateCoefficients& c) {
    const int nr = c.nr, nz = c.nz;
    const std::size_t s = f.stride();
    const double inv = 1.0 / c.cell, m = c.m;
    double* er = f.er.data();
    double* ep = f.ep.data();
    double* ez = f.ez.data();
    const double* hr = f.hr.data();
    const double* hp = f.hp.data();
    const double* hz = f.hz.data();
    const double* cer = c.cer.data();
    const double* cep = c.cep.data();
    const double* cez = c.cez.data();
    const double* rh = c.r_half.data();
    const double* irn = c.inv_r_node.data();
    const double* irh = c.inv_r_half.data();

#pragma omp parallel for schedule(static)
    for (int k = 0; k < nz; ++k) {
        const std::size_t row = static_cast<std::size_t>(k) * s;
        if (k >= 1) {
            for (int i = 0; i < nr; ++i) {
                const std::size_t a = row + i;
                er[a] += cer[a] * (m * hz[a] * irh[i] - (hp[a] - hp[a - s]) * inv);
            }
            for (int i = 1; i < nr; ++i) {
                const std::size_t a = row + i;
                ep[a] += cep[a] * ((hr[a] - hr[a - s]) - (hz[a] - hz[a - 1])) * inv;
            }
        }
        if (m == 0) ez[row] += cez[row] * 4.0 * hp[row] * inv;
        for (int i = 1; i < nr; ++i) {
            const std::size_t a = row + i;
            ez[a] += cez[a] * irn[i] * ((rh[i] * hp[a] - rh[i - 1] * hp[a - 1]) * inv - m * hr[a]);
        }
    }
}

void step(Fields& f, const UpdateCoefficients& c) {
    update_h(f, c);
    update_e(f, c);
    ++f.step_index;
}

double discrete_energy(const Fields& f, const UpdateCoefficients& c) {
    Fields next = f;
    update_h(next, c);
    const double h = c.cell;
    const std::size_t s = f.stride();
    double we = 0.0, wh = 0.0;
    for (int k = 0; k <= c.nz; ++k) {
        for (int i = 0; i <= c.nr; ++i) {
            const std::size_t a = static_cast<std::size_t>(k) * s + i;
            const double rn = c.r_node[i] * h * h;
            const double rhf = c.r_half[i] * h * h;
            const double axis = h * h * h / 8.0;
            we += c.eps_er[a] * rhf * f.er[a] * f.er[a];
            we += c.eps_ep[a] * rn * f.ep[a] * f.ep[a];
            we += c.eps_ez[a] * (i == 0 ? axis : rn) * f.ez[a] * f.ez[a];
            if (i < c.nr) {
                wh += rhf * f.hp[a] * next.hp[a];
                wh += rhf * f.hz[a] * next.hz[a];
            }
            wh += rn * f.hr[a] * next.hr[a];
        }
    }
    return 0.5 * (we + wh);
}

namespace reference {

void step(Fields& f, const SimulationDomain& d, double dt) {
    const int nr = d.nr, nz = d.nz;
    const double h = d.cell_um;
    const double m = d.azimuthal_order;
    auto r = [h](double index) { return index * h; };

    // H half step.
    for (int k = 0; k < nz; ++k)
        for (int i = 0; i < nr; ++i)
            f.hp[f.at(i, k)] -= dt / h * (f.er[f.at(i, k + 1)] - f.er[f.at(i, k)] - f.ez[f.at(i + 1, k)] + f.ez[f.at(i, k)]);
    for (int k = 0; k < nz; ++k)
        for (int i = 1; i < nr; ++i)
            f.hr[f.at(i, k)] += dt * (m * f.ez[f.at(i, k)] / r(i) + (f.ep[f.at(i, k + 1)] - f.ep[f.at(i, k)]) / h);
    for (int k = 0; k <= nz; ++k)
        for (int i = 0; i < nr; ++i)
            f.hz[f.at(i, k)] -= dt * ((r(i + 1) * f.ep[f.at(i + 1, k)] - r(i) * f.ep[f.at(i, k)]) / (r(i + 0.5) * h) +
                                      m * f.er[f.at(i, k)] / r(i + 0.5));

    // E full step.
    for (int k = 1; k < nz; ++k)
        for (int i = 0; i < nr; ++i) {
            const double eps = eps_er(d, i, k);
            if (eps == 0.0) continue;
            f.er[f.at(i, k)] += dt / eps * (m * f.hz[f.at(i, k)] / r(i + 0.5) - (f.hp[f.at(i, k)] - f.hp[f.at(i, k - 1)]) / h);
        }
    for (int k = 1; k < nz; ++k)
        for (int i = 1; i < nr; ++i) {
            const double eps = eps_ep(d, i, k);
            if (eps == 0.0) continue;
            f.ep[f.at(i, k)] += dt / eps * ((f.hr[f.at(i, k)] - f.hr[f.at(i, k - 1)]) / h -
                                            (f.hz[f.at(i, k)] - f.hz[f.at(i - 1, k)]) / h);
        }
    for (int k = 0; k < nz; ++k) {
        if (d.azimuthal_order == 0) {
            const double eps = eps_ez(d, 0, k);
            if (eps != 0.0) f.ez[f.at(0, k)] += dt / eps * 4.0 * f.hp[f.at(0, k)] / h;
        }
        for (int i = 1; i < nr; ++i) {
            const double eps = eps_ez(d, i, k);
            if (eps == 0.0) continue;
            f.ez[f.at(i, k)] += dt / eps * ((r(i + 0.5) * f.hp[f.at(i, k)] - r(i - 0.5) * f.hp[f.at(i - 1, k)]) / (r(i) * h) -
                                            m * f.hr[f.at(i, k)] / r(i));
        }
    }
    ++f.step_index;
}

}  // namespace reference

}  // namespace hcav::fdtd
