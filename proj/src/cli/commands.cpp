#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "hemicav/cli/app.hpp"
#include "hemicav/coating.hpp"
#include "hemicav/constants.hpp"
#include "hemicav/cqed.hpp"
#include "hemicav/error.hpp"
#include "hemicav/fdtd/analysis.hpp"
#include "hemicav/grid_io.hpp"
#include "hemicav/modes.hpp"
#include "hemicav/stack_io.hpp"
#include "hemicav/surface.hpp"
#include "hemicav/tmm.hpp"

namespace hcav::cli {

namespace {

constexpr double deg = constants::pi / 180.0;

// JSON has no infinity; unbounded values are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> linear_grid(const Node& node, Dimension d, double scale) {
    node.only({"start", "stop", "points"});
    const double start = node.quantity("start", d) * scale;
    const double stop = node.quantity("stop", d) * scale;
    const long n = node.at("points").integer();
    if (n < 2) node.at("points").fail("need at least 2 points");
    if (!(stop > start)) node.at("stop").fail("must exceed start");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (n - 1);
    return out;
}

tmm::Polarization polarization(const Node& cfg) {
    const std::string p = cfg.string_or("polarization", "TE");
    if (p == "TE" || p == "s") return tmm::Polarization::TE;
    if (p == "TM" || p == "p") return tmm::Polarization::TM;
    cfg.at("polarization").fail("expected TE or TM");
}

modes::CavityGeometry cavity(const Node& node) {
    modes::CavityGeometry g;
    g.length_um = node.quantity("length", Dimension::Length);
    g.mirror_radius_um = node.quantity_or("mirror_radius", Dimension::Length, std::numeric_limits<double>::infinity());
    return g;
}

// ---- tmm -------------------------------------------------------------------

void tmm_sweep(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"stack", "wavelength", "angle", "polarization", "stop_band_threshold"});
    const auto spec = read_stack(cfg.at("stack"), ctx.config_dir);
    const auto grid = linear_grid(cfg.at("wavelength"), Dimension::Length, 1e3);
    const double angle = cfg.quantity_or("angle", Dimension::Angle, 0.0);
    const auto pol = polarization(cfg);
    const auto result = tmm::sweep(spec.stack, grid, angle, pol);

    std::vector<std::vector<double>> rows;
    double best = -1.0, best_wl = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        rows.push_back({grid[i], result[i].R, result[i].T, result[i].reflection_phase});
        if (result[i].R > best) {
            best = result[i].R;
            best_wl = grid[i];
        }
    }
    ctx.write_csv("sweep.csv", {"wavelength_nm", "R", "T", "phase_rad"}, rows);

    tmm::StopBandScan scan;
    scan.threshold = cfg.number_or("stop_band_threshold", 0.95);
    scan.lower_nm = grid.front();
    scan.upper_nm = grid.back();
    scan.step_nm = std::min(0.5, (grid.back() - grid.front()) / 100.0);
    ctx.outputs["points"] = grid.size();
    ctx.outputs["max_reflectance"] = best;
    ctx.outputs["max_reflectance_wavelength_nm"] = best_wl;
    ctx.outputs["layers"] = spec.stack.layers.size();
    if (const auto band = tmm::stop_band(spec.stack, angle, pol, scan)) {
        ctx.outputs["stop_band"] = {{"threshold", scan.threshold},
                                    {"lower_nm", band->lower_nm},
                                    {"upper_nm", band->upper_nm},
                                    {"width_nm", band->width_nm()}};
    } else {
        ctx.outputs["stop_band"] = nullptr;
    }
}

// ---- coating ---------------------------------------------------------------

coating::DepositionModel deposition(const Node& cfg, const StackSpec& spec) {
    coating::DepositionModel m;
    m.thinning_exponent = cfg.number_or("thinning_exponent", spec.thinning_exponent.value_or(1.0));
    return m;
}

json cutoff_json(const std::optional<double>& angle) { return angle ? json(*angle / deg) : json(nullptr); }

void coating_optimize(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"stack", "working_wavelength", "max_angle", "thinning_exponent", "threshold", "cutoff_threshold", "scale_min",
              "scale_max", "scale_step", "angle_step"});
    const auto spec = read_stack(cfg.at("stack"), ctx.config_dir);
    const auto model = deposition(cfg, spec);
    const double wl = cfg.quantity("working_wavelength", Dimension::Length) * 1e3;
    const double max_angle = cfg.quantity("max_angle", Dimension::Angle);
    const double threshold = cfg.number_or("threshold", 0.995);
    const double cutoff_threshold = cfg.number_or("cutoff_threshold", 0.95);
    coating::ScaleSearch search;
    search.scale_min = cfg.number_or("scale_min", search.scale_min);
    search.scale_max = cfg.number_or("scale_max", search.scale_max);
    search.scale_step = cfg.number_or("scale_step", search.scale_step);
    search.theta_step_rad = cfg.quantity_or("angle_step", Dimension::Angle, search.theta_step_rad);

    const auto opt = coating::optimize_center_scale(spec.stack, model, wl, max_angle, search);
    const coating::CoatingDesign base{spec.stack, 1.0};
    const coating::CoatingDesign tuned{spec.stack, opt.center_scale};

    ctx.outputs["center_scale"] = opt.center_scale;
    ctx.outputs["min_reflectance"] = opt.min_reflectance;
    ctx.outputs["threshold"] = threshold;
    ctx.outputs["meets_threshold"] = opt.min_reflectance >= threshold;
    ctx.outputs["bracket"] = {opt.bracket_low, opt.bracket_high};
    ctx.outputs["unoptimized_min_reflectance"] =
        coating::worst_case_reflectance(spec.stack, model, wl, max_angle, 1.0, search.theta_step_rad);
    ctx.outputs["cutoff_threshold"] = cutoff_threshold;
    ctx.outputs["cutoff_angle_deg_unoptimized"] = cutoff_json(coating::cutoff_angle(base, model, wl, cutoff_threshold));
    ctx.outputs["cutoff_angle_deg_optimized"] = cutoff_json(coating::cutoff_angle(tuned, model, wl, cutoff_threshold));
    if (opt.min_reflectance < threshold)
        ctx.warnings.push_back("no scale reaches the threshold over the requested angle range");

    const auto thetas = coating::angle_grid(std::max(max_angle, 60.0 * deg), 0.25 * deg);
    const auto r0 = coating::reflectivity_profile(base, model, wl, thetas);
    const auto r1 = coating::reflectivity_profile(tuned, model, wl, thetas);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < thetas.size(); ++i) rows.push_back({thetas[i] / deg, r0[i].reflectance, r1[i].reflectance});
    ctx.write_csv("profile.csv", {"theta_deg", "R_unoptimized", "R_optimized"}, rows);

    io::StackFile design{spec.stack, opt.center_scale, model.thinning_exponent};
    io::write_stack_file(ctx.output_path("design.stack").string(), design);
}

void coating_profile(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"stack", "working_wavelength", "max_angle", "thinning_exponent", "center_scale", "angle_step", "cutoff_threshold"});
    const auto spec = read_stack(cfg.at("stack"), ctx.config_dir);
    const auto model = deposition(cfg, spec);
    const double wl = cfg.quantity("working_wavelength", Dimension::Length) * 1e3;
    const double max_angle = cfg.quantity_or("max_angle", Dimension::Angle, 60.0 * deg);
    const double step = cfg.quantity_or("angle_step", Dimension::Angle, 0.25 * deg);
    const coating::CoatingDesign design{spec.stack, cfg.number_or("center_scale", spec.scale.value_or(1.0))};
    const auto thetas = coating::angle_grid(max_angle, step);
    const auto profile = coating::reflectivity_profile(design, model, wl, thetas);
    std::vector<std::vector<double>> rows;
    double worst = 1.0;
    for (const auto& p : profile) {
        rows.push_back({p.theta_rad / deg, p.reflectance});
        worst = std::min(worst, p.reflectance);
    }
    ctx.write_csv("profile.csv", {"theta_deg", "R"}, rows);
    const double threshold = cfg.number_or("cutoff_threshold", 0.95);
    ctx.outputs["center_scale"] = design.center_scale;
    ctx.outputs["min_reflectance"] = worst;
    ctx.outputs["cutoff_angle_deg"] = cutoff_json(coating::cutoff_angle(design, model, wl, threshold));
}

// ---- modes -----------------------------------------------------------------

void modes_spectrum(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"cavity", "wavelength_min", "wavelength_max", "max_transverse_order", "gaussian_wavelength"});
    const auto geom = cavity(cfg.at("cavity"));
    const double lo = cfg.quantity("wavelength_min", Dimension::Length) * 1e3;
    const double hi = cfg.quantity("wavelength_max", Dimension::Length) * 1e3;
    const long order = cfg.integer_or("max_transverse_order", 4);
    const auto lines = modes::mode_spectrum(geom, lo, hi, static_cast<int>(order));
    std::vector<std::vector<double>> rows;
    for (const auto& l : lines)
        rows.push_back({static_cast<double>(l.longitudinal_index), static_cast<double>(l.transverse_order), l.frequency_thz,
                        l.wavelength_nm});
    ctx.write_csv("modes.csv", {"q", "n", "frequency_THz", "wavelength_nm"}, rows);

    const auto s = modes::stability(geom);
    ctx.outputs["stability"] = {{"g1", s.g1}, {"g2", s.g2}, {"stable", s.stable}, {"marginal", s.marginal}};
    ctx.outputs["free_spectral_range_thz"] = modes::free_spectral_range_thz(geom.length_um);
    ctx.outputs["transverse_spacing_thz"] = modes::transverse_spacing_thz(geom);
    ctx.outputs["lines"] = lines.size();
    const double gw = cfg.quantity_or("gaussian_wavelength", Dimension::Length, 0.5 * (lo + hi) * 1e-3) * 1e3;
    if (s.stable && !s.marginal && std::isfinite(geom.mirror_radius_um)) {
        const auto gm = modes::gaussian_mode(geom, gw);
        ctx.outputs["gaussian_mode"] = {{"wavelength_nm", gw},
                                        {"waist_radius_um", gm.waist_radius_um},
                                        {"rayleigh_range_um", gm.rayleigh_range_um},
                                        {"divergence_half_angle_deg", gm.divergence_half_angle_rad / deg},
                                        {"effective_mode_volume_um3", gm.effective_mode_volume_um3}};
    } else {
        ctx.outputs["gaussian_mode"] = nullptr;
        ctx.warnings.push_back("geometry is planar, marginal or unstable: no paraxial Gaussian mode");
    }
}

// ---- cqed ------------------------------------------------------------------

struct CqedSetup {
    cqed::Emitter emitter;
    cqed::CavityLoss loss;
    double volume_um3;
    double coupling_ueV;
};

CqedSetup cqed_setup(RunContext& ctx) {
    const Node& cfg = ctx.config;
    CqedSetup s;
    const Node e = cfg.at("emitter");
    e.only({"dipole_moment", "transition_wavelength", "linewidth", "detuning"});
    s.emitter.dipole_moment_debye = e.quantity("dipole_moment", Dimension::DipoleMoment);
    s.emitter.transition_wavelength_nm = e.quantity("transition_wavelength", Dimension::Length) * 1e3;
    s.emitter.linewidth_ueV = e.quantity("linewidth", Dimension::Energy);
    s.emitter.detuning_ueV = e.quantity_or("detuning", Dimension::Energy, 0.0);
    if (!(s.emitter.linewidth_ueV > 0.0)) e.at("linewidth").fail("must be positive");

    const Node c = cfg.at("cavity");
    c.only({"length", "mirror_reflectivity", "waist", "effective_mode_volume"});
    const double length = c.quantity("length", Dimension::Length);
    s.loss = cqed::cavity_linewidth(length, c.number("mirror_reflectivity"));
    if (c.has("effective_mode_volume") == c.has("waist"))
        c.fail("give exactly one of waist or effective_mode_volume");
    if (c.has("waist")) {
        const double w0 = c.quantity("waist", Dimension::Length);
        s.volume_um3 = modes::effective_mode_volume(w0, length);
        ctx.outputs["waist_um"] = w0;
    } else {
        s.volume_um3 = c.quantity("effective_mode_volume", Dimension::Volume);
    }
    s.coupling_ueV = cqed::coupling_energy(s.emitter, s.volume_um3);
    return s;
}

void cqed_report(RunContext& ctx) {
    ctx.config.only({"emitter", "cavity"});
    const auto s = cqed_setup(ctx);
    const auto r = cqed::strong_coupling(s.coupling_ueV, s.emitter.linewidth_ueV, s.loss.kappa_ueV);
    ctx.outputs["effective_mode_volume_um3"] = s.volume_um3;
    ctx.outputs["coupling_energy_ueV"] = r.coupling_energy_ueV;
    ctx.outputs["splitting_ueV"] = r.splitting_ueV;
    ctx.outputs["gamma_ueV"] = r.gamma_ueV;
    ctx.outputs["kappa_ueV"] = r.kappa_ueV;
    ctx.outputs["strong"] = r.strong;
    ctx.outputs["margin_ueV"] = r.margin_ueV;
    ctx.outputs["finesse"] = s.loss.finesse;
    ctx.outputs["free_spectral_range_thz"] = s.loss.free_spectral_range_thz;
}

void cqed_spectrum(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"emitter", "cavity", "detuning", "coupling", "empty_cavity", "noise"});
    const auto s = cqed_setup(ctx);
    const auto grid = linear_grid(cfg.at("detuning"), Dimension::Energy, 1.0);
    const double g = cfg.quantity_or("coupling", Dimension::Energy, s.coupling_ueV);
    const bool empty = cfg.boolean_or("empty_cavity", false);
    auto spectrum = cqed::transmission_spectrum(s.loss, empty ? std::nullopt : std::optional(s.emitter), g, grid);
    if (const auto noise = cfg.find("noise")) {
        noise->only({"relative", "seed"});
        const double rel = noise->number("relative");
        std::mt19937_64 rng(static_cast<std::uint64_t>(noise->at("seed").integer()));
        std::normal_distribution<double> normal(0.0, rel);
        for (auto& t : spectrum.transmission) t += normal(rng);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) rows.push_back({grid[i], spectrum.transmission[i]});
    ctx.write_csv("spectrum.csv", {"detuning_ueV", "transmission"}, rows);
    ctx.outputs["coupling_energy_ueV"] = g;
    ctx.outputs["kappa_ueV"] = s.loss.kappa_ueV;
    ctx.outputs["points"] = grid.size();
    try {
        const auto pair = cqed::find_peak_pair(spectrum);
        ctx.outputs["peak_separation_ueV"] = pair.separation;
        ctx.outputs["central_dip"] = pair.central_dip;
    } catch (const AnalysisError&) {
        ctx.outputs["peak_separation_ueV"] = nullptr;
    }
}

cqed::TransmissionSpectrum read_two_column(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    cqed::TransmissionSpectrum s;
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y;
        if (!(ls >> x >> y)) {
            if (s.grid.empty() && no <= 2) continue;  // header row
            throw FormatError(path.string() + ":" + std::to_string(no) + ": expected two numbers");
        }
        s.grid.push_back(x);
        s.transmission.push_back(y);
    }
    return s;
}

void cqed_fit(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"spectrum_file", "analysis"});
    const auto spectrum = read_two_column(ctx.input_path(cfg.at("spectrum_file").string()));
    const std::string kind = cfg.string_or("analysis", "normal_modes");
    ctx.outputs["analysis"] = kind;
    if (kind == "normal_modes") {
        const auto f = cqed::fit_normal_modes(spectrum);
        ctx.outputs["coupling_ueV"] = f.coupling_ueV;
        ctx.outputs["kappa_ueV"] = f.kappa_ueV;
        ctx.outputs["gamma_ueV"] = f.gamma_ueV;
        ctx.outputs["cavity_center_ueV"] = f.cavity_center_ueV;
        ctx.outputs["emitter_center_ueV"] = f.emitter_center_ueV;
        ctx.outputs["peak_transmission"] = f.peak_transmission;
        ctx.outputs["normal_mode_splitting_ueV"] = f.normal_mode_splitting_ueV;
        ctx.outputs["peak_separation_ueV"] = f.peak_separation_ueV;
    } else if (kind == "finesse") {
        ctx.outputs["finesse"] = cqed::extract_finesse(spectrum);
    } else if (kind == "line_shape") {
        const auto c = cqed::classify_line(spectrum);
        ctx.outputs["shape"] = cqed::to_string(c.shape);
        ctx.outputs["center"] = c.center;
        ctx.outputs["width_hwhm"] = c.width;
        ctx.outputs["residual_ratio"] = finite_or_null(c.residual_ratio);
    } else {
        cfg.at("analysis").fail("expected normal_modes, finesse or line_shape");
    }
}

// ---- fdtd ------------------------------------------------------------------

fdtd::Component component(const Node& n) {
    try {
        return fdtd::component_from_string(n.string().c_str());
    } catch (const InputDomainError& e) {
        n.fail(e.what());
    }
}

json resonances_json(const std::vector<fdtd::Resonance>& rs) {
    json out = json::array();
    for (const auto& r : rs)
        out.push_back({{"frequency_thz", r.frequency_thz}, {"quality_factor", finite_or_null(r.quality_factor)}, {"power", r.power}});
    return out;
}

fdtd::ResonanceOptions resonance_options(const Node& cfg) {
    fdtd::ResonanceOptions o;
    if (const auto a = cfg.find("analysis")) {
        a->only({"min_frequency", "max_frequency", "probe", "noise_factor"});
        o.min_thz = a->quantity_or("min_frequency", Dimension::Frequency, 0.0);
        o.max_thz = a->quantity_or("max_frequency", Dimension::Frequency, o.max_thz);
        o.probe = static_cast<std::size_t>(a->integer_or("probe", 0));
        o.noise_factor = a->number_or("noise_factor", o.noise_factor);
    }
    return o;
}

void write_map(RunContext& ctx, const std::string& stem, const fdtd::ModeProfile& p, const std::vector<double>& values) {
    io::Grid g{static_cast<std::uint32_t>(p.nr), static_cast<std::uint32_t>(p.nz), p.cell_um, io::GridComponent::EnergyDensity,
               values};
    io::write_grid(ctx.output_path(stem + ".hcg"), g);
    io::write_grid_csv(ctx.output_path(stem + ".csv"), g);
}

void fdtd_simulate(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"cavity", "dbr", "dimple", "domain", "source", "probes", "duration_cycles", "analysis", "profile"});
    const auto geom = cavity(cfg.at("cavity"));
    std::optional<tmm::LayerStack> dbr;
    if (const auto d = cfg.find("dbr")) dbr = read_stack(*d, ctx.config_dir).stack;
    std::optional<coating::DimpleGeometry> dimple;
    if (const auto d = cfg.find("dimple")) {
        d->only({"depth"});
        dimple = coating::DimpleGeometry::from_depth(geom.mirror_radius_um, d->quantity("depth", Dimension::Length));
    }
    fdtd::DomainOptions opt;
    const Node dn = cfg.at("domain");
    dn.only({"design_wavelength", "resolution", "azimuthal_order", "radial_extent", "substrate_thickness", "fill_permittivity"});
    opt.design_wavelength_nm = dn.quantity("design_wavelength", Dimension::Length) * 1e3;
    opt.resolution = dn.number_or("resolution", opt.resolution);
    opt.azimuthal_order = static_cast<int>(dn.integer_or("azimuthal_order", opt.azimuthal_order));
    opt.radial_extent_um = dn.quantity("radial_extent", Dimension::Length);
    opt.substrate_thickness_um = dn.quantity_or("substrate_thickness", Dimension::Length, opt.substrate_thickness_um);
    opt.fill_permittivity = dn.number_or("fill_permittivity", opt.fill_permittivity);
    const auto domain = fdtd::build_domain(geom, dbr, dimple, opt);
    const double z0 = domain.surface_z_um();  // config z is measured from the bottom mirror surface

    const Node sn = cfg.at("source");
    sn.only({"kind", "component", "r", "z", "sheet_radius", "center_frequency", "bandwidth", "amplitude"});
    fdtd::SourceSpec src;
    const std::string kind = sn.string_or("kind", "point");
    if (kind == "sheet_x") {
        src.kind = fdtd::SourceKind::SheetX;
        src.sheet_radius_um = sn.quantity("sheet_radius", Dimension::Length);
    } else if (kind != "point") {
        sn.at("kind").fail("expected point or sheet_x");
    }
    if (sn.has("component")) src.component = component(sn.at("component"));
    src.r_um = sn.quantity_or("r", Dimension::Length, 0.5 * domain.cell_um);
    src.z_um = z0 + sn.quantity("z", Dimension::Length);
    src.center_thz = sn.quantity("center_frequency", Dimension::Frequency);
    src.bandwidth_thz = sn.quantity("bandwidth", Dimension::Frequency);
    src.amplitude = sn.number_or("amplitude", 1.0);

    std::vector<fdtd::ProbeSpec> probes;
    for (const Node& p : cfg.at("probes").items()) {
        p.only({"r", "z", "component"});
        probes.push_back({p.quantity("r", Dimension::Length), z0 + p.quantity("z", Dimension::Length),
                          p.has("component") ? component(p.at("component")) : fdtd::Component::Er});
    }
    if (probes.empty()) cfg.at("probes").fail("need at least one probe");
    const double cycles = cfg.number("duration_cycles");

    ctx.outputs["domain"] = {{"nr", domain.nr},
                             {"nz", domain.nz},
                             {"cell_um", domain.cell_um},
                             {"cavity_length_um", domain.cavity_length_um()},
                             {"time_step_fs", fdtd::courant_time_step(domain) * fdtd::fs_per_time_unit}};
    const auto record = fdtd::run_ringdown(domain, src, probes, cycles);
    for (const auto& w : record.warnings) ctx.warnings.push_back(w);

    std::vector<std::vector<double>> rows;
    for (std::size_t n = 0; n < record.series[0].size(); ++n) {
        std::vector<double> row{(n + 1) * record.dt_fs};
        for (const auto& s : record.series) row.push_back(s[n]);
        rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"t_fs"};
    for (std::size_t p = 0; p < probes.size(); ++p)
        header.push_back(std::string("probe") + std::to_string(p) + "_" + fdtd::to_string(probes[p].component));
    std::ostringstream meta;
    meta << std::setprecision(17) << "dt_fs=" << record.dt_fs << " source_end_fs=" << record.source_end_fs;
    ctx.write_csv("probes.csv", header, rows, meta.str());

    const auto ropt = resonance_options(cfg);
    const auto lines = fdtd::resonances(record, ropt);
    ctx.outputs["resonances"] = resonances_json(lines);

    if (const auto pn = cfg.find("profile")) {
        pn->only({"target_frequency", "bandwidth", "settle_cycles", "average_cycles"});
        const double target = pn->quantity("target_frequency", Dimension::Frequency);
        const auto nearest = std::min_element(lines.begin(), lines.end(), [&](const auto& a, const auto& b) {
            return std::abs(a.frequency_thz - target) < std::abs(b.frequency_thz - target);
        });
        fdtd::ProfileOptions po;
        po.bandwidth_thz = pn->quantity_or("bandwidth", Dimension::Frequency, po.bandwidth_thz);
        po.average_cycles = pn->number_or("average_cycles", po.average_cycles);
        const auto prof = fdtd::mode_profile(domain, nearest->frequency_thz, src, pn->number_or("settle_cycles", 20.0), po);
        ctx.outputs["profile"] = {{"resonance_frequency_thz", prof.resonance_frequency_thz},
                                  {"measured_frequency_thz", prof.measured_frequency_thz},
                                  {"waist_radius_um", prof.waist_radius_um ? json(*prof.waist_radius_um) : json(nullptr)},
                                  {"effective_mode_volume_um3", prof.effective_mode_volume_um3},
                                  {"antinode_z_um", prof.antinode_z_um},
                                  {"antinode_relative", prof.antinode_relative}};
        write_map(ctx, "energy_density", prof, prof.energy_density);
        write_map(ctx, "electric_energy_density", prof, prof.electric_energy_density);
    }
}

void fdtd_analyze(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"record_file", "analysis"});
    const auto path = ctx.input_path(cfg.at("record_file").string());
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path.string());
    fdtd::ProbeRecord rec;
    std::string line;
    int no = 0;
    std::size_t columns = 0;
    while (std::getline(is, line)) {
        ++no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ms(line.substr(1));
            std::string tok;
            while (ms >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) continue;
                const double v = std::atof(tok.c_str() + eq + 1);
                if (tok.compare(0, eq, "dt_fs") == 0) rec.dt_fs = v;
                if (tok.compare(0, eq, "source_end_fs") == 0) rec.source_end_fs = v;
            }
            continue;
        }
        if (line.rfind("t_fs", 0) == 0) {
            columns = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
            rec.series.assign(columns, {});
            rec.probes.assign(columns, {});
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t;
        if (!(ls >> t) || columns == 0) throw FormatError(path.string() + ":" + std::to_string(no) + ": malformed record row");
        for (std::size_t c = 0; c < columns; ++c) {
            double v;
            if (!(ls >> v)) throw FormatError(path.string() + ":" + std::to_string(no) + ": missing probe value");
            rec.series[c].push_back(v);
        }
    }
    if (!(rec.dt_fs > 0.0)) throw FormatError(path.string() + ": missing '# dt_fs=' header");
    const auto lines = fdtd::resonances(rec, resonance_options(cfg));
    ctx.outputs["resonances"] = resonances_json(lines);
}

// ---- surface ---------------------------------------------------------------

surface::HeightMap load_map(RunContext& ctx, const Node& node) {
    node.only({"file", "pixel_pitch"});
    const auto path = ctx.input_path(node.at("file").string());
    io::Grid g;
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open " + path.string());
    char head[8] = {};
    probe.read(head, 8);
    probe.close();
    if (std::string(head, 8) == "HCAVGRD1")
        g = io::read_grid(path);
    else
        g = io::read_grid_csv(path, 1.0);
    if (node.has("pixel_pitch")) g.pitch_um = node.quantity("pixel_pitch", Dimension::Length);
    surface::HeightMap m;
    m.nx = static_cast<int>(g.nx);
    m.ny = static_cast<int>(g.ny);
    m.pitch_um = g.pitch_um;
    m.heights_nm = g.values;
    bool masked = false;
    for (double v : g.values) masked = masked || !std::isfinite(v);
    if (masked) {
        m.valid.resize(g.values.size());
        for (std::size_t i = 0; i < g.values.size(); ++i) m.valid[i] = std::isfinite(g.values[i]) ? 1 : 0;
    }
    return m;
}

void surface_psd(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"map", "window", "band"});
    const auto map = load_map(ctx, cfg.at("map"));
    const auto psd = surface::compute_psd(map, surface::window_from_string(cfg.string_or("window", "hann")));
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < psd.frequency_per_mm.size(); ++i) rows.push_back({psd.frequency_per_mm[i], psd.psd_nm2_mm2[i]});
    ctx.write_csv("psd.csv", {"frequency_per_mm", "psd_nm2_mm2"}, rows);
    ctx.outputs["window"] = surface::to_string(psd.window);
    ctx.outputs["window_power"] = psd.window_power;
    ctx.outputs["variance_nm2"] = psd.variance_nm2;
    ctx.outputs["rms_nm"] = std::sqrt(psd.variance_nm2);
    ctx.outputs["bin_width_per_mm"] = psd.bin_width_per_mm;
    ctx.outputs["rms_full_band_nm"] = surface::rms_in_band(psd, psd.frequency_per_mm.front(), psd.frequency_per_mm.back());
    if (const auto b = cfg.find("band")) {
        b->only({"low", "high"});
        const double lo = b->quantity("low", Dimension::SpatialFrequency);
        const double hi = b->quantity("high", Dimension::SpatialFrequency);
        ctx.outputs["band"] = {{"low_per_mm", lo}, {"high_per_mm", hi}, {"rms_nm", surface::rms_in_band(psd, lo, hi)}};
    }
}

void surface_sphere(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"map", "region"});
    const auto map = load_map(ctx, cfg.at("map"));
    const Node r = cfg.at("region");
    r.only({"center_x", "center_y", "diameter"});
    try {
        const auto fit = surface::fit_sphere(map, r.quantity("center_x", Dimension::Length),
                                             r.quantity("center_y", Dimension::Length), r.quantity("diameter", Dimension::Length));
        ctx.outputs["radius_um"] = fit.radius_um;
        ctx.outputs["center_um"] = {fit.center_x_um, fit.center_y_um, fit.center_z_um};
        ctx.outputs["concave"] = fit.concave;
        ctx.outputs["rms_residual_nm"] = fit.rms_residual_nm;
        ctx.outputs["max_abs_residual_nm"] = fit.max_abs_residual_nm;
        ctx.outputs["fit_region_diameter_um"] = fit.fit_region_diameter_um;
        ctx.outputs["points"] = fit.points;
    } catch (const FitError& e) {
        ctx.outputs["radius_um"] = finite_or_null(e.radius_um());
        throw;
    }
}

void surface_budget(RunContext& ctx) {
    const Node& cfg = ctx.config;
    cfg.only({"sigma", "wavelength", "mirror_transmissions"});
    std::vector<double> ts;
    for (const Node& t : cfg.at("mirror_transmissions").items()) ts.push_back(t.number());
    const auto s = surface::scatter_budget(cfg.quantity("sigma", Dimension::Length) * 1e3,
                                           cfg.quantity("wavelength", Dimension::Length) * 1e3, ts);
    ctx.outputs["rms_roughness_nm"] = s.rms_roughness_nm;
    ctx.outputs["total_integrated_scatter"] = s.total_integrated_scatter;
    ctx.outputs["per_bounce_loss"] = s.per_bounce_loss;
    ctx.outputs["finesse_ceiling"] = s.finesse_ceiling;
}

}  // namespace

const std::vector<std::pair<std::string, Command>>& commands() {
    static const std::vector<std::pair<std::string, Command>> table = {
        {"tmm sweep", tmm_sweep},         {"coating optimize", coating_optimize}, {"coating profile", coating_profile},
        {"modes spectrum", modes_spectrum}, {"cqed report", cqed_report},         {"cqed spectrum", cqed_spectrum},
        {"cqed fit", cqed_fit},           {"fdtd simulate", fdtd_simulate},       {"fdtd analyze", fdtd_analyze},
        {"surface psd", surface_psd},     {"surface sphere", surface_sphere},     {"surface budget", surface_budget},
    };
    return table;
}

}  // namespace hcav::cli
