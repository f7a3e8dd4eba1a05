#include "strobo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "strobo/clock.hpp"
#include "strobo/errors.hpp"
#include "strobo/evolution.hpp"
#include "strobo/lattice.hpp"
#include "strobo/spectral.hpp"
#include "strobo/su2.hpp"

namespace strobo::cli {

namespace {

using nlohmann::json;

constexpr double kIdentityTolerance = 1e-10;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt(std::size_t x) { return std::to_string(x); }

struct Params {
    std::string model = "osc-b";
    std::size_t N = 64;
    double omega = 1.0;
    double delta = -0.5;
    double s = 1.0;
    double gamma = 1.0;
    double width = 2.0;
    double T = 1.0;
    std::size_t steps = 10;
    std::size_t nodes = 64;
    double sigma = 0.5;
    std::string clock = "gaussian";
    std::string Ns = "64,128,...,4096";
    long mode = 1;
    std::string solver = "dense";
    double box = 1.0;
    double mass = 1.0;
    bool all_modes = false;
    std::string format;
    std::string out;
};

int two_s_of(double s) {
    const double twice = 2.0 * s;
    if (!(s > 0.0) || std::abs(twice - std::round(twice)) > 1e-12 || twice > 1e6) {
        throw ContractViolation("--s must be a positive integer or half-integer");
    }
    return static_cast<int>(std::lround(twice));
}

lattice::AngularGrid grid_of(const Params& p) { return lattice::AngularGrid::make(p.N, p.omega, p.delta); }

OperatorMatrix oscillator_operator(const std::string& model, const lattice::AngularGrid& grid) {
    if (model == "osc-a") return lattice::build_case_a(grid);
    return lattice::build_case_b(grid);
}

spectral::EigMethod method_of(const std::string& name) {
    if (name == "circulant") return spectral::EigMethod::Circulant;
    if (name == "auto") return spectral::EigMethod::Auto;
    return spectral::EigMethod::Dense;
}

json pair(cplx z) { return json::array({z.real(), z.imag()}); }

// ---- output plumbing ----------------------------------------------------

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> summary;  // extra "# key=value" lines
};

void write_csv(std::ostream& os, const RunConfig& config, const Table& table) {
    os << "# command=" << config.command << '\n';
    for (const auto& [key, value] : config.parameters) os << "# " << key << '=' << value << '\n';
    for (const auto& [key, value] : table.summary) os << "# " << key << '=' << value << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

json envelope(const RunConfig& config) {
    json doc;
    doc["schema_version"] = 1;
    doc["command"] = config.command;
    json cfg = json::object();
    for (const auto& [key, value] : config.parameters) cfg[key] = value;
    doc["config"] = cfg;
    return doc;
}

void write_json(std::ostream& os, const json& doc) { os << doc.dump(2) << '\n'; }

std::string svg_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void write_convergence_svg(std::ostream& os, const RunConfig& config, const spectral::ConvergenceReport& rep) {
    const double width = 640, height = 480, margin = 70;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < rep.Ns.size(); ++i) {
        if (rep.errors[i] > 0.0) {
            lx.push_back(std::log10(static_cast<double>(rep.Ns[i])));
            ly.push_back(std::log10(rep.errors[i]));
        }
    }
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" viewBox=\"0 0 640 480\">\n";
    os << "<!-- command=" << config.command;
    for (const auto& [key, value] : config.parameters) os << ' ' << key << '=' << value;
    os << " -->\n";
    os << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    if (lx.empty()) {
        os << "<text x=\"320\" y=\"240\" text-anchor=\"middle\">no positive errors to plot</text>\n</svg>\n";
        return;
    }
    double x0 = std::floor(*std::min_element(lx.begin(), lx.end()));
    double x1 = std::ceil(*std::max_element(lx.begin(), lx.end()));
    double y0 = std::floor(*std::min_element(ly.begin(), ly.end()));
    double y1 = std::ceil(*std::max_element(ly.begin(), ly.end()));
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + 1;
    auto px = [&](double x) { return margin + (x - x0) / (x1 - x0) * (width - 2 * margin); };
    auto py = [&](double y) { return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin); };

    os << "<g stroke=\"black\" fill=\"none\">\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin
       << "\" y2=\"" << height - margin << "\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
       << height - margin << "\"/>\n</g>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); ++d) {
        os << "<text x=\"" << svg_number(px(d)) << "\" y=\"" << height - margin + 18
           << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
    }
    for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d) {
        os << "<text x=\"" << margin - 8 << "\" y=\"" << svg_number(py(d) + 4)
           << "\" text-anchor=\"end\">1e" << d << "</text>\n";
    }
    os << "<text x=\"320\" y=\"" << height - 20 << "\" text-anchor=\"middle\">N</text>\n";
    os << "<text x=\"20\" y=\"240\" transform=\"rotate(-90 20 240)\" text-anchor=\"middle\">error</text>\n";
    os << "<text x=\"320\" y=\"30\" text-anchor=\"middle\">fitted order " << svg_number(rep.fitted_order)
       << (rep.accepted ? "" : " (rejected)") << "</text>\n</g>\n";

    os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < lx.size(); ++i) os << (i ? " " : "") << svg_number(px(lx[i])) << ',' << svg_number(py(ly[i]));
    os << "\"/>\n";
    for (std::size_t i = 0; i < lx.size(); ++i) {
        os << "<circle cx=\"" << svg_number(px(lx[i])) << "\" cy=\"" << svg_number(py(ly[i]))
           << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    if (std::isfinite(rep.fitted_order) && rep.fit_Ns.size() >= 2) {
        std::vector<double> fx, fy;
        for (std::size_t i = 0; i < rep.Ns.size(); ++i) {
            if (std::find(rep.fit_Ns.begin(), rep.fit_Ns.end(), rep.Ns[i]) != rep.fit_Ns.end() && rep.errors[i] > 0) {
                fx.push_back(std::log10(static_cast<double>(rep.Ns[i])));
                fy.push_back(std::log10(rep.errors[i]));
            }
        }
        if (fx.size() >= 2) {
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < fx.size(); ++i) mx += fx[i], my += fy[i];
            mx /= static_cast<double>(fx.size());
            my /= static_cast<double>(fy.size());
            const double a = fx.front(), b = fx.back();
            const double ya = my + rep.fitted_order * (a - mx), yb = my + rep.fitted_order * (b - mx);
            os << "<line stroke=\"crimson\" stroke-dasharray=\"6 4\" x1=\"" << svg_number(px(a)) << "\" y1=\""
               << svg_number(py(ya)) << "\" x2=\"" << svg_number(px(b)) << "\" y2=\"" << svg_number(py(yb))
               << "\"/>\n";
        }
    }
    os << "</svg>\n";
}

// ---- commands -----------------------------------------------------------

struct Emit {
    std::function<void(std::ostream&)> csv;
    std::function<void(std::ostream&)> json_out;
    std::function<void(std::ostream&)> svg;
};

Emit cmd_spectrum(const Params& p, const RunConfig& config) {
    const auto grid = grid_of(p);
    const auto op = oscillator_operator(p.model, grid);
    const auto report = spectral::eig(op, method_of(p.solver));

    std::vector<cplx> formula;
    if (p.model == "osc-a") {
        formula = lattice::case_a_spectrum(grid);
    } else {
        for (double e : lattice::case_b_spectrum(grid)) formula.emplace_back(e);
    }
    std::vector<cplx> matched(formula.size());
    if (p.model == "osc-a") {
        matched = lattice::match_to_labels(report.eigenvalues, formula);
    } else {
        // sorted real order: the k-th smallest formula value takes the k-th smallest eigenvalue
        std::vector<std::size_t> order(formula.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return formula[a].real() < formula[b].real(); });
        std::vector<cplx> numeric = report.eigenvalues;
        spectral::sort_spectrum(numeric);
        for (std::size_t k = 0; k < order.size(); ++k) matched[order[k]] = numeric[k];
    }

    Table table;
    table.columns = {"m", "E_numeric_re", "E_numeric_im", "E_formula_re", "E_formula_im", "abs_error"};
    json rows = json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < formula.size(); ++i) {
        const double err = std::abs(matched[i] - formula[i]);
        worst = std::max(worst, err);
        table.rows.push_back({fmt(i + 1), fmt(matched[i].real()), fmt(matched[i].imag()), fmt(formula[i].real()),
                              fmt(formula[i].imag()), fmt(err)});
        rows.push_back({{"m", i + 1}, {"E_numeric", pair(matched[i])}, {"E_formula", pair(formula[i])}, {"abs_error", err}});
    }
    table.summary = {{"method", report.method}, {"residual_max", fmt(report.residual_max)}, {"max_abs_error", fmt(worst)}};

    json doc = envelope(config);
    doc["method"] = report.method;
    doc["hermitian"] = report.hermitian;
    doc["residual_max"] = report.residual_max;
    doc["max_abs_error"] = worst;
    doc["rows"] = rows;
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); }, {}};
}

Emit cmd_converge(const Params& p, const RunConfig& config) {
    const auto Ns = parse_size_list(p.Ns);
    for (std::size_t N : Ns) {
        if (N < 2) throw ContractViolation("every N must be at least 2");
        if (p.mode > static_cast<long>(N)) throw ContractViolation("--mode exceeds the smallest N");
    }
    const double target = p.omega * (static_cast<double>(p.mode) + p.delta);
    const auto model = p.model;
    const double omega = p.omega, delta = p.delta;
    const auto report = spectral::convergence_study(
        [=](std::size_t N) { return oscillator_operator(model, lattice::AngularGrid::make(N, omega, delta)); },
        [=](std::size_t) { return std::vector<cplx>{target}; }, Ns);

    json doc = envelope(config);
    doc["Ns"] = report.Ns;
    doc["errors"] = report.errors;
    doc["fit_Ns"] = report.fit_Ns;
    doc["fitted_order"] = std::isfinite(report.fitted_order) ? json(report.fitted_order) : json(nullptr);
    doc["r_squared"] = std::isfinite(report.r_squared) ? json(report.r_squared) : json(nullptr);
    doc["accepted"] = report.accepted;
    doc["diagnosis"] = report.diagnosis;
    doc["reference"] = target;

    Table table;
    table.columns = {"N", "error"};
    for (std::size_t i = 0; i < report.Ns.size(); ++i) table.rows.push_back({fmt(report.Ns[i]), fmt(report.errors[i])});
    table.summary = {{"fitted_order", fmt(report.fitted_order)},
                     {"r_squared", fmt(report.r_squared)},
                     {"accepted", report.accepted ? "true" : "false"},
                     {"diagnosis", report.diagnosis}};
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); },
            [=](std::ostream& os) { write_convergence_svg(os, config, report); }};
}

clock::ClockDistribution clock_of(const Params& p) {
    if (p.clock == "delta") return clock::ClockDistribution::delta();
    if (p.clock == "uniform") return clock::ClockDistribution::uniform(p.width);
    return clock::ClockDistribution::gaussian(p.gamma);
}

Emit cmd_evolve(const Params& p, const RunConfig& config) {
    const auto grid = grid_of(p);
    const auto h = oscillator_operator(p.model, grid);
    const auto clk = clock_of(p);

    // Gaussian packet in phi centred on pi.
    Eigen::VectorXcd packet(static_cast<Index>(p.N));
    for (std::size_t n = 1; n <= p.N; ++n) {
        const double x = grid.site(n) - std::numbers::pi;
        packet[static_cast<Index>(n - 1)] = std::exp(-x * x / (4 * p.sigma * p.sigma));
    }
    const evolution::StateVector psi0 = evolution::StateVector::for_operator(h, packet).normalized();
    const evolution::Propagator exact(h);
    const Eigen::MatrixXcd dense = h.dense();

    Table table;
    table.columns = {"step", "t", "norm", "energy", "residual_vs_exact"};
    json rows = json::array();
    evolution::StateVector psi = psi0;
    double worst = 0.0;
    for (std::size_t step = 0; step <= p.steps; ++step) {
        if (step > 0) psi = evolution::discrete_step(psi, h, clk, p.T, p.nodes).state;
        const double t = p.T * static_cast<double>(step);
        const Eigen::VectorXcd& v = psi.amplitudes();
        const double norm = v.norm();
        const double energy = (v.dot(dense * v) / (norm * norm)).real();
        const double residual = (v - exact.apply(t, psi0.amplitudes())).norm();
        worst = std::max(worst, residual);
        table.rows.push_back({fmt(step), fmt(t), fmt(norm), fmt(energy), fmt(residual)});
        rows.push_back({{"step", step}, {"t", t}, {"norm", norm}, {"energy", energy}, {"residual_vs_exact", residual}});
    }
    table.summary = {{"clock", clk.describe()}, {"max_residual", fmt(worst)}};
    json doc = envelope(config);
    doc["clock"] = clk.describe();
    doc["rows"] = rows;
    doc["max_residual"] = worst;
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); }, {}};
}

Emit cmd_su2_check(const Params& p, const RunConfig& config) {
    const int two_s = two_s_of(p.s);
    const auto rep = su2::spin_matrices(two_s);
    const auto coeffs = su2::OscCoefficients::canonical(two_s, p.omega);
    const auto res = su2::verify_identities(rep, coeffs);

    const auto values = spectral::eig(su2::oscillator_hamiltonian(rep, coeffs)).eigenvalues;
    auto formula = su2::oscillator_spectrum(two_s, p.omega);
    std::sort(formula.begin(), formula.end());
    double spectrum_dev = 0.0;
    for (std::size_t i = 0; i < formula.size(); ++i) spectrum_dev = std::max(spectrum_dev, std::abs(values[i] - formula[i]));

    json emergent_min = nullptr, bad_min = nullptr;
    const Index d = rep.dim();
    if (d * d * d <= su2::kMaxTensorDim) {
        auto min_diag = [](const OperatorMatrix& op) {
            const Eigen::VectorXcd diag = op.sparse().diagonal();
            return diag.real().minCoeff();
        };
        emergent_min = min_diag(su2::emergent_hamiltonian(rep, p.omega)) / p.omega;
        bad_min = min_diag(su2::bad_phase_hamiltonian(rep, p.omega)) / p.omega;
    }

    const std::vector<std::pair<std::string, double>> entries{
        {"ladder", res.ladder},       {"casimir", res.casimir}, {"hsq", res.hsq},
        {"commutator", res.commutator}, {"sumsqu", res.sumsqu}, {"hsq1", res.hsq1}};
    const bool pass = res.max() <= kIdentityTolerance && spectrum_dev <= kIdentityTolerance;

    json doc = envelope(config);
    json residuals = json::object();
    for (const auto& [k, v] : entries) residuals[k] = v;
    doc["residuals"] = residuals;
    doc["max_residual"] = res.max();
    doc["oscillator_spectrum_deviation"] = spectrum_dev;
    doc["emergent_min_over_omega"] = emergent_min;
    doc["bad_phase_min_over_omega"] = bad_min;
    doc["tolerance"] = kIdentityTolerance;
    doc["pass"] = pass;

    Table table;
    table.columns = {"quantity", "value"};
    for (const auto& [k, v] : entries) table.rows.push_back({k, fmt(v)});
    table.rows.push_back({"oscillator_spectrum_deviation", fmt(spectrum_dev)});
    if (!emergent_min.is_null()) {
        table.rows.push_back({"emergent_min_over_omega", fmt(emergent_min.get<double>())});
        table.rows.push_back({"bad_phase_min_over_omega", fmt(bad_min.get<double>())});
    }
    table.summary = {{"pass", pass ? "true" : "false"}};
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); }, {}};
}

Emit cmd_particle(const Params& p, const RunConfig& config) {
    const int two_s = two_s_of(p.s);
    const auto lat = lattice::positive_phase_lattice(two_s, p.box, p.mass);
    auto modes = lattice::free_particle_spectrum(lat);
    if (!p.all_modes) modes = lattice::onshell_select(lat, modes);
    const double prefactor = su2::emergent_prefactor(p.mass, p.box);

    Table table;
    table.columns = {"k0", "k1", "kbar0", "kbar1", "minkowski_symbol", "continuum_energy", "lattice_energy_re",
                     "lattice_energy_im"};
    if (!p.all_modes) {
        table.columns.insert(table.columns.begin() + 4, {"two_sbar_z", "two_sz0", "two_sz1"});
    }
    json rows = json::array();
    for (const auto& m : modes) {
        std::vector<std::string> row{fmt(static_cast<double>(m.k_x[0])), fmt(static_cast<double>(m.k_x[1])),
                                     fmt(static_cast<double>(m.k_xbar[0])), fmt(static_cast<double>(m.k_xbar[1]))};
        json entry{{"k", m.k_x}, {"kbar", m.k_xbar}, {"minkowski_symbol", m.minkowski_symbol},
                   {"continuum_energy", m.continuum_energy}, {"lattice_energy", pair(m.lattice_energy)}};
        if (!p.all_modes) {
            const auto labels = lattice::spin_labels(m, two_s);
            for (int v : {labels.two_sbar_z, labels.two_sz0, labels.two_sz1}) row.push_back(std::to_string(v));
            entry["two_spin_labels"] = {labels.two_sbar_z, labels.two_sz0, labels.two_sz1};
        }
        for (const auto& v : {fmt(m.minkowski_symbol), fmt(m.continuum_energy), fmt(m.lattice_energy.real()),
                              fmt(m.lattice_energy.imag())}) {
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
        rows.push_back(std::move(entry));
    }
    table.summary = {{"modes", fmt(modes.size())}, {"emergent_prefactor", fmt(prefactor)}};
    json doc = envelope(config);
    doc["emergent_prefactor"] = prefactor;
    doc["modes"] = rows;
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); }, {}};
}

Emit cmd_report(const Params& p, const RunConfig& config) {
    const auto grid = grid_of(p);
    json doc = envelope(config);
    std::vector<std::pair<std::string, std::string>> flat;

    auto spectrum_error = [&](bool case_a) {
        const auto op = case_a ? lattice::build_case_a(grid) : lattice::build_case_b(grid);
        const auto numeric = spectral::eig(op, spectral::EigMethod::Dense).eigenvalues;
        std::vector<cplx> formula;
        if (case_a) {
            formula = lattice::case_a_spectrum(grid);
        } else {
            for (double e : lattice::case_b_spectrum(grid)) formula.emplace_back(e);
        }
        const auto matched = lattice::match_to_labels(numeric, formula);
        double worst = 0.0;
        for (std::size_t i = 0; i < formula.size(); ++i) worst = std::max(worst, std::abs(matched[i] - formula[i]));
        return worst;
    };
    const double err_a = spectrum_error(true), err_b = spectrum_error(false);
    doc["spectrum"] = {{"case_a_max_error", err_a}, {"case_b_max_error", err_b}};
    flat.push_back({"spectrum.case_a_max_error", fmt(err_a)});
    flat.push_back({"spectrum.case_b_max_error", fmt(err_b)});

    const auto Ns = parse_size_list(p.Ns);
    const double target = p.omega * (1.0 + p.delta);
    for (const std::string model : {"osc-a", "osc-b"}) {
        const auto rep = spectral::convergence_study(
            [&](std::size_t N) { return oscillator_operator(model, lattice::AngularGrid::make(N, p.omega, p.delta)); },
            [&](std::size_t) { return std::vector<cplx>{target}; }, Ns);
        doc["converge"][model] = {{"fitted_order", std::isfinite(rep.fitted_order) ? json(rep.fitted_order) : json(nullptr)},
                                  {"accepted", rep.accepted}};
        flat.push_back({"converge." + model + ".fitted_order", fmt(rep.fitted_order)});
    }

    const int two_s = two_s_of(p.s);
    const auto res = su2::verify_identities(su2::spin_matrices(two_s), su2::OscCoefficients::canonical(two_s, p.omega));
    doc["su2"] = {{"max_identity_residual", res.max()}};
    flat.push_back({"su2.max_identity_residual", fmt(res.max())});

    const auto hb = lattice::build_case_b(grid);
    const double compose = evolution::compose_check(hb, 0.3, 1.1);
    const double defect = evolution::unitarity_defect(evolution::evolution_matrix(hb, 0.7).dense());
    doc["evolution"] = {{"compose_residual", compose}, {"unitarity_defect", defect}};
    flat.push_back({"evolution.compose_residual", fmt(compose)});
    flat.push_back({"evolution.unitarity_defect", fmt(defect)});

    Table table;
    table.columns = {"quantity", "value"};
    for (const auto& [k, v] : flat) table.rows.push_back({k, v});
    return {[=](std::ostream& os) { write_csv(os, config, table); }, [=](std::ostream& os) { write_json(os, doc); }, {}};
}

// ---- option registration ------------------------------------------------

const std::vector<std::string> kModels{"osc-a", "osc-b"};

void add_grid_options(CLI::App* sub, Params& p) {
    sub->add_option("--model", p.model, "oscillator discretization")->check(CLI::IsMember(kModels))->capture_default_str();
    sub->add_option("--N", p.N, "grid sites")->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))->capture_default_str();
    sub->add_option("--omega", p.omega, "oscillator frequency")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--delta", p.delta, "twist phase")->capture_default_str();
}

void add_output_options(CLI::App* sub, Params& p, std::vector<std::string> formats) {
    sub->add_option("--format", p.format, "output format")->check(CLI::IsMember(std::move(formats)));
    sub->add_option("--out", p.out, "output file (default: standard output)");
}

std::map<std::string, std::string> collect(const CLI::App* sub) {
    std::map<std::string, std::string> params;
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name == "help" || name == "config" || name == "format" || name == "out") continue;
        if (opt->get_type_size() == 0) {
            params[name] = opt->count() > 0 ? "true" : "false";
        } else {
            params[name] = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
        }
    }
    return params;
}

std::string normalize_number(const std::string& key, const std::string& text) {
    static const std::vector<std::string> reals{"omega", "delta", "s", "gamma", "width", "T", "sigma", "L", "mass"};
    if (std::find(reals.begin(), reals.end(), key) == reals.end()) return text;
    try {
        return fmt(std::stod(text));
    } catch (const std::exception&) {
        return text;
    }
}

}  // namespace

std::vector<std::size_t> parse_size_list(const std::string& text) {
    std::vector<std::string> tokens;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        tokens.push_back(token);
    }
    auto number = [](const std::string& t) {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
            throw ContractViolation("size list entry '" + t + "' is not a nonnegative integer");
        }
        return static_cast<std::size_t>(std::stoull(t));
    };
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] != "...") {
            out.push_back(number(tokens[i]));
            continue;
        }
        if (out.size() < 2 || i + 1 >= tokens.size()) {
            throw ContractViolation("'...' needs two leading entries and a final entry");
        }
        const std::size_t a = out[out.size() - 2], b = out.back(), last = number(tokens[i + 1]);
        if (b <= a) throw ContractViolation("'...' needs an increasing progression");
        // geometric when the ratio is an integer that lands on the final entry, else arithmetic
        auto fill = [&](bool geometric) {
            std::vector<std::size_t> run;
            std::size_t next = geometric ? b * (b / a) : b + (b - a);
            while (next < last) {
                run.push_back(next);
                next = geometric ? next * (b / a) : next + (b - a);
            }
            return next == last ? std::optional(run) : std::nullopt;
        };
        std::optional<std::vector<std::size_t>> run;
        if (a > 0 && b % a == 0) run = fill(true);
        if (!run) run = fill(false);
        if (!run) throw ContractViolation("'...' progression does not reach " + tokens[i + 1]);
        out.insert(out.end(), run->begin(), run->end());
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i] <= out[i - 1]) throw ContractViolation("size list must be strictly increasing");
    }
    if (out.empty()) throw ContractViolation("empty size list");
    return out;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stroboscopic quantization toolkit: spectra, convergence, evolution and SU(2) checks"};
    app.set_config("--config", "", "TOML or INI file with one [command] section; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);

    Params p;
    auto* spectrum = app.add_subcommand("spectrum", "numerical vs closed-form oscillator spectrum");
    add_grid_options(spectrum, p);
    spectrum->add_option("--solver", p.solver, "eigensolver")
        ->check(CLI::IsMember({"dense", "circulant", "auto"}))
        ->capture_default_str();
    add_output_options(spectrum, p, {"csv", "json"});

    auto* converge = app.add_subcommand("converge", "continuum convergence order of one oscillator mode");
    converge->add_option("--model", p.model, "oscillator discretization")->check(CLI::IsMember(kModels))->capture_default_str();
    converge->add_option("--omega", p.omega, "oscillator frequency")->check(CLI::PositiveNumber)->capture_default_str();
    converge->add_option("--delta", p.delta, "twist phase")->capture_default_str();
    converge->add_option("--mode", p.mode, "tracked label m")->check(CLI::PositiveNumber)->capture_default_str();
    converge->add_option("--Ns", p.Ns, "grid sizes, e.g. 64,128,...,4096")->capture_default_str();
    add_output_options(converge, p, {"csv", "json", "svg"});

    auto* evolve = app.add_subcommand("evolve", "discrete-time steps with clock averaging");
    add_grid_options(evolve, p);
    evolve->add_option("--clock", p.clock, "clock distribution")
        ->check(CLI::IsMember({"delta", "gaussian", "uniform"}))
        ->capture_default_str();
    evolve->add_option("--gamma", p.gamma, "gaussian clock sharpness")->check(CLI::PositiveNumber)->capture_default_str();
    evolve->add_option("--width", p.width, "uniform clock width")->check(CLI::PositiveNumber)->capture_default_str();
    evolve->add_option("--T", p.T, "clock period")->check(CLI::PositiveNumber)->capture_default_str();
    evolve->add_option("--steps", p.steps, "number of steps")->check(CLI::Range(std::size_t{1}, std::size_t{100000}))->capture_default_str();
    evolve->add_option("--nodes", p.nodes, "quadrature nodes")->check(CLI::Range(std::size_t{1}, std::size_t{4096}))->capture_default_str();
    evolve->add_option("--sigma", p.sigma, "initial packet width in phi")->check(CLI::PositiveNumber)->capture_default_str();
    add_output_options(evolve, p, {"csv", "json"});

    auto* su2check = app.add_subcommand("su2-check", "exact finite-s operator identities");
    su2check->add_option("--s", p.s, "spin (integer or half-integer)")->check(CLI::PositiveNumber)->capture_default_str();
    su2check->add_option("--omega", p.omega, "oscillator frequency")->check(CLI::PositiveNumber)->capture_default_str();
    add_output_options(su2check, p, {"csv", "json"});

    auto* particle = app.add_subcommand("particle", "free-particle lattice modes with the positive phase choice");
    particle->add_option("--s", p.s, "spin; N = 2s+1")->check(CLI::PositiveNumber)->capture_default_str();
    particle->add_option("--L", p.box, "box length")->check(CLI::PositiveNumber)->capture_default_str();
    particle->add_option("--mass", p.mass, "particle mass")->check(CLI::PositiveNumber)->capture_default_str();
    particle->add_flag("--all", p.all_modes, "list every mode, not only the on-shell ones");
    add_output_options(particle, p, {"csv", "json"});

    auto* report = app.add_subcommand("report", "summary of the main checks");
    add_grid_options(report, p);
    report->add_option("--s", p.s, "spin for the identity check")->check(CLI::PositiveNumber)->capture_default_str();
    report->add_option("--Ns", p.Ns, "grid sizes for the convergence fits")->capture_default_str();
    add_output_options(report, p, {"csv", "json"});

    for (CLI::App* sub : app.get_subcommands({})) sub->allow_config_extras(CLI::config_extras_mode::error);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    RunConfig config;
    config.command = chosen->get_name();
    for (const auto& [key, value] : collect(chosen)) config.parameters[key] = normalize_number(key, value);
    const std::map<std::string, std::string> defaults{{"spectrum", "csv"},  {"converge", "json"}, {"evolve", "csv"},
                                                      {"su2-check", "json"}, {"particle", "csv"},  {"report", "json"}};
    config.format = p.format.empty() ? defaults.at(config.command) : p.format;
    config.out = p.out;

    try {
        Emit emit;
        if (config.command == "spectrum") emit = cmd_spectrum(p, config);
        else if (config.command == "converge") emit = cmd_converge(p, config);
        else if (config.command == "evolve") emit = cmd_evolve(p, config);
        else if (config.command == "su2-check") emit = cmd_su2_check(p, config);
        else if (config.command == "particle") emit = cmd_particle(p, config);
        else emit = cmd_report(p, config);

        const auto& writer = config.format == "json" ? emit.json_out : config.format == "svg" ? emit.svg : emit.csv;
        if (!writer) throw ContractViolation("format '" + config.format + "' is not available for " + config.command);
        if (config.out.empty()) {
            writer(out);
        } else {
            std::ofstream file(config.out, std::ios::binary);
            if (!file) {
                err << "error: cannot open " << config.out << " for writing\n";
                return 1;
            }
            writer(file);
            if (!file) {
                err << "error: write to " << config.out << " failed\n";
                return 1;
            }
        }
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const DivergenceError& e) {
        err << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace strobo::cli
