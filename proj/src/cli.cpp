#include "nplace/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "nplace/errors.hpp"
#include "nplace/history_expr.hpp"
#include "nplace/io.hpp"
#include "nplace/neutral_sim.hpp"
#include "nplace/placement.hpp"
#include "nplace/spectrum.hpp"

namespace nplace {

namespace {

constexpr double pi = std::numbers::pi;

struct DesignRequest {
    double nu = 0.0;
    double mu = 0.0;
    std::vector<double> roots;
    ControllerKind kind = ControllerKind::PD;
    double epsilon = 0.1;
    std::optional<double> im_limit;
    double horizon = 6.0;
    std::optional<double> step;
    std::string history = "1+sin(t)";
    bool simulate = true;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
};

/// Flags shared by several subcommands; NaN means "not given".
struct CommonFlags {
    std::vector<double> window;
    double horizon = std::numeric_limits<double>::quiet_NaN();
    double step = std::numeric_limits<double>::quiet_NaN();
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    std::string out;
    std::string plot;
};

bool given(double x) { return !std::isnan(x); }

const Json& field(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw InvalidArgument("field '" + path + "': missing");
    return obj.at(key);
}

double number_at(const Json& v, const std::string& path) {
    if (!v.is_number()) throw InvalidArgument("field '" + path + "': expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidArgument("field '" + path + "': expected a finite number");
    return x;
}

Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument(source + ": malformed document: " + e.what());
    }
}

/// Accepts either a request document or a report that echoes one.
DesignRequest parse_request(const Json& doc_in) {
    const Json& doc = (doc_in.is_object() && doc_in.contains("request")) ? doc_in.at("request") : doc_in;
    if (!doc.is_object()) throw InvalidArgument("request: expected an object at the top level");
    DesignRequest r;
    const Json& plant = field(doc, "plant", "plant");
    r.nu = number_at(field(plant, "nu", "plant.nu"), "plant.nu");
    r.mu = number_at(field(plant, "mu", "plant.mu"), "plant.mu");
    const Json& roots = field(doc, "roots", "roots");
    if (!roots.is_array()) throw InvalidArgument("field 'roots': expected an array of 2 or 3 numbers");
    for (std::size_t i = 0; i < roots.size(); ++i) {
        r.roots.push_back(number_at(roots[i], "roots[" + std::to_string(i) + "]"));
    }
    if (r.roots.size() != 2 && r.roots.size() != 3) {
        throw InvalidArgument("field 'roots': expected 2 (P) or 3 (PD) numbers, got " + std::to_string(r.roots.size()));
    }
    r.kind = r.roots.size() == 3 ? ControllerKind::PD : ControllerKind::P;
    if (doc.contains("controller")) {
        const Json& c = doc.at("controller");
        if (!c.is_string() || (c != "P" && c != "PD")) throw InvalidArgument("field 'controller': expected \"P\" or \"PD\"");
        r.kind = c == "P" ? ControllerKind::P : ControllerKind::PD;
    }
    if (r.kind == ControllerKind::PD && r.roots.size() != 3) {
        throw InvalidArgument("field 'roots': a PD design assigns exactly 3 roots");
    }
    if (r.kind == ControllerKind::P && r.roots.size() != 2) {
        throw InvalidArgument("field 'roots': a P design assigns exactly 2 roots");
    }
    if (doc.contains("options")) {
        const Json& o = doc.at("options");
        if (!o.is_object()) throw InvalidArgument("field 'options': expected an object");
        if (o.contains("epsilon")) r.epsilon = number_at(o.at("epsilon"), "options.epsilon");
        if (o.contains("im_limit") && !o.at("im_limit").is_null()) {
            r.im_limit = number_at(o.at("im_limit"), "options.im_limit");
        }
        if (o.contains("horizon")) r.horizon = number_at(o.at("horizon"), "options.horizon");
        if (o.contains("step") && !o.at("step").is_null()) r.step = number_at(o.at("step"), "options.step");
        if (o.contains("history")) {
            if (!o.at("history").is_string()) throw InvalidArgument("field 'options.history': expected a string");
            r.history = o.at("history").get<std::string>();
        }
        if (o.contains("simulate")) {
            if (!o.at("simulate").is_boolean()) throw InvalidArgument("field 'options.simulate': expected a boolean");
            r.simulate = o.at("simulate").get<bool>();
        }
        if (o.contains("nonlinearity")) {
            const Json& n = o.at("nonlinearity");
            if (n == "tanh") {
                r.nonlinearity = Nonlinearity::tanh;
            } else if (n == "linearized") {
                r.nonlinearity = Nonlinearity::linearized;
            } else {
                throw InvalidArgument("field 'options.nonlinearity': expected \"tanh\" or \"linearized\"");
            }
        }
    }
    if (!(r.epsilon > 0.0)) throw InvalidArgument("field 'options.epsilon': must be positive");
    if (!(r.horizon > 0.0)) throw InvalidArgument("field 'options.horizon': must be positive");
    return r;
}

DesignRequest load_request(const std::string& path) {
    return parse_request(parse_json_text(read_file(path), path));
}

ControllerDesign make_design(const DesignRequest& r) {
    if (r.kind == ControllerKind::PD) return design_pd(r.nu, r.mu, RootTriple{r.roots[0], r.roots[1], r.roots[2]});
    return design_p(r.nu, r.mu, RootPair{r.roots[0], r.roots[1]});
}

Json echo(const DesignRequest& r) {
    Json roots = Json::array();
    for (double x : r.roots) roots.push_back(x);
    Json options{{"epsilon", r.epsilon},
                 {"im_limit", r.im_limit ? Json(*r.im_limit) : Json(nullptr)},
                 {"horizon", r.horizon},
                 {"step", r.step ? Json(*r.step) : Json(nullptr)},
                 {"history", r.history},
                 {"simulate", r.simulate},
                 {"nonlinearity", r.nonlinearity == Nonlinearity::tanh ? "tanh" : "linearized"}};
    return Json{{"plant", {{"nu", r.nu}, {"mu", r.mu}}},
                {"roots", roots},
                {"controller", to_string(r.kind)},
                {"options", options}};
}

History history_from_expr(const std::string& text, double tau) {
    const HistoryExpr e = HistoryExpr::parse(text);
    return History::from_function([&](double t) { return e.value(t); }, tau,
                                  std::function<double(double)>([&](double t) { return e.derivative(t); }));
}

struct SimSummary {
    Trajectory traj;
    Json json;
};

SimSummary simulate_design(const ControllerDesign& d, Nonlinearity nl, const std::string& history, double horizon,
                           double step) {
    const History y0 = history_from_expr(history, d.tau);
    PlantSpec plant{d.nu, d.mu, nl};
    SimSummary s;
    s.traj = integrate_hopfield(plant, d, y0, horizon, step);
    const double f0 = horizon / 6.0, f1w = 2.0 * horizon / 3.0;
    double max_abs = 0.0;
    for (double v : s.traj.values) max_abs = std::max(max_abs, std::abs(v));
    s.json = Json{{"history", history},
                  {"nonlinearity", nl == Nonlinearity::tanh ? "tanh" : "linearized"},
                  {"horizon", horizon},
                  {"step", s.traj.step},
                  {"samples", s.traj.times.size()},
                  {"history_sup_norm", y0.sup_norm()},
                  {"fit_window", Json::array({f0, f1w})},
                  {"terminal_value", s.traj.values.back()},
                  {"max_abs", max_abs}};
    try {
        s.json["fitted_rate"] = estimate_decay_rate(s.traj, f0, f1w);
    } catch (const FitError& e) {
        s.json["fitted_rate"] = nullptr;
        s.json["fit_error"] = e.what();
    }
    return s;
}

Rectangle design_window(double s1, double tau) {
    return Rectangle{s1 - std::max(10.0, 10.0 / tau), s1 + 1.0, -6.0 * pi / tau, 6.0 * pi / tau};
}

Rectangle window_from_flags(const CommonFlags& f, const Rectangle& fallback) {
    if (f.window.empty()) return fallback;
    if (f.window.size() != 4) throw InvalidArgument("--window expects re0,re1,im0,im1");
    Rectangle r{f.window[0], f.window[1], f.window[2], f.window[3]};
    validate(r);
    return r;
}

void emit(const std::string& content, const CommonFlags& f, std::ostream& out) {
    if (f.out.empty()) {
        out << content;
    } else {
        write_atomic(f.out, content);
    }
}

std::string spectrum_svg(const SpectrumReport& rep, const std::string& title) {
    SvgSeries pts;
    for (Complex z : rep.roots) pts.points.emplace_back(z.real(), z.imag());
    std::vector<double> vlines;
    if (std::isfinite(rep.chain_abscissa)) vlines.push_back(rep.chain_abscissa);
    return svg_plot(title, "Re(s)", "Im(s)", {pts}, vlines);
}

std::string trajectory_svg(const Trajectory& tr, const std::string& title) {
    SvgSeries line;
    line.line = true;
    for (std::size_t i = 0; i < tr.times.size(); ++i) line.points.emplace_back(tr.times[i], tr.values[i]);
    return svg_plot(title, "t", "y(t)", {line});
}

// ---------------------------------------------------------------- design

int cmd_design(const std::string& request_path, const CommonFlags& flags, std::ostream& out) {
    DesignRequest req = load_request(request_path);
    if (given(flags.epsilon)) req.epsilon = flags.epsilon;
    if (given(flags.horizon)) req.horizon = flags.horizon;
    if (given(flags.step)) req.step = flags.step;
    if (!(req.epsilon > 0.0)) throw InvalidArgument("--epsilon must be positive");
    if (!(req.horizon > 0.0)) throw InvalidArgument("--horizon must be positive");

    ControllerDesign d = make_design(req);
    if (!req.im_limit) req.im_limit = default_im_limit(d.tau);
    if (!req.step) req.step = d.tau / 64.0;
    attach_certificate(d, *req.im_limit);

    Json report;
    report["tool"] = {{"name", tool_name}, {"version", tool_version}};
    report["command"] = "design";
    report["request"] = echo(req);
    report["design"] = to_json(d);
    report["quasipolynomial"] = to_json(d.quasipoly());
    if (d.kind == ControllerKind::PD || !std::get<RootPair>(d.assigned_roots).coincident()) {
        report["fvl_V"] = fvl_V(d.quasipoly(), d.s1());
    }

    const Rectangle window = window_from_flags(flags, design_window(d.s1(), d.tau));
    const SpectrumReport spec = find_roots(d.quasipoly(), window);
    report["spectrum"] = to_json(spec);
    if (d.kind == ControllerKind::PD) {
        report["remaining_spectrum"] = to_json(remaining_spectrum_three(std::get<RootTriple>(d.assigned_roots), d.tau, 3));
    }
    try {
        report["estimate"] = to_json(exp_estimate(d.quasipoly(), d.assigned_roots, req.epsilon));
    } catch (const InvalidArgument& e) {
        report["estimate"] = {{"error", e.what()}};
    }
    if (req.simulate) {
        report["simulation"] = simulate_design(d, req.nonlinearity, req.history, req.horizon, *req.step).json;
    }
    if (!flags.plot.empty()) write_atomic(flags.plot, spectrum_svg(spec, "Spectrum of the closed loop"));
    emit(report.dump(2) + "\n", flags, out);
    return d.certificate->verdict == Verdict::refuted ? exit_refuted : exit_ok;
}

// ---------------------------------------------------------------- spectrum

NeutralQuasiPoly quasipoly_from_design_file(const std::string& path) {
    const Json doc = parse_json_text(read_file(path), path);
    if (doc.is_object() && doc.contains("quasipolynomial")) {
        const Json& q = doc.at("quasipolynomial");
        NeutralQuasiPoly qp{number_at(field(q, "a", "quasipolynomial.a"), "quasipolynomial.a"),
                            number_at(field(q, "alpha", "quasipolynomial.alpha"), "quasipolynomial.alpha"),
                            number_at(field(q, "beta", "quasipolynomial.beta"), "quasipolynomial.beta"),
                            number_at(field(q, "tau", "quasipolynomial.tau"), "quasipolynomial.tau")};
        validate(qp);
        return qp;
    }
    return make_design(parse_request(doc)).quasipoly();
}

NeutralQuasiPoly quasipoly_from_coeffs(const std::vector<double>& c) {
    if (c.size() != 4) throw InvalidArgument("--coeffs expects a,alpha,beta,tau");
    NeutralQuasiPoly qp{c[0], c[1], c[2], c[3]};
    validate(qp);
    return qp;
}

int cmd_spectrum(const std::vector<double>& coeffs, const std::string& design_path, const CommonFlags& flags,
                 std::ostream& out) {
    if (coeffs.empty() == design_path.empty()) throw InvalidArgument("spectrum: give exactly one of --coeffs or --design");
    const NeutralQuasiPoly qp = coeffs.empty() ? quasipoly_from_design_file(design_path) : quasipoly_from_coeffs(coeffs);
    const Rectangle window =
        window_from_flags(flags, Rectangle{-20.0, 5.0, -10.0 * pi / qp.tau, 10.0 * pi / qp.tau});
    const SpectrumReport rep = find_roots(qp, window);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rep.roots.size(); ++i) rows.push_back({rep.roots[i].real(), rep.roots[i].imag(), rep.residuals[i]});
    std::string table = csv_table({"re", "im", "residual"}, rows);
    table += "# chain_abscissa=" + format_double(rep.chain_abscissa) +
             " count=" + std::to_string(rep.count_by_argument_principle) + "\n";
    if (!flags.plot.empty()) write_atomic(flags.plot, spectrum_svg(rep, "Quasipolynomial roots"));
    emit(table, flags, out);
    return exit_ok;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& design_path, double nu, double mu, double tau, const std::string& history,
                 bool linearized, const CommonFlags& flags, std::ostream& out) {
    ControllerDesign d;
    if (!design_path.empty()) {
        d = make_design(load_request(design_path));
    } else {
        if (!given(nu) || !given(mu)) throw InvalidArgument("simulate: give --design or the open-loop plant --nu and --mu");
        d = design_uncontrolled(nu, mu, given(tau) ? tau : 1.0);
    }
    const double horizon = given(flags.horizon) ? flags.horizon : 6.0;
    const double step = given(flags.step) ? flags.step : d.tau / 64.0;
    if (!(horizon > 0.0)) throw InvalidArgument("--horizon must be positive");
    const SimSummary s =
        simulate_design(d, linearized ? Nonlinearity::linearized : Nonlinearity::tanh, history, horizon, step);

    std::string csv = trajectory_csv(s.traj);
    csv += "# fitted_decay_rate=" +
           (s.json["fitted_rate"].is_null() ? std::string("nan") : format_double(s.json["fitted_rate"].get<double>())) +
           " fit_window=" + format_double(horizon / 6.0) + ":" + format_double(2.0 * horizon / 3.0) +
           " terminal_value=" + format_double(s.traj.values.back()) + "\n";
    if (!flags.plot.empty()) write_atomic(flags.plot, trajectory_svg(s.traj, "Closed-loop trajectory"));
    if (flags.out.empty()) {
        out << csv;
    } else {
        write_atomic(flags.out, csv);
        out << s.json.dump(2) << "\n";
    }
    return exit_ok;
}

// ---------------------------------------------------------------- compare

int cmd_compare(double nu, double mu, const std::vector<double>& triple, const std::vector<double>& pair,
                const std::string& history, const CommonFlags& flags, std::ostream& out) {
    if (triple.size() != 3) throw InvalidArgument("--triple expects s1,s2,s3");
    if (pair.size() != 2) throw InvalidArgument("--pair expects s1,s2");
    if (triple[0] != pair[0]) throw InvalidArgument("compare: the triple and the pair must share s1");
    const RootTriple t{triple[0], triple[1], triple[2]};
    const RootPair p{pair[0], pair[1]};
    const ControllerDesign pd = design_pd(nu, mu, t);
    const ControllerDesign pc = design_p(nu, mu, p);
    const double horizon = given(flags.horizon) ? flags.horizon : 6.0;

    const double tau_star_pd = tau_star_three(t);
    const double tau_star_p = p.coincident() ? -1.0 / p.s1 : tau_star_pair(p);
    const double gmax = std::max(std::abs(pd.kp), std::abs(pd.kd));
    const double gsum = std::abs(pd.kp) + std::abs(pd.kd);
    const double gl2 = std::hypot(pd.kp, pd.kd);

    auto sim = [&](const ControllerDesign& d) {
        const double step = given(flags.step) ? std::min(flags.step, d.tau / 16.0) : d.tau / 64.0;
        return simulate_design(d, Nonlinearity::tanh, history, horizon, step).json;
    };

    Json report;
    report["tool"] = {{"name", tool_name}, {"version", tool_version}};
    report["command"] = "compare";
    report["request"] = {{"plant", {{"nu", nu}, {"mu", mu}}},
                         {"triple", Json::array({t.s1, t.s2, t.s3})},
                         {"pair", Json::array({p.s1, p.s2})},
                         {"history", history},
                         {"horizon", horizon}};
    report["pd"] = to_json(pd);
    report["p"] = to_json(pc);
    report["tau_star"] = {{"pd", tau_star_pd}, {"p", tau_star_p}};
    report["gain_norms"] = {{"pd", {{"max", gmax}, {"sum", gsum}, {"euclidean", gl2}}}, {"p", std::abs(pc.kp)}};
    report["simulation"] = {{"pd", sim(pd)}, {"p", sim(pc)}};
    report["inequalities"] = {{"tau_pd_gt_tau_p", pd.tau > pc.tau},
                              {"tau_star_pd_gt_tau_star_p", tau_star_pd > tau_star_p},
                              {"kp_prime_gt_max_gain", std::abs(pc.kp) > gmax},
                              {"kp_prime_gt_gain_sum", std::abs(pc.kp) > gsum},
                              {"kp_prime_gt_euclidean_gain", std::abs(pc.kp) > gl2}};
    if (p.coincident()) report["p_note"] = "non-semi-simple: sensitive to perturbation";
    emit(report.dump(2) + "\n", flags, out);
    return exit_ok;
}

// ---------------------------------------------------------------- tau-star

int cmd_tau_star(const std::vector<double>& roots, const CommonFlags& flags, std::ostream& out) {
    Json j;
    if (roots.size() == 3) {
        const RootTriple t{roots[0], roots[1], roots[2]};
        j["tau_star"] = tau_star_three(t);
        j["method"] = t.equidistributed() ? "closed_form" : "bisection";
    } else if (roots.size() == 2) {
        if (roots[0] == roots[1]) {
            if (!(roots[0] < 0.0)) throw InvalidArgument("no stabilizing tau* exists: s1 must be negative");
            j["tau_star"] = -1.0 / roots[0];
        } else {
            j["tau_star"] = tau_star_pair(RootPair{roots[0], roots[1]});
        }
        j["method"] = "closed_form";
    } else {
        throw InvalidArgument("--roots expects 2 or 3 values");
    }
    emit(j.dump(2) + "\n", flags, out);
    return exit_ok;
}

// ---------------------------------------------------------------- regions

std::vector<double> linspace(const std::vector<double>& spec, const std::string& name) {
    if (spec.size() != 3) throw InvalidArgument(name + " expects start,stop,count");
    const int n = static_cast<int>(spec[2]);
    if (n < 1 || static_cast<double>(n) != spec[2]) throw InvalidArgument(name + ": count must be a positive integer");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? spec[0] : spec[0] + (spec[1] - spec[0]) * i / (n - 1);
    return v;
}

struct RegionsArgs {
    std::vector<double> pair;
    double a = std::numeric_limits<double>::quiet_NaN();
    double tau = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> phi_table;
    std::string grid;
    std::vector<double> u_range;
    std::vector<double> v_range;
    double A = std::numeric_limits<double>::quiet_NaN();
    double witness_u = std::numeric_limits<double>::quiet_NaN();
};

int cmd_regions(const RegionsArgs& ra, const CommonFlags& flags, std::ostream& out) {
    const int modes = (!ra.pair.empty()) + (!ra.phi_table.empty()) + (!ra.grid.empty()) + given(ra.witness_u);
    if (modes != 1) throw InvalidArgument("regions: choose exactly one of --pair, --phi-table, --grid, --witness");
    if (!ra.pair.empty()) {
        if (ra.pair.size() != 2 || !given(ra.a) || !given(ra.tau)) {
            throw InvalidArgument("regions --pair s1,s2 needs --a and --tau");
        }
        const RegionLabel l = classify_two_root(RootPair{ra.pair[0], ra.pair[1]}, ra.a, ra.tau);
        emit(to_json(l).dump(2) + "\n", flags, out);
        return exit_ok;
    }
    if (!ra.phi_table.empty()) {
        std::vector<std::vector<double>> rows;
        for (double x : linspace(ra.phi_table, "--phi-table")) {
            const PhiBoundaries p = phi_boundaries(x);
            rows.push_back({x, p.phi1, p.phi2, p.phi3});
        }
        emit(csv_table({"x", "phi1", "phi2", "phi3"}, rows), flags, out);
        return exit_ok;
    }
    if (!ra.grid.empty()) {
        if (ra.grid != "W" && ra.grid != "Z") throw InvalidArgument("--grid expects W or Z");
        if (ra.grid == "Z" && !given(ra.A)) throw InvalidArgument("--grid Z needs --A");
        const auto us = linspace(ra.u_range, "--u-range");
        const auto vs = linspace(ra.v_range, "--v-range");
        std::vector<std::vector<double>> rows;
        for (double u : us) {
            for (double v : vs) {
                rows.push_back({u, v, ra.grid == "W" ? gcrrid_W(u, v) : icrrid_Z(ra.A, u, v)});
            }
        }
        emit(csv_table({"u", "v", ra.grid}, rows), flags, out);
        return exit_ok;
    }
    Json j = to_json(icrrid_witness_box(ra.witness_u));
    j["u"] = ra.witness_u;
    emit(j.dump(2) + "\n", flags, out);
    return exit_ok;
}

// ---------------------------------------------------------------- estimate-k

int cmd_estimate_k(const std::string& design_path, const std::vector<double>& coeffs, const std::vector<double>& roots,
                   const CommonFlags& flags, std::ostream& out) {
    const double eps = given(flags.epsilon) ? flags.epsilon : 0.1;
    NeutralQuasiPoly qp;
    AssignedRoots assigned;
    if (!design_path.empty()) {
        const ControllerDesign d = make_design(load_request(design_path));
        qp = d.quasipoly();
        assigned = d.assigned_roots;
    } else {
        qp = quasipoly_from_coeffs(coeffs);
        if (roots.size() == 3) {
            assigned = RootTriple{roots[0], roots[1], roots[2]};
        } else if (roots.size() == 2) {
            assigned = RootPair{roots[0], roots[1]};
        } else {
            throw InvalidArgument("estimate-k --coeffs needs --roots with 2 or 3 values");
        }
    }
    Json j = to_json(exp_estimate(qp, assigned, eps));
    j["quasipolynomial"] = to_json(qp);
    emit(j.dump(2) + "\n", flags, out);
    return exit_ok;
}

void add_common(CLI::App* sub, CommonFlags& f, bool window, bool sim, bool eps, bool plot) {
    if (window) sub->add_option("--window", f.window, "Search window re0,re1,im0,im1")->delimiter(',')->expected(4);
    if (sim) {
        sub->add_option("--horizon", f.horizon, "Simulation horizon T");
        sub->add_option("--step", f.step, "Integration step h");
    }
    if (eps) sub->add_option("--epsilon", f.epsilon, "Decay margin epsilon for the exponential estimate");
    sub->add_option("--out", f.out, "Output path (written atomically)");
    if (plot) sub->add_option("--plot", f.plot, "SVG plot path");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Prescribed-decay pole placement for scalar neutral delay equations", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    CommonFlags flags;

    auto* design = app.add_subcommand("design", "Synthesize a P/PD controller from a request document");
    std::string request_path;
    design->add_option("request", request_path, "Request (or report) document")->required();
    add_common(design, flags, true, true, true, true);

    auto* spectrum = app.add_subcommand("spectrum", "Locate quasipolynomial roots in a window");
    std::vector<double> coeffs;
    std::string design_path;
    spectrum->add_option("--coeffs", coeffs, "a,alpha,beta,tau")->delimiter(',');
    spectrum->add_option("--design", design_path, "Request or report document");
    add_common(spectrum, flags, true, false, false, true);

    auto* simulate = app.add_subcommand("simulate", "Simulate the closed-loop Hopfield plant");
    std::string history = "1+sin(t)";
    double nu = std::numeric_limits<double>::quiet_NaN(), mu = nu, tau = nu;
    bool linearized = false;
    simulate->add_option("--design", design_path, "Request or report document");
    simulate->add_option("--nu", nu, "Open-loop plant nu (no controller)");
    simulate->add_option("--mu", mu, "Open-loop plant mu (no controller)");
    simulate->add_option("--tau", tau, "History length for the open-loop run");
    simulate->add_option("--history", history, "Initial function, e.g. 1+sin(t)");
    simulate->add_flag("--linearized", linearized, "Replace tanh by its linearization");
    add_common(simulate, flags, false, true, false, true);

    auto* compare = app.add_subcommand("compare", "Compare the delayed PD and P designs");
    std::vector<double> triple, pair;
    compare->add_option("--nu", nu, "Plant nu")->required();
    compare->add_option("--mu", mu, "Plant mu")->required();
    compare->add_option("--triple", triple, "PD roots s1,s2,s3")->delimiter(',')->required();
    compare->add_option("--pair", pair, "P roots s1,s2")->delimiter(',')->required();
    compare->add_option("--history", history, "Initial function");
    add_common(compare, flags, false, true, false, false);

    auto* tau_star = app.add_subcommand("tau-star", "Largest stabilizing delay for the given roots");
    std::vector<double> roots;
    tau_star->add_option("--roots", roots, "s1,s2[,s3]")->delimiter(',')->required();
    add_common(tau_star, flags, false, false, false, false);

    auto* regions = app.add_subcommand("regions", "Two-root region classification and criterion grids");
    RegionsArgs ra;
    regions->add_option("--pair", ra.pair, "s1,s2")->delimiter(',');
    regions->add_option("--a", ra.a, "Instantaneous coefficient a");
    regions->add_option("--tau", ra.tau, "Delay tau");
    regions->add_option("--phi-table", ra.phi_table, "x0,x1,n table of region boundaries")->delimiter(',');
    regions->add_option("--grid", ra.grid, "W or Z criterion grid");
    regions->add_option("--u-range", ra.u_range, "u0,u1,n")->delimiter(',');
    regions->add_option("--v-range", ra.v_range, "v0,v1,n")->delimiter(',');
    regions->add_option("--A", ra.A, "Scaled coefficient A for the Z grid");
    regions->add_option("--witness", ra.witness_u, "Witness box at scaled gap u");
    add_common(regions, flags, false, false, false, false);

    auto* estimate = app.add_subcommand("estimate-k", "Exponential-estimate constant k");
    estimate->add_option("--design", design_path, "Request or report document");
    estimate->add_option("--coeffs", coeffs, "a,alpha,beta,tau")->delimiter(',');
    estimate->add_option("--roots", roots, "assigned roots s1,s2[,s3]")->delimiter(',');
    add_common(estimate, flags, false, false, true, false);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? exit_ok : exit_input_error;
    }

    try {
        if (*design) return cmd_design(request_path, flags, out);
        if (*spectrum) return cmd_spectrum(coeffs, design_path, flags, out);
        if (*simulate) return cmd_simulate(design_path, nu, mu, tau, history, linearized, flags, out);
        if (*compare) return cmd_compare(nu, mu, triple, pair, history, flags, out);
        if (*tau_star) return cmd_tau_star(roots, flags, out);
        if (*regions) return cmd_regions(ra, flags, out);
        if (*estimate) return cmd_estimate_k(design_path, coeffs, roots, flags, out);
    } catch (const UnreachableRate& e) {
        err << "error: " << e.what() << "\n";
        return exit_unreachable;
    } catch (const SolverError& e) {
        err << "error: solver failure: " << e.what() << "\n";
        return exit_solver_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_input_error;
    }
    return exit_input_error;
}

}  // namespace nplace
