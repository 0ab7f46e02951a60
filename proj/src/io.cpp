#include "nplace/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "nplace/errors.hpp"

namespace nplace {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Json json_number(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

Json to_json(Complex z) { return Json{{"re", json_number(z.real())}, {"im", json_number(z.imag())}}; }

Json to_json(const NeutralQuasiPoly& qp) {
    return Json{{"a", qp.a}, {"alpha", qp.alpha}, {"beta", qp.beta}, {"tau", qp.tau}};
}

Json to_json(const Rectangle& r) {
    return Json{{"re_min", r.re_min}, {"re_max", r.re_max}, {"im_min", r.im_min}, {"im_max", r.im_max}};
}

Json to_json(const DominanceCertificate& c) {
    Json w = Json::array();
    for (Complex z : c.witnesses) w.push_back(to_json(z));
    return Json{{"s1", c.s1},
                {"verdict", to_string(c.verdict)},
                {"window", to_json(c.window)},
                {"chain_abscissa", json_number(c.chain_abscissa)},
                {"half_plane_covered", c.half_plane_covered},
                {"witnesses", w}};
}

Json to_json(const SpectrumReport& r) {
    Json roots = Json::array();
    for (std::size_t i = 0; i < r.roots.size(); ++i) {
        roots.push_back(Json{{"re", r.roots[i].real()}, {"im", r.roots[i].imag()}, {"residual", r.residuals[i]}});
    }
    return Json{{"window", to_json(r.window)},
                {"count_by_argument_principle", r.count_by_argument_principle},
                {"chain_abscissa", json_number(r.chain_abscissa)},
                {"roots", roots}};
}

Json to_json(const AssignedRoots& roots) {
    return std::visit(
        [](const auto& r) -> Json {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, RootTriple>) {
                return Json::array({r.s1, r.s2, r.s3});
            } else {
                return Json::array({r.s1, r.s2});
            }
        },
        roots);
}

Json to_json(const ControllerDesign& d) {
    Json j{{"kind", to_string(d.kind)}, {"tau", d.tau},         {"kp", d.kp},
           {"kd", d.kd},                {"plant_a", d.plant_a}, {"nu", d.nu},
           {"mu", d.mu},                {"assigned_roots", to_json(d.assigned_roots)},
           {"n_brackets", d.n_brackets}};
    if (d.certificate) j["certificate"] = to_json(*d.certificate);
    return j;
}

Json to_json(const SpectrumCharacterization& sc) {
    Json roots = Json::array();
    for (Complex z : sc.roots) roots.push_back(to_json(z));
    Json omegas = Json::array();
    for (double w : sc.omegas) omegas.push_back(json_number(w));
    Json j{{"on_axis", sc.on_axis}, {"axis_re", json_number(sc.axis_re)}, {"theta", json_number(sc.theta)},
           {"xi", json_number(sc.xi)}, {"omegas", omegas},                  {"roots", roots}};
    if (!sc.note.empty()) j["note"] = sc.note;
    return j;
}

Json to_json(const ExpEstimate& e) {
    return Json{{"epsilon", e.epsilon}, {"k", e.k}, {"k0", e.k0}, {"rate", e.rate}, {"T_cut", e.T_cut}};
}

Json to_json(const RegionLabel& l) {
    Json j{{"region", to_string(l.region)}, {"lambda3", l.lambda3}, {"phi1", l.phi1},
           {"phi2", l.phi2},                {"phi3", l.phi3},       {"on_boundary", l.on_boundary}};
    j["x"] = l.x ? json_number(*l.x) : Json(nullptr);
    j["adjacent"] = l.adjacent ? Json(to_string(*l.adjacent)) : Json(nullptr);
    return j;
}

Json to_json(const WitnessBox& b) {
    return Json{{"A1", b.A1}, {"A2", b.A2}, {"A3", b.A3}, {"v1", b.v1}, {"v2", b.v2}};
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out += ',';
        out += header[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string trajectory_csv(const Trajectory& tr) {
    std::vector<std::vector<double>> rows;
    rows.reserve(tr.times.size());
    for (std::size_t i = 0; i < tr.times.size(); ++i) rows.push_back({tr.times[i], tr.values[i], tr.derivs[i]});
    return csv_table({"t", "y", "ydot"}, rows);
}

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                     const std::vector<SvgSeries>& series, const std::vector<double>& vlines) {
    const double W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) continue;
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    for (double v : vlines) {
        if (!std::isfinite(v)) continue;
        x0 = std::min(x0, v);
        x1 = std::max(x1, v);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 - x0 <= 0) x0 -= 1, x1 += 1;
    if (y1 - y0 <= 0) y0 -= 1, y1 += 1;
    const double px = 0.05 * (x1 - x0), py = 0.05 * (y1 - y0);
    x0 -= px, x1 += px, y0 -= py, y1 += py;
    auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << escape_xml(title)
      << "</text>\n";
    o << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        o << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
          << fmt(xv) << "</text>\n";
        o << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
          << fmt(yv) << "</text>\n";
    }
    o << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << escape_xml(xlabel) << "</text>\n";
    o << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << H / 2 << ")\">" << escape_xml(ylabel) << "</text>\n";
    for (double v : vlines) {
        if (!std::isfinite(v)) continue;
        o << "<line x1=\"" << sx(v) << "\" y1=\"" << mt << "\" x2=\"" << sx(v) << "\" y2=\"" << H - mb
          << "\" stroke=\"gray\" stroke-dasharray=\"4 4\"/>\n";
    }
    for (const auto& s : series) {
        if (s.line) {
            o << "<polyline fill=\"none\" stroke=\"" << s.colour << "\" stroke-width=\"1.2\" points=\"";
            for (auto [x, y] : s.points) {
                if (std::isfinite(x) && std::isfinite(y)) o << sx(x) << ',' << sy(y) << ' ';
            }
            o << "\"/>\n";
        } else {
            for (auto [x, y] : s.points) {
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                o << "<circle cx=\"" << sx(x) << "\" cy=\"" << sy(y) << "\" r=\"3\" fill=\"" << s.colour << "\"/>\n";
            }
        }
    }
    o << "</svg>\n";
    return o.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    std::random_device rd;
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw InvalidArgument("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) {
            f.close();
            std::error_code ec;
            fs::remove(tmp, ec);
            throw InvalidArgument("failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw InvalidArgument("cannot move output into place at '" + path.string() + "'");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InvalidArgument("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace nplace
