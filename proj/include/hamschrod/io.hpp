#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hamschrod/convergence.hpp"
#include "hamschrod/schrodinger.hpp"

namespace hamschrod::io {

using json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

/// Header `t,x,value_re,value_im`, one row per node, time-major.
inline std::string field_csv(const FieldSeries& s, const SpatialGrid& grid) {
    std::string out = "t,x,value_re,value_im\n";
    out.reserve(out.size() + static_cast<std::size_t>(s.size()) * grid.n() * 64);
    for (const auto& snap : s.snapshots) {
        if (snap.size() != grid.n()) throw DomainError("snapshot does not match grid in CSV export");
        const std::string t = format_double(snap.t);
        for (int i = 0; i < grid.n(); ++i) {
            out += t;
            out += ',';
            out += format_double(grid.x(i));
            out += ',';
            out += format_double(snap.values[i].real());
            out += ',';
            out += format_double(snap.values[i].imag());
            out += '\n';
        }
    }
    return out;
}

inline json history_json(const std::vector<DeformationSolveRecord>& history) {
    json arr = json::array();
    for (const auto& r : history) {
        json e{{"m", r.m}, {"residual_norm_after", r.residual_norm_after}, {"f_m_norm", r.f_m_norm}};
        if (r.iteration > 0) e["iteration"] = r.iteration;
        arr.push_back(std::move(e));
    }
    return arr;
}

inline std::string curve_csv(const C0Curve& curve) {
    std::string out = "c0,residual_norm\n";
    for (const auto& s : curve.samples) out += format_double(s.c0) + "," + format_double(s.residual_norm) + "\n";
    return out;
}

inline json report_json(const ConvergenceReport& r) {
    return json{{"residuals", r.residuals}, {"ratios", r.ratios}, {"verdict", to_string(r.verdict)}};
}

inline json diagnostics_json(const SchrodDiagnostics& d) {
    return json{{"N_p", d.N_p},           {"L_p", d.L_p},
                {"mu", d.mu},             {"p_star", d.p_star},
                {"slot_error", d.slot_error}, {"wrap_margin", d.wrap_margin},
                {"warps", d.warps}};
}

namespace detail {

inline json complex_rows(const Matrix& A, bool imag) {
    json rows = json::array();
    for (int i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < A.cols(); ++j) row.push_back(imag ? A(i, j).imag() : A(i, j).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json complex_vec(const Vector& v, bool imag) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(imag ? v[i].imag() : v[i].real());
    return out;
}

inline std::vector<double> number_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ParseError(where + "/" + std::to_string(i) + ": expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

inline Vector vector_from(const json& doc, const std::string& re, const std::string& im, const std::string& where) {
    if (!doc.contains(re)) throw ParseError(where + "/" + re + ": missing");
    const auto r = number_list(doc.at(re), where + "/" + re);
    Vector v(static_cast<int>(r.size()));
    for (std::size_t i = 0; i < r.size(); ++i) v[static_cast<int>(i)] = r[i];
    if (doc.contains(im)) {
        const auto m = number_list(doc.at(im), where + "/" + im);
        if (m.size() != r.size()) throw ParseError(where + "/" + im + ": length differs from " + re);
        for (std::size_t i = 0; i < m.size(); ++i) v[static_cast<int>(i)] += Complex(0.0, m[i]);
    }
    return v;
}

}  // namespace detail

/// Dense row-major matrix as A_re/A_im, a_re/a_im, b_re/b_im (one row per time node)
/// and the time grid.
inline json linear_system_json(const LinearSystem& sys) {
    json b_re = json::array(), b_im = json::array();
    for (const auto& bk : sys.b) {
        b_re.push_back(detail::complex_vec(bk, false));
        b_im.push_back(detail::complex_vec(bk, true));
    }
    return json{{"A_re", detail::complex_rows(sys.A, false)},
                {"A_im", detail::complex_rows(sys.A, true)},
                {"a_re", detail::complex_vec(sys.a, false)},
                {"a_im", detail::complex_vec(sys.a, true)},
                {"b_re", b_re},
                {"b_im", b_im},
                {"time", {{"t_final", sys.time.t_final()}, {"n_steps", sys.time.n_steps()}}}};
}

/// Inverse of linear_system_json. `b_re` may also be a single vector (constant forcing)
/// or omitted (zero forcing); imaginary parts are optional.
inline LinearSystem linear_system_from_json(const json& doc, const std::string& where = "") {
    if (!doc.is_object()) throw ParseError(where + ": expected an object");
    static const std::vector<std::string> allowed{"A_re", "A_im", "a_re", "a_im", "b_re", "b_im", "time"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            throw ParseError(where + "/" + it.key() + ": unknown key '" + it.key() + "'");
        }
    }
    if (!doc.contains("time") || !doc["time"].is_object()) throw ParseError(where + "/time: missing time block");
    const auto& tj = doc["time"];
    for (auto it = tj.begin(); it != tj.end(); ++it) {
        if (it.key() != "t_final" && it.key() != "n_steps") {
            throw ParseError(where + "/time/" + it.key() + ": unknown key '" + it.key() + "'");
        }
    }
    if (!tj.contains("t_final") || !tj["t_final"].is_number()) throw ParseError(where + "/time/t_final: expected a number");
    if (!tj.contains("n_steps") || !tj["n_steps"].is_number_integer()) {
        throw ParseError(where + "/time/n_steps: expected an integer");
    }
    const double t_final = tj["t_final"].get<double>();
    const int n_steps = tj["n_steps"].get<int>();
    if (!(t_final > 0.0) || n_steps < 1) throw ValidationError(where + "/time: needs t_final > 0 and n_steps >= 1");
    const TimeGrid time(t_final, n_steps);

    const Vector a = detail::vector_from(doc, "a_re", "a_im", where);
    const int n = static_cast<int>(a.size());
    if (!doc.contains("A_re") || !doc["A_re"].is_array()) throw ParseError(where + "/A_re: expected rows");
    Matrix A = Matrix::Zero(n, n);
    for (const char* part : {"A_re", "A_im"}) {
        if (!doc.contains(part)) continue;
        const auto& rows = doc[part];
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) {
            throw ParseError(where + "/" + part + ": expected " + std::to_string(n) + " rows");
        }
        for (int i = 0; i < n; ++i) {
            const auto r = detail::number_list(rows[i], where + "/" + part + "/" + std::to_string(i));
            if (static_cast<int>(r.size()) != n) {
                throw ParseError(where + "/" + part + "/" + std::to_string(i) + ": expected " + std::to_string(n) + " columns");
            }
            for (int j = 0; j < n; ++j) A(i, j) += std::string(part) == "A_re" ? Complex(r[j], 0.0) : Complex(0.0, r[j]);
        }
    }

    LinearSystem sys{A, {}, a, time};
    auto per_node = [&](const char* part) -> std::vector<std::vector<double>> {
        std::vector<std::vector<double>> out;
        if (!doc.contains(part)) return out;
        const auto& bj = doc[part];
        const std::string w = where + "/" + part;
        if (!bj.is_array()) throw ParseError(w + ": expected an array");
        if (!bj.empty() && bj[0].is_array()) {
            for (std::size_t k = 0; k < bj.size(); ++k) out.push_back(detail::number_list(bj[k], w + "/" + std::to_string(k)));
        } else {
            out.assign(time.n_nodes(), detail::number_list(bj, w));
        }
        if (static_cast<int>(out.size()) != time.n_nodes()) {
            throw ParseError(w + ": expected " + std::to_string(time.n_nodes()) + " samples");
        }
        for (std::size_t k = 0; k < out.size(); ++k) {
            if (static_cast<int>(out[k].size()) != n) throw ParseError(w + "/" + std::to_string(k) + ": wrong length");
        }
        return out;
    };
    const auto re = per_node("b_re");
    const auto im = per_node("b_im");
    for (int k = 0; k < time.n_nodes(); ++k) {
        Vector bk = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (!re.empty()) bk[i] += re[k][i];
            if (!im.empty()) bk[i] += Complex(0.0, im[k][i]);
        }
        sys.b.push_back(std::move(bk));
    }
    return sys;
}

/// CSV for a bare linear system; x holds the component index.
inline std::string system_csv(const FieldSeries& s) {
    std::string out = "t,x,value_re,value_im\n";
    for (const auto& snap : s.snapshots) {
        const std::string t = format_double(snap.t);
        for (int i = 0; i < snap.size(); ++i) {
            out += t + "," + std::to_string(i) + "," + format_double(snap.values[i].real()) + "," +
                   format_double(snap.values[i].imag()) + "\n";
        }
    }
    return out;
}

}  // namespace hamschrod::io
