#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cepdist/error.hpp"
#include "cepdist/lti.hpp"

namespace cepdist::io {

/// Output samples and, for pair files, the input samples.
struct SignalFile {
    Signal output;
    std::optional<Signal> input;
};

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    cepdist::detail::fail(ErrorCode::ParseError, source + ":" + std::to_string(line) + ": " + what);
}

inline std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_number(const std::string& text, const std::string& source, std::size_t line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        parse_fail(source, line, "'" + text + "' is not a number");
    }
    if (used != text.size()) parse_fail(source, line, "'" + text + "' is not a number");
    if (!std::isfinite(v)) parse_fail(source, line, "non-finite value");
    return v;
}

} // namespace detail

/// Reads `t,value` or `t,u,y` CSV text. The sample period is taken from the
/// time column, which must be uniformly spaced.
inline SignalFile parse_signal_csv(std::istream& in, const std::string& source = "<input>") {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) detail::parse_fail(source, 1, "empty file");
    ++lineno;
    if (!line.empty() && line.back() == '\r') detail::parse_fail(source, lineno, "CRLF line endings are not accepted");
    bool pair;
    if (line == "t,value")
        pair = false;
    else if (line == "t,u,y")
        pair = true;
    else
        detail::parse_fail(source, lineno, "header must be 't,value' or 't,u,y'");
    const std::size_t width = pair ? 3 : 2;

    std::vector<double> t, u, y;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.back() == '\r') detail::parse_fail(source, lineno, "CRLF line endings are not accepted");
        const auto fields = detail::split(line);
        if (fields.size() != width)
            detail::parse_fail(source, lineno,
                               "expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()));
        t.push_back(detail::parse_number(fields[0], source, lineno));
        if (pair) u.push_back(detail::parse_number(fields[1], source, lineno));
        y.push_back(detail::parse_number(fields[width - 1], source, lineno));
    }
    if (y.empty()) detail::parse_fail(source, lineno, "no samples");

    double period = 1.0;
    if (t.size() > 1) {
        period = t[1] - t[0];
        if (!(period > 0.0)) detail::parse_fail(source, 3, "time column must increase");
        for (std::size_t k = 1; k < t.size(); ++k) {
            const double expected = t[0] + static_cast<double>(k) * period;
            if (std::abs(t[k] - expected) > 1e-6 * std::max(1.0, std::abs(expected)))
                detail::parse_fail(source, k + 2, "time column is not uniformly spaced");
        }
    }
    SignalFile file{Signal(std::move(y), period), std::nullopt};
    if (pair) file.input = Signal(std::move(u), period);
    return file;
}

inline SignalFile read_signal_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) cepdist::detail::fail(ErrorCode::ParseError, "cannot open '" + path + "'");
    return parse_signal_csv(in, path);
}

inline void write_signal_csv(std::ostream& out, const Signal& y) {
    out << "t,value\n";
    for (std::size_t k = 0; k < y.size(); ++k)
        out << format_double(static_cast<double>(k) * y.sample_period()) << ',' << format_double(y[k]) << '\n';
}

inline void write_pair_csv(std::ostream& out, const Signal& u, const Signal& y) {
    cepdist::detail::require(u.size() == y.size(), ErrorCode::LengthMismatch, "input and output lengths differ");
    out << "t,u,y\n";
    for (std::size_t k = 0; k < y.size(); ++k)
        out << format_double(static_cast<double>(k) * y.sample_period()) << ',' << format_double(u[k]) << ','
            << format_double(y[k]) << '\n';
}

using ModelSpec = std::variant<StateSpaceModel, ZeroPoleGain>;

namespace detail {

inline Complex parse_root(const nlohmann::json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    cepdist::detail::fail(ErrorCode::ParseError, "root must be a number or a [re, im] pair");
}

inline std::vector<Complex> parse_roots(const nlohmann::json& spec, const char* key) {
    std::vector<Complex> roots;
    if (!spec.contains(key)) return roots;
    const auto& arr = spec.at(key);
    if (!arr.is_array()) cepdist::detail::fail(ErrorCode::ParseError, std::string("'") + key + "' must be an array");
    for (const auto& r : arr) roots.push_back(parse_root(r));
    return roots;
}

inline Eigen::MatrixXd parse_matrix(const nlohmann::json& j, const char* key) {
    auto bad = [&] { cepdist::detail::fail(ErrorCode::ParseError, std::string("'") + key + "' must be a matrix"); };
    if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
    if (!j.is_array()) bad();
    if (j.empty()) return Eigen::MatrixXd(0, 0);
    if (!j[0].is_array()) {
        Eigen::MatrixXd v(static_cast<Eigen::Index>(j.size()), 1);
        for (std::size_t r = 0; r < j.size(); ++r) {
            if (!j[r].is_number()) bad();
            v(static_cast<Eigen::Index>(r), 0) = j[r].get<double>();
        }
        return v;
    }
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) bad();
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) bad();
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return M;
}

} // namespace detail

/// {"A": [[..]], "B": [..], "C": [..], "D": d} or {"poles": [..], "zeros": [..], "gain": g}.
inline ModelSpec parse_model(const nlohmann::json& spec) {
    if (!spec.is_object()) cepdist::detail::fail(ErrorCode::ParseError, "model must be a JSON object");
    if (spec.contains("A")) {
        for (const char* key : {"B", "C", "D"})
            if (!spec.contains(key)) cepdist::detail::fail(ErrorCode::ParseError, std::string("missing '") + key + "'");
        if (!spec.at("D").is_number()) cepdist::detail::fail(ErrorCode::ParseError, "'D' must be a number");
        const Eigen::MatrixXd A = detail::parse_matrix(spec.at("A"), "A");
        Eigen::MatrixXd B = detail::parse_matrix(spec.at("B"), "B");
        Eigen::MatrixXd C = detail::parse_matrix(spec.at("C"), "C");
        if (B.rows() == 1 && B.cols() > 1) B.transposeInPlace();
        if (C.cols() == 1 && C.rows() > 1) C.transposeInPlace();
        if (B.cols() != 1 && B.size() != 0)
            cepdist::detail::fail(ErrorCode::DimensionMismatch, "'B' must be a column");
        if (C.rows() != 1 && C.size() != 0) cepdist::detail::fail(ErrorCode::DimensionMismatch, "'C' must be a row");
        const Eigen::VectorXd b = B.size() ? Eigen::VectorXd(B.col(0)) : Eigen::VectorXd(0);
        const Eigen::RowVectorXd c = C.size() ? Eigen::RowVectorXd(C.row(0)) : Eigen::RowVectorXd(0);
        return StateSpaceModel(A, b, c, spec.at("D").get<double>());
    }
    if (spec.contains("poles") || spec.contains("zeros") || spec.contains("gain")) {
        double gain = 1.0;
        if (spec.contains("gain")) {
            if (!spec.at("gain").is_number()) cepdist::detail::fail(ErrorCode::ParseError, "'gain' must be a number");
            gain = spec.at("gain").get<double>();
        }
        return ZeroPoleGain::from_roots(detail::parse_roots(spec, "poles"), detail::parse_roots(spec, "zeros"), gain);
    }
    cepdist::detail::fail(ErrorCode::ParseError, "model needs A/B/C/D or poles/zeros/gain");
}

inline ModelSpec read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) cepdist::detail::fail(ErrorCode::ParseError, "cannot open '" + path + "'");
    nlohmann::json spec;
    try {
        spec = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        cepdist::detail::fail(ErrorCode::ParseError, path + ": " + e.what());
    }
    return parse_model(spec);
}

inline nlohmann::json roots_to_json(const std::vector<Complex>& roots) {
    auto arr = nlohmann::json::array();
    for (const Complex& r : roots) {
        if (r.imag() == 0.0) arr.push_back(r.real());
        else arr.push_back({r.real(), r.imag()});
    }
    return arr;
}

inline nlohmann::json to_json(const ZeroPoleGain& zpk) {
    return {{"poles", roots_to_json(zpk.poles())}, {"zeros", roots_to_json(zpk.zeros())}, {"gain", zpk.gain()}};
}

} // namespace cepdist::io
