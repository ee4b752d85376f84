#include "iomodel/report.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace iomodel {

namespace {

std::string status_name(int code) {
    switch (code) {
    case ExitOk: return "ok";
    case ExitNegative: return "negative";
    case ExitInputError: return "input_error";
    default: return "numerical_failure";
    }
}

void write_text(std::ostringstream& out, const Json& value, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    for (auto it = value.begin(); it != value.end(); ++it) {
        out << pad << it.key() << ":";
        if (it->is_object()) {
            out << '\n';
            write_text(out, *it, indent + 2);
        } else if (it->is_array() && !it->empty() && (*it)[0].is_object()) {
            out << '\n';
            for (const auto& item : *it) {
                out << pad << "  -\n";
                write_text(out, item, indent + 4);
            }
        } else {
            out << ' ' << (it->is_string() ? it->get<std::string>() : it->dump()) << '\n';
        }
    }
}

}  // namespace

double round_significant(double v, int digits) {
    if (!std::isfinite(v) || v == 0.0) return v == 0.0 ? 0.0 : v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    const double r = std::strtod(buf, nullptr);
    return r == 0.0 ? 0.0 : r;
}

Json json_number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return round_significant(v, tol::json_digits);
}

Json json_vector(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(json_number(v(i)));
    return out;
}

Json json_matrix(const Matrix& m) {
    Json out = Json::array();
    for (Index r = 0; r < m.rows(); ++r) out.push_back(json_vector(m.row(r).transpose()));
    return out;
}

Json json_indices(const std::vector<Index>& idx) {
    Json out = Json::array();
    for (Index i : idx) out.push_back(i + 1);
    return out;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

Json Report::to_json() const {
    Json j;
    j["command"] = command;
    j["status"] = status_name(exit_code);
    j["inputs_digest"] = inputs_digest;
    j["results"] = results;
    j["diagnostics"] = diagnostics;
    return j;
}

std::string Report::to_text() const {
    std::ostringstream out;
    out << "command: " << command << "\nstatus: " << status_name(exit_code) << "\ninputs_digest: " << inputs_digest << '\n';
    write_text(out, results, 0);
    for (const auto& d : diagnostics) out << "note: " << d << '\n';
    return out.str();
}

std::string Report::render(const std::string& format) const {
    return format == "json" ? to_json().dump(2) + "\n" : to_text();
}

int exit_code_for(const Error& e) { return is_input_error(e.kind()) ? ExitInputError : ExitNumericalFailure; }

Report error_report(const std::string& command, const std::string& digest, const Error& e) {
    Report r;
    r.command = command;
    r.inputs_digest = digest;
    r.results["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    r.diagnostics.push_back(e.what());
    r.exit_code = exit_code_for(e);
    return r;
}

}  // namespace iomodel
