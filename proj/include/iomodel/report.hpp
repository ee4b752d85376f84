#pragma once

#include "iomodel/core_algebra.hpp"
#include "iomodel/error.hpp"
#include "iomodel/tolerances.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace iomodel {

using Json = nlohmann::ordered_json;

enum ExitCode : int { ExitOk = 0, ExitNegative = 1, ExitInputError = 2, ExitNumericalFailure = 3 };

/// v rounded to `digits` significant digits; negative zero becomes zero.
double round_significant(double v, int digits);

Json json_number(double v);
Json json_vector(const Vector& v);
Json json_matrix(const Matrix& m);
Json json_indices(const std::vector<Index>& idx);  // 1-based

std::string sha256_hex(const std::string& data);

struct Report {
    std::string command;
    std::string inputs_digest;
    Json results = Json::object();
    std::vector<std::string> diagnostics;
    int exit_code = ExitOk;

    Json to_json() const;
    std::string to_text() const;
    std::string render(const std::string& format) const;
};

int exit_code_for(const Error& e);
Report error_report(const std::string& command, const std::string& digest, const Error& e);

}  // namespace iomodel
