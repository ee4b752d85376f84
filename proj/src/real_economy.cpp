#include "iomodel/real_economy.hpp"

#include "iomodel/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace iomodel {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cell.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(ch);
        }
    }
    if (quoted) throw Error(ErrorKind::ParseError, "unterminated quote");
    out.push_back(trim(cell));
    return out;
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

double parse_number(const std::string& cell, int line, const std::string& column) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + column + ": '" + cell + "' is not a number");
    return v;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    return out + "\"";
}

std::string format_number(double v) {
    // Shortest representation that parses back to the same double.
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Technology IOTable::technology() const {
    return Technology(z * x.cwiseInverse().asDiagonal(), Units::Value);
}

IOTable parse_table(const std::string& csv) {
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    std::istringstream in(csv);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        rows.emplace_back(lineno, split_csv_line(line));
    }
    if (rows.empty()) throw Error(ErrorKind::ParseError, "table is empty");

    const auto& header = rows[0].second;
    if (header.size() < 6 || upper(header[0]) != "SECTOR")
        throw Error(ErrorKind::ParseError, "header must read sector,<names...>,C,E,I,X");
    const std::size_t n = header.size() - 5;
    const char* tail[] = {"C", "E", "I", "X"};
    for (std::size_t j = 0; j < 4; ++j)
        if (upper(header[n + 1 + j]) != tail[j])
            throw Error(ErrorKind::ParseError, std::string("header column ") + std::to_string(n + 2 + j) + " must be " + tail[j]);

    IOTable t;
    t.names.assign(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    const Index nn = static_cast<Index>(n);
    t.z.resize(nn, nn);
    t.x.resize(nn);
    t.c.resize(nn);
    t.e.resize(nn);
    t.imports.resize(nn);
    if (rows.size() != n + 3)
        throw Error(ErrorKind::ParseError, "expected " + std::to_string(n) + " sector rows followed by T1 and Z1 rows");

    for (std::size_t k = 0; k < n; ++k) {
        const auto& [ln, cells] = rows[k + 1];
        if (cells.size() != n + 5) throw Error(ErrorKind::ParseError, "line " + std::to_string(ln) + ": wrong number of cells");
        if (cells[0] != t.names[k])
            throw Error(ErrorKind::ParseError, "line " + std::to_string(ln) + ": expected sector " + t.names[k] + ", found " + cells[0]);
        const Index kk = static_cast<Index>(k);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = parse_number(cells[i + 1], ln, t.names[i]);
            if (v < 0.0)
                throw Error(ErrorKind::ParseError, "line " + std::to_string(ln) + ": negative delivery to " + t.names[i]);
            t.z(kk, static_cast<Index>(i)) = v;
        }
        t.c(kk) = parse_number(cells[n + 1], ln, "C");
        t.e(kk) = parse_number(cells[n + 2], ln, "E");
        t.imports(kk) = parse_number(cells[n + 3], ln, "I");
        t.x(kk) = parse_number(cells[n + 4], ln, "X");
        if (!(t.x(kk) > 0.0))
            throw Error(ErrorKind::ParseError, "sector " + t.names[k] + ": gross output must be strictly positive");
    }

    const auto footer = [&](std::size_t r, const char* label) {
        const auto& [ln, cells] = rows[r];
        if (upper(cells[0]) != label)
            throw Error(ErrorKind::ParseError, "line " + std::to_string(ln) + ": expected the " + label + " row");
        std::size_t used = cells.size();
        while (used > n + 1 && cells[used - 1].empty()) --used;
        if (used != n + 1) throw Error(ErrorKind::ParseError, "line " + std::to_string(ln) + ": wrong number of cells");
        Vector v(nn);
        for (std::size_t i = 0; i < n; ++i) v(static_cast<Index>(i)) = parse_number(cells[i + 1], ln, t.names[i]);
        return v;
    };
    t.t1 = footer(n + 1, "T1");
    t.z1 = footer(n + 2, "Z1");
    return t;
}

std::vector<BalanceIssue> balance_issues(const IOTable& t, double tolerance) {
    std::vector<BalanceIssue> issues;
    const Vector delivered = t.z.rowwise().sum();
    const Vector used = t.z.colwise().sum().transpose();
    const Vector fd = t.final_demand();
    const Vector va = t.value_added();
    for (Index k = 0; k < t.n(); ++k) {
        const double row = t.x(k) - delivered(k);
        if (std::abs(row - fd(k)) > tolerance * t.x(k))
            issues.push_back({t.names[static_cast<std::size_t>(k)], "row", row, fd(k)});
        const double col = used(k) + va(k);
        if (std::abs(col - t.x(k)) > tolerance * t.x(k))
            issues.push_back({t.names[static_cast<std::size_t>(k)], "column", col, t.x(k)});
    }
    return issues;
}

IOTable table_from_csv(const std::string& csv, double tolerance) {
    IOTable t = parse_table(csv);
    const auto issues = balance_issues(t, tolerance);
    if (!issues.empty()) {
        std::ostringstream msg;
        msg << "table does not balance:";
        for (const auto& is : issues)
            msg << " [sector " << is.sector << ", " << is.identity << ": observed " << is.observed << ", expected " << is.expected
                << "]";
        throw Error(ErrorKind::BalanceError, msg.str());
    }
    return t;
}

IOTable load_table(const std::string& path, double tolerance) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open table " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return table_from_csv(buf.str(), tolerance);
}

std::string serialize_table(const IOTable& t) {
    std::ostringstream out;
    out << "sector";
    for (const auto& name : t.names) out << ',' << quote_if_needed(name);
    out << ",C,E,I,X\n";
    for (Index k = 0; k < t.n(); ++k) {
        out << quote_if_needed(t.names[static_cast<std::size_t>(k)]);
        for (Index i = 0; i < t.n(); ++i) out << ',' << format_number(t.z(k, i));
        out << ',' << format_number(t.c(k)) << ',' << format_number(t.e(k)) << ',' << format_number(t.imports(k)) << ','
            << format_number(t.x(k)) << '\n';
    }
    out << "T1";
    for (Index i = 0; i < t.n(); ++i) out << ',' << format_number(t.t1(i));
    out << "\nZ1";
    for (Index i = 0; i < t.n(); ++i) out << ',' << format_number(t.z1(i));
    out << '\n';
    return out.str();
}

RealTaxVector real_tax_vector(const IOTable& table) { return real_tax_vector(table.t1, table.value_added()); }

RealEconomyReport analyze(const IOTable& table, const AnalyzeOptions& options) {
    const Technology abar = table.technology();
    const Index n = table.n();
    const Vector delta = table.value_added();

    RealEconomyReport r;
    const RealTaxVector rtv = real_tax_vector(table);
    r.pi0 = rtv.pi;
    r.pi0_outside_unit_interval = rtv.outside_unit_interval;

    const Vector p_hat = options.relative_prices.value_or(Vector::Ones(n));
    if (p_hat.size() != n || !(p_hat.array() > 0.0).all())
        throw Error(ErrorKind::InvalidArgument, "relative prices must be positive, one per sector");
    const Vector kept = (Vector::Ones(n) - r.pi0).cwiseProduct(table.x);
    const Vector weighted_cost = abar.a().transpose() * p_hat;  // sum_s p_hat_s abar_si
    bool positive_cost = (weighted_cost.array() > 0.0).all();
    if (positive_cost) {
        const Vector lhs = abar.a() * kept.cwiseProduct(p_hat).cwiseQuotient(weighted_cost);
        r.sustainability_residual = (lhs - kept).cwiseAbs().maxCoeff() / table.x.cwiseAbs().maxCoeff();
    } else {
        r.sustainability_residual = std::numeric_limits<double>::infinity();
    }
    r.sustainable_at_unit_prices = positive_cost && r.sustainability_residual <= options.sustainability_tolerance;

    r.bounds = tax_bounds(r.pi0, delta.cwiseQuotient(table.x), abar);

    r.psi = kept;
    if (!(r.psi.array() > 0.0).all()) {
        r.equilibrium_error = "supply (1 - pi0) X is not strictly positive";
        return r;
    }
    try {
        r.equilibrium = assemble_equilibrium(abar, r.psi);
        r.excess_ratio = r.equilibrium->excess_ratio;
    } catch (const Error& e) {
        r.equilibrium_error = e.what();
    }
    return r;
}

}  // namespace iomodel
