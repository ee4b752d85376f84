#include "iomodel/aggregation.hpp"

#include "iomodel/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace iomodel {

namespace {

Matrix indicator(const AggregationMap& f) {
    Matrix s = Matrix::Zero(f.fine(), f.coarse());
    for (Index l = 0; l < f.fine(); ++l) s(l, f(l)) = 1.0;
    return s;
}

struct Grouped {
    Matrix a_bar;
    Vector x;
    Vector c;
    Vector delta;
};

// Value-weighted grouping; c is taken as given so rescaled economies can be compared.
Grouped group(const Matrix& a, const Vector& p, const Vector& x, const Vector& c, const AggregationMap& f) {
    const Matrix s = indicator(f);
    const Matrix flows = p.asDiagonal() * a * x.asDiagonal();
    Grouped g;
    g.x = s.transpose() * p.cwiseProduct(x);
    g.c = s.transpose() * p.cwiseProduct(c);
    g.a_bar = (s.transpose() * flows * s) * g.x.cwiseInverse().asDiagonal();
    const Vector unit_margin = p - a.transpose() * p;
    g.delta = s.transpose() * unit_margin.cwiseProduct(x);
    return g;
}

double relative_gap(const Matrix& got, const Matrix& expected) {
    const double scale = std::max(expected.cwiseAbs().maxCoeff(), 1e-300);
    return (got - expected).cwiseAbs().maxCoeff() / scale;
}

void require_shapes(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f) {
    if (fine.n() != f.fine() || p.size() != f.fine() || x.size() != f.fine())
        throw Error(ErrorKind::InvalidArgument, "fine economy and aggregation map disagree on the sector count");
    if (!(p.array() > 0.0).all() || !(x.array() > 0.0).all())
        throw Error(ErrorKind::InvalidArgument, "fine prices and outputs must be strictly positive");
}

}  // namespace

AggregationMap::AggregationMap(std::vector<Index> target, Index coarse) : target_(std::move(target)), coarse_(coarse) {
    if (target_.empty() || coarse_ < 1) throw Error(ErrorKind::InvalidArgument, "aggregation map is empty");
    std::vector<bool> hit(static_cast<std::size_t>(coarse_), false);
    for (Index k : target_) {
        if (k < 0 || k >= coarse_) throw Error(ErrorKind::InvalidArgument, "aggregation target out of range");
        hit[static_cast<std::size_t>(k)] = true;
    }
    for (std::size_t k = 0; k < hit.size(); ++k)
        if (!hit[k]) throw Error(ErrorKind::InvalidArgument, "coarse sector " + std::to_string(k + 1) + " has no fine sector");
}

AggregationMap AggregationMap::parse(const std::string& text) {
    std::map<long, long> pairs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        long fine = 0;
        long coarse = 0;
        std::string rest;
        if (!(fields >> fine)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected two integers");
        }
        if (!(fields >> coarse) || (fields >> rest))
            throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected two integers");
        if (fine < 1 || coarse < 1) throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": indices are 1-based");
        if (!pairs.emplace(fine, coarse).second)
            throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": fine sector " + std::to_string(fine) + " listed twice");
    }
    if (pairs.empty()) throw Error(ErrorKind::ParseError, "aggregation map has no entries");
    const long m = pairs.rbegin()->first;
    if (static_cast<long>(pairs.size()) != m) throw Error(ErrorKind::ParseError, "fine sectors must be numbered 1..m without gaps");
    std::vector<Index> target;
    long n = 0;
    for (const auto& [fine, coarse] : pairs) {
        target.push_back(coarse - 1);
        n = std::max(n, coarse);
    }
    try {
        return AggregationMap(std::move(target), n);
    } catch (const Error& e) {
        throw Error(ErrorKind::ParseError, e.what());
    }
}

AggregationMap AggregationMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open aggregation map " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

AggregatedTable aggregate(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f) {
    require_shapes(fine, p, x, f);
    const Vector c = x - fine.a() * x;
    for (Index l = 0; l < c.size(); ++l)
        if (c(l) < -1e-12 * std::max(1.0, x(l)))
            throw Error(ErrorKind::BalanceViolation, "final consumption is negative at fine sector " + std::to_string(l + 1));

    const Grouped g = group(fine.a(), p, x, c, f);
    const double scale = g.x.cwiseAbs().maxCoeff();
    const Vector balance = g.x - g.a_bar * g.x - g.c;
    if (balance.cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error(ErrorKind::BalanceViolation, "aggregated rows do not balance X - abar X = C");
    const Vector colsum = g.a_bar.colwise().sum().transpose();
    const Vector value_added = g.x.cwiseProduct(Vector::Ones(colsum.size()) - colsum) - g.delta;
    if (value_added.cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error(ErrorKind::BalanceViolation, "aggregated columns do not balance X (1 - column sum) = Delta");
    return AggregatedTable{g.a_bar, g.x, g.c, g.delta};
}

bool ScalingCheck::holds(double tolerance) const {
    return matrix_error <= tolerance && output_error <= tolerance && consumption_error <= tolerance;
}

ScalingCheck scaling_identity_check(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                    const Vector& p_hat, const Vector& x_hat) {
    require_shapes(fine, p, x, f);
    if (p_hat.size() != f.coarse() || x_hat.size() != f.coarse())
        throw Error(ErrorKind::InvalidArgument, "scaling vectors must have one entry per coarse sector");
    const Vector c = x - fine.a() * x;
    const Grouped base = group(fine.a(), p, x, c, f);

    Vector p2 = p;
    Vector x2 = x;
    Vector c2 = c;
    for (Index l = 0; l < f.fine(); ++l) {
        p2(l) *= p_hat(f(l));
        x2(l) *= x_hat(f(l));
        c2(l) *= x_hat(f(l));
    }
    const Grouped scaled = group(fine.a(), p2, x2, c2, f);

    const Matrix expected_a = p_hat.asDiagonal() * base.a_bar * p_hat.cwiseInverse().asDiagonal();
    const Vector weight = p_hat.cwiseProduct(x_hat);
    ScalingCheck out;
    out.matrix_error = relative_gap(scaled.a_bar, expected_a);
    out.output_error = relative_gap(scaled.x, weight.cwiseProduct(base.x));
    out.consumption_error = relative_gap(scaled.c, weight.cwiseProduct(base.c));
    return out;
}

Vector relative_prices(const AggregatedTable& table, const Vector& delta_hat) {
    if (delta_hat.size() != table.x.size()) throw Error(ErrorKind::InvalidArgument, "delta_hat has the wrong length");
    return leontief_solve(Technology(table.a_bar.transpose(), Units::Value), delta_hat);
}

double aggregated_value_added_error(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                    const Vector& p_hat) {
    const AggregatedTable table = aggregate(fine, p, x, f);
    if (p_hat.size() != f.coarse()) throw Error(ErrorKind::InvalidArgument, "p_hat has the wrong length");
    const Vector delta_hat = p_hat - table.a_bar.transpose() * p_hat;

    Vector lifted(f.fine());
    for (Index l = 0; l < f.fine(); ++l) lifted(l) = p_hat(f(l)) * p(l);
    const Vector fine_margin = lifted - fine.a().transpose() * lifted;
    const Vector lhs = indicator(f).transpose() * fine_margin.cwiseProduct(x);
    const Vector rhs = table.x.cwiseProduct(delta_hat);
    const double scale = std::max(table.x.cwiseAbs().maxCoeff() * p_hat.cwiseAbs().maxCoeff(), 1e-300);
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

bool aggregated_value_added_check(const Technology& fine, const Vector& p, const Vector& x, const AggregationMap& f,
                                  const Vector& p_hat, double tolerance) {
    return aggregated_value_added_error(fine, p, x, f, p_hat) <= tolerance;
}

}  // namespace iomodel
