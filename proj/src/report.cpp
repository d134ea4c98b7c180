#include "rhlab/report.hpp"

#include "rhlab/diffop.hpp"
#include "rhlab/enhanced.hpp"
#include "rhlab/error.hpp"
#include "rhlab/hlt.hpp"
#include "rhlab/numint.hpp"
#include "rhlab/stokes_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace rhlab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

json toJson(Complex c) { return json{{"re", c.real()}, {"im", c.imag()}}; }
json toJson(const Rational& q) { return json{{"num", q.num()}, {"den", q.den()}}; }

json toJson(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(toJson(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

// Terms of an exact series; `flip` negates exponents (w^e = z^{-e}).
json termsJson(const PuiseuxSeries& s, bool flip = false) {
    json out = json::array();
    for (const auto& [e, c] : s.terms()) out.push_back(json{{"exponent", toJson(flip ? -e : e)}, {"coefficient", toJson(c)}});
    return out;
}

json sectorJson(const Sector& s) { return json{{"lo", s.lo}, {"hi", s.hi}, {"determination", s.determination}}; }

// Schema readers.

[[noreturn]] void schemaFail(const std::string& where, const std::string& what) {
    throw SchemaError(where + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& where) {
    if (!j.is_object()) schemaFail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) schemaFail(where, std::string("missing field '") + key + "'");
    return *it;
}

double readNumber(const json& j, const std::string& where) {
    if (!j.is_number()) schemaFail(where, "expected a number");
    return j.get<double>();
}

std::int64_t readInteger(const json& j, const std::string& where) {
    if (!j.is_number_integer()) schemaFail(where, "expected an integer");
    return j.get<std::int64_t>();
}

Complex readComplex(const json& j, const std::string& where) {
    return {readNumber(field(j, "re", where), where + ".re"), readNumber(field(j, "im", where), where + ".im")};
}

Rational readRational(const json& j, const std::string& where) {
    const std::int64_t den = readInteger(field(j, "den", where), where + ".den");
    if (den == 0) schemaFail(where, "zero denominator");
    return Rational(readInteger(field(j, "num", where), where + ".num"), den);
}

const json& readArray(const json& j, const std::string& where) {
    if (!j.is_array()) schemaFail(where, "expected an array");
    return j;
}

Eigen::MatrixXcd readMatrix(const json& j, const std::string& where) {
    readArray(j, where);
    const auto n = static_cast<Eigen::Index>(j.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::string rw = where + "[" + std::to_string(r) + "]";
        const json& row = readArray(j[static_cast<std::size_t>(r)], rw);
        if (static_cast<Eigen::Index>(row.size()) != n) schemaFail(rw, "matrix is not square");
        for (Eigen::Index c = 0; c < n; ++c)
            m(r, c) = readComplex(row[static_cast<std::size_t>(c)], rw + "[" + std::to_string(c) + "]");
    }
    return m;
}

PuiseuxSeries readTerms(const json& j, const std::string& where) {
    PuiseuxSeries::TermMap terms;
    readArray(j, where);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string w = where + "[" + std::to_string(i) + "]";
        terms[readRational(field(j[i], "exponent", w), w + ".exponent")] +=
            readComplex(field(j[i], "coefficient", w), w + ".coefficient");
    }
    return PuiseuxSeries(std::move(terms));
}

std::string formatDouble(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

json analyzeReport(const std::string& operatorText, const AnalyzeOptions& opts) {
    if (opts.order < 1) throw DomainError("--order must be at least 1");
    const DiffOp parsed = parseOperator(operatorText);
    const DiffOp p = opts.atInfinity ? atInfinity(parsed) : parsed;
    const bool inf = opts.atInfinity;
    const std::string var = inf ? "w" : "z";

    json rep;
    rep["operator"] = operatorText;
    rep["parsed"] = parsed.toString();
    rep["point"] = inf ? "inf" : "0";
    rep["analysisOperator"] = p.toString();
    rep["coordinate"] = inf ? "w = 1/z" : "z";
    rep["fuchsian"] = fuchsianTest(p);

    const NewtonPolygon np = newtonPolygon(p);
    json pts = json::array(), hull = json::array(), edges = json::array();
    for (const auto& [k, o] : np.points) pts.push_back(json{{"k", k}, {"ord", toJson(o)}});
    for (const auto& [k, o] : np.hull) hull.push_back(json{{"k", k}, {"ord", toJson(o)}});
    for (const auto& e : np.edges)
        edges.push_back(json{{"slope", toJson(e.slope)}, {"length", e.length}, {"start", e.startIndex}});
    rep["newton"] = json{{"points", pts}, {"hull", hull}, {"edges", edges}};
    rep["irregularity"] = toJson(irregularity(p));

    const double R = opts.radius > 0 ? (inf ? 1.0 / opts.radius : opts.radius) : 0.0;
    const StokesPipeline pipe = runStokesPipeline(p, R, opts.order, opts.halfWidth, opts.numeric);
    const HltDatum& h = pipe.hlt;
    rep["ramification"] = h.ramification;

    json factors = json::array();
    for (const auto& fm : h.factors) {
        factors.push_back(json{{"terms", termsJson(fm.factor.body())},
                               {"original", termsJson(fm.factor.body(), inf)},
                               {"text", fm.factor.body().toString(var)},
                               {"multiplicity", fm.multiplicity},
                               {"illConditioned", fm.illConditioned}});
    }
    rep["factors"] = factors;

    json sols = json::array();
    for (const auto& s0 : h.solutions) {
        const FormalSolution s = s0.truncated(opts.order);
        json series = json::array();
        for (const auto& a : s.series) series.push_back(a.toString(var));
        sols.push_back(json{{"factor", termsJson(s.factor.body())},
                            {"exponent", toJson(s.exponent)},
                            {"leadingLogPower", s.leadingLogPower},
                            {"logDepth", s.logDepth},
                            {"series", series},
                            {"truncation", s.truncation},
                            {"ramification", s.ramification}});
    }
    rep["formalSolutions"] = sols;
    rep["galoisOrbits"] = h.galoisOrbits;

    const StokesMatrixSet& st = pipe.stokes;
    json st_j;
    st_j["computed"] = opts.numeric;
    st_j["trivial"] = pipe.directions.trivial;
    json dirs = json::array();
    for (const auto& d : pipe.directions.directions) dirs.push_back(d.theta);
    st_j["directions"] = dirs;
    json sectors = json::array();
    for (const auto& s : pipe.cover) sectors.push_back(sectorJson(s));
    st_j["sectors"] = sectors;
    json patterns = json::array();
    for (const auto& o : overlaps(pipe.cover, st.period())) patterns.push_back(dominancePattern(st.factors, o).toString());
    st_j["patterns"] = patterns;
    json mats = json::array();
    for (const auto& m : st.matrices) mats.push_back(toJson(m));
    st_j["matrices"] = mats;
    json basis = json::array();
    for (std::size_t i = 0; i < st.factors.size(); ++i)
        basis.push_back(json{{"factor", termsJson(st.factors[i].body())}, {"exponent", toJson(st.exponents[i])}});
    st_j["basis"] = basis;
    st_j["matchRadius"] = pipe.matchRadius;
    st_j["matchOrder"] = pipe.matchOrder;
    st_j["halfWidth"] = pipe.cover.size() > 1
                            ? (opts.halfWidth > 0 ? opts.halfWidth : defaultOverlapHalfWidth(pipe.directions))
                            : 0.0;
    rep["stokes"] = st_j;

    rep["formalMonodromy"] = toJson(st.formalMonodromy);
    if (opts.numeric || pipe.cover.size() < 2) rep["monodromy"] = toJson(monodromyFromStokes(st));
    else rep["monodromy"] = nullptr;
    rep["warnings"] = h.warnings;
    return rep;
}

json CheckResult::toJson() const { return json{{"valid", valid}, {"violations", violations}}; }

CheckResult checkStokes(const json& report, const json* matrices, double tol) {
    const json& st = field(report, "stokes", "report");
    StokesMatrixSet s;
    s.ramification = readInteger(field(report, "ramification", "report"), "report.ramification");
    if (s.ramification < 1) schemaFail("report.ramification", "must be positive");

    const json& sectors = readArray(field(st, "sectors", "stokes"), "stokes.sectors");
    for (std::size_t i = 0; i < sectors.size(); ++i) {
        const std::string w = "stokes.sectors[" + std::to_string(i) + "]";
        s.cover.push_back(Sector{readNumber(field(sectors[i], "lo", w), w + ".lo"),
                                 readNumber(field(sectors[i], "hi", w), w + ".hi"),
                                 static_cast<int>(readInteger(field(sectors[i], "determination", w), w))});
    }
    const json& basis = readArray(field(st, "basis", "stokes"), "stokes.basis");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const std::string w = "stokes.basis[" + std::to_string(i) + "]";
        try {
            s.factors.emplace_back(readTerms(field(basis[i], "factor", w), w + ".factor"));
        } catch (const DomainError& e) {
            schemaFail(w + ".factor", e.what());
        }
        s.exponents.push_back(readComplex(field(basis[i], "exponent", w), w + ".exponent"));
    }
    s.formalMonodromy = readMatrix(field(report, "formalMonodromy", "report"), "report.formalMonodromy");

    const json& src = matrices ? field(*matrices, "matrices", "matrices file") : field(st, "matrices", "stokes");
    readArray(src, "matrices");
    for (std::size_t i = 0; i < src.size(); ++i) s.matrices.push_back(readMatrix(src[i], "matrices[" + std::to_string(i) + "]"));

    // A single-sector cover has no transitions; identity candidates are the same datum.
    if (s.cover.size() == 1 && !s.matrices.empty()) {
        const int m = s.rank();
        bool identity = true;
        for (const auto& M : s.matrices)
            identity = identity && M.rows() == m && M.cols() == m &&
                       (M - Eigen::MatrixXcd::Identity(m, m)).cwiseAbs().maxCoeff() <= tol;
        if (identity) s.matrices.clear();
    }

    CheckResult out;
    const ValidationReport a = validateStokesSet(s, tol);
    out.violations = a.violations;
    if (a.valid) {
        const ValidationReport b = validateSLS(fromStokesSet(s), tol);
        for (const auto& v : b.violations)
            if (std::find(out.violations.begin(), out.violations.end(), v) == out.violations.end())
                out.violations.push_back(v);
    }
    out.valid = out.violations.empty();
    return out;
}

PlotData plotCurves(const std::string& operatorText, const PlotOptions& opts) {
    if (!(opts.radius > 0)) throw DomainError("--radius must be positive");
    if (opts.samples < 1) throw DomainError("--samples must be positive");
    const DiffOp parsed = parseOperator(operatorText);
    const DiffOp p = opts.atInfinity ? atInfinity(parsed) : parsed;
    const auto fms = exponentialFactors(p);
    std::vector<ExponentialFactor> fs;
    std::int64_t d = 1;
    for (const auto& fm : fms) {
        fs.push_back(fm.factor);
        d = lcm64(d, fm.factor.ramification());
    }
    const double logR = std::log(opts.radius);
    const double period = kTwoPi * static_cast<double>(d);
    const int n = opts.samples;
    const std::size_t m = fs.size();

    std::vector<double> thetas(static_cast<std::size_t>(n));
    std::vector<std::vector<double>> re(static_cast<std::size_t>(n), std::vector<double>(m));
    double amp = 0.0;
    for (int i = 0; i < n; ++i) {
        const double th = period * i / n;
        thetas[static_cast<std::size_t>(i)] = th;
        // The user point R e^{i theta}; at infinity the analysis coordinate is its inverse.
        const Complex lp = opts.atInfinity ? Complex(-logR, -th) : Complex(logR, th);
        for (std::size_t j = 0; j < m; ++j) {
            const double v = fs[j].body().evalLog(lp).real();
            re[static_cast<std::size_t>(i)][j] = v;
            amp = std::max(amp, std::abs(v));
        }
    }
    const double sigma = opts.sigma > 0 ? opts.sigma : (amp > 0 ? 0.5 / amp : 1.0);

    PlotData out;
    std::ostringstream csv;
    csv << "theta";
    for (std::size_t j = 0; j < m; ++j) csv << ",curve_" << j + 1;
    csv << ",dominant_index\n";
    std::vector<std::vector<double>> curves(m);
    for (int i = 0; i < n; ++i) {
        const auto& row = re[static_cast<std::size_t>(i)];
        csv << formatDouble(thetas[static_cast<std::size_t>(i)]);
        std::size_t dom = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double c = opts.rho + sigma * row[j];
            curves[j].push_back(c);
            csv << ',' << formatDouble(c);
            if (row[j] > row[dom]) dom = j;
        }
        csv << ',' << dom + 1 << '\n';
    }
    out.csv = csv.str();

    // Polar SVG: one path per curve, Stokes directions as dashed rays.
    const DirectionSet dirs = stokesDirections(fs, d);
    double rmax = 0.0;
    for (const auto& c : curves)
        for (double v : c) rmax = std::max(rmax, std::abs(v));
    if (!(rmax > 0)) rmax = 1.0;
    const double size = 400.0, cx = size / 2, cy = size / 2, scale = 0.45 * size / rmax;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    std::ostringstream svg;
    svg << std::setprecision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n";
    svg << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << opts.rho * scale
        << "\" fill=\"none\" stroke=\"#bbbbbb\"/>\n";
    for (const auto& dir : dirs.directions) {
        const double th = opts.atInfinity ? period - dir.theta : dir.theta;
        svg << "<line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << cx + 0.48 * size * std::cos(th) << "\" y2=\""
            << cy - 0.48 * size * std::sin(th) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
    }
    for (std::size_t j = 0; j < m; ++j) {
        svg << "<path fill=\"none\" stroke=\"" << colors[j % 6] << "\" d=\"";
        for (int i = 0; i <= n; ++i) {
            const std::size_t k = static_cast<std::size_t>(i % n);
            const double th = i < n ? thetas[k] : period;
            const double r = curves[j][k] * scale;
            svg << (i == 0 ? 'M' : 'L') << cx + r * std::cos(th) << ',' << cy - r * std::sin(th) << ' ';
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    out.svg = svg.str();
    return out;
}

std::string dumpJson(const json& j, int indent) { return j.dump(indent < 0 ? -1 : indent) + "\n"; }

}  // namespace rhlab
