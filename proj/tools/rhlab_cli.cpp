// rhlab-cli: analyze | check-stokes | plot

#include "rhlab/rhlab.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

namespace {

struct CString {
    char* p = nullptr;
    ~CString() { rhlab_string_free(p); }
};

int exitCode(rhlab_status s) {
    switch (s) {
        case RHLAB_OK: return 0;
        case RHLAB_ERR_PARSE: return 2;
        case RHLAB_ERR_INVALID: return 4;
        default: return 3;
    }
}

int reportError(rhlab_status s) {
    nlohmann::json e{{"error",
                      {{"kind", rhlab_last_error_kind()},
                       {"message", rhlab_last_error()},
                       {"status", static_cast<int>(s)}}}};
    if (rhlab_last_error_line() > 0) {
        e["error"]["line"] = rhlab_last_error_line();
        e["error"]["column"] = rhlab_last_error_column();
    }
    std::cerr << e.dump() << '\n';
    return exitCode(s);
}

int ioError(const std::string& msg) {
    std::cerr << nlohmann::json{{"error", {{"kind", "io"}, {"message", msg}, {"status", 2}}}}.dump() << '\n';
    return 2;
}

bool readFile(const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    out = ss.str();
    return true;
}

bool parsePoint(const std::string& at) { return at == "inf"; }

struct OpHandle {
    rhlab_operator* p = nullptr;
    ~OpHandle() { rhlab_operator_free(p); }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local analysis of linear differential operators at a singular point"};
    app.set_version_flag("--version", std::string(rhlab_version()));
    app.require_subcommand(1);

    std::string opText, at = "0";
    int order = 20, indent = 2;
    bool noNumeric = false;
    double radius = 0.0, halfWidth = 0.0;
    unsigned long seed = 0;

    auto* analyze = app.add_subcommand("analyze", "Run the analysis pipeline and print a JSON report");
    analyze->add_option("operator", opText, "Operator text, e.g. \"D^2 - z\"")->required();
    analyze->add_option("--at", at, "Singular point")->check(CLI::IsMember({"0", "inf"}));
    analyze->add_option("--order", order, "Truncation order N")->check(CLI::PositiveNumber);
    analyze->add_flag("--no-numeric", noNumeric, "Skip Stokes matrices");
    analyze->add_option("--radius", radius, "Matching radius (|z| at infinity)")->check(CLI::NonNegativeNumber);
    analyze->add_option("--half-width", halfWidth, "Overlap half-width")->check(CLI::NonNegativeNumber);
    analyze->add_option("--json-indent", indent, "Indentation (-1 for compact)");
    analyze->add_option("--seed", seed, "Seed for stochastic sampling (unused by the deterministic pipeline)");

    std::string reportPath, matricesPath;
    double tolerance = 1e-6;
    auto* check = app.add_subcommand("check-stokes", "Validate the Stokes data of a report");
    check->add_option("report", reportPath, "Report JSON from analyze")->required();
    check->add_option("matrices", matricesPath, "Candidate matrices JSON {\"matrices\": [...]}");
    check->add_option("--tolerance", tolerance, "Validation tolerance")->check(CLI::PositiveNumber);
    check->add_option("--json-indent", indent, "Indentation (-1 for compact)");

    std::string plotAt = "0", svgPath;
    double plotRadius = 10.0, rho = 2.0, sigma = 0.0;
    int samples = 720;
    auto* plot = app.add_subcommand("plot", "Print CSV of rho + sigma Re f_j on the circle of radius R");
    plot->add_option("operator", opText, "Operator text")->required();
    plot->add_option("--at", plotAt, "Singular point")->check(CLI::IsMember({"0", "inf"}));
    plot->add_option("--radius", plotRadius, "Circle radius R")->check(CLI::PositiveNumber);
    plot->add_option("--rho", rho, "Offset rho");
    plot->add_option("--sigma", sigma, "Scale sigma (0: amplitude 0.5)")->check(CLI::NonNegativeNumber);
    plot->add_option("--samples", samples, "Number of rows")->check(CLI::PositiveNumber);
    plot->add_option("--svg", svgPath, "Also write a polar SVG to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (analyze->parsed()) {
        OpHandle op;
        if (rhlab_status s = rhlab_operator_parse(opText.c_str(), &op.p); s != RHLAB_OK) return reportError(s);
        rhlab_analyze_options o;
        rhlab_analyze_options_init(&o);
        o.at_infinity = parsePoint(at) ? 1 : 0;
        o.order = order;
        o.numeric = noNumeric ? 0 : 1;
        o.radius = radius;
        o.half_width = halfWidth;
        rhlab_report* rep = nullptr;
        if (rhlab_status s = rhlab_analyze(op.p, &o, &rep); s != RHLAB_OK) return reportError(s);
        std::unique_ptr<rhlab_report, void (*)(rhlab_report*)> guard(rep, rhlab_report_free);
        CString text;
        if (rhlab_status s = rhlab_report_json(rep, indent, &text.p); s != RHLAB_OK) return reportError(s);
        std::cout << text.p;
        return 0;
    }

    if (check->parsed()) {
        std::string report, matrices;
        if (!readFile(reportPath, report)) return ioError("cannot read " + reportPath);
        if (!matricesPath.empty() && !readFile(matricesPath, matrices)) return ioError("cannot read " + matricesPath);
        CString result;
        const rhlab_status s = rhlab_check_stokes(report.c_str(), matricesPath.empty() ? nullptr : matrices.c_str(),
                                                  tolerance, &result.p);
        if (s != RHLAB_OK && s != RHLAB_ERR_INVALID) return reportError(s);
        std::cout << nlohmann::json::parse(result.p).dump(indent) << '\n';
        return exitCode(s);
    }

    if (plot->parsed()) {
        OpHandle op;
        if (rhlab_status s = rhlab_operator_parse(opText.c_str(), &op.p); s != RHLAB_OK) return reportError(s);
        rhlab_plot_options o;
        rhlab_plot_options_init(&o);
        o.at_infinity = parsePoint(plotAt) ? 1 : 0;
        o.radius = plotRadius;
        o.rho = rho;
        o.sigma = sigma;
        o.samples = samples;
        CString csv, svg;
        if (rhlab_status s = rhlab_plot(op.p, &o, &csv.p, svgPath.empty() ? nullptr : &svg.p); s != RHLAB_OK)
            return reportError(s);
        std::cout << csv.p;
        if (!svgPath.empty()) {
            std::ofstream out(svgPath, std::ios::binary);
            if (!out) return ioError("cannot write " + svgPath);
            out << svg.p;
        }
        return 0;
    }
    return 0;
}
