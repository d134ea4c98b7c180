#pragma once

#include "json.hpp"

#include <string>
#include <vector>

namespace rhlab {

struct AnalyzeOptions {
    bool atInfinity = false;
    int order = 20;          // truncation order N
    bool numeric = true;     // run stokesgeo + numint
    double radius = 0.0;     // matching radius in the user's coordinate; 0 selects the default
    double halfWidth = 0.0;  // overlap half-width; 0 selects the default
};

/// Full analysis report. Throws ParseError, DomainError or PipelineError.
nlohmann::json analyzeReport(const std::string& operatorText, const AnalyzeOptions& opts);

struct CheckResult {
    bool valid = true;
    std::vector<std::string> violations;

    nlohmann::json toJson() const;
};

/// Validates the Stokes data of a report, optionally replacing its matrices
/// with those of `matrices` ({"matrices": [...]}). Throws SchemaError on malformed input.
CheckResult checkStokes(const nlohmann::json& report, const nlohmann::json* matrices, double tol = 1e-6);

struct PlotOptions {
    bool atInfinity = false;
    double radius = 10.0;
    double rho = 2.0;
    double sigma = 0.0;  // 0 selects amplitude 0.5
    int samples = 720;
};

struct PlotData {
    std::string csv;
    std::string svg;
};

/// Rows theta, rho + sigma Re f_j(R e^{i theta}), dominant index over theta in [0, 2 pi d).
PlotData plotCurves(const std::string& operatorText, const PlotOptions& opts);

/// Canonical text of a JSON value: sorted keys, shortest round-trip doubles.
std::string dumpJson(const nlohmann::json& j, int indent);

}  // namespace rhlab
