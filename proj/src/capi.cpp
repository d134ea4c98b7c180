#include "rhlab/rhlab.h"

#include "rhlab/diffop.hpp"
#include "rhlab/error.hpp"
#include "rhlab/report.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

struct rhlab_operator {
    std::string text;
    rhlab::DiffOp op;
};

struct rhlab_report {
    nlohmann::json body;
};

namespace {

struct LastError {
    std::string message;
    std::string kind;
    int line = 0;
    int column = 0;
};

thread_local LastError g_error;

void clearError() { g_error = LastError{}; }

rhlab_status fail(rhlab_status code, const char* kind, const std::string& msg, int line = 0, int column = 0) {
    g_error = LastError{msg, kind, line, column};
    return code;
}

char* copyString(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs fn and converts exceptions into status codes.
template <class Fn>
rhlab_status guarded(Fn&& fn) {
    clearError();
    try {
        return fn();
    } catch (const rhlab::ParseError& e) {
        return fail(RHLAB_ERR_PARSE, "parse", e.what(), e.line(), e.column());
    } catch (const rhlab::SchemaError& e) {
        return fail(RHLAB_ERR_PARSE, "schema", e.what());
    } catch (const nlohmann::json::exception& e) {
        return fail(RHLAB_ERR_PARSE, "json", e.what());
    } catch (const rhlab::DomainError& e) {
        return fail(RHLAB_ERR_PIPELINE, "domain", e.what());
    } catch (const rhlab::PipelineError& e) {
        return fail(RHLAB_ERR_PIPELINE, "pipeline", e.what());
    } catch (const std::bad_alloc&) {
        return fail(RHLAB_ERR_PIPELINE, "memory", "out of memory");
    } catch (const std::exception& e) {
        return fail(RHLAB_ERR_PIPELINE, "internal", e.what());
    }
}

}  // namespace

extern "C" {

void rhlab_analyze_options_init(rhlab_analyze_options* opts) {
    if (!opts) return;
    const rhlab::AnalyzeOptions d;
    opts->at_infinity = d.atInfinity ? 1 : 0;
    opts->order = d.order;
    opts->numeric = d.numeric ? 1 : 0;
    opts->radius = d.radius;
    opts->half_width = d.halfWidth;
}

void rhlab_plot_options_init(rhlab_plot_options* opts) {
    if (!opts) return;
    const rhlab::PlotOptions d;
    opts->at_infinity = d.atInfinity ? 1 : 0;
    opts->radius = d.radius;
    opts->rho = d.rho;
    opts->sigma = d.sigma;
    opts->samples = d.samples;
}

const char* rhlab_version(void) { return "0.1.0"; }

const char* rhlab_last_error(void) { return g_error.message.c_str(); }
const char* rhlab_last_error_kind(void) { return g_error.kind.c_str(); }
int rhlab_last_error_line(void) { return g_error.line; }
int rhlab_last_error_column(void) { return g_error.column; }

rhlab_status rhlab_operator_parse(const char* text, rhlab_operator** out) {
    if (!text || !out) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    *out = nullptr;
    return guarded([&] {
        auto* op = new rhlab_operator{text, rhlab::parseOperator(text)};
        *out = op;
        return RHLAB_OK;
    });
}

void rhlab_operator_free(rhlab_operator* op) { delete op; }

int rhlab_operator_order(const rhlab_operator* op) { return op ? op->op.order() : -1; }

rhlab_status rhlab_operator_to_string(const rhlab_operator* op, char** out) {
    if (!op || !out) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    return guarded([&] {
        *out = copyString(op->op.toString());
        return RHLAB_OK;
    });
}

int rhlab_operator_is_fuchsian(const rhlab_operator* op, int at_infinity) {
    if (!op) return -1;
    int result = -1;
    guarded([&] {
        result = rhlab::fuchsianTest(at_infinity ? rhlab::atInfinity(op->op) : op->op) ? 1 : 0;
        return RHLAB_OK;
    });
    return result;
}

rhlab_status rhlab_analyze(const rhlab_operator* op, const rhlab_analyze_options* opts, rhlab_report** out) {
    if (!op || !out) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    *out = nullptr;
    rhlab_analyze_options o;
    rhlab_analyze_options_init(&o);
    if (opts) o = *opts;
    if (o.order < 1) return fail(RHLAB_ERR_ARGUMENT, "argument", "order must be at least 1");
    return guarded([&] {
        rhlab::AnalyzeOptions a;
        a.atInfinity = o.at_infinity != 0;
        a.order = o.order;
        a.numeric = o.numeric != 0;
        a.radius = o.radius;
        a.halfWidth = o.half_width;
        *out = new rhlab_report{rhlab::analyzeReport(op->text, a)};
        return RHLAB_OK;
    });
}

void rhlab_report_free(rhlab_report* rep) { delete rep; }

rhlab_status rhlab_report_json(const rhlab_report* rep, int indent, char** out) {
    if (!rep || !out) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    return guarded([&] {
        *out = copyString(rhlab::dumpJson(rep->body, indent));
        return RHLAB_OK;
    });
}

rhlab_status rhlab_check_stokes(const char* report_json, const char* matrices_json, double tol, char** result_json) {
    if (!report_json || !result_json) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    if (!(tol > 0)) return fail(RHLAB_ERR_ARGUMENT, "argument", "tolerance must be positive");
    *result_json = nullptr;
    return guarded([&] {
        const auto report = nlohmann::json::parse(report_json);
        nlohmann::json mats;
        if (matrices_json) mats = nlohmann::json::parse(matrices_json);
        const rhlab::CheckResult r = rhlab::checkStokes(report, matrices_json ? &mats : nullptr, tol);
        *result_json = copyString(rhlab::dumpJson(r.toJson(), -1));
        if (r.valid) return RHLAB_OK;
        fail(RHLAB_ERR_INVALID, "invalid", r.violations.empty() ? "invalid Stokes data" : r.violations.front());
        return RHLAB_ERR_INVALID;
    });
}

rhlab_status rhlab_plot(const rhlab_operator* op, const rhlab_plot_options* opts, char** csv, char** svg) {
    if (!op || !csv) return fail(RHLAB_ERR_ARGUMENT, "argument", "null argument");
    rhlab_plot_options o;
    rhlab_plot_options_init(&o);
    if (opts) o = *opts;
    if (o.samples < 1 || !(o.radius > 0)) return fail(RHLAB_ERR_ARGUMENT, "argument", "samples and radius must be positive");
    *csv = nullptr;
    if (svg) *svg = nullptr;
    return guarded([&] {
        rhlab::PlotOptions p;
        p.atInfinity = o.at_infinity != 0;
        p.radius = o.radius;
        p.rho = o.rho;
        p.sigma = o.sigma;
        p.samples = o.samples;
        const rhlab::PlotData d = rhlab::plotCurves(op->text, p);
        *csv = copyString(d.csv);
        if (svg) *svg = copyString(d.svg);
        return RHLAB_OK;
    });
}

void rhlab_string_free(char* s) { std::free(s); }

}  // extern "C"
