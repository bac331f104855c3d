#pragma once

#include "opdet/fredholm.hpp"
#include "opdet/kernels.hpp"
#include "opdet/symbol.hpp"
#include "opdet/wienerhopf.hpp"

#include <string>
#include <vector>

namespace opdet {

struct SweepConfig {
    KernelSpec spec{Family::toda, 0.05};
    double alpha_min = 4.0;
    double alpha_max = 12.0;
    double alpha_step = 1.0;
    int n_per_panel = 20;
    double tol = 1e-8;
    double domain_l = 0.0;      // > 0 forces the direct dets onto [-L, L]
    std::string format = "csv"; // "csv" or "json"
    std::string out;            // output path; empty writes to stdout

    std::vector<double> alphas() const; // empty when alpha_min > alpha_max
    void validate() const;              // throws std::invalid_argument
};

// One sweep line. predicted = G^{2 alpha} E det(I+K_1) det(I+K_2) is formed
// in log space; `predicted` itself may overflow to inf at extreme alpha while
// log_predicted and ratio stay finite.
struct ReportRow {
    double alpha = 0.0;
    double det_direct = 1.0;
    double log_det_direct = 0.0;
    double log_g = 0.0;
    double log_e = 0.0;
    double det_corr1 = 1.0;
    double det_corr2 = 1.0;
    double predicted = 1.0;
    double log_predicted = 0.0;
    double ratio = 1.0;
    double err_estimate = 0.0;
};

ReportRow assemble_row(double alpha, const DetResult& direct, double log_g, double log_e,
                       const DetResult& corr1, const DetResult& corr2);

// Alpha-independent part of the prediction.
struct SweepConstants {
    double log_g = 0.0;
    double log_e = 0.0;
    DetResult corr1;
    DetResult corr2;
};

struct SweepResult {
    SweepConfig config;
    SweepConstants constants;
    std::vector<ReportRow> rows;
};

// Full pipeline: symbol + index check, Szego constants, the two correction
// determinants, then one refined finite-size determinant per alpha. Throws
// IndexError when the symbol is inadmissible and ConvergenceError when a
// determinant fails to settle within its refinement budget.
SweepResult run_sweep(const SweepConfig& cfg);

// Deterministic serializations (identical bytes for identical results).
std::string write_csv(const SweepResult& result);
std::string write_json(const SweepResult& result);

// Serialize per the config's format and write to its `out` destination
// (stdout when empty). Throws IoError on unwritable paths.
void emit_report(const SweepResult& result);

struct ConstantsOptions {
    SymbolOptions symbol;
    EOperatorOptions eop;
    CorrectionOptions corr;
    TraceOptions trace;
    double integrate_tol = 1e-6;
};

// Every constant the asymptotics needs, each computed by at least one
// independent route so disagreements surface as data.
struct ConstantsRecord {
    IndexReport index;
    double log_g = 0.0;
    double log_e = 0.0;
    double e_integral = 1.0;        // exp(log_e)
    double e_operator = 1.0;        // finite section of the operator product
    double e_route_rel_diff = 0.0;
    DetResult corr1;
    DetResult corr2;
    double integrated_log_corr1 = 0.0; // log det(I+K_1) via the trace route
    double integration_vs_det = 0.0;   // |integrated - log corr1.value|
    double reflection_diff = 0.0;
    double critical_lambda = 0.0;      // bisection on min Re sigma
};

ConstantsRecord constants_record(const KernelSpec& spec, const ConstantsOptions& opts = {});

struct SelftestFaults {
    double hat_k_bias = 0.0; // perturbs the closed-form transform check
};

struct SelftestEntry {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double bound = 0.0;
};

struct SelftestReport {
    std::vector<SelftestEntry> entries;
    bool all_pass = false;
};

// Fast end-to-end confidence run over pinned reference values.
SelftestReport selftest(const SelftestFaults& faults = {});

} // namespace opdet
