#include "opdet/sweep.hpp"

#include "opdet/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace opdet {

namespace {

void append_g17(std::string& s, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    s += buf;
}

const char* family_name(Family f) { return f == Family::toda ? "toda" : "window"; }

nlohmann::ordered_json row_json(const ReportRow& row) {
    nlohmann::ordered_json j;
    j["alpha"] = row.alpha;
    j["det_direct"] = row.det_direct;
    j["logG"] = row.log_g;
    j["logE"] = row.log_e;
    j["det_corr1"] = row.det_corr1;
    j["det_corr2"] = row.det_corr2;
    j["predicted"] = row.predicted;
    j["ratio"] = row.ratio;
    j["err_estimate"] = row.err_estimate;
    return j;
}

} // namespace

std::vector<double> SweepConfig::alphas() const {
    std::vector<double> out;
    if (alpha_min > alpha_max) return out;
    const auto count =
        static_cast<std::size_t>(std::floor((alpha_max - alpha_min) / alpha_step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(alpha_min + static_cast<double>(i) * alpha_step);
    return out;
}

void SweepConfig::validate() const {
    if (!(alpha_step > 0.0)) throw std::invalid_argument("sweep: need alpha-step > 0");
    if (!(alpha_min > 0.0)) throw std::invalid_argument("sweep: need alpha-min > 0");
    if (n_per_panel < 1) throw std::invalid_argument("sweep: need panel-n >= 1");
    if (!(tol > 0.0) || !(tol < 1.0)) throw std::invalid_argument("sweep: need tol in (0, 1)");
    if (format != "csv" && format != "json")
        throw std::invalid_argument("sweep: format must be csv or json");
}

ReportRow assemble_row(double alpha, const DetResult& direct, double log_g, double log_e,
                       const DetResult& corr1, const DetResult& corr2) {
    ReportRow row;
    row.alpha = alpha;
    row.det_direct = direct.value;
    row.log_det_direct = direct.log_value;
    row.log_g = log_g;
    row.log_e = log_e;
    row.det_corr1 = corr1.value;
    row.det_corr2 = corr2.value;
    row.log_predicted = 2.0 * alpha * log_g + log_e + corr1.log_value + corr2.log_value;
    row.predicted = std::exp(row.log_predicted); // may overflow; the log stays usable
    const int sign = direct.sign * corr1.sign * corr2.sign;
    row.ratio = sign * std::exp(direct.log_value - row.log_predicted);
    row.err_estimate = direct.error_estimate;
    return row;
}

SweepResult run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult res;
    res.config = cfg;

    const SymbolData sd = build_symbol(cfg.spec);
    const IndexReport rep = check_index(sd);
    if (!rep.ok) throw IndexError("run_sweep: " + rep.detail);
    const SzegoConstants sc = szego_constants(sd);
    res.constants.log_g = sc.log_g;
    res.constants.log_e = sc.log_e;

    CorrectionOptions copt;
    copt.n_per_panel = cfg.n_per_panel;
    res.constants.corr1 = correction_det(cfg.spec, CorrectionKind::k11, copt);
    res.constants.corr2 = correction_det(cfg.spec, CorrectionKind::k22, copt);

    RefineOptions ropt;
    ropt.base_n = cfg.n_per_panel;
    for (const double alpha : cfg.alphas()) {
        double lo, hi;
        if (cfg.domain_l > 0.0) {
            lo = -cfg.domain_l;
            hi = cfg.domain_l;
        } else {
            const DecayProfile box = decay_radius(cfg.spec, alpha, 1e-12);
            if (box.vanishes) {
                lo = -1.0;
                hi = 1.0;
            } else if (cfg.spec.family == Family::window) {
                // the kernel's jump at +/- alpha must land on a panel edge
                lo = box.lo;
                hi = box.hi;
            } else {
                lo = box.lo - 1.0;
                hi = box.hi + 1.0;
            }
        }
        const DetResult d = det_refined(
            [&cfg, alpha](double x, double y) {
                return eval_window_kernel(cfg.spec, alpha, x, y);
            },
            lo, hi, cfg.tol, ropt);
        if (d.flags.non_convergent) {
            char buf[96];
            std::snprintf(buf, sizeof buf,
                          "run_sweep: determinant not converged at alpha = %.6g", alpha);
            throw ConvergenceError(buf);
        }
        res.rows.push_back(
            assemble_row(alpha, d, sc.log_g, sc.log_e, res.constants.corr1, res.constants.corr2));
    }
    return res;
}

std::string write_csv(const SweepResult& result) {
    std::string s = "alpha,det_direct,logG,logE,det_corr1,det_corr2,predicted,ratio,"
                    "err_estimate\n";
    for (const ReportRow& row : result.rows) {
        const double fields[] = {row.alpha,      row.det_direct, row.log_g,
                                 row.log_e,      row.det_corr1,  row.det_corr2,
                                 row.predicted,  row.ratio,      row.err_estimate};
        for (std::size_t i = 0; i < std::size(fields); ++i) {
            if (i) s += ',';
            append_g17(s, fields[i]);
        }
        s += '\n';
    }
    return s;
}

std::string write_json(const SweepResult& result) {
    nlohmann::ordered_json j;
    j["family"] = family_name(result.config.spec.family);
    j["lambda"] = result.config.spec.lambda;
    j["alpha_min"] = result.config.alpha_min;
    j["alpha_max"] = result.config.alpha_max;
    j["alpha_step"] = result.config.alpha_step;
    j["n_per_panel"] = result.config.n_per_panel;
    j["tol"] = result.config.tol;
    j["constants"] = {
        {"logG", result.constants.log_g},
        {"logE", result.constants.log_e},
        {"det_corr1", result.constants.corr1.value},
        {"det_corr2", result.constants.corr2.value},
        {"corr_cross_check",
         std::max(result.constants.corr1.cross_check, result.constants.corr2.cross_check)},
    };
    j["rows"] = nlohmann::ordered_json::array();
    for (const ReportRow& row : result.rows) j["rows"].push_back(row_json(row));
    return j.dump(2) + "\n";
}

void emit_report(const SweepResult& result) {
    const std::string body =
        result.config.format == "json" ? write_json(result) : write_csv(result);
    if (result.config.out.empty()) {
        std::cout << body;
        std::cout.flush();
        if (!std::cout) throw IoError("emit_report: stdout write failed");
        return;
    }
    std::ofstream f(result.config.out, std::ios::binary);
    if (!f) throw IoError("emit_report: cannot open '" + result.config.out + "' for writing");
    f << body;
    f.flush();
    if (!f) throw IoError("emit_report: write to '" + result.config.out + "' failed");
}

ConstantsRecord constants_record(const KernelSpec& spec, const ConstantsOptions& opts) {
    ConstantsRecord rec;
    const SymbolData sd = build_symbol(spec, opts.symbol);
    rec.index = check_index(sd);
    rec.critical_lambda = critical_coupling(spec.family);
    if (!rec.index.ok) {
        char buf[72];
        std::snprintf(buf, sizeof buf, " (critical coupling for this family: %.9g)",
                      rec.critical_lambda);
        throw IndexError("constants_record: " + rec.index.detail + buf);
    }
    const SzegoConstants sc = szego_constants(sd);
    rec.log_g = sc.log_g;
    rec.log_e = sc.log_e;
    rec.e_integral = sc.e;
    rec.e_operator = e_operator_route(sd, opts.eop);
    rec.e_route_rel_diff = std::abs(rec.e_operator - rec.e_integral) / std::abs(rec.e_integral);
    rec.corr1 = correction_det(spec, CorrectionKind::k11, opts.corr);
    rec.corr2 = correction_det(spec, CorrectionKind::k22, opts.corr);
    rec.integrated_log_corr1 = integrate_logdet(spec, 1.0, opts.integrate_tol, opts.trace);
    rec.integration_vs_det = std::abs(rec.integrated_log_corr1 - rec.corr1.log_value);
    rec.reflection_diff = std::abs(rec.corr1.value - rec.corr2.value);
    return rec;
}

} // namespace opdet
