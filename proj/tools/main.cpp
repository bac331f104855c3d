#include "opdet/errors.hpp"
#include "opdet/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

opdet::Family parse_family(const std::string& name) {
    return name == "window" ? opdet::Family::window : opdet::Family::toda;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// CLI11 reads a config file only for the app it parses directly, never for a
// subcommand's own --config option, so the key=value file is applied here.
// Keys name long options without the leading dashes; options already given on
// the command line keep their values (flags override the file).
void apply_config(CLI::App* cmd) {
    CLI::Option* cfg_opt = cmd->get_config_ptr();
    if (cfg_opt == nullptr || cfg_opt->count() == 0) return;
    const auto path = cfg_opt->as<std::string>();
    std::ifstream in(path);
    if (!in) throw opdet::IoError("config file unreadable: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        const auto at = path + ":" + std::to_string(lineno);
        const auto eq = text.find('=');
        if (eq == std::string::npos || trim(text.substr(0, eq)).empty())
            throw opdet::IoError(at + ": expected key=value");
        const std::string key = trim(text.substr(0, eq));
        CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt == nullptr || opt == cfg_opt)
            throw opdet::IoError(at + ": unknown key '" + key + "'");
        if (opt->count() > 0) continue;
        std::string val = trim(text.substr(eq + 1));
        if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') &&
            val.back() == val.front())
            val = val.substr(1, val.size() - 2);
        opt->add_result(val);
        opt->run_callback(); // validate and convert into the bound variable
    }
}

void write_text(const std::string& body, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << body;
        std::cout.flush();
        if (!std::cout) throw opdet::IoError("stdout write failed");
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw opdet::IoError("cannot open '" + out_path + "' for writing");
    f << body;
    f.flush();
    if (!f) throw opdet::IoError("write to '" + out_path + "' failed");
}

std::string constants_text(const opdet::KernelSpec& spec, const opdet::ConstantsRecord& rec) {
    char buf[256];
    std::string s;
    const auto line = [&s, &buf](const char* name, const char* fmt, auto value) {
        char val[64];
        std::snprintf(val, sizeof val, fmt, value);
        std::snprintf(buf, sizeof buf, "%-22s %s\n", name, val);
        s += buf;
    };
    line("family", "%s", spec.family == opdet::Family::toda ? "toda" : "window");
    line("lambda", "%.17g", spec.lambda);
    line("sigma_min_abs", "%.17g", rec.index.min_abs);
    line("winding", "%d", rec.index.winding);
    line("logG", "%.17g", rec.log_g);
    line("logE", "%.17g", rec.log_e);
    line("E_integral", "%.17g", rec.e_integral);
    line("E_operator", "%.17g", rec.e_operator);
    line("E_route_rel_diff", "%.3g", rec.e_route_rel_diff);
    line("det_corr1", "%.17g", rec.corr1.value);
    line("det_corr2", "%.17g", rec.corr2.value);
    line("corr_cross_check", "%.3g",
         std::max(rec.corr1.cross_check, rec.corr2.cross_check));
    line("log_corr1_via_trace", "%.17g", rec.integrated_log_corr1);
    line("trace_vs_det", "%.3g", rec.integration_vs_det);
    line("reflection_diff", "%.3g", rec.reflection_diff);
    line("critical_lambda", "%.17g", rec.critical_lambda);
    return s;
}

std::string constants_json(const opdet::KernelSpec& spec, const opdet::ConstantsRecord& rec) {
    nlohmann::ordered_json j;
    j["family"] = spec.family == opdet::Family::toda ? "toda" : "window";
    j["lambda"] = spec.lambda;
    j["sigma_min_abs"] = rec.index.min_abs;
    j["winding"] = rec.index.winding;
    j["logG"] = rec.log_g;
    j["logE"] = rec.log_e;
    j["E_integral"] = rec.e_integral;
    j["E_operator"] = rec.e_operator;
    j["E_route_rel_diff"] = rec.e_route_rel_diff;
    j["det_corr1"] = rec.corr1.value;
    j["det_corr2"] = rec.corr2.value;
    j["corr_cross_check"] = std::max(rec.corr1.cross_check, rec.corr2.cross_check);
    j["log_corr1_via_trace"] = rec.integrated_log_corr1;
    j["trace_vs_det"] = rec.integration_vs_det;
    j["reflection_diff"] = rec.reflection_diff;
    j["critical_lambda"] = rec.critical_lambda;
    return j.dump(2) + "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fredholm determinants of trace-class kernels and their "
                 "factorization asymptotics"};
    app.require_subcommand(1);

    opdet::SweepConfig cfg;
    std::string sweep_family = "toda";
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Finite-size determinants across alpha against the predicted product");
    sweep->add_option("--family", sweep_family, "Kernel family")
        ->check(CLI::IsMember({"toda", "window"}));
    sweep->add_option("--lambda", cfg.spec.lambda, "Coupling constant");
    sweep->add_option("--alpha-min", cfg.alpha_min, "First alpha");
    sweep->add_option("--alpha-max", cfg.alpha_max, "Last alpha (inclusive)");
    sweep->add_option("--alpha-step", cfg.alpha_step, "Alpha increment");
    sweep->add_option("--panel-n", cfg.n_per_panel, "Quadrature nodes per unit panel");
    sweep->add_option("--tol", cfg.tol, "Refinement tolerance for the determinants");
    sweep->add_option("--domain-L", cfg.domain_l,
                      "Force the determinant domain to [-L, L] (0 = automatic)");
    sweep->add_option("--format", cfg.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", cfg.out, "Output path (default stdout)");
    sweep->set_config("--config", "", "key=value file; command-line flags override");

    std::string const_family = "toda";
    double const_lambda = 0.05;
    int const_panel_n = 0;
    double const_domain_l = 0.0;
    std::string const_format = "text";
    std::string const_out;
    CLI::App* consts = app.add_subcommand(
        "constants", "Factorization constants with independent cross-routes");
    consts->add_option("--family", const_family, "Kernel family")
        ->check(CLI::IsMember({"toda", "window"}));
    consts->add_option("--lambda", const_lambda, "Coupling constant");
    consts->add_option("--panel-n", const_panel_n,
                       "Nodes per unit panel for the determinant routes (0 = default)");
    consts->add_option("--domain-L", const_domain_l,
                       "Section length for the operator route (0 = default)");
    consts->add_option("--format", const_format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    consts->add_option("--out", const_out, "Output path (default stdout)");
    consts->set_config("--config", "", "key=value file; command-line flags override");

    CLI::App* self = app.add_subcommand("selftest", "Fast checks against pinned references");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            apply_config(sweep);
            cfg.spec.family = parse_family(sweep_family);
            opdet::emit_report(opdet::run_sweep(cfg));
            return 0;
        }
        if (consts->parsed()) {
            apply_config(consts);
            const opdet::KernelSpec spec{parse_family(const_family), const_lambda};
            opdet::ConstantsOptions opts;
            if (const_panel_n > 0) {
                opts.corr.n_per_panel = const_panel_n;
                opts.trace.n_per_panel = const_panel_n;
            }
            if (const_domain_l > 0.0) opts.eop.domain_l = const_domain_l;
            const opdet::ConstantsRecord rec = opdet::constants_record(spec, opts);
            write_text(const_format == "json" ? constants_json(spec, rec)
                                              : constants_text(spec, rec),
                       const_out);
            return 0;
        }
        if (self->parsed()) {
            const opdet::SelftestReport rep = opdet::selftest();
            for (const opdet::SelftestEntry& e : rep.entries)
                std::printf("selftest %-28s %s  (|err| = %.3g, bound %.3g)\n", e.name.c_str(),
                            e.pass ? "ok" : "FAIL", e.measured, e.bound);
            std::printf("selftest %s\n", rep.all_pass ? "passed" : "FAILED");
            return rep.all_pass ? 0 : 1;
        }
    } catch (const opdet::IndexError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const opdet::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const opdet::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
