// useries: tuning, inspection and error sweeps for the u-series Coulomb
// decomposition. Exit codes: 0 success, 1 numerical failure, 2 usage or
// infeasible request.

#include "useries/error.hpp"
#include "useries/estimators.hpp"
#include "useries/measure.hpp"
#include "useries/planner.hpp"
#include "useries/reference.hpp"
#include "useries/serialize.hpp"
#include "useries/sog.hpp"
#include "useries/system.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace useries;

class UsageError : public Error {
public:
    using Error::Error;
};

struct ParamFlags {
    std::optional<double> b;
    std::optional<double> sigma;
    std::optional<int> M;
    int l_min = 0;
    std::optional<double> r_c;
    std::optional<double> omega;
    std::string continuity = "c0";
    std::string params_file;

    void add(CLI::App& cmd) {
        cmd.add_option("--b", b, "Base b > 1");
        cmd.add_option("--sigma", sigma, "Width scale sigma (A)");
        cmd.add_option("--M", M, "Index of the widest Gaussian kept");
        cmd.add_option("--lmin", l_min, "Index of the narrowest Gaussian kept");
        cmd.add_option("--rc", r_c, "Prescribed cutoff (A); solved from continuity when absent");
        cmd.add_option("--omega", omega, "l = 0 weight factor with --rc and c1");
        cmd.add_option("--continuity", continuity, "c0 or c1");
        cmd.add_option("--params", params_file, "SogParams JSON (overrides the flags above)");
    }

    [[nodiscard]] SogParams resolve() const {
        if (!params_file.empty()) {
            std::ifstream in(params_file);
            if (!in) {
                throw UsageError("cannot open '" + params_file + "'");
            }
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(std::string("invalid JSON in '") + params_file + "': " + e.what(), 0);
            }
            return params_from_json(j);
        }
        if (!b || !sigma || !M) {
            throw UsageError("--b, --sigma and --M are required (or --params FILE)");
        }
        const auto cont = parse_continuity(continuity);
        if (r_c) {
            if (cont == Continuity::C1 && !omega) {
                throw UsageError("--rc with c1 needs --omega");
            }
            return SogParams::with_cutoff(*b, *sigma, *M, l_min, *r_c, cont, omega.value_or(1.0));
        }
        return cont == Continuity::C0 ? solve_c0(*b, *sigma, *M, l_min) : solve_c1(*b, *sigma, *M, l_min);
    }
};

struct SystemFlags {
    std::string path;
    std::vector<double> gen_random;

    void add(CLI::App& cmd) {
        cmd.add_option("--system", path, "XYZQ file");
        cmd.add_option("--gen-random", gen_random, "Random neutral system: N L SEED")->expected(3);
    }

    [[nodiscard]] bool given() const { return !path.empty() || !gen_random.empty(); }

    [[nodiscard]] ParticleSystem resolve() const {
        if (!path.empty()) {
            if (!std::filesystem::is_regular_file(path)) {
                throw UsageError("cannot open '" + path + "'");
            }
            return load_system(path);
        }
        if (gen_random.size() == 3) {
            const double n = gen_random[0];
            const double seed = gen_random[2];
            if (n != std::floor(n) || seed != std::floor(seed) || seed < 0) {
                throw UsageError("--gen-random expects integer N and SEED");
            }
            return random_neutral_system(static_cast<int>(n), gen_random[1], static_cast<std::uint64_t>(seed));
        }
        throw UsageError("a system is required: --system PATH or --gen-random N L SEED");
    }
};

struct Output {
    std::string path;

    void add(CLI::App& cmd) { cmd.add_option("--out", path, "Output file (stdout when absent)"); }

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
            return;
        }
        std::ofstream out(path);
        if (!out) {
            throw UsageError("cannot write '" + path + "'");
        }
        out << text;
    }
};

std::string csv_number(double v) {
    std::ostringstream s;
    s.imbue(std::locale::classic());
    s << std::setprecision(17) << v;
    return s.str();
}

EvalOptions eval_options(bool deterministic) {
    EvalOptions o;
    o.parallel = !deterministic;
    return o;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    std::string field;
    while (std::getline(in, field, ',')) {
        std::istringstream f(field);
        f.imbue(std::locale::classic());
        double v = 0.0;
        std::string rest;
        if (!(f >> v) || (f >> rest)) {
            throw UsageError("--values: cannot parse '" + field + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw UsageError("--values must list at least one value");
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (!(out[i] > out[i - 1]) && !(out[i] < out[i - 1])) {
            throw UsageError("--values must be strictly monotone");
        }
        if (i > 1 && ((out[i] > out[i - 1]) != (out[1] > out[0]))) {
            throw UsageError("--values must be strictly monotone");
        }
    }
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"u-series Coulomb decomposition: tuning, evaluation and error analysis"};
    app.require_subcommand(1);
    bool deterministic = true;
    app.add_option("--deterministic", deterministic, "Fixed summation order (true) or OpenMP (false)");

    // tune
    auto* tune = app.add_subcommand("tune", "Choose parameters for a force tolerance");
    double eps = 0.0;
    std::optional<double> tune_L;
    std::string tune_cont = "c0";
    SystemFlags tune_sys;
    Output tune_out;
    tune->add_option("--eps", eps, "Relative force tolerance in (0, 1)")->required();
    tune->add_option("--continuity", tune_cont, "c0 or c1");
    tune->add_option("--L", tune_L, "Box length (A); taken from the system when absent");
    tune_sys.add(*tune);
    tune_out.add(*tune);

    // decompose
    auto* decompose = app.add_subcommand("decompose", "List the Gaussian terms, r_c and omega");
    ParamFlags dec_params;
    bool dec_json = false;
    Output dec_out;
    dec_params.add(*decompose);
    decompose->add_flag("--json", dec_json, "SogParams JSON instead of a table");
    dec_out.add(*decompose);

    // eval
    auto* eval = app.add_subcommand("eval", "Measure u-series errors against Ewald");
    ParamFlags eval_params;
    SystemFlags eval_sys;
    Output eval_out;
    bool eval_breakdown = false;
    bool eval_json = false;
    eval_params.add(*eval);
    eval_sys.add(*eval);
    eval_out.add(*eval);
    eval->add_flag("--breakdown", eval_breakdown, "Attach the estimator components");
    eval->add_flag("--json", eval_json, "JSON report instead of CSV");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Measured and estimated errors over M, b or l_min");
    ParamFlags sweep_params;
    SystemFlags sweep_sys;
    Output sweep_out;
    std::string sweep_var;
    std::string sweep_values;
    sweep_params.add(*sweep);
    sweep_sys.add(*sweep);
    sweep_out.add(*sweep);
    sweep->add_option("--var", sweep_var, "M, b or l_min")->required()->check(CLI::IsMember({"M", "b", "l_min"}));
    sweep->add_option("--values", sweep_values, "Comma-separated, strictly monotone")->required();

    // madelung
    auto* madelung = app.add_subcommand("madelung", "NaCl Madelung constant from the u-series");
    ParamFlags mad_params;
    double mad_L = 40.0;
    Output mad_out;
    mad_params.add(*madelung);
    madelung->add_option("--L", mad_L, "Box length (A), 8 ions");
    mad_out.add(*madelung);

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Error components without a reference run");
    ParamFlags est_params;
    SystemFlags est_sys;
    Output est_out;
    bool est_spectral = false;
    est_params.add(*estimate);
    est_sys.add(*estimate);
    est_out.add(*estimate);
    estimate->add_flag("--spectral", est_spectral, "Include the quadrature E_T (N <= 256)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    const auto opts = eval_options(deterministic);

    if (*tune) {
        if (!(eps > 0.0 && eps < 1.0)) {
            throw UsageError("--eps must lie in (0, 1)");
        }
        std::optional<ParticleSystem> sys;
        if (tune_sys.given()) {
            sys = tune_sys.resolve();
        }
        const double L = tune_L ? *tune_L : (sys ? sys->L() : 0.0);
        if (!(L > 0.0)) {
            throw UsageError("--L or a system is required");
        }
        if (!sys) {
            // Desk-scale stand-in with the density of the 512-ion, 20 A test system.
            const int n = std::max(8, 2 * static_cast<int>(std::lround(256.0 * std::pow(L / 20.0, 3))));
            sys = random_neutral_system(n, L, 2024);
        }
        const auto summary = summarize(*sys, L / 2.0, opts);
        const auto cont = parse_continuity(tune_cont);
        const auto plan = cont == Continuity::C0 ? plan_c0(eps, L, summary) : plan_c1(eps, L, summary);
        tune_out.write(to_json(plan).dump(2) + "\n");
        for (const auto& w : plan.warnings) {
            std::cerr << "warning: " << w << '\n';
        }
        return 0;
    }

    if (*decompose) {
        const auto p = dec_params.resolve();
        if (dec_json) {
            dec_out.write(to_json(p).dump(2) + "\n");
            return 0;
        }
        std::ostringstream s;
        s.imbue(std::locale::classic());
        s << std::setprecision(17);
        s << "# b=" << p.b() << " sigma=" << p.sigma() << " M=" << p.M() << " l_min=" << p.l_min()
          << " continuity=" << to_string(p.continuity()) << '\n';
        s << "# r_c=" << p.r_c() << " omega=" << p.omega() << '\n';
        s << "l,w,s\n";
        for (const auto& t : p.scaled_terms()) {
            s << t.index << ',' << t.weight << ',' << t.width << '\n';
        }
        dec_out.write(s.str());
        return 0;
    }

    if (*eval) {
        const auto p = eval_params.resolve();
        const auto sys = eval_sys.resolve();
        MeasureOptions mo;
        mo.eval = opts;
        mo.with_breakdown = eval_breakdown;
        mo.with_spectral = eval_breakdown && sys.size() <= 256;
        const auto report = measure_errors(sys, p, mo);
        if (eval_json) {
            eval_out.write(to_json(report).dump(2) + "\n");
        } else {
            std::ostringstream s;
            write_report_csv(s, report);
            eval_out.write(s.str());
        }
        return 0;
    }

    if (*sweep) {
        const auto values = parse_values(sweep_values);
        const auto base = sweep_params.resolve();
        const auto sys = sweep_sys.resolve();
        const auto exact = ewald_energy_forces(sys, opts);
        auto summary = SystemSummary::from(sys, base.r_c());
        summary.reference_energy = std::abs(exact.energy);
        summary.reference_force_rms = rms_force(exact.forces);
        std::ostringstream s;
        s << "value,rel_energy_err,rel_force_err,est_energy_err,est_force_err,error\n";
        for (double v : values) {
            s << csv_number(v) << ',';
            try {
                const SogParams p = [&] {
                    if (sweep_var == "M") {
                        return base.truncated(static_cast<int>(std::lround(v)));
                    }
                    if (sweep_var == "l_min") {
                        return base.with_l_min(static_cast<int>(std::lround(v)));
                    }
                    return SogParams::with_cutoff(v, base.sigma(), base.M(), base.l_min(), base.r_c(),
                                                  base.continuity(), base.omega());
                }();
                MeasureOptions mo;
                mo.eval = opts;
                const auto r = measure_errors(sys, p, exact, mo);
                s << csv_number(r.rel_energy_error) << ',' << csv_number(r.rel_force_error) << ','
                  << csv_number(closed_form_energy_error(summary, p) / summary.reference_energy) << ','
                  << csv_number(closed_form_force_error(summary, p) / summary.reference_force_rms) << ",\n";
            } catch (const Error& e) {
                std::string what = e.what();
                for (char& c : what) {
                    if (c == ',' || c == '\n') {
                        c = ';';
                    }
                }
                s << ",,,," << what << '\n';
            }
        }
        sweep_out.write(s.str());
        return 0;
    }

    if (*madelung) {
        const auto p = mad_params.resolve();
        const auto sys = madelung_system(mad_L);
        const auto exact = ewald_energy_forces(sys, opts);
        const auto approx = useries_energy_forces(sys, p, 1e-16, opts);
        const double a = mad_L / 2.0;
        const double n = static_cast<double>(sys.size());
        const double constant = 2.0 * a * approx.energy / n;
        const double reference = -1.74756459463318219;
        const auto parts = error_breakdown(sys, p, true);
        // Per-ion estimate, capped at the energy itself.
        const double estimated =
            std::min(std::abs(parts.total_energy_estimate), std::abs(approx.energy)) / n;
        std::ostringstream s;
        s << "b,sigma,M,l_min,continuity,r_c,madelung,ewald_madelung,rel_error,est_error_per_ion,"
             "measured_error_per_ion\n";
        s << csv_number(p.b()) << ',' << csv_number(p.sigma()) << ',' << p.M() << ',' << p.l_min() << ','
          << to_string(p.continuity()) << ',' << csv_number(p.r_c()) << ',' << csv_number(constant) << ','
          << csv_number(2.0 * a * exact.energy / n) << ',' << csv_number(std::abs(constant - reference) / std::abs(reference))
          << ',' << csv_number(estimated) << ',' << csv_number(std::abs(exact.energy - approx.energy) / n) << '\n';
        mad_out.write(s.str());
        return 0;
    }

    if (*estimate) {
        const auto p = est_params.resolve();
        const auto sys = est_sys.resolve();
        const auto parts = error_breakdown(sys, p, est_spectral);
        const auto summary = SystemSummary::from(sys, p.r_c());
        const auto ce = closed_form_energy_terms(summary, p);
        const auto cf = closed_form_force_terms(summary, p);
        nlohmann::json j;
        j["params"] = to_json(p);
        j["breakdown"] = to_json(parts);
        j["closed_form"] = {{"energy", {{"trapezoid", ce.trapezoid}, {"down", ce.down}, {"up", ce.up}, {"total", ce.total()}}},
                            {"force", {{"trapezoid", cf.trapezoid}, {"down", cf.down}, {"up", cf.up}, {"total", cf.total()}}}};
        std::ostringstream s;
        s << breakdown_csv_header() << '\n'
          << breakdown_csv_row(p, parts, ce.total(), cf.total()) << '\n';
        est_out.write(j.dump(2) + "\n");
        std::cerr << s.str();
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const useries::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const useries::DomainError& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const useries::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 2;
    } catch (const useries::ParameterError& e) {
        std::cerr << "invalid parameters: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
