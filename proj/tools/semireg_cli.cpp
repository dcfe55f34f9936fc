// semireg: experiment front-end for adaptive semiiterative regularization.
//
//   semireg run         grid of noise levels -> table-shaped CSV
//   semireg rates       log-log slopes from an existing CSV
//   semireg gamma-dump  hyperbolic cross index set as "j i" pairs
//   semireg constants   stopping/error/complexity constants for parameters
//   semireg coeffs      leading sine coefficients of a shipped function
//
// Exit codes: 0 success, 1 configuration error, 2 runtime cap exceeded, 3 I/O.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "semireg/adaptive_driver.hpp"
#include "semireg/experiment.hpp"
#include "semireg/hypercross.hpp"
#include "semireg/semiiterative.hpp"
#include "semireg/test_problems.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitCap = 2;
constexpr int kExitIo = 3;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Flat "key = value" lines become "--key=value" arguments placed before the
// real command line, so explicit flags win. "key = true|false" toggles a flag.
std::vector<std::string> config_arguments(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw semireg::IoError("cannot read config file '" + path + "'");
    std::vector<std::string> out;
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw semireg::ConfigError("config line without '=': " + line);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        for (char& c : key)
            if (c == '_') c = '-';
        if (value == "true") {
            out.push_back("--" + key);
        } else if (value != "false") {
            out.push_back("--" + key + "=" + value);
        }
    }
    return out;
}

struct RunOptions {
    std::string problem = "p1";
    int algorithm = 1;
    double nu = 1.5;
    double delta_max = 0x1p-4;
    double delta_min = 0x1p-13;
    double gamma = 0.5;
    std::optional<double> tau;
    double rho = 1.0;
    std::size_t ksec = 20;
    std::uint64_t seed = 1;
    std::string seed_policy = "fixed";
    std::optional<double> mu_diagnostic;
    bool no_scaling = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    unsigned n_max = 12;
    std::size_t k_max = 1'000'000;
    std::size_t noise_dim = 4096;
    std::size_t ambient_dim = std::size_t{1} << 20;
    std::string output;
    std::string plot_prefix;
    bool quiet = false;
};

int do_run(const RunOptions& o) {
    semireg::ExperimentGrid g;
    g.problem_id = semireg::parse_problem_id(o.problem);
    g.algorithm = o.algorithm;
    g.nu = o.nu;
    g.deltas = semireg::halving_deltas(o.delta_max, o.delta_min);
    g.params.gamma = o.gamma;
    g.params.tau = o.tau;
    g.params.rho = o.rho;
    g.params.k_sec = o.ksec;
    g.params.seed = o.seed;
    g.params.n_max = o.n_max;
    g.params.k_abs_max = o.k_max;
    g.params.noise_dim = o.noise_dim;
    g.seed_policy = o.seed_policy == "per-row" ? semireg::SeedPolicy::PerRow : semireg::SeedPolicy::Fixed;
    g.mu_diagnostic = o.mu_diagnostic;
    g.scaled = !o.no_scaling;
    g.ambient_dim = o.ambient_dim;
    g.jobs = o.jobs;
    g.validate();

    const semireg::MethodSpec spec = semireg::nu_method(g.nu);
    if (g.algorithm == 1) {
        const double tau = semireg::effective_tau(spec, g.params);
        const double threshold = semireg::tau_threshold(spec, g.params.gamma);
        if (!(tau > threshold)) {
            std::cerr << "error: tau = " << tau << " must exceed " << threshold << '\n';
            return kExitConfig;
        }
    }
    if (o.no_scaling)
        std::cerr << "warning: operator scaling disabled; H^r constants are not guaranteed\n";

    const auto rows = semireg::run_grid(g);
    const double mu = g.diagnostic_mu();
    if (o.output.empty()) {
        semireg::emit_csv(rows, g.algorithm, g.nu, mu, std::cout);
    } else {
        semireg::emit_csv(rows, g.algorithm, g.nu, mu, o.output);
    }
    if (!o.plot_prefix.empty()) semireg::write_plot_data(rows, o.plot_prefix);

    int code = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            std::cerr << "delta " << row.delta << ": " << row.error << '\n';
            code = std::max(code, row.exit_code);
        } else if (!o.quiet) {
            for (const auto& w : row.report->warnings) std::cerr << "delta " << row.delta << ": warning: " << w << '\n';
        }
    }
    return code;
}

int do_rates(const std::string& input) {
    std::ifstream is(input);
    if (!is) throw semireg::IoError("cannot read '" + input + "'");
    const auto records = semireg::parse_csv(is);
    const auto s = semireg::fit_rates(records);
    std::cout << "rows " << s.rows_used << '\n';
    if (s.error_slope) std::cout << "rel_error_slope " << semireg::format_real(*s.error_slope) << '\n';
    if (s.stop_index_slope) std::cout << "stop_index_slope " << semireg::format_real(*s.stop_index_slope) << '\n';
    if (!s.error_slope) {
        std::cerr << "error: fewer than 3 usable rows\n";
        return kExitConfig;
    }
    return 0;
}

int do_gamma_dump(unsigned level, const std::string& output, bool compare) {
    if (output.empty()) {
        semireg::write_gamma(std::cout, level);
    } else {
        std::ofstream os(output);
        if (!os) throw semireg::IoError("cannot open '" + output + "' for writing");
        semireg::write_gamma(os, level);
        if (!os) throw semireg::IoError("write to '" + output + "' failed");
    }
    if (compare) {
        const semireg::GreenOperatorSource src;
        semireg::CountingSource<semireg::GreenOperatorSource> hyper(src);
        const auto op = semireg::assemble(hyper, level);
        std::cerr << "hyperbolic cross level " << level << ": " << hyper.count() << " coefficients, "
                  << op.nonzero_count() << " nonzero\n";
        const std::size_t dim = semireg::level_dim(level);
        if (dim <= 4096) {
            semireg::CountingSource<semireg::GreenOperatorSource> square(src);
            const semireg::RectangularOperator rect(square, dim, dim);
            std::cerr << "square domain [1.." << dim << "]^2: " << square.count() << " coefficients\n";
        } else {
            std::cerr << "square domain [1.." << dim << "]^2: " << dim * dim << " coefficients (not assembled)\n";
        }
    }
    return 0;
}

struct ConstantsOptions {
    double nu = 1.5;
    double gamma = 0.5;
    std::optional<double> tau;
    double rho = 1.0;
    double r = 2.0;
    double delta = 0x1p-4;
    double mu = 1.2;
    std::optional<unsigned> level;
};

int do_constants(const ConstantsOptions& o) {
    const semireg::MethodSpec spec = semireg::nu_method(o.nu);
    semireg::RunParams p;
    p.gamma = o.gamma;
    p.tau = o.tau;
    p.rho = o.rho;
    p.r = o.r;
    p.delta = o.delta;
    const unsigned n0 = semireg::initial_level(p);
    const unsigned n = o.level.value_or(n0);
    const auto c = semireg::theoretical_constants(spec, p, o.mu, n);
    const auto bounds = semireg::discretization_bounds(p.r, n);
    auto line = [](const char* key, double v) { std::cout << key << ' ' << semireg::format_real(v) << '\n'; };
    line("kappa0", spec.kappa0);
    line("kappa2", spec.kappa2);
    line("kappa_mu", spec.kappa_mu(o.mu));
    line("qualification", spec.qualification);
    line("tau_threshold", semireg::tau_threshold(spec, p.gamma));
    line("tau", semireg::effective_tau(spec, p));
    std::cout << "initial_level " << n0 << '\n';
    std::cout << "level " << n << '\n';
    std::cout << "K_n " << semireg::max_iter_count(n, p) << '\n';
    line("bound_normal_defect", bounds.normal_defect);
    line("bound_adjoint_defect", bounds.adjoint_defect);
    line("bound_tail", bounds.tail);
    line("c1", c.c1);
    line("c2", c.c2);
    line("C_alg1", c.C_alg1);
    line("C_alg2", c.C_alg2);
    std::cout << "K_opt " << c.K_opt << '\n';
    line("c3", c.c3);
    line("c4", c.c4);
    line("c5", c.c5);
    line("error_bound_alg1", semireg::order_optimal_bound(c.C_alg1, p.rho, p.delta, o.mu));
    line("error_bound_alg2", semireg::order_optimal_bound(c.C_alg2, p.rho, p.delta, o.mu));
    line("stop_index_bound", semireg::stopping_index_bound(c, p.rho, p.delta));
    return 0;
}

int do_coeffs(const std::string& problem, const std::string& function, std::size_t count, bool no_scaling) {
    const int id = semireg::parse_problem_id(problem);
    if (function != "f" && function != "x") throw semireg::ConfigError("--function must be f or x");
    const auto [f, x] = semireg::problem_coeffs(id, count, !no_scaling);
    const semireg::CoeffVec& v = function == "f" ? f : x;
    for (std::size_t k = 1; k <= v.dim(); ++k) std::cout << k << ' ' << semireg::format_real(v.coeff(k)) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive hyperbolic-cross discretisation with semiiterative regularization"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string config;

    RunOptions ro;
    auto* run = app.add_subcommand("run", "Run one algorithm on one problem over a halving delta grid");
    run->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    run->add_option("--config", config, "Flat key=value file supplying any flag");
    run->add_option("--problem", ro.problem, "Test problem: p1 or p2")->capture_default_str();
    run->add_option("--algorithm", ro.algorithm, "1 = discrepancy principle, 2 = balancing principle")
        ->check(CLI::IsMember({1, 2}))
        ->capture_default_str();
    run->add_option("--nu", ro.nu, "nu-method parameter")->capture_default_str();
    run->add_option("--delta-max", ro.delta_max, "Largest noise level")->capture_default_str();
    run->add_option("--delta-min", ro.delta_min, "Smallest noise level")->capture_default_str();
    run->add_option("--gamma", ro.gamma, "Discretisation control parameter")->capture_default_str();
    run->add_option("--tau", ro.tau, "Discrepancy parameter (default: threshold + 0.01)");
    run->add_option("--rho", ro.rho, "Source-set radius")->capture_default_str();
    run->add_option("--ksec", ro.ksec, "Balancing look-ahead K_sec")->capture_default_str();
    run->add_option("--seed", ro.seed, "Noise seed")->capture_default_str();
    run->add_option("--seed-policy", ro.seed_policy, "fixed or per-row")
        ->check(CLI::IsMember({"fixed", "per-row"}))
        ->capture_default_str();
    run->add_option("--mu-diagnostic", ro.mu_diagnostic, "Smoothness used for expected_rate and constants");
    run->add_flag("--no-scaling", ro.no_scaling, "Use the unscaled operator (eigenvalues -(pi k)^-2)");
    run->add_option("--jobs", ro.jobs, "Worker threads")->capture_default_str();
    run->add_option("--n-max", ro.n_max, "Level cap")->capture_default_str();
    run->add_option("--k-max", ro.k_max, "Total iteration cap")->capture_default_str();
    run->add_option("--noise-dim", ro.noise_dim, "Noise support dimension (0 = ambient)")->capture_default_str();
    run->add_option("--ambient-dim", ro.ambient_dim, "Coefficients kept of f and x")->capture_default_str();
    run->add_option("--output,-o", ro.output, "CSV path (default stdout)");
    run->add_option("--plot-prefix", ro.plot_prefix, "Write <prefix>_error.dat and <prefix>_K.dat");
    run->add_flag("--quiet", ro.quiet, "Suppress per-row warnings");

    std::string rates_input;
    auto* rates = app.add_subcommand("rates", "Fit log-log slopes from a CSV written by 'run'");
    rates->add_option("input", rates_input, "CSV file")->required();

    unsigned gamma_level = 2;
    std::string gamma_output;
    bool gamma_compare = false;
    auto* gamma = app.add_subcommand("gamma-dump", "Export Gamma_n as sorted 'j i' pairs");
    gamma->add_option("--level,-n", gamma_level, "Level n")->capture_default_str()->check(CLI::Range(0u, 12u));
    gamma->add_option("--output,-o", gamma_output, "Output path (default stdout)");
    gamma->add_flag("--compare", gamma_compare, "Report coefficient counts against the square domain");

    ConstantsOptions co;
    auto* constants = app.add_subcommand("constants", "Print the theoretical constants");
    constants->add_option("--nu", co.nu)->capture_default_str();
    constants->add_option("--gamma", co.gamma)->capture_default_str();
    constants->add_option("--tau", co.tau);
    constants->add_option("--rho", co.rho)->capture_default_str();
    constants->add_option("--r", co.r)->capture_default_str();
    constants->add_option("--delta", co.delta)->capture_default_str();
    constants->add_option("--mu", co.mu)->capture_default_str();
    constants->add_option("--level", co.level);

    std::string coeff_problem = "p1", coeff_function = "f";
    std::size_t coeff_count = 16;
    bool coeff_no_scaling = false;
    auto* coeffs = app.add_subcommand("coeffs", "Dump leading sine coefficients of f or x");
    coeffs->add_option("--problem", coeff_problem)->capture_default_str();
    coeffs->add_option("--function", coeff_function, "f or x")->capture_default_str();
    coeffs->add_option("--count", coeff_count)->capture_default_str();
    coeffs->add_flag("--no-scaling", coeff_no_scaling);

    // Splice a --config file in front of the explicit arguments.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[i + 1];
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                continue;
            }
            const auto extra = config_arguments(path);
            // keep the subcommand name first
            const auto at = args.begin() + (args.empty() ? 0 : 1);
            args.insert(at, extra.begin(), extra.end());
            break;
        }
    } catch (const semireg::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) return do_run(ro);
        if (*rates) return do_rates(rates_input);
        if (*gamma) return do_gamma_dump(gamma_level, gamma_output, gamma_compare);
        if (*constants) return do_constants(co);
        if (*coeffs) return do_coeffs(coeff_problem, coeff_function, coeff_count, coeff_no_scaling);
    } catch (const semireg::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const semireg::CapExceeded& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
