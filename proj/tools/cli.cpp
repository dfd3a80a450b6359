#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "glmminimax/bound.hpp"
#include "glmminimax/design.hpp"
#include "glmminimax/error.hpp"
#include "glmminimax/estimate.hpp"
#include "glmminimax/family.hpp"
#include "glmminimax/risk.hpp"
#include "glmminimax/text_io.hpp"
#include "glmminimax/verify.hpp"

namespace glmminimax::cli {

namespace {

constexpr double kSlackTolerance = 1e-8;

// Thrown when a computed quantity contradicts a proven inequality.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string design_path;
    std::string family_spec = "gaussian:L=1";
    std::string families = "gaussian:L=1,bernoulli,poisson";
    double scale = 1.0;
    double constant = default_constant();
    std::optional<double> ag_r;
    std::string data_path;
    std::string theta_path;
    std::string estimator;
    std::string mode = "fixed";
    std::size_t trials = 100000;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    unsigned threads = 0;
    std::string suite = "lemma1";
    std::string grid = "coarse";
    std::string format = "tsv";
    std::string output_path;
};

class Table {
public:
    explicit Table(const RunConfig& config)
        : column_sep_(config.format == "csv" ? "," : "\t"), vector_sep_(config.format == "csv" ? ";" : ",") {}

    void header(std::vector<std::string> names) { header_ = std::move(names); }
    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }
    std::string vec(const Eigen::VectorXd& v) const { return join_reals(v, vector_sep_); }
    const std::string& column_sep() const { return column_sep_; }

    void write(std::ostream& out) const {
        write_line(out, header_);
        for (const auto& r : rows_) {
            write_line(out, r);
        }
    }

private:
    void write_line(std::ostream& out, const std::vector<std::string>& cells) const {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out << (i ? column_sep_ : "") << cells[i];
        }
        out << '\n';
    }

    std::string column_sep_;
    std::string vector_sep_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

std::string real(double v) { return format_real(v); }

void require_positive(double value, const char* flag) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw PreconditionError(std::string(flag) + " must be positive and finite");
    }
}

void require_file(const std::string& path, const char* flag) {
    if (path.empty()) {
        throw PreconditionError(std::string(flag) + " is required");
    }
    if (!std::filesystem::is_regular_file(path)) {
        throw PreconditionError(std::string(flag) + ": cannot open '" + path + "'");
    }
}

DesignSpec read_design(const RunConfig& c) {
    require_file(c.design_path, "--design");
    try {
        return load_design(std::filesystem::path(c.design_path));
    } catch (const ParseError& e) {
        throw PreconditionError(c.design_path + ": " + e.what());
    }
}

Eigen::VectorXd read_vector(const std::string& path, const char* flag) {
    require_file(path, flag);
    return load_vector(std::filesystem::path(path));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

EstimatorConfig estimator_for(const RunConfig& c, const GlmFamily& family, const DesignSpec& design) {
    EstimatorConfig config = default_estimator(family);
    if (!c.estimator.empty()) {
        const EstimatorKind kind = parse_estimator_kind(c.estimator);
        if (kind != config.kind) {
            config = EstimatorConfig{};
            config.kind = kind;
            config.project_to_ball = kind == EstimatorKind::irls_mle;
        }
    }
    config.allow_rank_deficient = !design.full_rank();
    config.validate();
    return config;
}

MonteCarloOptions monte_carlo(const RunConfig& c) {
    MonteCarloOptions options;
    options.trials = c.trials;
    options.seed = c.seed;
    options.threads = c.threads;
    return options;
}

SearchBudget search_budget(const RunConfig& c, const DesignSpec& design) {
    const auto d = static_cast<std::size_t>(design.cols());
    return SearchBudget{c.budget == 0 ? std::max<std::size_t>(2 * d, 8) : c.budget};
}

void validate_common(const RunConfig& c) {
    require_positive(c.scale, "--scale");
    require_positive(c.constant, "--constant");
    if (c.ag_r) {
        require_positive(*c.ag_r, "--ag-R");
    }
    if (c.trials < 100) {
        throw PreconditionError("--trials must be at least 100");
    }
}

void cmd_bound(const RunConfig& c, Table& t) {
    const DesignSpec design = read_design(c);
    const GlmFamily family = make_family(c.family_spec, c.scale, design.radius());
    const BoundReport r = minimax_lower_bound(design, family, c.constant);
    std::vector<std::string> head = {"bound_value", "raw_min_term", "constant", "case",
                                     "trace_inv_gram", "L", "scale", "bayes_bound"};
    std::vector<std::string> row = {real(r.bound_value),
                                    real(r.raw_min_term),
                                    real(r.constant),
                                    std::string(to_string(r.prior_case)),
                                    real(r.inputs.trace_inv_gram),
                                    real(r.inputs.curvature),
                                    real(r.inputs.scale),
                                    real(r.bayes_bound())};
    if (c.ag_r) {
        head.emplace_back("ag_raw");
        row.push_back(real(eigenvalue_ratio_bound(design, family, *c.ag_r)));
    }
    t.header(std::move(head));
    t.row(std::move(row));
    std::vector<std::string> eps = {"epsilon"};
    for (Eigen::Index i = 0; i < r.prior.epsilons.size(); ++i) {
        eps.push_back(real(r.prior.epsilons(i)));
    }
    t.row(std::move(eps));
}

void cmd_prior(const RunConfig& c, Table& t) {
    const DesignSpec design = read_design(c);
    const GlmFamily family = make_family(c.family_spec, c.scale, design.radius());
    const BoundReport r = minimax_lower_bound(design, family, c.constant);
    t.header({"coordinate", "epsilon", "lower", "upper", "case", "payoff"});
    for (Eigen::Index i = 0; i < r.prior.epsilons.size(); ++i) {
        const double e = r.prior.epsilons(i);
        t.row({std::to_string(i + 1), real(e), real(-0.5 * e), real(0.5 * e), std::string(to_string(r.prior_case)),
               real(r.prior.payoff)});
    }
}

void cmd_estimate(const RunConfig& c, std::ostream& out, const Table& t) {
    const DesignSpec design = read_design(c);
    const GlmFamily family = make_family(c.family_spec, c.scale, design.radius());
    const GlmModel model(design, family);
    const Eigen::VectorXd x = read_vector(c.data_path, "--data");
    out << t.vec(estimate(model, x, estimator_for(c, family, design))) << '\n';
}

void cmd_simulate(const RunConfig& c, Table& t) {
    const DesignSpec design = read_design(c);
    const GlmFamily family = make_family(c.family_spec, c.scale, design.radius());
    const GlmModel model(design, family);
    const EstimatorConfig config = estimator_for(c, family, design);
    const MonteCarloOptions options = monte_carlo(c);
    const BoundReport bound = minimax_lower_bound(design, family, c.constant);

    RiskEstimate risk;
    double reference = 0.0;
    std::string theta_cell = "-";
    if (c.mode == "fixed") {
        const Eigen::VectorXd theta = c.theta_path.empty() ? Eigen::VectorXd::Zero(design.cols())
                                                           : read_vector(c.theta_path, "--theta");
        risk = risk_at(model, theta, config, options);
        theta_cell = t.vec(theta);
        reference = bound.bound_value;
    } else if (c.mode == "worst") {
        risk = worst_case_risk(model, config, search_budget(c, design), options);
        theta_cell = t.vec(*risk.theta_at_max);
        reference = bound.bound_value;
    } else {
        risk = bayes_risk(model, bound.prior, config, options);
        reference = bound.bayes_bound();
    }

    t.header({"mode", "family", "estimator", "mean_sq_error", "half_width", "trials", "failures", "seed",
              "reference_bound", "theta"});
    t.row({c.mode, family.name(), std::string(to_string(config.kind)), real(risk.mean_sq_error),
           real(risk.half_width), std::to_string(risk.trials), std::to_string(risk.failures),
           std::to_string(risk.seed), real(reference), theta_cell});
    // A fixed theta may legitimately sit below the minimax bound.
    if (c.mode != "fixed" && risk.mean_sq_error + risk.half_width < reference) {
        throw InvariantViolation(c.mode + " risk " + real(risk.mean_sq_error) + " +- " + real(risk.half_width) +
                                 " is below the lower bound " + real(reference));
    }
}

void cmd_verify(const RunConfig& c, Table& t) {
    const std::vector<CheckRow> rows = run_suite(parse_suite(c.suite), parse_grid(c.grid));
    t.header({"suite", "check", "instance", "lhs", "rhs", "slack"});
    std::size_t violations = 0;
    for (const CheckRow& r : rows) {
        t.row({r.suite, r.check, r.instance, real(r.lhs), real(r.rhs), real(r.slack())});
        violations += r.slack() < -kSlackTolerance ? 1 : 0;
    }
    if (violations > 0) {
        throw InvariantViolation(std::to_string(violations) + " of " + std::to_string(rows.size()) +
                                 " checks have slack below -" + real(kSlackTolerance));
    }
}

void cmd_report(const RunConfig& c, Table& t) {
    const DesignSpec design = read_design(c);
    std::vector<GlmFamily> families;
    for (const std::string& spec : split(c.families, ',')) {
        const bool gaussian = spec.rfind("gaussian", 0) == 0;
        families.push_back(make_family(spec, gaussian ? c.scale : 1.0, design.radius()));
    }
    if (families.empty()) {
        throw PreconditionError("--families lists no family");
    }
    std::vector<EstimatorConfig> configs;
    for (const GlmFamily& f : families) {
        configs.push_back(estimator_for(c, f, design));
    }
    const auto rows = favorability_report(design, families, configs, monte_carlo(c), search_budget(c, design),
                                          c.constant);
    t.header({"family", "L", "scale", "bound_value", "bayes_bound", "bayes_risk", "bayes_half_width", "worst_risk",
              "worst_half_width", "gaussian_closed_form", "gaussian_empirical", "achievability_ratio", "sound"});
    std::size_t unsound = 0;
    for (const FavorabilityRow& r : rows) {
        t.row({r.family, real(r.curvature), real(r.scale), real(r.bound_value), real(r.bayes_bound),
               real(r.bayes.mean_sq_error), real(r.bayes.half_width), real(r.worst.mean_sq_error),
               real(r.worst.half_width), real(r.gaussian_closed_form), real(r.gaussian_empirical),
               real(r.achievability_ratio), r.sound() ? "yes" : "no"});
        unsound += r.sound() ? 0 : 1;
    }
    if (unsound > 0) {
        throw InvariantViolation(std::to_string(unsound) + " report rows have empirical risk below a lower bound");
    }
}

void add_design_family(CLI::App* sub, RunConfig& c) {
    sub->add_option("--design", c.design_path, "Design matrix file (comma-separated rows)")->required();
    sub->add_option("--family", c.family_spec, "gaussian:L=<v> | bernoulli | poisson")->capture_default_str();
    sub->add_option("--scale", c.scale, "Dispersion s (Gaussian noise variance is s*L)")->capture_default_str();
    sub->add_option("--constant", c.constant, "Universal constant of the bound")->capture_default_str();
}

void add_monte_carlo(CLI::App* sub, RunConfig& c) {
    sub->add_option("--estimator", c.estimator, "linear | irls (default depends on family)");
    sub->add_option("--trials", c.trials, "Monte Carlo trials")->capture_default_str();
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--budget", c.budget, "Random sphere points in the worst-case search (default max(2d, 8))");
    sub->add_option("--threads", c.threads, "Worker threads (0: GLMMINIMAX_THREADS or hardware)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Minimax lower bounds and their empirical checks for generalized linear models", "glmminimax"};
    app.require_subcommand(1);
    app.add_option("--format", c.format, "tsv | csv")->check(CLI::IsMember({"tsv", "csv"}))->capture_default_str();
    app.add_option("--output", c.output_path, "Write the table here instead of stdout");

    CLI::App* bound = app.add_subcommand("bound", "Minimax lower bound and its witnessing prior");
    add_design_family(bound, c);
    bound->add_option("--ag-R", c.ag_r, "Also report the eigenvalue-ratio bound with curvature floor R");

    CLI::App* prior = app.add_subcommand("prior", "Box prior in the diagonalized coordinates");
    add_design_family(prior, c);

    CLI::App* est = app.add_subcommand("estimate", "Maximum-likelihood estimate from one observation vector");
    add_design_family(est, c);
    est->add_option("--data", c.data_path, "Observation vector file")->required();
    est->add_option("--estimator", c.estimator, "linear | irls (default depends on family)");

    CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo risk at a point, worst case, or under the prior");
    add_design_family(sim, c);
    add_monte_carlo(sim, c);
    sim->add_option("--mode", c.mode, "fixed | worst | bayes")
        ->check(CLI::IsMember({"fixed", "worst", "bayes"}))
        ->capture_default_str();
    sim->add_option("--theta", c.theta_path, "Parameter vector file for --mode fixed (default 0)");

    CLI::App* ver = app.add_subcommand("verify", "Quadrature checks of the information inequalities");
    ver->add_option("--suite", c.suite, "lemma1 | lemma2 | chain")->capture_default_str();
    ver->add_option("--grid", c.grid, "coarse | fine")->capture_default_str();

    CLI::App* rep = app.add_subcommand("report", "Favorability table across families");
    add_design_family(rep, c);
    add_monte_carlo(rep, c);
    rep->add_option("--families", c.families, "Comma-separated family specs; --scale applies to Gaussian entries")
        ->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "glmminimax: " << e.what() << '\n';
        return kExitUsage;
    }

    std::ostringstream buffer;
    Table table(c);
    int status = kExitOk;
    try {
        validate_common(c);
        if (bound->parsed()) {
            cmd_bound(c, table);
        } else if (prior->parsed()) {
            cmd_prior(c, table);
        } else if (est->parsed()) {
            cmd_estimate(c, buffer, table);
        } else if (sim->parsed()) {
            cmd_simulate(c, table);
        } else if (ver->parsed()) {
            cmd_verify(c, table);
        } else {
            cmd_report(c, table);
        }
    } catch (const InvariantViolation& e) {
        err << "glmminimax: invariant violated: " << e.what() << '\n';
        status = kExitViolation;
    } catch (const std::exception& e) {
        err << "glmminimax: " << e.what() << '\n';
        return kExitUsage;
    }

    // Tables are still emitted on a violation so the offending rows are visible.
    if (!est->parsed()) {
        table.write(buffer);
    }
    if (c.output_path.empty()) {
        out << buffer.str();
    } else {
        std::ofstream file(c.output_path, std::ios::binary);
        if (!file) {
            err << "glmminimax: --output: cannot write '" << c.output_path << "'\n";
            return kExitUsage;
        }
        file << buffer.str();
    }
    return status;
}

}  // namespace glmminimax::cli
