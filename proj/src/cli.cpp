#include "shc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "shc/asymptotics.hpp"
#include "shc/heat_content.hpp"
#include "shc/quadrature.hpp"

namespace shc::cli {

namespace {

std::string num15(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

Domain parse_domain(const std::string& spec)
{
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "interval") {
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw CLI::ValidationError("--domain", "expected interval:a,b");
        return Domain::interval(std::stod(rest.substr(0, comma)),
                                std::stod(rest.substr(comma + 1)));
    }
    if (kind == "ball3") {
        if (rest.empty())
            throw CLI::ValidationError("--domain", "expected ball3:r");
        return Domain::ball3(std::stod(rest));
    }
    throw CLI::ValidationError("--domain", "unknown domain kind '" + kind + "'");
}

struct RunConfig {
    std::string command;
    std::string domain_spec = "interval:0,1";
    double alpha = 1.5;
    double t_max = 1e-3, t_min = 1e-7;
    int points = 13;
    double tol = 1e-9;
    double rel_tol = 0.0; // 0: per-check default
    std::int64_t n_samples = 100000;
    std::uint64_t seed = 1;
    int n_grid = 200;
    std::string quantity = "qtilde";
    std::string check = "thm11";
    double x_min = 1e-3, x_max = 1e4;
    std::string output = "out.csv";
    std::string format = "csv";
};

class Emitter {
public:
    Emitter(const std::string& path, const std::string& format,
            std::vector<std::string> columns)
        : json_(format == "json-lines" || format == "jsonl"),
          columns_(std::move(columns))
    {
        out_.open(path, std::ios::binary); // LF line endings on all platforms
        if (!out_)
            throw std::runtime_error("cannot open output file: " + path);
        if (!json_) {
            for (std::size_t i = 0; i < columns_.size(); ++i)
                out_ << (i ? "," : "") << columns_[i];
            out_ << "\n";
        }
    }

    void row(const std::vector<std::string>& cells)
    {
        if (json_) {
            nlohmann::ordered_json j;
            for (std::size_t i = 0; i < cells.size(); ++i)
                j[columns_[i]] = cells[i];
            out_ << j.dump() << "\n";
        } else {
            for (std::size_t i = 0; i < cells.size(); ++i)
                out_ << (i ? "," : "") << cells[i];
            out_ << "\n";
        }
    }

private:
    std::ofstream out_;
    bool json_;
    std::vector<std::string> columns_;
};

std::vector<double> geometric_grid(double t_max, double t_min, int n)
{
    std::vector<double> ts(n);
    const double q = n > 1 ? std::pow(t_min / t_max, 1.0 / (n - 1)) : 1.0;
    double t = t_max;
    for (int i = 0; i < n; ++i, t *= q)
        ts[i] = t;
    ts.back() = t_min; // pin the endpoint exactly
    return ts;
}

int cmd_density(const RunConfig& cfg)
{
    const Alpha alpha(cfg.alpha);
    Emitter em(cfg.output, cfg.format, {"x", "value", "method", "est_error"});
    auto grid = geometric_grid(cfg.x_max, cfg.x_min, cfg.points);
    std::reverse(grid.begin(), grid.end()); // emit ascending in x
    for (double x : grid) {
        const DensityEval d = density_at_one(alpha, x, cfg.tol);
        em.row({num15(x), num15(d.value),
                d.method == DensityMethod::series ? "series" : "fourier",
                num15(d.est_error)});
    }
    return exit_ok;
}

HeatCurve compute_curve(const RunConfig& cfg)
{
    const Domain domain = parse_domain(cfg.domain_spec);
    HeatCurve curve;
    curve.domain = domain;
    curve.meta = cfg.quantity;
    std::vector<double> ts;
    if (cfg.t_min == 0.0) {
        // closed grid ending at the exact t = 0 row; q2 only
        if (cfg.quantity != "q2")
            throw CLI::ValidationError("--t-min", "t = 0 is only defined for q2");
        ts = geometric_grid(cfg.t_max, cfg.t_max * 1e-6, cfg.points - 1);
        ts.push_back(0.0);
    } else {
        ts = geometric_grid(cfg.t_max, cfg.t_min, cfg.points);
    }
    if (cfg.quantity == "q2") {
        curve.quantity = CurveQuantity::q2;
        for (double t : ts)
            curve.points.push_back({t, q2(domain, t), 0.0});
    } else if (cfg.quantity == "qtilde") {
        curve.quantity = CurveQuantity::q_tilde;
        curve.alpha = cfg.alpha;
        const Alpha alpha(cfg.alpha);
        QuadratureSpec spec;
        spec.rel_tol = cfg.tol;
        for (double t : ts)
            curve.points.push_back({t, q_tilde(domain, alpha, t, spec), 0.0});
    } else if (cfg.quantity == "qtilde-mc") {
        curve.quantity = CurveQuantity::q_tilde;
        curve.alpha = cfg.alpha;
        const Alpha alpha(cfg.alpha);
        McConfig mc{cfg.n_samples, cfg.seed};
        for (double t : ts) {
            const McEstimate e = q_tilde_mc(domain, alpha, t, mc);
            curve.points.push_back({t, e.mean, e.std_error});
        }
    } else if (cfg.quantity == "qalpha-mc") {
        curve.quantity = CurveQuantity::q_alpha_mc;
        curve.alpha = cfg.alpha;
        const Alpha alpha(cfg.alpha);
        McConfig mc{cfg.n_samples, cfg.seed};
        for (double t : ts) {
            const auto r = q_alpha_mc(domain, alpha, t, cfg.n_grid, mc);
            curve.points.push_back({t, r.finest().mean, r.finest().std_error});
        }
    } else {
        throw CLI::ValidationError("--quantity", "unknown quantity " + cfg.quantity);
    }
    return curve;
}

int cmd_curve(const RunConfig& cfg)
{
    const HeatCurve curve = compute_curve(cfg);
    const bool has_se = cfg.quantity == "qtilde-mc" || cfg.quantity == "qalpha-mc";
    std::vector<std::string> cols = has_se
        ? std::vector<std::string>{"t", "value", "stderr"}
        : std::vector<std::string>{"t", "value"};
    Emitter em(cfg.output, cfg.format, cols);
    for (const auto& p : curve.points) {
        if (has_se)
            em.row({num15(p.t), num15(p.value), num15(p.std_error)});
        else
            em.row({num15(p.t), num15(p.value)});
    }
    return exit_ok;
}

struct VerifyRow {
    std::string check;
    double predicted, estimated, rel_err;
    bool pass;
};

void verify_thm11(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Domain domain = parse_domain(cfg.domain_spec);
    const Alpha alpha(cfg.alpha);
    RunConfig c = cfg;
    c.quantity = "qtilde";
    c.tol = 1e-10;
    double rel_tol = cfg.rel_tol;

    AsymptoticsReport rep;
    if (alpha.stability_case() == StabilityCase::supercritical) {
        if (rel_tol == 0.0)
            rel_tol = 0.01;
        const HeatCurve curve = compute_curve(c);
        rep = extract_limit(curve, 1.0 - 1.0 / alpha.value());
    } else if (alpha.stability_case() == StabilityCase::critical) {
        if (rel_tol == 0.0)
            rel_tol = 0.02;
        c.t_max = std::min(cfg.t_max, 1e-3);
        c.t_min = std::min(cfg.t_min, 1e-9);
        const HeatCurve curve = compute_curve(c);
        rep = extract_limit(curve, {}, CorrectionModel::inverse_log);
    } else {
        if (rel_tol == 0.0)
            rel_tol = 0.01;
        const HeatCurve curve = compute_curve(c);
        // subcritical correction order is t^{1/alpha - 1} for alpha > 1/2;
        // at alpha <= 1/2 a log factor enters and the exponent is fitted
        rep = alpha.value() > 0.5 ? extract_limit(curve, 1.0 / alpha.value() - 1.0)
                                  : extract_limit(curve);
    }
    finalize_report(rep, second_term_constant(domain, alpha), rel_tol);
    rows.push_back({"thm11", rep.predicted, rep.estimated, rep.rel_err, rep.verdict});
}

void verify_thm12(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Domain domain = parse_domain(cfg.domain_spec);
    const Alpha alpha(cfg.alpha);
    const double rel_tol = cfg.rel_tol == 0.0 ? 0.02 : cfg.rel_tol;
    const double c2 = second_term_constant(domain, alpha);
    const double vol = domain.volume();

    RunConfig c = cfg;
    c.quantity = "qtilde";
    const auto ts = geometric_grid(c.t_max, c.t_min, c.points);
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-13;
    std::vector<double> rs;
    for (double t : ts) {
        const double qt = q_tilde(domain, alpha, t, spec);
        rs.push_back((qt - (vol - c2 * std::pow(t, 1.0 / alpha.value()))) / t);
    }
    AsymptoticsReport rep = extract_limit_ratios(ts, rs);
    finalize_report(rep, third_term_constant(domain, alpha), rel_tol);
    rows.push_back({"thm12", rep.predicted, rep.estimated, rep.rel_err, rep.verdict});
}

void verify_remark13(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Domain domain = parse_domain(cfg.domain_spec);
    if (domain.kind() != DomainKind::ball3)
        throw CLI::ValidationError("--domain", "remark13 needs a ball3 domain");
    const Alpha alpha(cfg.alpha);
    const double c3 = third_term_constant(domain, alpha);
    const auto br = third_term_bracket_ball(domain.radius(), alpha);
    rows.push_back({"remark13-lower", br.lower, c3, 0.0, c3 >= br.lower});
    rows.push_back({"remark13-upper", br.upper, c3, 0.0, c3 <= br.upper});
    rows.push_back({"remark13-nonneg", 0.0, c3, 0.0, c3 >= 0.0});
}

void verify_prop35(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Alpha alpha(cfg.alpha);
    McConfig mc{cfg.n_samples, cfg.seed};
    const auto sup = sup_stable_mc(alpha, mc, cfg.n_grid);
    const McEstimate& est = sup.finest();
    const double x_plus_mean = gamma(1.0 - 1.0 / alpha.value()) / std::numbers::pi;
    const double q_const = 2.0 / std::numbers::pi * gamma(1.0 - 1.0 / alpha.value()) * 2.0;

    const double lo = x_plus_mean, hi = 2.0 * x_plus_mean;
    const bool sandwich = est.mean >= lo - est.ci99_halfwidth()
        && est.mean <= hi + est.ci99_halfwidth();
    rows.push_back({"prop35-sandwich-lo", lo, est.mean, 0.0,
                    est.mean >= lo - est.ci99_halfwidth()});
    rows.push_back({"prop35-sandwich-hi", hi, est.mean, 0.0,
                    est.mean <= hi + est.ci99_halfwidth()});
    const double twice_upper_ci = 2.0 * (est.mean + est.ci99_halfwidth());
    rows.push_back({"prop35-strict-gap", q_const, twice_upper_ci, 0.0,
                    twice_upper_ci < q_const});
    (void)sandwich;
}

void verify_lemmas(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Alpha alpha(cfg.alpha);
    const double rel_tol = cfg.rel_tol == 0.0 ? 0.01 : cfg.rel_tol;
    for (const auto& r : verify_lemma_limits(alpha, rel_tol))
        rows.push_back({r.name, r.predicted, r.estimated, r.rel_err, r.pass});
}

void verify_ub_bounds(const RunConfig& cfg, std::vector<VerifyRow>& rows)
{
    const Domain domain = parse_domain(cfg.domain_spec);
    const Alpha alpha(cfg.alpha);
    RunConfig c = cfg;
    c.quantity = "qalpha-mc";
    const HeatCurve curve = compute_curve(c);
    const auto rep = upper_bound_check(domain, alpha, curve);
    rows.push_back({"ub-bounds", rep.bound, rep.max_scaled, 0.0, rep.pass});

    // relation check: q_tilde <= killed-stable MC estimate + 3 SE
    bool rel_ok = true;
    for (const auto& p : curve.points) {
        const double qt = q_tilde(domain, alpha, p.t);
        if (qt > p.value + 3.0 * p.std_error + 1e-12)
            rel_ok = false;
    }
    rows.push_back({"rel-ordering", 0.0, 0.0, 0.0, rel_ok});
}

int cmd_verify(const RunConfig& cfg)
{
    std::vector<VerifyRow> rows;
    if (cfg.check == "thm11")
        verify_thm11(cfg, rows);
    else if (cfg.check == "thm12")
        verify_thm12(cfg, rows);
    else if (cfg.check == "remark13")
        verify_remark13(cfg, rows);
    else if (cfg.check == "prop35")
        verify_prop35(cfg, rows);
    else if (cfg.check == "lemmas")
        verify_lemmas(cfg, rows);
    else if (cfg.check == "ub-bounds")
        verify_ub_bounds(cfg, rows);
    else
        throw CLI::ValidationError("--check", "unknown check " + cfg.check);

    Emitter em(cfg.output, cfg.format,
               {"check", "predicted", "estimated", "rel_err", "verdict"});
    bool all_pass = true;
    for (const auto& r : rows) {
        em.row({r.check, num15(r.predicted), num15(r.estimated), num15(r.rel_err),
                r.pass ? "pass" : "fail"});
        std::cout << r.check << ": " << (r.pass ? "pass" : "fail")
                  << " (predicted " << num15(r.predicted) << ", estimated "
                  << num15(r.estimated) << ")\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? exit_ok : exit_verify_failed;
}

int cmd_report(const RunConfig& cfg)
{
    // quadrature-side battery; the MC checks have their own commands
    std::vector<VerifyRow> rows;
    for (double a : {1.2, 1.5, 1.8}) {
        RunConfig c = cfg;
        c.alpha = a;
        c.domain_spec = "interval:0,1";
        verify_thm11(c, rows);
        rows.back().check = "thm11-a" + std::to_string(a).substr(0, 3) + "-interval";
    }
    {
        RunConfig c = cfg;
        c.alpha = 1.0;
        c.domain_spec = "interval:0,1";
        c.t_max = 1e-3;
        c.t_min = 1e-9;
        verify_thm11(c, rows);
        rows.back().check = "thm11-a1.0-interval";
    }
    for (double a : {0.5, 0.8}) {
        RunConfig c = cfg;
        c.alpha = a;
        c.domain_spec = "interval:0,1";
        verify_thm11(c, rows);
        rows.back().check = "thm11-a" + std::to_string(a).substr(0, 3) + "-interval";
    }
    {
        RunConfig c = cfg;
        c.alpha = 1.5;
        c.domain_spec = "ball3:1";
        c.t_max = 3e-3;
        c.t_min = 2e-5;
        verify_thm12(c, rows);
        verify_remark13(c, rows);
        verify_lemmas(c, rows);
        c.alpha = 1.0;
        verify_lemmas(c, rows);
    }

    Emitter em(cfg.output, cfg.format,
               {"check", "predicted", "estimated", "rel_err", "verdict"});
    bool all_pass = true;
    for (const auto& r : rows) {
        em.row({r.check, num15(r.predicted), num15(r.estimated), num15(r.rel_err),
                r.pass ? "pass" : "fail"});
        std::cout << r.check << ": " << (r.pass ? "pass" : "fail") << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? exit_ok : exit_verify_failed;
}

void add_common(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--domain", cfg.domain_spec, "interval:a,b or ball3:r");
    sub->add_option("--alpha", cfg.alpha, "stability index in (0,2)");
    sub->add_option("--t-max", cfg.t_max, "largest grid time");
    sub->add_option("--t-min", cfg.t_min, "smallest grid time");
    sub->add_option("--points", cfg.points, "grid points");
    sub->add_option("--tol", cfg.tol, "quadrature tolerance");
    sub->add_option("--rel-tol", cfg.rel_tol, "verdict tolerance (0: per-check default)");
    sub->add_option("--samples", cfg.n_samples, "Monte Carlo sample count");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--grid", cfg.n_grid, "path monitoring grid");
    sub->add_option("--output,-o", cfg.output, "output file");
    sub->add_option("--format", cfg.format, "csv or json-lines")
        ->check(CLI::IsMember({"csv", "json-lines", "jsonl"}));
}

std::unique_ptr<CLI::App> build_app(RunConfig& cfg)
{
    auto app = std::make_unique<CLI::App>(
        "spectral heat content of subordinate killed Brownian motion");
    app->require_subcommand(1);
    app->set_config("--config", "", "TOML-style config file (flags take precedence)");
    app->footer("worker threads: set SHC_THREADS (default: hardware concurrency)");

    auto* density = app->add_subcommand("density", "subordinator density over a log grid");
    density->add_option("--x-min", cfg.x_min, "smallest abscissa");
    density->add_option("--x-max", cfg.x_max, "largest abscissa");
    add_common(density, cfg);
    density->configurable();
    density->fallthrough();
    density->callback([&cfg] { cfg.command = "density"; });

    auto* curve = app->add_subcommand("curve", "heat-content curve on a geometric grid");
    curve->add_option("--quantity", cfg.quantity, "q2 | qtilde | qtilde-mc | qalpha-mc");
    add_common(curve, cfg);
    curve->configurable();
    curve->fallthrough();
    curve->callback([&cfg] { cfg.command = "curve"; });

    auto* verify = app->add_subcommand("verify", "run a named verification");
    verify->add_option("--check", cfg.check,
                       "thm11 | thm12 | remark13 | prop35 | lemmas | ub-bounds");
    add_common(verify, cfg);
    verify->configurable();
    verify->fallthrough();
    verify->callback([&cfg] { cfg.command = "verify"; });

    auto* report = app->add_subcommand("report", "quadrature-side verification battery");
    add_common(report, cfg);
    report->configurable();
    report->fallthrough();
    report->callback([&cfg] { cfg.command = "report"; });

    return app;
}

} // namespace

std::string canonical_config(const std::vector<std::string>& args)
{
    RunConfig cfg;
    auto app = build_app(cfg);
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app->parse(rev);
    return app->config_to_str(false, false);
}

int run(const std::vector<std::string>& args)
{
    RunConfig cfg;
    auto app = build_app(cfg);
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app->parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app->exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (cfg.command == "density")
            return cmd_density(cfg);
        if (cfg.command == "curve")
            return cmd_curve(cfg);
        if (cfg.command == "verify")
            return cmd_verify(cfg);
        if (cfg.command == "report")
            return cmd_report(cfg);
        std::cerr << "no command selected\n";
        return exit_usage;
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return exit_usage;
    } catch (const tolerance_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const fit_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const nonconvergence_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i)
        args.emplace_back(argv[i]);
    return run(args);
}

} // namespace shc::cli
