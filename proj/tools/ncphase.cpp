// ncphase: command-line front end for the deformed phase space engine.

#include "ncphase/checks.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace ncphase;
using json = nlohmann::ordered_json;

namespace {

struct Options {
    std::string model;
    std::string config;
    int order = 6;
    int dim = 0;
    std::string format = "text";
    std::string u = "0";
    std::string out;
    bool no_timing = false;
    std::string phi1, phi2;
    std::string f, g;
    std::string check;
    std::vector<std::string> checks;
    unsigned threads = 0;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Rational parse_rational(const std::string& s)
{
    const auto slash = s.find('/');
    auto integer = [&](const std::string& t) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size() || t.empty()) throw UsageError("not a rational: '" + s + "'");
        return v;
    };
    if (slash == std::string::npos) return Rational(integer(s));
    const long d = integer(s.substr(slash + 1));
    if (d == 0) throw UsageError("zero denominator in '" + s + "'");
    return make_rational(integer(s.substr(0, slash)), d);
}

std::vector<Rational> parse_coefficients(const std::string& s)
{
    std::vector<Rational> v;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) v.push_back(parse_rational(item));
    if (v.empty()) throw UsageError("empty coefficient list");
    return v;
}

ModelSource source(const Options& o)
{
    ModelSource s;
    if (!o.config.empty()) {
        s.config = parse_model_config(read_file(o.config));
        if (o.dim && o.dim != s.config->dim) throw UsageError("--dim conflicts with the model file");
        return s;
    }
    if (o.model.empty()) throw UsageError("give --model or --config");
    s.catalog = o.model;
    s.dim = o.dim;
    if (!o.phi1.empty()) s.options.phi1 = parse_coefficients(o.phi1);
    if (!o.phi2.empty()) s.options.phi2 = parse_coefficients(o.phi2);
    catalog_default_dim(o.model);  // unknown names are usage errors
    return s;
}

int effective_order(const Options& o, const ModelSource& s) { return s.config && s.config->order && o.order == 6 ? *s.config->order : o.order; }

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_reports(const std::vector<Report>& reports, const Options& o, std::ostream& os)
{
    if (o.format == "json") {
        if (reports.size() == 1) {
            os << to_json(reports[0]).dump(2) << "\n";
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(to_json(r));
            os << arr.dump(2) << "\n";
        }
        return;
    }
    for (const auto& r : reports) {
        os << to_text(r);
        if (!o.no_timing) os << "\n  " << static_cast<long long>(r.ms) << " ms";
        os << "\n";
    }
}

int status(const std::vector<Report>& reports)
{
    for (const auto& r : reports)
        if (r.verdict == Verdict::fail) return 1;
    return 0;
}

std::vector<Report> strip_timing(std::vector<Report> reports, bool no_timing)
{
    if (no_timing)
        for (auto& r : reports) r.ms = 0;
    return reports;
}

int cmd_catalog(const Options& o, std::ostream& os)
{
    if (o.format == "json") {
        json arr = json::array();
        for (const auto& e : catalog_entries()) arr.push_back({{"name", e.name}, {"dim", e.default_dim}, {"realization", e.description}});
        os << arr.dump(2) << "\n";
        return 0;
    }
    for (const auto& e : catalog_entries()) os << e.name << std::string(e.name.size() < 16 ? 16 - e.name.size() : 1, ' ') << "n=" << e.default_dim << "  " << e.description << "\n";
    return 0;
}

int cmd_check(const Options& o, std::ostream& os)
{
    const ModelSource s = source(o);
    const auto reports = strip_timing({run_check(o.check, s, effective_order(o, s), parse_rational(o.u))}, o.no_timing);
    emit_reports(reports, o, os);
    return status(reports);
}

int cmd_batch(const Options& o, std::ostream& os)
{
    std::vector<std::string> checks = o.checks;
    if (checks.empty()) checks = {"jacobi", "closure", "assoc", "coassoc", "twist", "conjugation"};
    for (const auto& c : checks)
        if (!is_check_name(c)) throw UsageError("unknown check '" + c + "'");
    std::vector<BatchJob> jobs;
    if (!o.model.empty() || !o.config.empty()) {
        const ModelSource s = source(o);
        for (const auto& c : checks) jobs.push_back({s, c});
    } else {
        jobs = catalog_jobs(checks);
    }
    const unsigned threads = o.threads ? o.threads : std::max(1U, std::thread::hardware_concurrency());
    const auto reports = strip_timing(run_batch(jobs, o.order, parse_rational(o.u), threads), o.no_timing);
    emit_reports(reports, o, os);
    return status(reports);
}

/// Momentum-form model for the computations; the dilatation models have none.
Model momentum_model(const Options& o, int order)
{
    const ModelSource s = source(o);
    Model m = s.build(order);
    if (!m.R.momentum_form()) throw UsageError(m.name() + " is not of the form x phi(p) + chi(p); no composition law");
    return m;
}

void emit_series(const Options& o, std::ostream& os, const std::string& model, int order, const std::string& what, const std::vector<std::pair<std::string, std::string>>& rows)
{
    if (o.format == "json") {
        json j;
        j["model"] = model;
        j["order"] = order;
        json vals = json::object();
        for (const auto& [k, v] : rows) vals[k] = v;
        j[what] = vals;
        os << j.dump(2) << "\n";
        return;
    }
    os << what << " [" << model << ", order " << order << "]\n";
    for (const auto& [k, v] : rows) os << "  " << k << " = " << v << "\n";
}

int cmd_dmu(const Options& o, std::ostream& os)
{
    const Model m = momentum_model(o, o.order);
    const CompositionLaw law = composition_law(m.R, o.order);
    std::vector<std::pair<std::string, std::string>> rows;
    for (int mu = 0; mu < law.dim(); ++mu) rows.emplace_back("D_" + std::to_string(mu) + "(k,q)", law.D[static_cast<std::size_t>(mu)].str());
    rows.emplace_back("G(k,q)", law.G.str());
    emit_series(o, os, m.name(), o.order, "composition", rows);
    return 0;
}

int cmd_coproduct(const Options& o, std::ostream& os)
{
    const Model m = momentum_model(o, o.order);
    const Coproduct cop = coproduct(composition_law(m.R, o.order));
    std::vector<std::pair<std::string, std::string>> rows;
    for (int mu = 0; mu < cop.dim(); ++mu) rows.emplace_back("Delta p_" + std::to_string(mu), cop.dp[static_cast<std::size_t>(mu)].str({"p1", "p2"}));
    emit_series(o, os, m.name(), o.order, "coproduct", rows);
    if (o.format != "json") os << "  (p1 = p (x) 1, p2 = 1 (x) p)\n";
    return 0;
}

int cmd_solve_j(const Options& o, std::ostream& os)
{
    const Model m = momentum_model(o, o.order);
    const CompositionLaw law = composition_law(m.R, o.order);
    std::vector<std::pair<std::string, std::string>> rows;
    const SeriesVec J = law.K;  // J(k, 0)
    for (int mu = 0; mu < law.dim(); ++mu) rows.emplace_back("K_" + std::to_string(mu) + "(k) = J_" + std::to_string(mu) + "(k,0)", J[static_cast<std::size_t>(mu)].str());
    for (int mu = 0; mu < law.dim(); ++mu) rows.emplace_back("Kinv_" + std::to_string(mu) + "(k)", law.Kinv[static_cast<std::size_t>(mu)].str());
    const JPair sol = solve_J_h(m.R, o.order);
    for (int mu = 0; mu < law.dim(); ++mu) rows.emplace_back("J_" + std::to_string(mu) + "(k,q)", sol.J[static_cast<std::size_t>(mu)].str());
    rows.emplace_back("h(k,q)", sol.h.str());
    emit_series(o, os, m.name(), o.order, "solve-j", rows);
    return 0;
}

int cmd_star(const Options& o, std::ostream& os)
{
    if (o.f.empty() || o.g.empty()) throw UsageError("star needs --f and --g");
    const ModelSource s = source(o);
    const Model m = s.build(o.order);
    Series out;
    if (m.q && !m.quadratic) {
        const Series P = Series::zero(m.R.ctx, Layout{0, 1}, Truncation::parameters(o.order, kNoCap));
        out = q_star(lower(o.f, LowerEnv{P}), lower(o.g, LowerEnv{P}), *m.q);
    } else {
        if (!m.R.momentum_form()) throw UsageError(m.name() + " has no star product from a composition law");
        const CompositionLaw law = composition_law(m.R, o.order);
        const Series P = poly_like(law.ctx, m.R.par_cap);
        out = star(lower(o.f, LowerEnv{P}), lower(o.g, LowerEnv{P}), law);
    }
    emit_series(o, os, m.name(), o.order, "star", {{"f * g", out.str()}});
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact symbolic engine for deformed quantum phase spaces"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub, bool model) {
        if (model) {
            sub->add_option("--model", o.model, "catalog model (see `ncphase catalog`)");
            sub->add_option("--config", o.config, "model file");
            sub->add_option("--dim", o.dim, "dimension (default: the catalog's)")->check(CLI::PositiveNumber);
            sub->add_option("--phi1", o.phi1, "snyder_gen: coefficients of phi1(t), comma separated");
            sub->add_option("--phi2", o.phi2, "snyder_gen: coefficients of phi2(t), comma separated");
        }
        sub->add_option("--order", o.order, "truncation order")->check(CLI::Range(1, 24));
        sub->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", o.out, "write output to this file");
    };

    auto* catalog = app.add_subcommand("catalog", "list the catalog models");
    common(catalog, false);

    auto* check = app.add_subcommand("check", "run one check");
    common(check, true);
    check->add_option("kind", o.check, "check to run")->required()->check(CLI::IsMember(check_names()));
    check->add_option("--u", o.u, "member of the normal-ordered twist family (rational)");
    check->add_flag("--no-timing", o.no_timing, "report 0 ms so output is bit-identical between runs");

    auto* batch = app.add_subcommand("batch", "run checks over the catalog (or one model) concurrently");
    common(batch, true);
    batch->add_option("--checks", o.checks, "checks to run (default: jacobi closure assoc coassoc twist conjugation)")->delimiter(',');
    batch->add_option("--u", o.u, "member of the normal-ordered twist family (rational)");
    batch->add_option("--threads", o.threads, "worker threads (default: hardware)");
    batch->add_flag("--no-timing", o.no_timing, "report 0 ms so output is bit-identical between runs");

    auto* dmu = app.add_subcommand("dmu", "composition law D_mu(k,q) and the phase G(k,q)");
    common(dmu, true);
    auto* cop = app.add_subcommand("coproduct", "coproduct Delta p_mu = D_mu(p (x) 1, 1 (x) p)");
    common(cop, true);
    auto* solve = app.add_subcommand("solve-j", "J_mu(k,q), h(k,q) and the Weyl map K");
    common(solve, true);
    auto* star_cmd = app.add_subcommand("star", "star product of two polynomials in x");
    common(star_cmd, true);
    star_cmd->add_option("--f", o.f, "left factor, e.g. x[0]*x[1]")->required();
    star_cmd->add_option("--g", o.g, "right factor")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        Output out(o.out);
        std::ostream& os = out.stream();
        if (catalog->parsed()) return cmd_catalog(o, os);
        if (check->parsed()) return cmd_check(o, os);
        if (batch->parsed()) return cmd_batch(o, os);
        if (dmu->parsed()) return cmd_dmu(o, os);
        if (cop->parsed()) return cmd_coproduct(o, os);
        if (solve->parsed()) return cmd_solve_j(o, os);
        if (star_cmd->parsed()) return cmd_star(o, os);
    } catch (const UsageError& e) {
        std::cerr << "ncphase: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "ncphase: " << (o.config.empty() ? std::string("expression") : o.config) << ":" << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "ncphase: " << o.config << ": " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ncphase: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ncphase: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
