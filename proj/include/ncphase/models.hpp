#pragma once

#include "ncphase/catalog.hpp"
#include "ncphase/expr.hpp"
#include "ncphase/qdeform.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ncphase {

/// Options for catalog models that take user input: the generalized Snyder
/// functions phi1(t), phi2(t) as coefficient lists in t = l^2 p^2.
struct CatalogOptions {
    std::vector<Rational> phi1{Rational(1), Rational(1)};
    std::vector<Rational> phi2{Rational(1)};
};

/// A realization together with whatever extra structure the checks can use.
struct Model {
    Realization R;
    std::optional<LinearK> K;
    std::optional<QDeformation> q;
    std::optional<QuadraticK> quadratic;
    /// Hopf twist known in closed form: "jordanian_right", "jordanian_left",
    /// "light_like_drinfeld" or empty.
    std::string hopf_twist;

    const std::string& name() const { return R.name; }
};

struct CatalogEntry {
    std::string name;
    int default_dim;
    std::string description;
};

inline const std::vector<CatalogEntry>& catalog_entries()
{
    static const std::vector<CatalogEntry> entries{
        {"undeformed", 4, "x^ = x"},
        {"snyder", 4, "x^ = x + l^2 (x.p) p"},
        {"snyder_gen", 4, "x^ = x phi1(l^2 p^2) + l^2 (x.p) p phi2(l^2 p^2)"},
        {"su2", 3, "x^_i = x_i sqrt(1 - l^2 p^2) + l eps_ijk x_j p_k (Euclidean, n = 3)"},
        {"kappa_right", 4, "x^ = x - a (x.p)"},
        {"kappa_left", 4, "x^ = x (1 + a.p)"},
        {"kappa_light", 4, "x^ = x (1 + a.p) - (a.x) p with a.a = 0"},
        {"kappa_snyder", 4, "x^ = x (1 + a.p) - (a.x) p with a.a free"},
        {"quadratic", 3, "x^_m = x_m + i K_mgba x_a x_b p_g to first order, K from the dilatation twist"},
        {"qdilatation", 3, "x^_a = x_a exp(i sum_b a_ab D_b), a antisymmetric"},
        {"qdilatation_sym", 3, "x^_a = x_a exp(i sum_b a_ab D_b), a symmetric"},
    };
    return entries;
}

/// Lower case with '-' read as '_'.
inline std::string canonical_model_name(std::string s)
{
    for (auto& c : s) c = c == '-' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

inline int catalog_default_dim(const std::string& name)
{
    const std::string c = canonical_model_name(name);
    for (const auto& e : catalog_entries())
        if (e.name == c) return e.default_dim;
    throw std::invalid_argument("unknown model '" + name + "'");
}

/// `order` is the momentum order for momentum-form models and the
/// parameter order for the dilatation models.
inline Model catalog_model(const std::string& name, int n, int order, const CatalogOptions& opt = {})
{
    const std::string c = canonical_model_name(name);
    auto need = [&](bool ok, const std::string& why) {
        if (!ok) throw std::invalid_argument(c + ": " + why);
    };
    need(n >= 1, "dimension must be positive");
    Model m;
    if (c == "undeformed") {
        m.R = undeformed(n, order);
    } else if (c == "snyder") {
        m.R = snyder(n, order);
    } else if (c == "snyder_gen") {
        m.R = generalized_snyder(n, order, opt.phi1, opt.phi2);
    } else if (c == "su2") {
        need(n == 3, "su(2) needs n = 3");
        m.R = su2(order);
    } else if (c == "kappa_right" || c == "kappa_left" || c == "kappa_light" || c == "kappa_snyder") {
        const KappaKind kind = c == "kappa_right" ? KappaKind::right : c == "kappa_left" ? KappaKind::left : c == "kappa_light" ? KappaKind::light : KappaKind::snyder;
        need(kind != KappaKind::light || n >= 2, "a null vector needs n >= 2");
        m.R = kappa(kind, n, order);
        m.K = kappa_tensor(kind, n);
        if (kind == KappaKind::right) m.hopf_twist = "jordanian_right";
        if (kind == KappaKind::left) m.hopf_twist = "jordanian_left";
        if (kind == KappaKind::light) m.hopf_twist = "light_like_drinfeld";
    } else if (c == "quadratic") {
        need(n >= 2, "needs n >= 2");
        m.q = QDeformation::make(n, QMode::antisymmetric);
        m.quadratic = quadratic_from_dilatation(*m.q);
        m.R = quadratic_first_order(*m.quadratic);
    } else if (c == "qdilatation" || c == "qdilatation_sym") {
        need(n >= 2, "needs n >= 2");
        m.q = QDeformation::make(n, c == "qdilatation" ? QMode::antisymmetric : QMode::symmetric);
        m.R = q_realization(*m.q, order);
    } else {
        throw std::invalid_argument("unknown model '" + name + "'");
    }
    return m;
}

inline Realization catalog_get(const std::string& name, int n, int order, const CatalogOptions& opt = {}) { return catalog_model(name, n, order, opt).R; }

// --- model files -------------------------------------------------------------

/// Line-oriented model description:
///
///   format: 1
///   name: left
///   dim: 4
///   metric: lorentzian          (or euclidean, or a list like -1,1,1,1)
///   vector: a                   (parameters a_0 .. a_{n-1})
///   params: l                   (scalar parameters, space separated)
///   null: a                     (impose a.a = 0)
///   phi: eta(mu,nu)*(1 + dot(a,p))
///   chi: 0
///   order: 6
///
/// `#` starts a comment; indented lines continue the previous value. In phi,
/// mu and nu are the two indices of phi_{mu nu}; in chi, mu is the component.
struct ModelConfig {
    std::string name = "custom";
    int dim = 4;
    std::vector<int> metric;
    std::vector<std::string> params;
    std::vector<std::string> vectors;
    std::string null_vector;
    std::string phi = "eta(mu,nu)";
    std::string chi = "0";
    int phi_line = 0, chi_line = 0;
    std::optional<int> order;
};

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline ModelConfig parse_model_config(const std::string& text)
{
    ModelConfig cfg;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    std::string key;
    std::string* target = nullptr;
    std::string metric = "lorentzian";
    bool have_format = false;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    auto words = [](const std::string& s) {
        std::vector<std::string> w;
        std::istringstream ws(s);
        for (std::string t; ws >> t;) w.push_back(t);
        return w;
    };
    auto integer = [&](const std::string& v) {
        try {
            std::size_t used = 0;
            const int r = std::stoi(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return r;
        } catch (const std::exception&) {
            throw ConfigError("line " + std::to_string(lineno) + ": '" + key + "' needs an integer");
        }
    };
    while (std::getline(in, raw)) {
        ++lineno;
        const auto hash = raw.find('#');
        const std::string line = hash == std::string::npos ? raw : raw.substr(0, hash);
        if (trim(line).empty()) {
            if (target) *target += "\n";
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(line[0]))) {
            if (!target) throw ConfigError("line " + std::to_string(lineno) + ": continuation outside an expression");
            *target += "\n" + line;
            continue;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key: value'");
        key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        target = nullptr;
        if (key == "format") {
            if (value != "1") throw ConfigError("line " + std::to_string(lineno) + ": unsupported format '" + value + "'");
            have_format = true;
        } else if (key == "name") {
            cfg.name = value;
        } else if (key == "dim") {
            cfg.dim = integer(value);
        } else if (key == "metric") {
            metric = value;
        } else if (key == "params") {
            for (const auto& w : words(value)) cfg.params.push_back(w);
        } else if (key == "vector") {
            for (const auto& w : words(value)) cfg.vectors.push_back(w);
        } else if (key == "null") {
            cfg.null_vector = value;
        } else if (key == "phi" || key == "chi") {
            std::string& slot = key == "phi" ? cfg.phi : cfg.chi;
            // keep column numbers of the expression aligned with the file
            slot = std::string(line.find_first_not_of(" \t", colon + 1), ' ') + value;
            (key == "phi" ? cfg.phi_line : cfg.chi_line) = lineno;
            target = &slot;
        } else if (key == "order") {
            cfg.order = integer(value);
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    if (!have_format) throw ConfigError("missing 'format: 1'");
    if (cfg.dim < 1) throw ConfigError("dim must be positive");
    if (metric == "lorentzian") {
        cfg.metric = Context::lorentzian(cfg.dim);
    } else if (metric == "euclidean") {
        cfg.metric = Context::euclidean(cfg.dim);
    } else {
        std::string m = metric;
        std::replace(m.begin(), m.end(), ',', ' ');
        for (const auto& w : words(m)) {
            if (w != "1" && w != "-1" && w != "+1") throw ConfigError("metric entries must be +1 or -1");
            cfg.metric.push_back(w == "-1" ? -1 : 1);
        }
        if (static_cast<int>(cfg.metric.size()) != cfg.dim) throw ConfigError("metric length does not match dim");
    }
    if (!cfg.null_vector.empty() && std::find(cfg.vectors.begin(), cfg.vectors.end(), cfg.null_vector) == cfg.vectors.end())
        throw ConfigError("null constraint on undeclared vector '" + cfg.null_vector + "'");
    return cfg;
}

/// Realization from a parsed model file. Parse errors are reported with the
/// file's line and column.
inline Realization from_expressions(const ModelConfig& cfg, int order)
{
    std::vector<std::string> names;
    for (const auto& v : cfg.vectors)
        for (int mu = 0; mu < cfg.dim; ++mu) names.push_back(v + "_" + std::to_string(mu));
    for (const auto& p : cfg.params) names.push_back(p);
    std::optional<NullConstraint> null;
    if (!cfg.null_vector.empty()) {
        std::vector<int> comps;
        for (int mu = 0; mu < cfg.dim; ++mu) comps.push_back(static_cast<int>(std::find(names.begin(), names.end(), cfg.null_vector + "_" + std::to_string(mu)) - names.begin()));
        null = null_vector_constraint(cfg.metric, comps);
    }
    auto ctx = Context::make(cfg.dim, cfg.metric, names, null);
    auto parse_at = [](const std::string& src, int line) {
        try {
            return parse_expr(src);
        } catch (const ParseError& e) {
            throw e.moved(line - 1);
        }
    };
    const ExprPtr phi = parse_at(cfg.phi, cfg.phi_line ? cfg.phi_line : 1), chi = parse_at(cfg.chi, cfg.chi_line ? cfg.chi_line : 1);
    Realization R;
    R.name = cfg.name;
    R.ctx = ctx;
    R.par_cap = realization_par_cap(order);
    const Series like = R.like();
    const int n = cfg.dim;
    auto lower_at = [&](const ExprPtr& e, int line, LowerEnv env) {
        try {
            return lower(*e, env);
        } catch (const ParseError& err) {
            throw err.moved(line - 1);
        }
    };
    R.phi.assign(static_cast<std::size_t>(n), SeriesVec(static_cast<std::size_t>(n), like.zero()));
    R.chi.assign(static_cast<std::size_t>(n), like.zero());
    for (int a = 0; a < n; ++a) {
        for (int m = 0; m < n; ++m) {
            LowerEnv env{like};
            env.mu = a;
            env.nu = m;
            R.phi[static_cast<std::size_t>(a)][static_cast<std::size_t>(m)] = lower_at(phi, cfg.phi_line ? cfg.phi_line : 1, env);
        }
        LowerEnv env{like};
        env.mu = a;
        R.chi[static_cast<std::size_t>(a)] = lower_at(chi, cfg.chi_line ? cfg.chi_line : 1, env);
    }
    R.validate();
    return R;
}

}  // namespace ncphase
