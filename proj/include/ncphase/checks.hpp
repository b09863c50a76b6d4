#pragma once

#include "ncphase/borel.hpp"
#include "ncphase/coalgebra.hpp"
#include "ncphase/models.hpp"
#include "ncphase/qdeform.hpp"
#include "ncphase/star.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace ncphase {

/// A catalog entry (with dimension and options) or a model file.
struct ModelSource {
    std::string catalog;
    int dim = 0;  // 0: the catalog default
    CatalogOptions options;
    std::optional<ModelConfig> config;

    std::string name() const { return config ? config->name : canonical_model_name(catalog); }
    Model build(int order) const
    {
        if (config) {
            Model m;
            m.R = from_expressions(*config, order);
            return m;
        }
        return catalog_model(catalog, dim > 0 ? dim : catalog_default_dim(catalog), order, options);
    }
};

inline const std::vector<std::string>& check_names()
{
    static const std::vector<std::string> names{"jacobi", "closure", "assoc", "coassoc", "pde", "twist", "conjugation", "cocycle", "qdeform"};
    return names;
}

inline bool is_check_name(const std::string& s) { return std::find(check_names().begin(), check_names().end(), s) != check_names().end(); }

namespace detail {

inline Report skipped(const std::string& model, const std::string& check, int order, const std::string& why)
{
    return timed_report(model, check, order, [&](Report& rep) { rep.skip(why); });
}

inline Twist hopf_twist(const Model& m, int order)
{
    if (m.hopf_twist == "jordanian_right") return jordanian_right(m.R.ctx, order);
    if (m.hopf_twist == "jordanian_left") return jordanian_left(m.R.ctx, order);
    return light_like_drinfeld(m.R.ctx, order, order);
}

}  // namespace detail

namespace detail {

inline Report dispatch_check(const std::string& check, const ModelSource& src, int order, const Rational& u)
{
    const bool twisting = check == "twist" || check == "conjugation";
    const Model m = src.build(twisting ? order + 1 : order);
    const std::string& name = m.name();
    if (check == "jacobi") return jacobi_check(m.R, order);
    if (check == "closure") return closure_check(m.R, order);
    if (check == "assoc") return m.q && !m.quadratic ? q_associativity_check(*m.q, order) : associativity_check(m.R, order);
    if (check == "coassoc") return coassociativity_check(m.R, order);
    if (check == "pde") return pde_check(m.R, order);
    if (check == "qdeform") {
        if (m.quadratic) return quadratic_commutator_check(*m.quadratic);
        if (m.q) return qdeform_check(*m.q, order);
        return skipped(name, check, order, "not a quadratic deformation");
    }
    if (check == "cocycle") {
        if (m.hopf_twist == "jordanian_right") return cocycle_check_borel(borel_jordanian_right(order), name, "exp(-i ln(1 - a.p) (x) D)");
        if (m.hopf_twist == "jordanian_left") return cocycle_check_borel(borel_jordanian_left(order), name, "exp(-i D (x) ln(1 + a.p))");
        return skipped(name, check, order, "cocycle check covers the Jordanian twists in U(b)");
    }
    // twist, conjugation
    if (m.q) {
        if (check == "twist") return q_twist_consistency(*m.q, m.R, order);
        if (m.quadratic) return skipped(name, check, order, "no coproduct for the first-order quadratic model");
        return q_coproduct_check(*m.q, order);
    }
    CompositionLaw law;
    try {
        law = twist_law(m.R, order);
    } catch (const DomainError& e) {
        return skipped(name, check, order, e.what());
    }
    // the twist acts on x_m (x) 1, where first-slot momentum degree above one vanishes
    if (check == "twist") return twist_consistency(m.R, twist_normal_ordered(law, u, kNoCap, 1), order);
    const Coproduct cop = coproduct(law);
    if (!m.hopf_twist.empty()) return coproduct_conjugation_check(hopf_twist(m, order), cop, order);
    return coproduct_conjugation_check(twist_normal_ordered(law, u, order), cop, order);
}

}  // namespace detail

/// Runs one named check. `u` picks the member of the normal-ordered twist
/// family where no closed-form twist is attached to the model. The reported
/// time covers building the model as well.
inline Report run_check(const std::string& check, const ModelSource& src, int order, const Rational& u = Rational(0))
{
    if (!is_check_name(check)) throw std::invalid_argument("unknown check '" + check + "'");
    const auto t0 = std::chrono::steady_clock::now();
    Report r = detail::dispatch_check(check, src, order, u);
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

struct BatchJob {
    ModelSource model;
    std::string check;
};

/// Runs every job on up to `threads` workers; results come back in job
/// order. An exception inside a job becomes a failed report.
inline std::vector<Report> run_batch(const std::vector<BatchJob>& jobs, int order, const Rational& u, unsigned threads)
{
    std::vector<Report> out(jobs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t j; (j = next++) < jobs.size();) {
            try {
                out[j] = run_check(jobs[j].check, jobs[j].model, order, u);
            } catch (const std::exception& e) {
                out[j] = timed_report(jobs[j].model.name(), jobs[j].check, order, [&](Report& rep) { rep.fail(std::string("error: ") + e.what()); });
            }
        }
    };
    const unsigned n = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return out;
}

/// Every catalog model (default dimension) against every check.
inline std::vector<BatchJob> catalog_jobs(const std::vector<std::string>& checks)
{
    std::vector<BatchJob> jobs;
    for (const auto& e : catalog_entries())
        for (const auto& c : checks) jobs.push_back(BatchJob{ModelSource{e.name, 0, {}, std::nullopt}, c});
    return jobs;
}

}  // namespace ncphase
