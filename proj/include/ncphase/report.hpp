#pragma once

#include "ncphase/series.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <optional>
#include <string>
#include <vector>

namespace ncphase {

enum class Verdict { pass, fail, skip };

inline const char* verdict_name(Verdict v)
{
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skip: return "skip";
    }
    return "?";
}

struct ReportDiscrepancy {
    std::vector<int> indices;
    std::string monomial;
    Gauss coeff;
};

/// Outcome of one check. A failing report carries the first nonzero term
/// (canonical order) of the first index tuple that failed.
struct Report {
    std::string model;
    std::string check;
    int order = 0;
    Verdict verdict = Verdict::pass;
    std::optional<ReportDiscrepancy> discrepancy;
    std::string note;
    double ms = 0;

    bool passed() const { return verdict == Verdict::pass; }

    /// Records `residual` for `indices`; the first nonzero residual fails
    /// the report. Returns true if residual vanished.
    bool expect_zero(const Series& residual, std::vector<int> indices = {})
    {
        if (residual.is_zero()) return true;
        if (verdict != Verdict::fail) {
            verdict = Verdict::fail;
            const auto t = residual.canonical_terms();
            discrepancy = ReportDiscrepancy{std::move(indices), residual.monomial_str(t.front().first), t.front().second};
        }
        return false;
    }
    bool expect_equal(const Series& a, const Series& b, std::vector<int> indices = {}) { return expect_zero(a - b, std::move(indices)); }

    void fail(std::string why)
    {
        verdict = Verdict::fail;
        if (note.empty()) note = std::move(why);
    }
    void skip(std::string why)
    {
        verdict = Verdict::skip;
        note = std::move(why);
    }
};

inline nlohmann::ordered_json to_json(const Report& r)
{
    nlohmann::ordered_json j;
    j["model"] = r.model;
    j["check"] = r.check;
    j["order"] = r.order;
    j["verdict"] = verdict_name(r.verdict);
    if (r.discrepancy) {
        j["discrepancy"] = {{"indices", r.discrepancy->indices},
                            {"monomial", r.discrepancy->monomial},
                            {"coeff_re", to_string(r.discrepancy->coeff.re())},
                            {"coeff_im", to_string(r.discrepancy->coeff.im())}};
    } else {
        j["discrepancy"] = nullptr;
    }
    if (!r.note.empty()) j["note"] = r.note;
    j["ms"] = r.ms;
    return j;
}

inline std::string to_text(const Report& r)
{
    std::string s = r.check + " [" + r.model + ", order " + std::to_string(r.order) + "]: " + verdict_name(r.verdict);
    if (r.discrepancy) {
        s += "\n  first discrepancy at (";
        for (std::size_t i = 0; i < r.discrepancy->indices.size(); ++i) s += (i ? "," : "") + std::to_string(r.discrepancy->indices[i]);
        s += "): " + r.discrepancy->coeff.str() + " * " + r.discrepancy->monomial;
    }
    if (!r.note.empty()) s += "\n  " + r.note;
    return s;
}

/// Runs `body` on a fresh report and fills in the wall time.
template <class Body>
Report timed_report(std::string model, std::string check, int order, Body&& body)
{
    Report r;
    r.model = std::move(model);
    r.check = std::move(check);
    r.order = order;
    const auto t0 = std::chrono::steady_clock::now();
    body(r);
    r.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace ncphase
