#pragma once

#include "ncphase/gauss.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ncphase {

/// Error raised when two series from different variable layouts meet.
class IncompatibleSeries : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Rewrite rule pivot^2 -> sum_j c_j s_j^2 on parameter monomials. Encodes a
/// null vector a.a = 0 while keeping every component symbolic.
struct NullConstraint {
    int pivot = 0;
    std::vector<std::pair<int, Rational>> rest;
};

/// Model scope: dimension, diagonal metric and the parameter symbol table.
/// Immutable once built; series hold it through a shared pointer.
class Context {
public:
    static std::shared_ptr<const Context> make(int dim, std::vector<int> metric, std::vector<std::string> params,
                                               std::optional<NullConstraint> null = std::nullopt)
    {
        if (dim < 1) throw std::invalid_argument("dimension must be positive");
        if (static_cast<int>(metric.size()) != dim) throw std::invalid_argument("metric length does not match dimension");
        for (int s : metric)
            if (s != 1 && s != -1) throw std::invalid_argument("metric entries must be +1 or -1");
        auto c = std::shared_ptr<Context>(new Context());
        c->dim_ = dim;
        c->metric_ = std::move(metric);
        c->params_ = std::move(params);
        c->null_ = std::move(null);
        return c;
    }

    static std::vector<int> lorentzian(int dim)
    {
        std::vector<int> m(static_cast<std::size_t>(dim), 1);
        m[0] = -1;
        return m;
    }
    static std::vector<int> euclidean(int dim) { return std::vector<int>(static_cast<std::size_t>(dim), 1); }

    int dim() const { return dim_; }
    int eta(int mu) const { return metric_[static_cast<std::size_t>(mu)]; }
    const std::vector<int>& metric() const { return metric_; }
    int num_params() const { return static_cast<int>(params_.size()); }
    const std::vector<std::string>& params() const { return params_; }
    const std::string& param_name(int i) const { return params_[static_cast<std::size_t>(i)]; }
    const std::optional<NullConstraint>& null_constraint() const { return null_; }

    std::optional<int> find_param(const std::string& name) const
    {
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i] == name) return static_cast<int>(i);
        return std::nullopt;
    }
    int param(const std::string& name) const
    {
        auto p = find_param(name);
        if (!p) throw std::invalid_argument("unknown parameter symbol '" + name + "'");
        return *p;
    }

    bool same_as(const Context& o) const
    {
        return this == &o || (dim_ == o.dim_ && metric_ == o.metric_ && params_ == o.params_ && null_.has_value() == o.null_.has_value());
    }

private:
    Context() = default;
    int dim_ = 0;
    std::vector<int> metric_;
    std::vector<std::string> params_;
    std::optional<NullConstraint> null_;
};

using ContextPtr = std::shared_ptr<const Context>;

/// Null constraint for the vector parameter with components `names[mu]`:
/// eta_00 a_0^2 + sum eta_jj a_j^2 = 0 solved for the first component.
inline NullConstraint null_vector_constraint(const std::vector<int>& metric, const std::vector<int>& component_params)
{
    NullConstraint nc;
    nc.pivot = component_params.at(0);
    for (std::size_t j = 1; j < component_params.size(); ++j)
        nc.rest.emplace_back(component_params[j], Rational(-metric[j] * metric[0]));
    return nc;
}

}  // namespace ncphase
