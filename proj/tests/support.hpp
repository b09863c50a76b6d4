#pragma once

#include "ncphase/series.hpp"

#include <ostream>
#include <random>

namespace ncphase {

inline void PrintTo(const Series& s, std::ostream* os) { *os << (s.is_zero() ? std::string("0") : s.str()); }

}  // namespace ncphase

namespace ncphase::test_support {

/// Random small series over `like`'s layout: rational coefficients with
/// small numerators and denominators, momentum degree in [min_mom, max_mom].
inline Series random_series(const Series& like, std::mt19937& rng, int terms, int min_mom, int max_mom, int max_par = 2)
{
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    std::uniform_int_distribution<int> bank(0, std::max(0, like.layout().banks - 1));
    std::uniform_int_distribution<int> comp(0, like.dim() - 1);
    std::uniform_int_distribution<int> mdeg(min_mom, max_mom);
    std::uniform_int_distribution<int> pdeg(0, max_par);
    std::uniform_int_distribution<int> par(0, std::max(0, like.num_params() - 1));
    Series s = Series::zero_like(like);
    for (int t = 0; t < terms; ++t) {
        Exponents e{};
        const int md = mdeg(rng);
        for (int j = 0; j < md; ++j) ++e[static_cast<std::size_t>(like.mom_var(bank(rng), comp(rng)))];
        if (like.num_params() > 0) {
            const int pd = pdeg(rng);
            for (int j = 0; j < pd; ++j) ++e[static_cast<std::size_t>(par(rng))];
        }
        const int nn = num(rng);
        s.add_term(e, Gauss::frac(nn == 0 ? 1 : nn, den(rng)));
    }
    return s;
}

}  // namespace ncphase::test_support
