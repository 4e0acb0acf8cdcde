#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

namespace phibose {

/// x -> 1 / (e^{beta x} - 1)
struct Bose {
    double beta = 1.0;
};

/// x -> F(beta x) with F(y) = 1/(e^y - 1) - 1/y, bounded on [0, inf).
struct BoseRegular {
    double beta = 1.0;
};

/// x -> 1 / (1 + x)
struct SimpleResolvent {};

/// x -> 1 / (x - z), z < 0
struct ShiftedInverse {
    double z = -1.0;
};

using SpectralFunction = std::variant<Bose, BoseRegular, SimpleResolvent, ShiftedInverse>;

/// F(y) = 1/(e^y - 1) - 1/y, continued by F(0) = -1/2.
inline double bose_regular(double y)
{
    if (std::abs(y) < 0.05) {
        const double y2 = y * y;
        return -0.5 + y * (1.0 / 12.0 + y2 * (-1.0 / 720.0 + y2 * (1.0 / 30240.0 - y2 / 1209600.0)));
    }
    return 1.0 / std::expm1(y) - 1.0 / y;
}

inline double evaluate(const SpectralFunction& fn, double x)
{
    return std::visit(
        [x](const auto& f) -> double {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Bose>) {
                if (!(x > 0.0)) throw std::domain_error("Bose function evaluated at a non-positive eigenvalue");
                return 1.0 / std::expm1(f.beta * x);
            } else if constexpr (std::is_same_v<T, BoseRegular>) {
                return bose_regular(f.beta * x);
            } else if constexpr (std::is_same_v<T, SimpleResolvent>) {
                return 1.0 / (1.0 + x);
            } else {
                return 1.0 / (x - f.z);
            }
        },
        fn);
}

/// Same function expressed on an eigenvalue mu of the inverse operator,
/// g(mu) = F(1/mu).
inline double evaluate_on_inverse(const SpectralFunction& fn, double mu)
{
    if (!(mu > 0.0)) throw std::domain_error("inverse eigenvalue must be positive");
    if (std::holds_alternative<Bose>(fn)) {
        const double beta = std::get<Bose>(fn).beta;
        const double y = beta / mu;
        return y > 700.0 ? 0.0 : 1.0 / std::expm1(y);
    }
    if (std::holds_alternative<BoseRegular>(fn)) {
        const double y = std::get<BoseRegular>(fn).beta / mu;
        return y > 700.0 ? -1.0 / y : bose_regular(y);
    }
    return evaluate(fn, 1.0 / mu);
}

inline void validate(const SpectralFunction& fn)
{
    std::visit(
        [](const auto& f) {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, Bose> || std::is_same_v<T, BoseRegular>) {
                if (!(f.beta > 0.0)) throw std::invalid_argument("spectral function: beta must be positive");
            } else if constexpr (std::is_same_v<T, ShiftedInverse>) {
                if (!(f.z < 0.0)) throw std::invalid_argument("spectral function: shift z must be negative");
            }
        },
        fn);
}

}  // namespace phibose
