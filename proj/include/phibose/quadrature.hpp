#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace phibose {

/// Nodes and weights of a fixed-order Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline const GaussRule& gauss_rule_16()
{
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 16>;
        GaussRule r;
        const auto& x = G::abscissa();
        const auto& w = G::weights();
        for (std::size_t i = x.size(); i-- > 0;) {
            r.nodes.push_back(-x[i]);
            r.weights.push_back(w[i]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            r.nodes.push_back(x[i]);
            r.weights.push_back(w[i]);
        }
        return r;
    }();
    return rule;
}

/// Composite Gauss-Legendre nodes on [a, b] split into equal panels.
inline GaussRule composite_gauss_rule(double a, double b, int panels)
{
    if (panels < 1) throw std::invalid_argument("composite_gauss_rule: panels must be positive");
    const GaussRule& base = gauss_rule_16();
    GaussRule out;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        for (std::size_t i = 0; i < base.nodes.size(); ++i) {
            out.nodes.push_back(lo + 0.5 * width * (base.nodes[i] + 1.0));
            out.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return out;
}

/// Integral over [a, b] of a smooth function that may be flat to all orders at the ends.
template <class F>
double integrate_endpoint_flat(F&& f, double a, double b)
{
    if (!(b > a)) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
    return rule.integrate(f, a, b, 1e-15);
}

}  // namespace phibose
