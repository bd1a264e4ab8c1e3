// SPDX-License-Identifier: Apache-2.0
#include "support/oracles.hpp"

#include <cmath>
#include <cstddef>
#include <functional>

namespace labline::testsupport {

OlsLine ols_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double xbar = 0.0;
    double ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }

    OlsLine line;
    line.slope = sxy / sxx;
    line.intercept = ybar - line.slope * xbar;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - line.intercept - line.slope * x[i];
        line.rss += r * r;
    }
    return line;
}

namespace {

double adaptive_step(const std::function<double(double)>& f, double a, double b, double fa,
                     double fm, double fb, double whole, double eps, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * eps) {
        return left + right + delta / 15.0;
    }
    return adaptive_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
           adaptive_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double eps) {
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_step(f, a, b, fa, fm, fb, whole, eps, 60);
}

}  // namespace

double f_cdf_oracle(double x, double d1, double d2) {
    if (!(x > 0.0)) return 0.0;

    const double log_norm = std::lgamma(0.5 * (d1 + d2)) - std::lgamma(0.5 * d1) -
                            std::lgamma(0.5 * d2) + 0.5 * d1 * std::log(d1 / d2);

    // Integrand after x = u^2: pdf(u^2) * 2u = 2 exp(log_norm
    //   + (d1 - 1) ln u - (d1 + d2)/2 ln(1 + d1 u^2 / d2)).
    const auto g = [&](double u) {
        if (u == 0.0) return d1 == 1.0 ? 2.0 * std::exp(log_norm) : 0.0;
        return 2.0 * std::exp(log_norm + (d1 - 1.0) * std::log(u) -
                              0.5 * (d1 + d2) * std::log1p(d1 * u * u / d2));
    };
    return adaptive_simpson(g, 0.0, std::sqrt(x), 1e-13);
}

}  // namespace labline::testsupport
