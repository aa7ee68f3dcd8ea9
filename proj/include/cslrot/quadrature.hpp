#pragma once

// Adaptive Gauss-Kronrod (7/15) integration on an interval with optional
// interior breakpoints. Header-only so the integrand inlines. The generic
// form works in any floating type that provides GkNodes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace cslrot {

struct QuadratureOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    int max_intervals = 2000;
};

template <class Real>
struct BasicQuadratureResult {
    Real value = 0;
    Real abs_error = 0;
    long evaluations = 0;
    bool converged = false;
};

using QuadratureResult = BasicQuadratureResult<double>;

// Kronrod abscissae (descending, centre last), Kronrod weights, and Gauss
// weights for the points xgk[1], xgk[3], xgk[5], xgk[7].
template <class Real>
struct GkNodes;

template <>
struct GkNodes<double> {
    static constexpr double xgk[8] = {
        0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
        0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {
        0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
        0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
        0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
        0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {
        0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
        0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

namespace detail {

template <class Real>
struct Panel {
    Real a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class Real, class F>
Panel<Real> gk15(F& f, Real a, Real b) {
    using std::abs;
    using std::pow;
    using N = GkNodes<Real>;
    Real c = (a + b) / 2;
    Real h = (b - a) / 2;
    Real fc = f(c);
    Real kron = fc * N::wgk[7];
    Real gauss = fc * N::wg[3];
    Real fv1[7], fv2[7];
    for (int j = 0; j < 7; ++j) {
        Real dx = h * N::xgk[j];
        fv1[j] = f(c - dx);
        fv2[j] = f(c + dx);
        kron += N::wgk[j] * (fv1[j] + fv2[j]);
        if (j % 2 == 1) gauss += N::wg[j / 2] * (fv1[j] + fv2[j]);
    }
    // QUADPACK-style error scaling.
    Real mean = kron / 2;
    Real asc = N::wgk[7] * abs(fc - mean);
    for (int j = 0; j < 7; ++j)
        asc += N::wgk[j] * (abs(fv1[j] - mean) + abs(fv2[j] - mean));
    asc *= abs(h);
    Real err = abs((kron - gauss) * h);
    if (asc != 0 && err != 0) {
        Real s = pow(200 * err / asc, Real(1.5));
        err = asc * (s < 1 ? s : Real(1));
    }
    return {a, b, kron * h, err};
}

}  // namespace detail

template <class Real, class F>
BasicQuadratureResult<Real> integrate_generic(F&& f, Real a, Real b, std::span<const Real> breaks, Real abs_tol,
                                              Real rel_tol, int max_intervals) {
    using std::abs;
    BasicQuadratureResult<Real> out;
    if (!(b > a)) {
        out.converged = true;
        return out;
    }
    std::vector<Real> cuts{a};
    for (const Real& p : breaks)
        if (p > a && p < b) cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    std::vector<detail::Panel<Real>> heap;
    Real total = 0;
    Real err = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        heap.push_back(detail::gk15<Real>(f, cuts[i], cuts[i + 1]));
        out.evaluations += 15;
        total += heap.back().value;
        err += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end());

    const Real eps = std::numeric_limits<Real>::epsilon();
    auto good = [&] {
        Real t = rel_tol * abs(total);
        return err <= (abs_tol > t ? abs_tol : t);
    };
    while (!good() && static_cast<int>(heap.size()) < max_intervals) {
        std::pop_heap(heap.begin(), heap.end());
        detail::Panel<Real> worst = heap.back();
        heap.pop_back();
        Real mid = (worst.a + worst.b) / 2;
        Real scale = abs(worst.a) > abs(worst.b) ? abs(worst.a) : abs(worst.b);
        if (!(mid > worst.a && mid < worst.b) || worst.b - worst.a < 8 * eps * scale) {
            // Cannot split further; keep the panel and stop refining.
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        detail::Panel<Real> left = detail::gk15<Real>(f, worst.a, mid);
        detail::Panel<Real> right = detail::gk15<Real>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }
    // Re-sum with Neumaier compensation to shed rounding from the running updates.
    total = 0;
    err = 0;
    Real carry = 0;
    for (const auto& p : heap) {
        Real t = total + p.value;
        carry += abs(total) >= abs(p.value) ? (total - t) + p.value : (p.value - t) + total;
        total = t;
        err += p.error;
    }
    total += carry;
    out.value = total;
    out.abs_error = err;
    out.converged = good();
    return out;
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, std::span<const double> breaks,
                           const QuadratureOptions& opt = {}) {
    return integrate_generic<double>(std::forward<F>(f), a, b, breaks, opt.abs_tol, opt.rel_tol,
                                     opt.max_intervals);
}

template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    return integrate(std::forward<F>(f), a, b, std::span<const double>{}, opt);
}

}  // namespace cslrot
