#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "cha/errors.hpp"

namespace cha {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
        return sum;
    }

    void append(const QuadratureRule& other) {
        nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
        weights.insert(weights.end(), other.weights.begin(), other.weights.end());
    }
};

namespace detail {

// Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline QuadratureRule compute_reference_rule(int n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // one more derivative evaluation at the converged node
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule on [-1, 1].
inline const QuadratureRule& reference_rule(int n) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(detail::compute_reference_rule(n));
    return *slot;
}

inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 2) throw DomainError("gauss_legendre: n must be >= 2");
    if (!(a < b)) throw DomainError("gauss_legendre: requires a < b");
    const auto& ref = reference_rule(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * ref.nodes[i];
        rule.weights[i] = half * ref.weights[i];
    }
    return rule;
}

struct Panel {
    double a;
    double b;
};

/// Split [a,b] into `count` equal panels.
inline std::vector<Panel> uniform_panels(double a, double b, int count) {
    std::vector<Panel> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        double lo = a + (b - a) * i / count;
        double hi = (i + 1 == count) ? b : a + (b - a) * (i + 1) / count;
        out.push_back({lo, hi});
    }
    return out;
}

/// Panels on [a,b] that shrink geometrically toward the endpoints flagged in
/// `grade_left`/`grade_right`. Each graded end gets `levels` extra panels whose
/// widths fall off by `ratio`.
inline std::vector<Panel> graded_panels(double a, double b, bool grade_left, bool grade_right,
                                        int levels = 10, double ratio = 0.15) {
    std::vector<Panel> out;
    double lo = a, hi = b;
    if (grade_left && grade_right) {
        double mid = 0.5 * (a + b);
        auto l = graded_panels(a, mid, true, false, levels, ratio);
        auto r = graded_panels(mid, b, false, true, levels, ratio);
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    if (grade_left) {
        double width = hi - lo;
        double edge = lo + width * std::pow(ratio, levels);
        out.push_back({lo, edge});
        for (int k = levels - 1; k >= 0; --k) {
            double next = lo + width * std::pow(ratio, k);
            out.push_back({edge, next});
            edge = next;
        }
        return out;
    }
    if (grade_right) {
        double width = hi - lo;
        double edge = hi - width * std::pow(ratio, levels);
        std::vector<Panel> tmp{{edge, hi}};
        for (int k = levels - 1; k >= 0; --k) {
            double next = hi - width * std::pow(ratio, k);
            tmp.push_back({next, edge});
            edge = next;
        }
        out.assign(tmp.rbegin(), tmp.rend());
        return out;
    }
    out.push_back({a, b});
    return out;
}

/// Composite rule on the given panels with `order` nodes per panel.
inline QuadratureRule composite_rule(std::span<const Panel> panels, int order) {
    QuadratureRule rule;
    rule.nodes.reserve(panels.size() * order);
    rule.weights.reserve(panels.size() * order);
    for (const auto& p : panels) {
        if (p.b > p.a) rule.append(gauss_legendre(order, p.a, p.b));
    }
    return rule;
}

/// Sorted breakpoints -> graded panel list. Breakpoints listed in `singular`
/// (zeros of the integrand density, or the origin) receive geometric grading;
/// the remaining stretch is cut into pieces no wider than `max_width`.
inline std::vector<Panel> build_panels(std::span<const double> breakpoints,
                                       std::span<const double> singular, double max_width,
                                       int levels = 10, double ratio = 0.15) {
    auto is_singular = [&](double x) {
        for (double s : singular)
            if (std::abs(s - x) <= 1e-14 * std::max(1.0, std::abs(x))) return true;
        return false;
    };
    std::vector<Panel> out;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        double a = breakpoints[i], b = breakpoints[i + 1];
        if (!(b > a)) continue;
        bool gl = is_singular(a), gr = is_singular(b);
        // Graded end pieces cover one max_width (or the whole interval if shorter).
        double span = b - a;
        int count = std::max(1, static_cast<int>(std::ceil(span / max_width)));
        double w = span / count;
        for (int k = 0; k < count; ++k) {
            double lo = a + w * k;
            double hi = (k + 1 == count) ? b : a + w * (k + 1);
            bool left = gl && k == 0;
            bool right = gr && k + 1 == count;
            auto pieces = graded_panels(lo, hi, left, right, levels, ratio);
            out.insert(out.end(), pieces.begin(), pieces.end());
        }
    }
    return out;
}

/// Split every panel in half.
inline std::vector<Panel> bisect_panels(std::span<const Panel> panels) {
    std::vector<Panel> out;
    out.reserve(2 * panels.size());
    for (const auto& p : panels) {
        double mid = 0.5 * (p.a + p.b);
        out.push_back({p.a, mid});
        out.push_back({mid, p.b});
    }
    return out;
}

/// Composite Gauss-Legendre integral, accepted once two successive panel
/// bisections agree to `rel_tol` (relative, with `abs_floor` as absolute floor).
template <class F>
double integrate_refined(F&& f, std::vector<Panel> panels, int order, double rel_tol, double abs_floor = 0.0,
                         int max_refinements = 4) {
    auto eval = [&](const std::vector<Panel>& ps) {
        const auto& ref = reference_rule(order);
        double sum = 0.0;
        for (const auto& p : ps) {
            double half = 0.5 * (p.b - p.a), mid = 0.5 * (p.a + p.b), part = 0.0;
            for (int i = 0; i < order; ++i) part += ref.weights[i] * f(mid + half * ref.nodes[i]);
            sum += half * part;
        }
        return sum;
    };
    double coarse = eval(panels);
    for (int level = 0; level < max_refinements; ++level) {
        panels = bisect_panels(panels);
        double fine = eval(panels);
        if (std::abs(fine - coarse) <= rel_tol * std::abs(fine) + abs_floor) return fine;
        coarse = fine;
    }
    throw ConvergenceError("integrate_refined: panel refinement did not converge");
}

}  // namespace cha
