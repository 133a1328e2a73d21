#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cha/errors.hpp"
#include "cha/quadrature.hpp"
#include "cha/solver.hpp"
#include "cha/special_fn.hpp"

namespace cha {

/// Cutoff ladder and accuracy settings for the momentum transform.
struct MomentumSpec {
    double target_deficit = 1e-8;  // accepted 1 - int_0^pmax phi^2 p^2 dp
    double first_rung = 20.0;      // p_max ladder: first_rung * Z * 2^k
    int max_rungs = 14;
    int p_order = 16;              // GL nodes per p panel (also interpolation order)
    int r_order = 24;              // GL nodes per r panel of the transform
    int check_order = 32;          // second rule for the resolution check
    double check_tol = 1e-9;       // two-rule agreement, relative to max |phi|
    double interp_tol = 1e-11;     // interpolant acceptance, relative to max |phi|
};

struct LadderStep {
    double p_max;
    double deficit;
};

struct MomentumSolution {
    QuantumNumbers qn;
    Confinement conf;
    std::vector<double> p_grid;
    std::vector<double> weights;
    std::vector<double> values;   // radial amplitude, (-i)^l phase factored out
    double p_max = 0.0;
    double norm_deficit = 0.0;    // before renormalization
    int phase_power = 0;          // full amplitude carries (-i)^phase_power
    std::vector<double> zeros;    // interior zeros of phi
    std::vector<double> breaks;   // panel edges of the sampling grid
    std::vector<LadderStep> ladder;
    double max_check_delta = 0.0; // largest two-rule disagreement seen
    bool analytic = false;
    std::function<double(double)> amplitude;

    double operator()(double p) const { return amplitude(p); }

    DensityView density() const {
        DensityView v;
        v.amplitude = amplitude;
        v.upper = p_max;
        v.zeros = zeros;
        v.breaks = breaks;
        v.vanishes_at_upper = false;
        v.max_panel = p_max;  // panel edges come from `breaks`
        return v;
    }
};

namespace detail {

// Barycentric interpolation on the Gauss-Legendre nodes of each panel.
class PanelInterpolant {
  public:
    PanelInterpolant(std::vector<double> edges, std::vector<double> values, int order)
        : edges_(std::move(edges)), values_(std::move(values)), order_(order) {
        const auto& ref = reference_rule(order);
        bary_.resize(order);
        for (int j = 0; j < order; ++j)
            bary_[j] = ((j % 2) ? -1.0 : 1.0) * std::sqrt((1.0 - ref.nodes[j] * ref.nodes[j]) * ref.weights[j]);
        nodes_ = ref.nodes;
    }

    double operator()(double p) const {
        if (p <= edges_.front()) p = edges_.front();
        if (p >= edges_.back()) p = edges_.back();
        auto it = std::upper_bound(edges_.begin(), edges_.end(), p);
        std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - edges_.begin() - 1, 0), edges_.size() - 2);
        return eval_panel(k, p);
    }

    double eval_panel(std::size_t k, double p) const {
        double a = edges_[k], b = edges_[k + 1];
        double x = (2.0 * p - a - b) / (b - a);
        const double* f = values_.data() + k * order_;
        double num = 0.0, den = 0.0;
        for (int j = 0; j < order_; ++j) {
            double d = x - nodes_[j];
            if (d == 0.0) return f[j];
            double t = bary_[j] / d;
            num += t * f[j];
            den += t;
        }
        return num / den;
    }

  private:
    std::vector<double> edges_;
    std::vector<double> values_;
    int order_;
    std::vector<double> nodes_;
    std::vector<double> bary_;
};

// phi(p) = sqrt(2/pi) int_0^reff R(r) j_l(pr) r^2 dr on composite GL panels.
// Level m splits every base panel into 2^m pieces; p picks the coarsest level
// whose pieces span at most one oscillation period.
class RadialTransform {
  public:
    RadialTransform(const RadialSolution& rs, int order) : l_(rs.qn.l), order_(order), amp_(rs.amplitude) {
        r_eff_ = effective_radius(rs);
        int count = RadialSolution::base_panel_count(rs.conf.Z * r_eff_, rs.grid_spec);
        base_ = uniform_panels(0.0, r_eff_, count);
        base_width_ = r_eff_ / count;
    }

    double r_eff() const { return r_eff_; }

    double operator()(double p) { return eval(p, level_for(p), order_); }

    double eval(double p, int level, int order) {
        const auto& lv = level_data(level, order);
        double sum = 0.0;
        if (p == 0.0) {
            if (l_ != 0) return 0.0;
            for (std::size_t i = 0; i < lv.r.size(); ++i) sum += lv.g[i];
        } else {
            for (std::size_t i = 0; i < lv.r.size(); ++i) sum += lv.g[i] * spherical_bessel_j(l_, p * lv.r[i]);
        }
        return std::sqrt(2.0 / std::numbers::pi) * sum;
    }

    int level_for(double p) const {
        int level = 0;
        double width = base_width_;
        const double period = 2.0 * std::numbers::pi / std::max(p, 1e-300);
        while (width > period && level < 30) {
            width *= 0.5;
            ++level;
        }
        return level;
    }

  private:
    struct Level {
        std::vector<double> r;
        std::vector<double> g;  // weight * R(r) * r^2
    };

    static double effective_radius(const RadialSolution& rs) {
        // Drop the outer stretch where |u| = |R| r stays below 1e-15 of its maximum.
        double umax = 0.0;
        for (std::size_t i = 0; i < rs.grid.size(); ++i) umax = std::max(umax, std::abs(rs.values[i] * rs.grid[i]));
        std::size_t last = rs.grid.size() - 1;
        while (last > 0 && std::abs(rs.values[last] * rs.grid[last]) <= 1e-15 * umax) --last;
        double r_last = rs.grid[last];
        return r_last > 0.95 * rs.r_max ? rs.r_max : std::min(rs.r_max, 1.05 * r_last);
    }

    const Level& level_data(int level, int order) {
        auto key = std::make_pair(level, order);
        for (auto& [k, v] : levels_)
            if (k == key) return v;
        Level lv;
        const int split = 1 << level;
        const auto& ref = reference_rule(order);
        lv.r.reserve(base_.size() * split * order);
        lv.g.reserve(base_.size() * split * order);
        for (const auto& panel : base_) {
            double w = (panel.b - panel.a) / split;
            for (int s = 0; s < split; ++s) {
                double a = panel.a + w * s, half = 0.5 * w, mid = a + half;
                for (int i = 0; i < order; ++i) {
                    double r = mid + half * ref.nodes[i];
                    lv.r.push_back(r);
                    lv.g.push_back(half * ref.weights[i] * amp_(r) * r * r);
                }
            }
        }
        levels_.emplace_back(key, std::move(lv));
        return levels_.back().second;
    }

    int l_;
    int order_;
    std::function<double(double)> amp_;
    double r_eff_ = 0.0;
    double base_width_ = 0.0;
    std::vector<Panel> base_;
    std::vector<std::pair<std::pair<int, int>, Level>> levels_;
};

inline std::vector<double> sign_change_zeros(const std::vector<double>& p, const std::vector<double>& v,
                                             const std::function<double(double)>& f) {
    std::vector<double> zeros;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        if (v[i] == 0.0 && i > 0 && p[i] > 0.0) zeros.push_back(p[i]);
        if (v[i] != 0.0 && v[i + 1] != 0.0 && (v[i] < 0) != (v[i + 1] < 0))
            zeros.push_back(bracketed_root(f, p[i], p[i + 1], v[i], v[i + 1]));
    }
    return zeros;
}

}  // namespace detail

/// Un-normalized transform sqrt(2/pi) int R(r) j_l(pr) r^2 dr at a single momentum.
inline double radial_transform(const RadialSolution& rs, double p, int order = 24) {
    detail::RadialTransform t(rs, order);
    return t(p);
}

/// Momentum-space radial amplitude of a confined (or free, numerically) state.
inline MomentumSolution to_momentum(const RadialSolution& rs, const MomentumSpec& spec = {}) {
    if (!(spec.target_deficit > 0.0)) throw DomainError("to_momentum: target deficit must be > 0");
    detail::RadialTransform transform(rs, spec.r_order);
    const double r_eff = transform.r_eff();
    const int order = spec.p_order;
    const auto& ref = reference_rule(order);

    // amplitude scale from a coarse pass over the bulk of the distribution
    double mean_r = 0.0;
    for (std::size_t i = 0; i < rs.grid.size(); ++i) {
        double u = rs.values[i] * rs.grid[i];
        mean_r += rs.weights[i] * u * u * rs.grid[i];
    }
    double scale = 0.0;
    for (int i = 0; i <= 200; ++i) scale = std::max(scale, std::abs(transform(3.0 / mean_r * i / 200.0)));
    const double interp_abs = spec.interp_tol * scale;

    std::vector<double> edges{0.0};
    std::vector<double> values;  // order values per panel, in panel order
    std::vector<double> nodes, weights;
    double norm = 0.0;

    const double check_pts[2] = {-0.6180339887, 0.4142135624};
    auto sample_panel = [&](double a, double b, auto&& self, int depth) -> void {
        double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        std::vector<double> f(order);
        for (int i = 0; i < order; ++i) f[i] = transform(mid + half * ref.nodes[i]);
        detail::PanelInterpolant local({a, b}, f, order);
        bool ok = true;
        for (double c : check_pts) {
            double p = mid + half * c;
            if (std::abs(local(p) - transform(p)) > interp_abs) ok = false;
        }
        if (!ok && depth < 20) {
            self(a, mid, self, depth + 1);
            self(mid, b, self, depth + 1);
            return;
        }
        if (!ok) throw ResolutionError("to_momentum: p-panel refinement limit reached");
        for (int i = 0; i < order; ++i) {
            double p = mid + half * ref.nodes[i];
            nodes.push_back(p);
            weights.push_back(half * ref.weights[i]);
            values.push_back(f[i]);
            norm += half * ref.weights[i] * f[i] * f[i] * p * p;
        }
        edges.push_back(b);
    };

    MomentumSolution ms;
    ms.qn = rs.qn;
    ms.conf = rs.conf;
    ms.phase_power = rs.qn.l;

    // wall oscillations in p have period 2 pi / rc; a quarter period per panel
    // momenta scale with Z; at Z = 1 these are plain atomic units
    const double Z = rs.conf.Z;
    const double wide = std::max(0.5 * Z, 0.5 * std::numbers::pi / r_eff);
    double p_lo = 0.0;
    double p_hi = spec.first_rung * Z;
    double deficit = 1.0;
    for (int rung = 0; rung < spec.max_rungs; ++rung, p_hi *= 2.0) {
        while (p_lo < p_hi * (1.0 - 1e-15)) {
            double w = p_lo < 5.0 * Z ? std::min(0.5 * Z, wide) : wide;
            double b = std::min(p_hi, p_lo + w);
            if (p_hi - b < 0.25 * w) b = p_hi;
            sample_panel(p_lo, b, sample_panel, 0);
            p_lo = b;
        }
        p_lo = p_hi;
        deficit = 1.0 - norm;
        ms.ladder.push_back({p_hi, deficit});
        if (deficit <= spec.target_deficit) break;
    }
    if (deficit > spec.target_deficit)
        throw CutoffError("to_momentum: norm deficit " + std::to_string(deficit) + " above target after " +
                          std::to_string(spec.max_rungs) + " rungs");

    // two-rule check on sample momenta across the grid
    double max_phi = 0.0;
    for (double v : values) max_phi = std::max(max_phi, std::abs(v));
    const double p_max = p_hi;
    for (int i = 0; i <= 16; ++i) {
        double p = p_max * std::pow(1e-4, 1.0 - i / 16.0);
        int level = transform.level_for(p);
        double a = transform.eval(p, level, spec.r_order);
        double b = transform.eval(p, level, spec.check_order);
        double d = std::abs(a - b);
        ms.max_check_delta = std::max(ms.max_check_delta, d / max_phi);
        if (d > spec.check_tol * max_phi)
            throw ResolutionError("to_momentum: r-quadrature rules disagree at p = " + std::to_string(p));
    }

    const double renorm = 1.0 / std::sqrt(norm);
    for (auto& v : values) v *= renorm;
    ms.p_grid = nodes;
    ms.weights = weights;
    ms.values = values;
    ms.p_max = p_max;
    ms.norm_deficit = deficit;
    ms.breaks = edges;
    auto interp = std::make_shared<detail::PanelInterpolant>(edges, values, order);
    ms.amplitude = [interp](double p) { return (*interp)(p); };
    ms.zeros = detail::sign_change_zeros(ms.p_grid, ms.values, ms.amplitude);
    return ms;
}

/// Smallest ladder rung meeting the deficit target.
inline double choose_pmax(const RadialSolution& rs, double target_deficit, MomentumSpec spec = {}) {
    if (!(target_deficit > 0.0 && target_deficit <= 1e-6))
        throw DomainError("choose_pmax: target deficit must lie in (0, 1e-6]");
    spec.target_deficit = target_deficit;
    return to_momentum(rs, spec).p_max;
}

namespace detail {

inline double gegenbauer(int k, double alpha, double x) {
    if (k == 0) return 1.0;
    double c0 = 1.0, c1 = 2.0 * alpha * x;
    for (int j = 1; j < k; ++j) {
        double c2 = (2.0 * x * (j + alpha) * c1 - (j + 2.0 * alpha - 1.0) * c0) / (j + 1.0);
        c0 = c1;
        c1 = c2;
    }
    return c1;
}

}  // namespace detail

/// Analytic free-atom momentum amplitude (Gegenbauer form), same phase
/// convention as to_momentum.
inline MomentumSolution fha_momentum(const QuantumNumbers& qn, double Z) {
    qn.validate();
    Confinement conf{Z, std::numeric_limits<double>::infinity()};
    conf.validate();
    const int n = qn.n, l = qn.l, k = qn.radial_nodes();
    const double log_pref = 0.5 * (std::log(2.0 / std::numbers::pi) + std::lgamma(k + 1.0) - std::lgamma(n + l + 1.0)) +
                            2.0 * std::log(n) + (2.0 * l + 2.0) * std::log(2.0) + std::lgamma(l + 1.0) +
                            l * std::log(n) - 1.5 * std::log(Z);
    const double pref = std::exp(log_pref);
    auto amp = [=](double p) {
        double q = p / Z;
        double t = n * n * q * q;
        double x = (t - 1.0) / (t + 1.0);
        return pref * std::pow(q, l) / std::pow(t + 1.0, l + 2) * detail::gegenbauer(k, l + 1.0, x);
    };

    MomentumSolution ms;
    ms.qn = qn;
    ms.conf = conf;
    ms.phase_power = l;
    ms.analytic = true;
    ms.amplitude = amp;

    // zeros: Gegenbauer zeros in x mapped back to p
    const int steps = 4000;
    double prev_x = -1.0, prev = detail::gegenbauer(k, l + 1.0, -1.0);
    for (int i = 1; i <= steps; ++i) {
        double x = -1.0 + 2.0 * i / steps;
        double v = detail::gegenbauer(k, l + 1.0, x);
        double xz = 0.0;
        bool found = false;
        if (v == 0.0 && i < steps) {
            xz = x;
            found = true;
            v = -prev;
        } else if (v != 0.0 && (v < 0) != (prev < 0)) {
            auto f = [&](double y) { return detail::gegenbauer(k, l + 1.0, y); };
            xz = detail::bracketed_root(f, prev_x, x, prev, v);
            found = true;
        }
        if (found) ms.zeros.push_back(Z * std::sqrt((1.0 + xz) / (1.0 - xz)) / n);
        prev = v;
        prev_x = x;
    }

    // p^2 phi^2 ~ p^{-2l-6}: walk out until the tail is below 1e-24
    const double p0 = Z / n;
    double P = 4.0 * p0;
    for (;; P *= 1.1) {
        double v = amp(P);
        if (P * v * v * P * P / (2.0 * l + 5.0) < 1e-24) break;
    }
    ms.p_max = P;
    // uniform panels through the bulk, geometric beyond
    std::vector<double> edges;
    const double bulk = 4.0 * p0, w = p0 / 8.0;
    for (double p = 0.0; p < bulk - 1e-12; p += w) edges.push_back(p);
    for (double p = bulk; p < P; p *= 1.25) edges.push_back(p);
    edges.push_back(P);
    ms.breaks = edges;

    DensityView view = ms.density();
    auto rule = composite_rule(view.panels(), 16);
    ms.p_grid = rule.nodes;
    ms.weights = rule.weights;
    ms.values.resize(ms.p_grid.size());
    double norm = 0.0;
    for (std::size_t i = 0; i < ms.p_grid.size(); ++i) {
        ms.values[i] = amp(ms.p_grid[i]);
        norm += ms.weights[i] * ms.values[i] * ms.values[i] * ms.p_grid[i] * ms.p_grid[i];
    }
    ms.norm_deficit = 1.0 - norm;
    return ms;
}

}  // namespace cha
