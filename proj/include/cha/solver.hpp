#pragma once

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "cha/errors.hpp"
#include "cha/quadrature.hpp"
#include "cha/special_fn.hpp"

namespace cha {

struct QuantumNumbers {
    int n = 1;
    int l = 0;
    int m = 0;

    void validate() const {
        if (n < 1) throw ValidationError("quantum numbers: n must be >= 1");
        if (l < 0 || l > n - 1) throw ValidationError("quantum numbers: need 0 <= l <= n-1");
        if (std::abs(m) > l) throw ValidationError("quantum numbers: need |m| <= l");
    }
    int radial_nodes() const { return n - l - 1; }
    friend bool operator==(const QuantumNumbers&, const QuantumNumbers&) = default;
};

/// Letter for l in spectroscopic notation (s p d f g h i k l m n o ...; j is skipped).
inline char orbital_letter(int l) {
    static constexpr char letters[] = "spdfghiklmnoqrtuvwxyz";
    return (l >= 0 && l < 21) ? letters[l] : '?';
}

inline std::string state_label(const QuantumNumbers& qn) {
    return std::to_string(qn.n) + orbital_letter(qn.l);
}

struct Confinement {
    double Z = 1.0;
    double rc = std::numeric_limits<double>::infinity();

    bool is_free() const { return std::isinf(rc); }
    void validate() const {
        if (!(Z > 0.0) || !std::isfinite(Z)) throw ValidationError("confinement: Z must be > 0");
        if (!(rc > 0.0)) throw ValidationError("confinement: rc must be > 0");
    }
};

/// Resolution parameters for the stored radial grid.
struct GridSpec {
    int order = 16;                // Gauss-Legendre nodes per panel
    int min_panels = 64;           // base panel count for Z rc <= 10
    double panels_per_bohr = 6.4;  // base panel count grows with Z rc beyond 10
    int grading_levels = 10;       // geometric refinement toward density zeros and r = 0
    double grading_ratio = 0.15;
};

/// A one-dimensional amplitude (R(r) or phi(p)) together with the facts the
/// integrators need: where it vanishes and how far it extends.
struct DensityView {
    std::function<double(double)> amplitude;
    double upper = 0.0;           // integration upper limit
    std::vector<double> zeros;    // interior zeros, increasing
    std::vector<double> breaks;   // extra panel edges (sampling panels of an interpolant)
    bool vanishes_at_upper = false;
    double max_panel = 1.0;       // base panel width
    int order = 16;
    int grading_levels = 10;
    double grading_ratio = 0.15;

    std::vector<Panel> panels() const {
        std::vector<double> all{0.0, upper};
        std::vector<double> singular{0.0};
        for (double z : zeros) {
            all.push_back(z);
            singular.push_back(z);
        }
        for (double b : breaks)
            if (b > 0.0 && b < upper) all.push_back(b);
        if (vanishes_at_upper) singular.push_back(upper);
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        return build_panels(all, singular, max_panel, grading_levels, grading_ratio);
    }
};

struct RadialSolution {
    QuantumNumbers qn;
    Confinement conf;
    double energy = 0.0;
    std::vector<double> grid;     // quadrature nodes in (0, r_max)
    std::vector<double> weights;  // matching quadrature weights
    std::vector<double> values;   // R(r) on grid
    double norm_constant = 0.0;   // lim R(r)/r^l as r -> 0
    int node_count = 0;
    std::vector<double> zeros;    // interior radial nodes
    double r_max = 0.0;           // rc, or truncation radius for the free atom
    std::function<double(double)> amplitude;  // normalized R(r) anywhere in [0, r_max]
    GridSpec grid_spec;

    double operator()(double r) const { return amplitude(r); }

    DensityView density() const {
        DensityView v;
        v.amplitude = amplitude;
        v.upper = r_max;
        v.zeros = zeros;
        v.vanishes_at_upper = !conf.is_free();
        v.max_panel = r_max / base_panel_count(conf.Z * r_max, grid_spec);
        v.order = grid_spec.order;
        v.grading_levels = grid_spec.grading_levels;
        v.grading_ratio = grid_spec.grading_ratio;
        return v;
    }

    /// `extent` in scaled units Z r, so grids at equal Z rc coincide.
    static int base_panel_count(double extent, const GridSpec& spec) {
        return std::max(spec.min_panels, static_cast<int>(std::ceil(spec.panels_per_bohr * extent)));
    }
};

namespace detail {

// Piece of the reduced radial function u = r R on [lo, hi].
// Frobenius pieces hold d_j with u = r^{l+1} sum d_j (r/hi)^j on [0, hi];
// Taylor pieces hold b_k with u = sum b_k ((r-r0)/h)^k.
struct Segment {
    double lo = 0.0, hi = 0.0;
    double r0 = 0.0, h = 0.0;
    bool frobenius = false;
    std::vector<double> coef;

    double radial(double r, int l) const {  // R = u / r
        if (frobenius) {
            double s = r / hi, acc = 0.0;
            for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * s + *it;
            return std::pow(r, l) * acc;
        }
        double s = (r - r0) / h, acc = 0.0;
        for (auto it = coef.rbegin(); it != coef.rend(); ++it) acc = acc * s + *it;
        return acc / r;
    }
    double reduced(double r, int l) const { return r * radial(r, l); }
    void scale(double f) {
        for (auto& c : coef) c *= f;
    }
};

struct Piecewise {
    std::vector<Segment> segments;  // sorted by lo, contiguous
    int l = 0;

    double operator()(double r) const {
        if (r <= 0.0) return l == 0 ? segments.front().coef.front() : 0.0;
        auto it = std::upper_bound(segments.begin(), segments.end(), r,
                                   [](double x, const Segment& s) { return x < s.lo; });
        if (it != segments.begin()) --it;
        return it->radial(std::min(r, segments.back().hi), l);
    }
};

struct ShootResult {
    double u_end = 0.0;
    double du_end = 0.0;
    int sign_changes = 0;
};

// Series integrator for u'' = [l(l+1)/r^2 - 2Z/r - 2E] u.
class RadialIntegrator {
  public:
    RadialIntegrator(int l, double Z, double E) : l_(l), Z_(Z), E_(E), L_(l * (l + 1.0)) {}

    double frobenius_radius(double limit) const {
        double r1 = limit;
        if (E_ != 0.0) r1 = std::min(r1, 0.5 / std::sqrt(2.0 * std::abs(E_)));
        r1 = std::min(r1, 0.25 * (l_ + 1.0) / Z_);
        return r1;
    }

    // Series around the origin up to r1; returns (segment, u(r1), u'(r1)).
    Segment frobenius(double r1, double& u1, double& du1) const {
        Segment seg;
        seg.lo = 0.0;
        seg.hi = r1;
        seg.frobenius = true;
        double dm2 = 0.0, dm1 = 1.0;
        seg.coef.push_back(1.0);
        double sum = 1.0, dsum = l_ + 1.0;
        for (int j = 1; j < 200; ++j) {
            double d = (-2.0 * Z_ * r1 * dm1 - 2.0 * E_ * r1 * r1 * dm2) / (j * (j + 2.0 * l_ + 1.0));
            seg.coef.push_back(d);
            sum += d;
            dsum += d * (j + l_ + 1.0);
            dm2 = dm1;
            dm1 = d;
            if (j > 4 && std::abs(d) + std::abs(dm2) < 1e-18 * std::abs(sum)) break;
        }
        double rl = std::pow(r1, l_);
        u1 = rl * r1 * sum;
        du1 = rl * dsum;
        return seg;
    }

    // Taylor series step from r0 with step h (either sign).
    Segment taylor(double r0, double u0, double du0, double h, double& u1, double& du1) const {
        Segment seg;
        seg.r0 = r0;
        seg.h = h;
        seg.lo = std::min(r0, r0 + h);
        seg.hi = std::max(r0, r0 + h);
        const double A = L_ - 2.0 * Z_ * r0 - 2.0 * E_ * r0 * r0;
        const double B = -2.0 * Z_ - 4.0 * E_ * r0;
        const double C = -2.0 * E_;
        const double s = h / r0;
        auto& b = seg.coef;
        b.reserve(96);
        b.push_back(u0);
        b.push_back(du0 * h);
        double sum = b[0] + b[1];
        double dsum = b[1];
        double scale = std::abs(b[0]) + std::abs(b[1]);
        for (int k = 0; k < 120; ++k) {
            double bk = b[k];
            double bkm1 = k >= 1 ? b[k - 1] : 0.0;
            double bkm2 = k >= 2 ? b[k - 2] : 0.0;
            double next = (s * s * ((A - k * (k - 1.0)) * bk + B * h * bkm1 + C * h * h * bkm2) -
                           2.0 * s * (k + 1.0) * k * b[k + 1]) /
                          ((k + 2.0) * (k + 1.0));
            b.push_back(next);
            sum += next;
            dsum += (k + 2.0) * next;
            scale = std::max(scale, std::abs(next));
            if (k > 6 && std::abs(next) + std::abs(b[k + 1]) + std::abs(b[k]) < 1e-18 * scale) break;
        }
        u1 = sum;
        du1 = dsum / h;
        return seg;
    }

    // Step length keeping at most one zero per step and the series well inside
    // its disc of convergence.
    double step(double r0, bool inward) const {
        double rmin = inward ? 0.6 * r0 : r0;
        double k2 = 2.0 * std::abs(E_) + 2.0 * Z_ / rmin;
        return std::min(0.4 * r0, 2.0 / std::sqrt(k2));
    }

    // Outward integration from 0 to r_end. Stores segments if `out` is non-null.
    ShootResult shoot(double r_end, std::vector<Segment>* out) const {
        ShootResult res;
        double r1 = frobenius_radius(r_end);
        double u, du;
        auto seg = frobenius(r1, u, du);
        if (out) out->push_back(std::move(seg));
        double r = r1;
        int last_sign = u > 0 ? 1 : (u < 0 ? -1 : 0);
        while (r < r_end) {
            double h = step(r, false);
            if (r + h >= r_end || r_end - (r + h) < 1e-3 * h) h = r_end - r;
            double u1, du1;
            auto tseg = taylor(r, u, du, h, u1, du1);
            if (out) out->push_back(std::move(tseg));
            r = (h == r_end - r) ? r_end : r + h;
            u = u1;
            du = du1;
            int sign = u > 0 ? 1 : (u < 0 ? -1 : 0);
            if (sign != 0) {
                if (last_sign != 0 && sign != last_sign) ++res.sign_changes;
                last_sign = sign;
            }
            if (!out && std::abs(u) > 1e200) {
                u *= 1e-200;
                du *= 1e-200;
            }
        }
        res.u_end = u;
        res.du_end = du;
        return res;
    }

    // Inward integration from rc (u = 0, u' = -1) down to r_stop.
    std::vector<Segment> shoot_inward(double rc, double r_stop, double& u_stop) const {
        std::vector<Segment> segs;
        double r = rc, u = 0.0, du = -1.0;
        while (r > r_stop) {
            double h = step(r, true);
            if (r - h <= r_stop || (r - h) - r_stop < 1e-3 * h) h = r - r_stop;
            double u1, du1;
            auto seg = taylor(r, u, du, -h, u1, du1);
            segs.push_back(std::move(seg));
            r = (h == r - r_stop) ? r_stop : r - h;
            u = u1;
            du = du1;
            if (std::abs(u) > 1e200) {
                for (auto& s : segs) s.scale(1e-200);
                u *= 1e-200;
                du *= 1e-200;
            }
        }
        u_stop = u;
        std::reverse(segs.begin(), segs.end());
        return segs;
    }

  private:
    int l_;
    double Z_, E_, L_;
};

struct EnergyTolerance {
    double floor;
    bool operator()(double a, double b) const {
        return std::abs(a - b) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                          std::max(std::abs(a), std::abs(b)) + floor;
    }
};

// Zero of a continuous function on [a, b] where the endpoint values differ in sign.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb) {
    std::uintmax_t iters = 200;
    auto tol = [](double x, double y) {
        return std::abs(x - y) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), std::abs(y));
    };
    auto [lo, hi] = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
    return 0.5 * (lo + hi);
}

inline std::vector<double> segment_zeros(const Piecewise& pw, double r_excl) {
    std::vector<double> zeros;
    for (const auto& seg : pw.segments) {
        double a = std::max(seg.lo, 1e-300), b = seg.hi;
        if (b >= r_excl) b = r_excl;
        if (!(b > a)) continue;
        double fa = seg.reduced(a, pw.l), fb = seg.reduced(b, pw.l);
        if (fa == 0.0 || fb == 0.0) continue;
        if ((fa < 0) != (fb < 0)) {
            auto f = [&](double r) { return seg.reduced(r, pw.l); };
            zeros.push_back(bracketed_root(f, a, b, fa, fb));
        }
    }
    return zeros;
}

inline void fill_grid(RadialSolution& sol) {
    const auto& spec = sol.grid_spec;
    DensityView view = sol.density();
    auto rule = composite_rule(view.panels(), spec.order);
    sol.grid = std::move(rule.nodes);
    sol.weights = std::move(rule.weights);
    sol.values.resize(sol.grid.size());
    for (std::size_t i = 0; i < sol.grid.size(); ++i) sol.values[i] = sol.amplitude(sol.grid[i]);
}

}  // namespace detail

/// Dirichlet boundary function 1F1(l+1 - Z/kappa; 2l+2; 2 kappa rc), kappa = sqrt(-2E).
/// For E > 0 (kappa = ik) the real continuation Re[e^{-ik rc} 1F1(l+1 + iZ/k; 2l+2; 2ik rc)]
/// is returned instead; both change sign exactly at the eigenvalues.
inline SeriesEstimate kummer_boundary_estimate(double E, int l, double Z, double rc) {
    if (E == 0.0 || !std::isfinite(E)) throw DomainError("kummer_boundary: requires finite E != 0");
    if (E > 0.0) {
        const double k = std::sqrt(2.0 * E);
        return detail::kummer_estimate_imag(2.0 * l + 2.0, Z / k, k * rc, 1e-13);
    }
    const double kappa = std::sqrt(-2.0 * E);
    return kummer_1f1_estimate(l + 1.0 - Z / kappa, 2.0 * l + 2.0, 2.0 * kappa * rc);
}

inline double kummer_boundary(double E, int l, double Z, double rc) {
    return kummer_boundary_estimate(E, l, Z, rc).value;
}

inline double energy_scaling(double E_at_Z1, double Z) { return Z * Z * E_at_Z1; }

/// Number of interior zeros of u(r; E) on (0, rc) together with u(rc).
inline detail::ShootResult shoot(int l, double Z, double E, double rc) {
    return detail::RadialIntegrator(l, Z, E).shoot(rc, nullptr);
}

/// Eigenvalue with `nodes` interior radial nodes, found by node-count bisection
/// followed by TOMS748 on u(rc; E).
inline double find_energy(int l, int nodes, double Z, double rc) {
    auto count = [&](double E) { return shoot(l, Z, E, rc).sign_changes; };
    double lo = -0.5 * Z * Z - 1.0;
    if (count(lo) > nodes) throw ConvergenceError("find_energy: lower bracket already has too many nodes");
    double guide = (nodes + 1.0 + 0.5 * l + 1.0) * std::numbers::pi / rc;
    double hi = std::max(0.5 * guide * guide, 1.0);
    int expansions = 0;
    while (count(hi) <= nodes) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 60) throw ConvergenceError("find_energy: no upper bracket within energy window");
    }
    // Narrow until the node count jumps by exactly one across [lo, hi].
    int n_lo = count(lo), n_hi = count(hi);
    for (int it = 0; !(n_lo == nodes && n_hi == nodes + 1); ++it) {
        if (it > 400) throw ConvergenceError("find_energy: node-count bisection did not isolate the state");
        double mid = 0.5 * (lo + hi);
        int c = count(mid);
        if (c <= nodes) {
            lo = mid;
            n_lo = c;
        } else {
            hi = mid;
            n_hi = c;
        }
        if (hi - lo <= 1e-15 * std::max(std::abs(lo), std::abs(hi)))
            throw ResolutionError("find_energy: bracket collapsed before node count was certified");
    }
    auto f = [&](double E) { return shoot(l, Z, E, rc).u_end; };
    double f_lo = f(lo), f_hi = f(hi);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0) == (f_hi < 0)) throw ResolutionError("find_energy: u(rc) does not change sign across bracket");
    std::uintmax_t iters = 200;
    detail::EnergyTolerance tol{1e-17 * Z * Z};
    auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, iters);
    if (iters >= 200) throw ConvergenceError("find_energy: TOMS748 did not converge");
    return 0.5 * (a + b);
}

/// Confined eigenstate: energy plus normalized radial function on [0, rc].
inline RadialSolution solve_state(const QuantumNumbers& qn, const Confinement& conf,
                                  const GridSpec& spec = {}) {
    qn.validate();
    conf.validate();
    if (conf.is_free()) throw DomainError("solve_state: rc must be finite (use fha_radial)");
    const int l = qn.l;
    const double Z = conf.Z, rc = conf.rc;
    const double E = find_energy(l, qn.radial_nodes(), Z, rc);
    detail::RadialIntegrator integ(l, Z, E);

    auto pw = std::make_shared<detail::Piecewise>();
    pw->l = l;

    // Past the outer turning point the growing solution swamps the decaying one;
    // there we integrate inward from the wall and match amplitudes.
    double r_match = rc;
    if (E < 0.0) {
        double disc = Z * Z + 2.0 * E * l * (l + 1.0);
        double r_turn = (Z + std::sqrt(std::max(disc, 0.0))) / (-2.0 * E);
        if (r_turn < rc) {
            double kappa = std::sqrt(-2.0 * E);
            double action = kappa * (rc - r_turn);
            double r1 = integ.frobenius_radius(rc);
            if (action > 3.0) r_match = std::max(r_turn, 4.0 * r1);
        }
    }
    auto out = integ.shoot(r_match, &pw->segments);
    if (r_match < rc) {
        double u_in = 0.0;
        auto inner = integ.shoot_inward(rc, r_match, u_in);
        if (u_in == 0.0 || out.u_end == 0.0) throw ResolutionError("solve_state: degenerate matching point");
        double f = out.u_end / u_in;
        for (auto& s : inner) s.scale(f);
        pw->segments.insert(pw->segments.end(), inner.begin(), inner.end());
    }

    RadialSolution sol;
    sol.qn = qn;
    sol.conf = conf;
    sol.energy = E;
    sol.r_max = rc;
    sol.grid_spec = spec;
    sol.zeros = detail::segment_zeros(*pw, rc * (1.0 - 1e-12));
    sol.node_count = static_cast<int>(sol.zeros.size());
    if (sol.node_count != qn.radial_nodes())
        throw ResolutionError("solve_state: node count " + std::to_string(sol.node_count) + " != " +
                              std::to_string(qn.radial_nodes()));

    sol.amplitude = [pw](double r) { return (*pw)(r); };
    detail::fill_grid(sol);
    double norm = 0.0;
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        double u = sol.values[i] * sol.grid[i];
        norm += sol.weights[i] * u * u;
    }
    double f = 1.0 / std::sqrt(norm);
    for (auto& s : pw->segments) s.scale(f);
    for (auto& v : sol.values) v *= f;
    sol.norm_constant = pw->segments.front().coef.front();
    return sol;
}

namespace detail {

// Generalized Laguerre L_k^{(alpha)}(x) by upward recurrence.
inline double laguerre(int k, double alpha, double x) {
    if (k == 0) return 1.0;
    double l0 = 1.0, l1 = 1.0 + alpha - x;
    for (int j = 1; j < k; ++j) {
        double l2 = ((2.0 * j + 1.0 + alpha - x) * l1 - (j + alpha) * l0) / (j + 1.0);
        l0 = l1;
        l1 = l2;
    }
    return l1;
}

}  // namespace detail

/// Free-atom radius beyond which the radial probability tail is below 1e-32,
/// far enough that fractional powers of the density are also negligible.
template <class Amplitude>
double fha_truncation_radius(const QuantumNumbers& qn, double Z, Amplitude&& amp) {
    // P(r) = R^2 r^2 ~ r^{2n} e^{-decay r}; past r = 2n/decay the tail is
    // bounded by P(r) / (decay - 2n/r).
    const double decay = 2.0 * Z / qn.n;
    double r = 2.0 * qn.n / decay * 1.5;
    for (;; r *= 1.02) {
        double R = amp(r);
        double tail = R * R * r * r / (decay - 2.0 * qn.n / r);
        if (tail < 1e-32) return r;
    }
}

/// Analytic free hydrogen-like radial function (associated Laguerre form).
inline RadialSolution fha_radial(const QuantumNumbers& qn, double Z, const GridSpec& spec = {}) {
    qn.validate();
    Confinement conf{Z, std::numeric_limits<double>::infinity()};
    conf.validate();
    const int n = qn.n, l = qn.l, k = qn.radial_nodes();
    const double scale = 2.0 * Z / n;
    const double log_norm =
        0.5 * (3.0 * std::log(scale) + std::lgamma(k + 1.0) - std::log(2.0 * n) - std::lgamma(n + l + 1.0));
    const double norm = std::exp(log_norm);
    auto amp = [=](double r) {
        double rho = scale * r;
        return norm * std::pow(rho, l) * std::exp(-0.5 * rho) * detail::laguerre(k, 2.0 * l + 1.0, rho);
    };

    RadialSolution sol;
    sol.qn = qn;
    sol.conf = conf;
    sol.energy = -0.5 * Z * Z / (n * n);
    sol.r_max = fha_truncation_radius(qn, Z, amp);
    sol.grid_spec = spec;
    sol.amplitude = amp;
    // Laguerre zeros lie in (0, (n + l) * 4 / scale); scan then refine
    const double r_scan = std::min(sol.r_max, 4.0 * (n + l + 1.0) / scale);
    const int steps = 4000;
    double prev_r = 0.0, prev = detail::laguerre(k, 2.0 * l + 1.0, 0.0);
    for (int i = 1; i <= steps; ++i) {
        double r = r_scan * i / steps;
        double v = detail::laguerre(k, 2.0 * l + 1.0, scale * r);
        if (v == 0.0) {
            sol.zeros.push_back(r);
            v = -prev;  // keep the sign bookkeeping across an exact zero
        } else if ((v < 0) != (prev < 0)) {
            auto f = [&](double x) { return detail::laguerre(k, 2.0 * l + 1.0, scale * x); };
            sol.zeros.push_back(detail::bracketed_root(f, prev_r, r, prev, v));
        }
        prev = v;
        prev_r = r;
    }
    sol.node_count = static_cast<int>(sol.zeros.size());
    sol.norm_constant = norm * std::pow(scale, l) * detail::laguerre(k, 2.0 * l + 1.0, 0.0);
    detail::fill_grid(sol);
    return sol;
}

}  // namespace cha
