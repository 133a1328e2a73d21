#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cha/angular.hpp"
#include "cha/errors.hpp"
#include "cha/momentum.hpp"
#include "cha/quadrature.hpp"
#include "cha/solver.hpp"

namespace cha {

/// Exact rational number with positive denominator, kept in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
        if (den == 0) throw DomainError("Rational: zero denominator");
        if (den < 0) {
            num = -num;
            den = -den;
        }
        auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

/// Conjugate entropic orders: 1/alpha + 1/beta = 2, held exactly.
class EntropicOrders {
  public:
    EntropicOrders() : EntropicOrders(Rational{3, 5}) {}

    /// beta = alpha / (2 alpha - 1); requires alpha > 1/2 and alpha != 1.
    explicit EntropicOrders(Rational alpha) : alpha_(checked(alpha)), beta_(alpha.num, 2 * alpha.num - alpha.den) {}

    /// Both orders given; they must satisfy the conjugacy relation to 1e-12.
    EntropicOrders(Rational alpha, Rational beta) : EntropicOrders(alpha) {
        if (std::abs(1.0 / alpha.value() + 1.0 / beta.value() - 2.0) > 1e-12)
            throw ValidationError("orders: 1/alpha + 1/beta must equal 2");
    }

    double alpha() const { return alpha_.value(); }
    double beta() const { return beta_.value(); }
    Rational alpha_exact() const { return alpha_; }
    Rational beta_exact() const { return beta_; }

  private:
    static Rational checked(Rational alpha) {
        if (!(2 * alpha.num > alpha.den)) throw ValidationError("orders: alpha must exceed 1/2 for a conjugate beta > 0");
        if (alpha.num == alpha.den) throw ValidationError("orders: alpha = 1 is the Shannon limit, not a Renyi order");
        return alpha;
    }

    Rational alpha_;
    Rational beta_;
};

struct Diagnostics {
    double energy = 0.0;
    double r_norm_error = 0.0;   // |int R^2 r^2 dr - 1| on the stored grid
    double p_max = 0.0;
    double norm_deficit = 0.0;
    double transform_check = 0.0;
    int radial_nodes = 0;
};

struct InfoMeasures {
    double R_r = 0, R_p = 0, R_t = 0;
    double T_r = 0, T_p = 0, T_t = 0;
    double S_r = 0, S_p = 0, S_t = 0;
    double E_r = 0, E_p = 0, E_t = 0;
    // full-space entropic moments the measures were built from
    double W_r_alpha = 0, W_p_beta = 0, W_r_2 = 0, W_p_2 = 0;
    EntropicOrders orders;
    QuantumNumbers qn;
    double Z = 1.0;
    double rc = 0.0;
    Diagnostics diag;
};

/// int |A(x)|^{2 lambda} x^2 dx over the density's support.
inline double radial_moment(const DensityView& d, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("radial_moment: lambda must be > 0");
    auto f = [&](double x) {
        double a = d.amplitude(x);
        double rho = a * a;
        return rho > 0.0 ? std::pow(rho, lambda) * x * x : 0.0;
    };
    return integrate_refined(f, d.panels(), d.order, 1e-11, 1e-300);
}

/// -int A^2 ln A^2 x^2 dx.
inline double radial_shannon(const DensityView& d) {
    auto f = [&](double x) {
        double a = d.amplitude(x);
        double rho = a * a;
        return rho > 0.0 ? -rho * std::log(rho) * x * x : 0.0;
    };
    return integrate_refined(f, d.panels(), d.order, 1e-11, 1e-14);
}

/// Full-space moment: radial moment times the solid-angle moment.
inline double full_moment(double omega_radial, const AngularFactor& ang, double lambda) {
    return omega_radial * ang.full_moment(lambda);
}

/// Renyi entropy of order lambda from the radial moment of a state with angular labels (l, m).
inline double renyi(double omega_radial, int l, int m, double lambda) {
    if (lambda == 1.0) throw DomainError("renyi: lambda = 1 is the Shannon limit");
    if (!(omega_radial > 0.0)) throw DomainError("renyi: moment must be positive");
    return std::log(full_moment(omega_radial, *angular_factor(l, m), lambda)) / (1.0 - lambda);
}

inline double renyi_sum(const EntropicOrders&, double R_r, double R_p) { return R_r + R_p; }

struct ShannonTriple {
    double S_r, S_p, S_t;
};

inline ShannonTriple shannon(const DensityView& r_density, const DensityView& p_density, int l, int m) {
    double ang = angular_factor(l, m)->shannon();
    double s_r = radial_shannon(r_density) + ang;
    double s_p = radial_shannon(p_density) + ang;
    return {s_r, s_p, s_r + s_p};
}

struct TsallisTriple {
    double T_r, T_p, T_t;
};

/// Tsallis entropies from full-space moments taken at unit charge; Z rescales
/// them with omega_r -> Z^{3(alpha-1)} omega_r and omega_p -> Z^{-3(beta-1)} omega_p.
inline TsallisTriple tsallis(double W_r_full, double W_p_full, const EntropicOrders& orders, double Z = 1.0) {
    const double a = orders.alpha(), b = orders.beta();
    double wr = W_r_full * std::pow(Z, 3.0 * (a - 1.0));
    double wp = W_p_full * std::pow(Z, -3.0 * (b - 1.0));
    double t_r = (1.0 - wr) / (a - 1.0);
    double t_p = (1.0 - wp) / (b - 1.0);
    return {t_r, t_p, t_r * t_p};
}

struct OnicescuTriple {
    double E_r, E_p, E_t;
};

inline OnicescuTriple onicescu(double W2_r_full, double W2_p_full, double Z = 1.0) {
    double e_r = Z * Z * Z * W2_r_full;
    double e_p = W2_p_full / (Z * Z * Z);
    return {e_r, e_p, e_r * e_p};
}

/// Measures at charge Z from measures computed at charge 1 and radius Z * rc.
/// Composite S, R and E are copied; T_t is recomputed since it is a product.
inline InfoMeasures scale_measures(const InfoMeasures& base, double Z) {
    if (!(Z > 0.0)) throw DomainError("scale_measures: Z must be > 0");
    InfoMeasures out = base;
    if (Z == 1.0) return out;
    const double shift = 3.0 * std::log(Z);
    out.Z = base.Z * Z;
    out.rc = base.rc / Z;
    out.S_r = base.S_r - shift;
    out.S_p = base.S_p + shift;
    out.R_r = base.R_r - shift;
    out.R_p = base.R_p + shift;
    auto t = tsallis(base.W_r_alpha, base.W_p_beta, base.orders, Z);
    out.T_r = t.T_r;
    out.T_p = t.T_p;
    out.T_t = t.T_t;
    auto e = onicescu(base.W_r_2, base.W_p_2, Z);
    out.E_r = e.E_r;
    out.E_p = e.E_p;
    out.W_r_alpha = base.W_r_alpha * std::pow(Z, 3.0 * (base.orders.alpha() - 1.0));
    out.W_p_beta = base.W_p_beta * std::pow(Z, -3.0 * (base.orders.beta() - 1.0));
    out.W_r_2 = e.E_r;
    out.W_p_2 = e.E_p;
    out.diag.energy = energy_scaling(base.diag.energy, Z);
    return out;
}

struct ComputeOptions {
    GridSpec grid;
    MomentumSpec momentum;
};

/// Measures from an already solved pair of r- and p-space amplitudes.
inline InfoMeasures measures_from(const RadialSolution& rs, const MomentumSolution& ms, const EntropicOrders& orders) {
    const double a = orders.alpha(), b = orders.beta();
    if (!ms.analytic && b <= 0.75)
        throw DomainError("measures: momentum moment of order <= 3/4 diverges for a confined state (p^-4 tail)");
    const auto ang = angular_factor(rs.qn.l, rs.qn.m);
    const DensityView dr = rs.density(), dp = ms.density();

    InfoMeasures m;
    m.orders = orders;
    m.qn = rs.qn;
    m.Z = rs.conf.Z;
    m.rc = rs.conf.rc;

    m.W_r_alpha = full_moment(radial_moment(dr, a), *ang, a);
    m.W_p_beta = full_moment(radial_moment(dp, b), *ang, b);
    m.W_r_2 = full_moment(radial_moment(dr, 2.0), *ang, 2.0);
    m.W_p_2 = full_moment(radial_moment(dp, 2.0), *ang, 2.0);

    m.R_r = std::log(m.W_r_alpha) / (1.0 - a);
    m.R_p = std::log(m.W_p_beta) / (1.0 - b);
    m.R_t = renyi_sum(orders, m.R_r, m.R_p);

    auto t = tsallis(m.W_r_alpha, m.W_p_beta, orders);
    m.T_r = t.T_r;
    m.T_p = t.T_p;
    m.T_t = t.T_t;

    auto s = shannon(dr, dp, rs.qn.l, rs.qn.m);
    m.S_r = s.S_r;
    m.S_p = s.S_p;
    m.S_t = s.S_t;

    auto e = onicescu(m.W_r_2, m.W_p_2);
    m.E_r = e.E_r;
    m.E_p = e.E_p;
    m.E_t = e.E_t;

    double norm = 0.0;
    for (std::size_t i = 0; i < rs.grid.size(); ++i) {
        double u = rs.values[i] * rs.grid[i];
        norm += rs.weights[i] * u * u;
    }
    m.diag.energy = rs.energy;
    m.diag.r_norm_error = std::abs(norm - 1.0);
    m.diag.p_max = ms.p_max;
    m.diag.norm_deficit = ms.norm_deficit;
    m.diag.transform_check = ms.max_check_delta;
    m.diag.radial_nodes = rs.node_count;
    return m;
}

/// Solve, transform and evaluate every measure for one state. An infinite rc
/// selects the analytic free-atom functions.
inline InfoMeasures compute_all(const QuantumNumbers& qn, const Confinement& conf, const EntropicOrders& orders = {},
                                const ComputeOptions& opt = {}) {
    qn.validate();
    conf.validate();
    if (conf.is_free()) {
        auto rs = fha_radial(qn, conf.Z, opt.grid);
        auto ms = fha_momentum(qn, conf.Z);
        return measures_from(rs, ms, orders);
    }
    auto rs = solve_state(qn, conf, opt.grid);
    auto ms = to_momentum(rs, opt.momentum);
    return measures_from(rs, ms, orders);
}

struct WorkItem {
    QuantumNumbers qn;
    Confinement conf;
};

struct WorkResult {
    std::optional<InfoMeasures> measures;
    std::optional<ErrorKind> error;
    std::string message;
};

/// Evaluates items on `threads` workers; results come back in input order.
inline std::vector<WorkResult> compute_batch(const std::vector<WorkItem>& items, const EntropicOrders& orders,
                                             const ComputeOptions& opt = {}, unsigned threads = 0) {
    std::vector<WorkResult> results(items.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(items.size(), 1));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++) {
            try {
                results[i].measures = compute_all(items[i].qn, items[i].conf, orders, opt);
            } catch (const Error& e) {
                results[i].error = e.kind();
                results[i].message = e.what();
            }
        }
    };
    if (threads <= 1) {
        worker();
        return results;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

}  // namespace cha
