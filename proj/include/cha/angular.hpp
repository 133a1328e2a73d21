#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <vector>

#include "cha/errors.hpp"
#include "cha/quadrature.hpp"
#include "cha/solver.hpp"
#include "cha/special_fn.hpp"

namespace cha {

namespace detail {

// chi(u) = (2l+1)/2 * (l-|m|)!/(l+|m|)! * [P_l^|m|(u)]^2, normalized on [-1, 1].
struct PolarDensity {
    int l;
    int m;
    double prefactor;

    PolarDensity(int l_, int m_) : l(l_), m(std::abs(m_)) {
        double ratio = 1.0;
        for (int k = l - m + 1; k <= l + m; ++k) ratio /= k;
        prefactor = 0.5 * (2 * l + 1) * ratio;
    }
    double operator()(double u) const {
        double p = assoc_legendre(l, m, u);
        return prefactor * p * p;
    }

    // Zeros of P_l^m inside (-1, 1), by sign scan and bracketing.
    std::vector<double> zeros() const {
        std::vector<double> out;
        const int steps = 400 * (l + 1);
        double prev_u = -1.0, prev = assoc_legendre(l, m, -1.0 + 1e-15);
        for (int i = 1; i <= steps; ++i) {
            double u = -1.0 + 2.0 * i / steps;
            if (i == steps) u = 1.0 - 1e-15;
            double v = assoc_legendre(l, m, u);
            if (v != 0.0 && prev != 0.0 && (v < 0) != (prev < 0)) {
                auto f = [&](double x) { return assoc_legendre(l, m, x); };
                out.push_back(bracketed_root(f, prev_u, u, prev, v));
            } else if (v == 0.0 && i != steps) {
                out.push_back(u);
            }
            prev = v;
            prev_u = u;
        }
        return out;
    }

    std::vector<Panel> panels(int levels = 10, double ratio = 0.15) const {
        std::vector<double> breaks{-1.0};
        std::vector<double> singular;
        if (m > 0) singular = {-1.0, 1.0};
        for (double z : zeros()) {
            breaks.push_back(z);
            singular.push_back(z);
        }
        breaks.push_back(1.0);
        return build_panels(breaks, singular, 0.25, levels, ratio);
    }
};

}  // namespace detail

/// Angular (theta, phi) factor of a hydrogenic state. Polar moments are cached
/// per order; the cache is safe for concurrent readers.
class AngularFactor {
  public:
    AngularFactor(int l, int m) : density_(l, m), panels_(density_.panels()) {
        if (l < 0 || std::abs(m) > l) throw DomainError("AngularFactor: need |m| <= l");
        shannon_ = compute_shannon();
    }

    int l() const { return density_.l; }
    int m() const { return density_.m; }

    /// Polar moment  int_0^pi chi(theta)^lambda sin(theta) dtheta.
    double moment(double lambda) const {
        if (!(lambda > 0.0)) throw DomainError("angular_moment: lambda must be > 0");
        {
            std::shared_lock lock(mutex_);
            if (auto it = cache_.find(lambda); it != cache_.end()) return it->second;
        }
        double value = integrate_refined([&](double u) { return std::pow(density_(u), lambda); }, panels_, 16,
                                         1e-13, 1e-300);
        std::unique_lock lock(mutex_);
        cache_.emplace(lambda, value);
        return value;
    }

    /// Full solid-angle moment: the uniform azimuthal density contributes (2 pi)^{1-lambda}.
    double full_moment(double lambda) const {
        return std::pow(2.0 * std::numbers::pi, 1.0 - lambda) * moment(lambda);
    }

    /// -int chi ln chi sin(theta) dtheta + ln 2 pi.
    double shannon() const { return shannon_; }

    double chi(double u) const { return density_(u); }

  private:
    double compute_shannon() const {
        double polar = integrate_refined(
            [&](double u) {
                double c = density_(u);
                return c > 0.0 ? -c * std::log(c) : 0.0;
            },
            panels_, 16, 1e-13, 1e-15);
        return polar + std::log(2.0 * std::numbers::pi);
    }

    detail::PolarDensity density_;
    std::vector<Panel> panels_;
    double shannon_ = 0.0;
    mutable std::shared_mutex mutex_;
    mutable std::map<double, double> cache_;
};

inline double angular_moment(int l, int m, double lambda) { return AngularFactor(l, m).moment(lambda); }
inline double angular_shannon(int l, int m) { return AngularFactor(l, m).shannon(); }

/// Shared AngularFactor per (l, m), built once.
inline std::shared_ptr<const AngularFactor> angular_factor(int l, int m) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const AngularFactor>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[{l, m}];
    if (!slot) slot = std::make_shared<const AngularFactor>(l, m);
    return slot;
}

}  // namespace cha
