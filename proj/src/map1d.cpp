#include "ergodic/map1d.hpp"

#include <cmath>

#include "ergodic/errors.hpp"

namespace ergodic {

Map1D Map1D::doubling() { return Map1D(Kind::Doubling, 0.0, {0.0, 1.0}); }

Map1D Map1D::tent(double slope) {
    if (!(slope > 1.0 && slope <= 2.0)) throw OutOfRange("tent slope must be in (1,2]");
    return Map1D(Kind::Tent, slope, {0.0, 1.0});
}

Map1D Map1D::logistic() { return Map1D(Kind::Logistic, 4.0, {0.0, 1.0}); }

Map1D Map1D::quadratic(double a) {
    if (!(a > 0.0 && a <= 2.0)) throw OutOfRange("quadratic parameter must be in (0,2]");
    return Map1D(Kind::Quadratic, a, {-1.0, 1.0});
}

Map1D Map1D::from_name(const std::string& name, double param) {
    if (name == "doubling") return doubling();
    if (name == "tent") return tent(param);
    if (name == "logistic") return logistic();
    if (name == "quadratic") return quadratic(param);
    throw OutOfRange("unknown 1D map kind: " + name);
}

std::string Map1D::name() const {
    switch (kind_) {
        case Kind::Doubling: return "doubling";
        case Kind::Tent: return "tent";
        case Kind::Logistic: return "logistic";
        case Kind::Quadratic: return "quadratic";
    }
    return "?";
}

double Map1D::eval(double x) const {
    switch (kind_) {
        case Kind::Doubling: {
            double y = 2.0 * x;
            return y >= 1.0 ? y - 1.0 : y;
        }
        case Kind::Tent:
            return x < 0.5 ? param_ * x : param_ * (1.0 - x);
        case Kind::Logistic:
            return 4.0 * x * (1.0 - x);
        case Kind::Quadratic:
            return 1.0 - param_ * x * x;
    }
    return 0.0;
}

double Map1D::deriv(double x) const {
    switch (kind_) {
        case Kind::Doubling:
            return 2.0;
        case Kind::Tent:
            if (x == 0.5) throw CriticalPoint("tent turning point at 0.5");
            return x < 0.5 ? param_ : -param_;
        case Kind::Logistic:
            if (x == 0.5) throw CriticalPoint("logistic critical point at 0.5");
            return 4.0 - 8.0 * x;
        case Kind::Quadratic:
            if (x == 0.0) throw CriticalPoint("quadratic critical point at 0");
            return -2.0 * param_ * x;
    }
    return 0.0;
}

std::vector<double> Map1D::breakpoints() const {
    switch (kind_) {
        case Kind::Doubling:
        case Kind::Tent:
        case Kind::Logistic:
            return {0.5};
        case Kind::Quadratic:
            return {0.0};
    }
    return {};
}

int Map1D::lap_count() const { return 2; }

Interval Map1D::lap(int i) const {
    const double b = breakpoints()[0];
    if (i == 0) return {domain_.lo, b};
    return {b, domain_.hi};
}

double Map1D::eval_lap(int i, double x) const {
    switch (kind_) {
        case Kind::Doubling:
            return i == 0 ? 2.0 * x : 2.0 * x - 1.0;
        case Kind::Tent:
            return i == 0 ? param_ * x : param_ * (1.0 - x);
        case Kind::Logistic:
        case Kind::Quadratic:
            return eval(x); // continuous across the breakpoint
    }
    return 0.0;
}

double Map1D::iterate(double x, int n) const {
    for (int i = 0; i < n; ++i) x = eval(x);
    return x;
}

std::vector<double> Map1D::orbit(double x, int n) const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(x);
    for (int i = 0; i < n; ++i) {
        x = eval(x);
        out.push_back(x);
    }
    return out;
}

OrbitSampler::OrbitSampler(const Map1D& map, double x0, std::uint64_t seed)
    : map_(map), x_(x0), bitstream_(map.needs_bitstream()),
      rng_(derive_stream_seed(seed, 0x6f72626974ULL)) {
    if (bitstream_) {
        // Seed the window with the mantissa bits of x0, then random bits.
        double frac = x0 - std::floor(x0);
        for (int i = 0; i < 64; ++i) {
            frac *= 2.0;
            int b = frac >= 1.0 ? 1 : 0;
            if (b) frac -= 1.0;
            if (i >= 53) b = rng_.bit();
            window_ = (window_ << 1) | static_cast<std::uint64_t>(b);
        }
        x_ = static_cast<double>(window_ >> 11) * 0x1.0p-53;
    }
}

double OrbitSampler::step() {
    if (bitstream_) {
        window_ = (window_ << 1) | static_cast<std::uint64_t>(rng_.bit());
        x_ = static_cast<double>(window_ >> 11) * 0x1.0p-53;
    } else {
        x_ = map_.eval(x_);
    }
    return x_;
}

} // namespace ergodic
