#include "erinc/models.hpp"

#include <cmath>
#include <stdexcept>

namespace erinc {

bool Box::contains(std::span<const double> pt, double margin) const {
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (!(pt[a] >= lo[a] + margin && pt[a] <= hi[a] - margin)) return false;
    }
    return true;
}

bool Box::contains_box(const Box& other, double margin) const {
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (!(other.lo[a] >= lo[a] + margin && other.hi[a] <= hi[a] - margin)) return false;
    }
    return true;
}

DensityModel::DensityModel(Kind kind, int d, std::string id)
    : kind_(kind), d_(d), id_(std::move(id)) {
    if (d < 1 || d > 3) throw std::invalid_argument("DensityModel: dimension must be 1, 2 or 3");
    support_.lo.assign(static_cast<std::size_t>(d), 0.0);
    support_.hi.assign(static_cast<std::size_t>(d), 1.0);
}

DensityModel DensityModel::uniform(int d) { return DensityModel(Kind::uniform, d, "uniform"); }
DensityModel DensityModel::tilted(int d) { return DensityModel(Kind::tilted, d, "tilted"); }

DensityModel DensityModel::by_id(const std::string& id, int d) {
    if (id == "uniform") return uniform(d);
    if (id == "tilted") return tilted(d);
    throw std::invalid_argument("DensityModel: unknown model id '" + id + "'");
}

double DensityModel::density(std::span<const double> z) const {
    double f = 1.0;
    for (int a = 0; a < d_; ++a) {
        const double s = z[static_cast<std::size_t>(a)];
        if (kind_ == Kind::tilted) {
            f *= (1.0 + s) / 1.5;
        }
        // uniform: factor 1
    }
    return f;
}

double DensityModel::cdf1(int axis, double x) const {
    (void)axis;
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (kind_ == Kind::tilted) {
        return (x + 0.5 * x * x) / 1.5;
    }
    return x;
}

double DensityModel::inv_cdf1(int axis, double u) const {
    (void)axis;
    if (kind_ == Kind::tilted) {
        // solve s + s^2/2 = 1.5 u on (0,1)
        return -1.0 + std::sqrt(1.0 + 3.0 * u);
    }
    return u;
}

void DensityModel::sample_point(SplitMix64& rng, std::span<double> out) const {
    for (int a = 0; a < d_; ++a) {
        out[static_cast<std::size_t>(a)] = inv_cdf1(a, rng.uniform());
    }
}

std::vector<double> DensityModel::sample(std::int64_t n, SplitMix64& rng) const {
    if (n < 0) throw std::invalid_argument("DensityModel::sample: n must be >= 0");
    std::vector<double> pts(static_cast<std::size_t>(n) * static_cast<std::size_t>(d_));
    for (std::int64_t i = 0; i < n; ++i) {
        sample_point(rng, std::span<double>(pts).subspan(
                              static_cast<std::size_t>(i) * static_cast<std::size_t>(d_),
                              static_cast<std::size_t>(d_)));
    }
    return pts;
}

} // namespace erinc
