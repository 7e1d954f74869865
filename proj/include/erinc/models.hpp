#pragma once

// Sampleable density models on an open box O, continuous and strictly
// positive there. Product models only: each coordinate has a strictly
// increasing CDF and samples by inverse-CDF of a uniform draw. Two models
// ship: uniform on (0,1)^d and the tilted product with per-coordinate
// density (1+s)/1.5 on (0,1) (non-uniform, so budgets c f(z) genuinely vary
// with the center).

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "erinc/random.hpp"

namespace erinc {

struct Box {
    std::vector<double> lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    // pt inside the box with at least `margin` to every face
    bool contains(std::span<const double> pt, double margin = 0.0) const;
    // other box inside this one with margin to every face
    bool contains_box(const Box& other, double margin = 0.0) const;
    double edge(int axis) const { return hi[static_cast<std::size_t>(axis)] - lo[static_cast<std::size_t>(axis)]; }
};

class DensityModel {
  public:
    enum class Kind { uniform, tilted };

    static DensityModel uniform(int d);
    static DensityModel tilted(int d);
    static DensityModel by_id(const std::string& id, int d);  // "uniform" | "tilted"

    Kind kind() const { return kind_; }
    int dim() const { return d_; }
    const std::string& id() const { return id_; }
    const Box& support() const { return support_; }  // the open box O

    double density(std::span<const double> z) const;
    double cdf1(int axis, double x) const;
    double inv_cdf1(int axis, double u) const;

    // one point, coordinates drawn in axis order (part of the stream contract)
    void sample_point(SplitMix64& rng, std::span<double> out) const;
    // n i.i.d. points, flattened row-major (point index slowest)
    std::vector<double> sample(std::int64_t n, SplitMix64& rng) const;

  private:
    DensityModel(Kind kind, int d, std::string id);

    Kind kind_;
    int d_;
    std::string id_;
    Box support_;
};

} // namespace erinc
