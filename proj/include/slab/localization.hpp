#pragma once

// Source estimators fed by a TDOA vector: sign-only decoding against the region
// codebook or a point grid, and the range-difference (hyperbolic) grid search.

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string_view>
#include <vector>

#include "slab/codeword.hpp"
#include "slab/error.hpp"
#include "slab/geometry.hpp"
#include "slab/region_partition.hpp"

namespace slab {

enum class Algorithm { SoTdoaRegion, SoTdoaGrid, Hyperbolic };

constexpr std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::SoTdoaRegion: return "so-tdoa";
        case Algorithm::SoTdoaGrid: return "so-tdoa-grid";
        case Algorithm::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

struct LocalizationResult {
    Point2 estimate;
    Algorithm algorithm = Algorithm::SoTdoaRegion;
    std::vector<std::size_t> tied_regions;
    double cost = 0.0;  // Hamming count, or L2 residual in metres
};

/// Codewords and range-difference vectors of a candidate point set, computed once.
class SearchGrid {
public:
    SearchGrid(const SensorArray& sensors, std::vector<Point2> points)
        : points_(std::move(points)), pairs_(sensors.pairs()) {
        if (points_.empty()) throw Error(ErrorKind::EmptyInput, "search grid is empty");
        range_diffs_.resize(points_.size() * pairs_);
        signs_.resize(points_.size() * pairs_);
        std::vector<double> d(sensors.size());
        for (std::size_t k = 0; k < points_.size(); ++k) {
            for (std::size_t i = 0; i < sensors.size(); ++i) d[i] = distance(points_[k], sensors[i]);
            for_each_pair(sensors.size(), [&](std::size_t l, std::size_t i, std::size_t j) {
                range_diffs_[k * pairs_ + l] = d[i] - d[j];
                signs_[k * pairs_ + l] = sign_of(d[i] - d[j]);
            });
        }
    }

    std::size_t size() const { return points_.size(); }
    std::size_t pairs() const { return pairs_; }
    const Point2& point(std::size_t k) const { return points_[k]; }
    const std::vector<Point2>& points() const { return points_; }
    const double* range_diffs(std::size_t k) const { return &range_diffs_[k * pairs_]; }
    const std::int8_t* signs(std::size_t k) const { return &signs_[k * pairs_]; }

private:
    std::vector<Point2> points_;
    std::size_t pairs_;
    std::vector<double> range_diffs_;
    std::vector<std::int8_t> signs_;
};

/// Decode sgn(tau) to the nearest region codewords and average their centroids.
inline LocalizationResult localize_so_tdoa(const TdoaVector& tau, const RegionMap& map) {
    if (map.regions.empty()) throw Error(ErrorKind::EmptyMap, "region map is empty");
    if (tau.size() != map.sensors.pairs())
        throw Error(ErrorKind::LengthMismatch, "TDOA length does not match the map's sensor count");
    const auto dec = decode(sign_vector(tau), map);
    Point2 sum{};
    for (auto id : dec.region_ids) sum = sum + map.regions[id].centroid;
    return {(1.0 / static_cast<double>(dec.region_ids.size())) * sum, Algorithm::SoTdoaRegion, dec.region_ids,
            static_cast<double>(dec.distance)};
}

/// Grid point whose codeword is nearest in Hamming distance; ties go to the lowest scan index.
inline LocalizationResult localize_so_tdoa_grid(const TdoaVector& tau, const SearchGrid& grid) {
    if (tau.size() != grid.pairs()) throw Error(ErrorKind::LengthMismatch, "TDOA length does not match the grid");
    const auto z = sign_vector(tau);
    std::size_t best = 0, best_cost = std::numeric_limits<std::size_t>::max();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto* s = grid.signs(k);
        std::size_t cost = 0;
        for (std::size_t l = 0; l < grid.pairs(); ++l) cost += s[l] != z[l];
        if (cost < best_cost) {
            best_cost = cost;
            best = k;
        }
    }
    return {grid.point(best), Algorithm::SoTdoaGrid, {}, static_cast<double>(best_cost)};
}

inline LocalizationResult localize_so_tdoa_grid(const TdoaVector& tau, const SensorArray& sensors,
                                                std::vector<Point2> grid_points) {
    return localize_so_tdoa_grid(tau, SearchGrid(sensors, std::move(grid_points)));
}

/// argmin over the grid of || c_hat tau - d_p ||_2; ties go to the lowest scan index.
inline LocalizationResult localize_hyperbolic(const TdoaVector& tau, double c_hat, const SearchGrid& grid) {
    if (!(c_hat > 0.0)) throw Error(ErrorKind::InvalidArgument, "c_hat must be > 0");
    if (tau.size() != grid.pairs()) throw Error(ErrorKind::LengthMismatch, "TDOA length does not match the grid");
    std::vector<double> dhat(tau.size());
    for (std::size_t l = 0; l < tau.size(); ++l) dhat[l] = c_hat * tau[l];
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto* dp = grid.range_diffs(k);
        double sq = 0.0;
        for (std::size_t l = 0; l < grid.pairs(); ++l) {
            const double e = dhat[l] - dp[l];
            sq += e * e;
        }
        if (sq < best_sq) {
            best_sq = sq;
            best = k;
        }
    }
    return {grid.point(best), Algorithm::Hyperbolic, {}, std::sqrt(best_sq)};
}

inline LocalizationResult localize_hyperbolic(const TdoaVector& tau, double c_hat, const SensorArray& sensors,
                                              std::vector<Point2> grid_points) {
    return localize_hyperbolic(tau, c_hat, SearchGrid(sensors, std::move(grid_points)));
}

inline void write_results_header(std::ostream& os) { os << "algorithm,est_x,est_y,cost,tied_region_ids\n"; }

/// One CSV row; tied region ids are space separated.
inline void write_result_row(std::ostream& os, const LocalizationResult& r) {
    os << to_string(r.algorithm) << ',' << std::setprecision(17) << r.estimate.x << ',' << r.estimate.y << ','
       << r.cost << ',';
    for (std::size_t k = 0; k < r.tied_regions.size(); ++k) os << (k ? " " : "") << r.tied_regions[k];
    os << '\n';
}

}  // namespace slab
