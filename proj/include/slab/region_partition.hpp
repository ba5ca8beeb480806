#pragma once

// Perpendicular-bisector regions of a sensor array: codewords, grid enumeration,
// centroids, nearest-codeword decoding, and the persisted region bundle.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "slab/codeword.hpp"
#include "slab/error.hpp"
#include "slab/geometry.hpp"

namespace slab {

/// bit l = sgn(|p - g_i| - |p - g_j|) for the l-th canonical pair.
inline CharacteristicVector characteristic_vector(Point2 p, const SensorArray& sensors) {
    std::vector<double> d(sensors.size());
    for (std::size_t i = 0; i < sensors.size(); ++i) d[i] = distance(p, sensors[i]);
    std::vector<std::int8_t> bits(sensors.pairs());
    for_each_pair(sensors.size(), [&](std::size_t l, std::size_t i, std::size_t j) { bits[l] = sign_of(d[i] - d[j]); });
    return CharacteristicVector(std::move(bits));
}

/// Regions of n points' bisector arrangement in an unbounded plane, assuming no parallels:
/// (n^4 - 2n^3 + 3n^2 - 2n) / 8 + 1.
constexpr std::size_t region_upper_bound(std::size_t n) {
    if (n < 2) throw Error(ErrorKind::InvalidArgument, "region bound needs n >= 2");
    return (n * n * n * n - 2 * n * n * n + 3 * n * n - 2 * n) / 8 + 1;
}

struct Region {
    std::size_t id = 0;
    CharacteristicVector codeword;
    Point2 centroid;
    std::size_t cell_count = 0;
};

struct GridResolution {
    std::size_t nx = 200;
    std::size_t ny = 200;
    friend bool operator==(const GridResolution&, const GridResolution&) = default;
};

struct RegionMap {
    std::vector<Region> regions;
    GridResolution grid;
    RoomGeometry room;
    SensorArray sensors;
    // Region id of every grid cell, row-major. Empty when loaded from a bundle.
    std::vector<std::size_t> cell_region;

    std::size_t size() const { return regions.size(); }
    std::size_t region_at_cell(std::size_t ix, std::size_t iy) const { return cell_region[iy * grid.nx + ix]; }
};

/// Classifies every cell centre by codeword and groups equal codewords. Region ids follow
/// first appearance in row-major scan order, so the result does not depend on threading.
inline RegionMap enumerate_regions(const RoomGeometry& room, const SensorArray& sensors, GridResolution grid = {},
                                   unsigned threads = 0) {
    room.validate();
    if (grid.nx < 10 || grid.ny < 10) throw Error(ErrorKind::DegenerateGrid, "region grid needs >= 10 cells per axis");
    if (sensors.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two sensors");

    const auto points = cell_centers(room, grid.nx, grid.ny);
    std::vector<CharacteristicVector> codes(points.size());
    if (threads == 0) threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    {
        std::vector<std::jthread> pool;
        const std::size_t rows_per = (grid.ny + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t r0 = t * rows_per, r1 = std::min(grid.ny, r0 + rows_per);
            if (r0 >= r1) break;
            pool.emplace_back([&, r0, r1] {
                for (std::size_t k = r0 * grid.nx; k < r1 * grid.nx; ++k)
                    codes[k] = characteristic_vector(points[k], sensors);
            });
        }
    }

    RegionMap map{{}, grid, room, sensors, std::vector<std::size_t>(points.size())};
    std::map<CharacteristicVector, std::size_t> index;
    std::vector<Point2> sums;
    for (std::size_t k = 0; k < points.size(); ++k) {
        auto [it, fresh] = index.try_emplace(codes[k], map.regions.size());
        if (fresh) {
            map.regions.push_back({map.regions.size(), codes[k], {}, 0});
            sums.push_back({});
        }
        auto& r = map.regions[it->second];
        sums[r.id] = sums[r.id] + points[k];
        ++r.cell_count;
        map.cell_region[k] = r.id;
    }
    for (auto& r : map.regions) r.centroid = (1.0 / static_cast<double>(r.cell_count)) * sums[r.id];
    return map;
}

struct DecodeResult {
    std::vector<std::size_t> region_ids;  // every region at the minimal distance
    std::size_t distance = 0;
};

inline DecodeResult decode(const CharacteristicVector& z, const RegionMap& map) {
    if (map.regions.empty()) throw Error(ErrorKind::EmptyMap, "region map is empty");
    DecodeResult out{{}, std::numeric_limits<std::size_t>::max()};
    for (const auto& r : map.regions) {
        const auto d = hamming(z, r.codeword);
        if (d < out.distance) {
            out.distance = d;
            out.region_ids.clear();
        }
        if (d == out.distance) out.region_ids.push_back(r.id);
    }
    return out;
}

// Region bundle: a directory holding
//   regions.csv  "# slab-regions v1" then id,codeword,centroid_x,centroid_y,cell_count
//   layout.csv   "# slab-layout v1" then key,value rows (room and grid) and sensor,x,y rows
inline constexpr const char* kRegionBundleVersion = "# slab-regions v1";
inline constexpr const char* kLayoutVersion = "# slab-layout v1";

inline void write_region_bundle(const std::filesystem::path& dir, const RegionMap& map) {
    std::filesystem::create_directories(dir);
    std::ofstream regions(dir / "regions.csv");
    std::ofstream layout(dir / "layout.csv");
    if (!regions || !layout) throw Error(ErrorKind::Io, "cannot write region bundle in " + dir.string());
    regions << kRegionBundleVersion << "\nid,codeword,centroid_x,centroid_y,cell_count\n" << std::setprecision(17);
    for (const auto& r : map.regions)
        regions << r.id << ',' << r.codeword.to_string() << ',' << r.centroid.x << ',' << r.centroid.y << ','
                << r.cell_count << '\n';
    layout << kLayoutVersion << '\n' << std::setprecision(17);
    layout << "room," << map.room.lx << ',' << map.room.ly << '\n';
    layout << "grid," << map.grid.nx << ',' << map.grid.ny << '\n';
    for (std::size_t i = 0; i < map.sensors.size(); ++i)
        layout << "sensor," << map.sensors[i].x << ',' << map.sensors[i].y << '\n';
}

namespace detail {
inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}
}  // namespace detail

inline RegionMap read_region_bundle(const std::filesystem::path& dir) {
    std::ifstream regions(dir / "regions.csv");
    std::ifstream layout(dir / "layout.csv");
    if (!regions || !layout) throw Error(ErrorKind::Io, "region bundle not found in " + dir.string());
    std::string line;
    if (!std::getline(regions, line) || line != kRegionBundleVersion)
        throw Error(ErrorKind::Io, "unsupported region bundle version");
    if (!std::getline(layout, line) || line != kLayoutVersion) throw Error(ErrorKind::Io, "unsupported layout version");

    RegionMap map;
    std::vector<Point2> sensors;
    try {
        while (std::getline(layout, line)) {
            const auto c = detail::split_csv(line);
            if (c.size() != 3) throw Error(ErrorKind::Io, "bad layout row: " + line);
            if (c[0] == "room") map.room = {std::stod(c[1]), std::stod(c[2])};
            else if (c[0] == "grid") map.grid = {std::stoul(c[1]), std::stoul(c[2])};
            else if (c[0] == "sensor") sensors.push_back({std::stod(c[1]), std::stod(c[2])});
            else throw Error(ErrorKind::Io, "unknown layout key: " + c[0]);
        }
        std::getline(regions, line);  // column header
        while (std::getline(regions, line)) {
            if (line.empty()) continue;
            const auto c = detail::split_csv(line);
            if (c.size() != 5) throw Error(ErrorKind::Io, "bad region row: " + line);
            map.regions.push_back({std::stoul(c[0]), CharacteristicVector::parse(c[1]),
                                   {std::stod(c[2]), std::stod(c[3])}, std::stoul(c[4])});
        }
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Io, "malformed number in region bundle");
    }
    map.sensors = SensorArray(std::move(sensors));
    for (std::size_t k = 0; k < map.regions.size(); ++k) {
        if (map.regions[k].id != k) throw Error(ErrorKind::Io, "region ids must be 0..Q-1 in order");
        if (map.regions[k].codeword.size() != map.sensors.pairs())
            throw Error(ErrorKind::Io, "codeword length does not match sensor count");
    }
    return map;
}

}  // namespace slab
