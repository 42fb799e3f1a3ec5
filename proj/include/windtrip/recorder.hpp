#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "windtrip/logio.hpp"
#include "windtrip/vec3.hpp"

namespace windtrip {

// One position-keyed disturbance sample captured on the outbound flight.
struct DisturbanceRecord {
    double t = 0.0;      // s
    Vec3 position{};     // m
    Vec3 force{};        // N, world
    Vec3 torque{};       // N·m, body
};

struct TrackMetadata {
    std::string scenario;
    int record_hz = 50;
    int estimate_hz = 500;
    double tau_force = 0.0;
    double tau_torque = 0.0;
    double tau_diff = 0.0;
    double tau_residual = 0.0;
    double fallback_distance = 0.5;
    std::string vehicle_hash;
    std::uint64_t seed = 0;
    double leg_start_time = 0.0;

    nlohmann::json to_json() const {
        return {{"scenario", scenario},
                {"record_hz", record_hz},
                {"estimate_hz", estimate_hz},
                {"tau_force", tau_force},
                {"tau_torque", tau_torque},
                {"tau_diff", tau_diff},
                {"tau_residual", tau_residual},
                {"fallback_distance", fallback_distance},
                {"vehicle_hash", vehicle_hash},
                {"seed", seed},
                {"leg_start_time", leg_start_time}};
    }

    static TrackMetadata from_json(const nlohmann::json& j) {
        TrackMetadata m;
        m.scenario = j.at("scenario").get<std::string>();
        m.record_hz = j.at("record_hz").get<int>();
        m.estimate_hz = j.at("estimate_hz").get<int>();
        m.tau_force = j.at("tau_force").get<double>();
        m.tau_torque = j.at("tau_torque").get<double>();
        m.tau_diff = j.at("tau_diff").get<double>();
        m.tau_residual = j.at("tau_residual").get<double>();
        m.fallback_distance = j.at("fallback_distance").get<double>();
        m.vehicle_hash = j.at("vehicle_hash").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.leg_start_time = j.at("leg_start_time").get<double>();
        return m;
    }
};

struct LookupResult {
    bool found = false;       // false when the nearest record is beyond the fallback distance
    std::size_t index = 0;
    double distance = std::numeric_limits<double>::infinity();
    DisturbanceRecord record{};
};

/**
 * Ordered disturbance record stream with nearest-position retrieval.
 *
 * Lookup is a deliberate linear scan over every record (the track is small,
 * ~25 s at 50 Hz); ties break to the lowest index. Queries farther than the
 * fallback distance from every record return found == false so the caller
 * can revert to feedback-only control instead of consuming stale data.
 */
class DisturbanceTrack {
public:
    explicit DisturbanceTrack(double fallback_distance = 0.5)
        : fallback_distance_(fallback_distance) {
        if (!(fallback_distance > 0.0)) {
            throw std::invalid_argument("DisturbanceTrack: fallback distance must be > 0");
        }
    }

    void append(const DisturbanceRecord& rec) {
        if (!rec.position.finite() || !rec.force.finite() || !rec.torque.finite() ||
            !std::isfinite(rec.t)) {
            throw std::invalid_argument("DisturbanceTrack::append: non-finite record");
        }
        if (!records_.empty() && rec.t <= records_.back().t) {
            throw std::invalid_argument(
                "DisturbanceTrack::append: timestamps must be strictly increasing");
        }
        records_.push_back(rec);
    }

    LookupResult lookup_nearest(const Vec3& query) const {
        if (records_.empty()) {
            throw std::logic_error("DisturbanceTrack::lookup_nearest: empty track");
        }
        LookupResult best;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < records_.size(); ++i) {
            const double d2 = (records_[i].position - query).squared_norm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best.index = i;
            }
        }
        best.distance = std::sqrt(best_d2);
        best.record = records_[best.index];
        best.found = best.distance <= fallback_distance_;
        return best;
    }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const DisturbanceRecord& operator[](std::size_t i) const { return records_[i]; }
    const std::vector<DisturbanceRecord>& records() const { return records_; }
    double fallback_distance() const { return fallback_distance_; }

    TrackMetadata metadata;

    void save(const std::filesystem::path& csv_path) const {
        CsvWriter w(csv_path,
                    {"t", "px", "py", "pz", "fx", "fy", "fz", "tx", "ty", "tz"});
        for (const auto& r : records_) {
            w.row({r.t, r.position.x, r.position.y, r.position.z, r.force.x, r.force.y, r.force.z,
                   r.torque.x, r.torque.y, r.torque.z});
        }
        nlohmann::json meta = metadata.to_json();
        write_text_file(sidecar_path(csv_path), meta.dump(2) + "\n");
    }

    static DisturbanceTrack load(const std::filesystem::path& csv_path) {
        const auto meta_path = sidecar_path(csv_path);
        TrackMetadata meta;
        if (std::filesystem::exists(meta_path)) {
            meta = TrackMetadata::from_json(nlohmann::json::parse(read_text_file(meta_path)));
        }
        DisturbanceTrack track(meta.fallback_distance);
        track.metadata = meta;
        const CsvTable table = read_csv(csv_path);
        for (const auto& row : table.rows) {
            DisturbanceRecord r;
            r.t = row[0];
            r.position = {row[1], row[2], row[3]};
            r.force = {row[4], row[5], row[6]};
            r.torque = {row[7], row[8], row[9]};
            track.append(r);
        }
        return track;
    }

    static std::filesystem::path sidecar_path(const std::filesystem::path& csv_path) {
        std::filesystem::path p = csv_path;
        p += ".meta.json";
        return p;
    }

private:
    double fallback_distance_;
    std::vector<DisturbanceRecord> records_;
};

/**
 * Optional uniform-grid acceleration structure for large synthetic tracks.
 * Returns exactly the linear-scan result, including the lowest-index tie
 * break; cells are searched in expanding rings and the scan stops only once
 * the ring floor distance exceeds the best hit.
 */
class TrackGridIndex {
public:
    TrackGridIndex(const DisturbanceTrack& track, double cell_size)
        : track_(track), cell_(cell_size) {
        if (!(cell_size > 0.0)) {
            throw std::invalid_argument("TrackGridIndex: cell size must be > 0");
        }
        for (std::size_t i = 0; i < track.size(); ++i) {
            const auto [x, y, z] = cell_coords(track[i].position);
            if (i == 0) {
                min_c_ = max_c_ = {x, y, z};
            } else {
                min_c_ = {std::min(min_c_[0], x), std::min(min_c_[1], y), std::min(min_c_[2], z)};
                max_c_ = {std::max(max_c_[0], x), std::max(max_c_[1], y), std::max(max_c_[2], z)};
            }
            cells_[pack(x, y, z)].push_back(i);
        }
    }

    LookupResult lookup_nearest(const Vec3& query) const {
        if (track_.empty()) {
            throw std::logic_error("TrackGridIndex::lookup_nearest: empty track");
        }
        const auto [qx, qy, qz] = cell_coords(query);
        // Rings beyond the occupied bounding box cannot contain records.
        const long max_ring =
            std::max({std::abs(qx - min_c_[0]), std::abs(qx - max_c_[0]), std::abs(qy - min_c_[1]),
                      std::abs(qy - max_c_[1]), std::abs(qz - min_c_[2]), std::abs(qz - max_c_[2])});
        LookupResult best;
        double best_d2 = std::numeric_limits<double>::infinity();

        for (long ring = 0; ring <= max_ring; ++ring) {
            // Once a hit exists and the nearest possible point of this ring
            // is farther, no later ring can beat it.
            const double ring_floor = (ring > 0) ? (static_cast<double>(ring) - 1.0) * cell_ : 0.0;
            if (best_d2 < std::numeric_limits<double>::infinity() &&
                ring_floor * ring_floor > best_d2) {
                break;
            }
            for (long dx = -ring; dx <= ring; ++dx) {
                for (long dy = -ring; dy <= ring; ++dy) {
                    for (long dz = -ring; dz <= ring; ++dz) {
                        if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) {
                            continue;
                        }
                        const auto it = cells_.find(pack(qx + dx, qy + dy, qz + dz));
                        if (it == cells_.end()) {
                            continue;
                        }
                        for (const std::size_t i : it->second) {
                            const double d2 = (track_[i].position - query).squared_norm();
                            if (d2 < best_d2 || (d2 == best_d2 && i < best.index)) {
                                best_d2 = d2;
                                best.index = i;
                            }
                        }
                    }
                }
            }
        }
        best.distance = std::sqrt(best_d2);
        best.record = track_[best.index];
        best.found = best.distance <= track_.fallback_distance();
        return best;
    }

private:
    std::tuple<long, long, long> cell_coords(const Vec3& p) const {
        return {static_cast<long>(std::floor(p.x / cell_)),
                static_cast<long>(std::floor(p.y / cell_)),
                static_cast<long>(std::floor(p.z / cell_))};
    }

    static std::uint64_t pack(long x, long y, long z) {
        const auto h = [](long v) {
            return static_cast<std::uint64_t>(v + (1L << 20));
        };
        return (h(x) << 42) ^ (h(y) << 21) ^ h(z);
    }

    const DisturbanceTrack& track_;
    double cell_;
    std::array<long, 3> min_c_{0, 0, 0};
    std::array<long, 3> max_c_{0, 0, 0};
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace windtrip
