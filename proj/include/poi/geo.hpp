/*
 * Copyright 2026 The poiconflate Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POI_GEO_HPP
#define POI_GEO_HPP

#include <stdexcept>
#include <vector>

namespace poi {

// Mean Earth radius (IUGG), used by haversine_m.
inline constexpr double kEarthRadiusM = 6371008.8;

// Nominal meters per degree of latitude used when converting tile edge
// lengths between meters and degrees. Longitude degrees are scaled by
// cos(latitude) at the conversion point.
inline constexpr double kMetersPerDegree = 111320.0;

/// WGS84 point. Construction rejects non-finite or out-of-range values;
/// `unchecked` exists for deserialization paths that validate separately.
class GeoPoint {
 public:
  GeoPoint() : lat_(0.0), lon_(0.0) {}
  GeoPoint(double lat, double lon);

  static GeoPoint unchecked(double lat, double lon) {
    GeoPoint p;
    p.lat_ = lat;
    p.lon_ = lon;
    return p;
  }

  double lat() const { return lat_; }
  double lon() const { return lon_; }

  bool in_range() const;

  friend bool operator==(const GeoPoint& a, const GeoPoint& b) {
    return a.lat_ == b.lat_ && a.lon_ == b.lon_;
  }

 private:
  double lat_;
  double lon_;
};

/// Axis-aligned lat/lon rectangle.
struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  bool valid() const { return south <= north && west <= east; }

  // Closed containment, used for POI bound checks.
  bool contains(const GeoPoint& p) const {
    return p.lat() >= south && p.lat() <= north && p.lon() >= west &&
           p.lon() <= east;
  }

  // Half-open [south, north) x [west, east); tiles partition space with
  // this rule so boundary records are fetched exactly once.
  bool contains_half_open(const GeoPoint& p) const {
    return p.lat() >= south && p.lat() < north && p.lon() >= west &&
           p.lon() < east;
  }

  void expand_to(const GeoPoint& p);
  void expand_to(const BoundingBox& other);

  friend bool operator==(const BoundingBox& a, const BoundingBox& b) {
    return a.south == b.south && a.west == b.west && a.north == b.north &&
           a.east == b.east;
  }
};

/// Simple polygon given as an outer ring (closing point optional).
/// Holes are not supported; study areas are outer boundaries.
class Polygon {
 public:
  Polygon() = default;
  explicit Polygon(std::vector<GeoPoint> ring);

  const std::vector<GeoPoint>& ring() const { return ring_; }
  bool degenerate() const;
  BoundingBox bounding_box() const;

  // Even-odd test; points exactly on the boundary count as outside,
  // which keeps edge-touching tiles out of grid plans.
  bool contains_strict(const GeoPoint& p) const;

 private:
  std::vector<GeoPoint> ring_;
};

/// True when the rectangle and polygon share interior area. Mere
/// edge/corner contact does not count.
bool rect_intersects_polygon(const BoundingBox& rect, const Polygon& poly);

/// Great-circle distance in meters on a sphere of radius kEarthRadiusM.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

inline double meters_to_lat_degrees(double meters) {
  return meters / kMetersPerDegree;
}

double meters_to_lon_degrees(double meters, double at_lat_degrees);

}  // namespace poi

#endif  // POI_GEO_HPP
