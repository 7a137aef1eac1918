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

#include "poi/geo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace poi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Orientation of the ordered triple (a, b, c): >0 counter-clockwise,
// <0 clockwise, 0 collinear. Treats lon as x and lat as y.
double cross(const GeoPoint& a, const GeoPoint& b, const GeoPoint& c) {
  return (b.lon() - a.lon()) * (c.lat() - a.lat()) -
         (b.lat() - a.lat()) * (c.lon() - a.lon());
}

bool on_segment(const GeoPoint& a, const GeoPoint& b, const GeoPoint& p) {
  return std::min(a.lon(), b.lon()) <= p.lon() &&
         p.lon() <= std::max(a.lon(), b.lon()) &&
         std::min(a.lat(), b.lat()) <= p.lat() &&
         p.lat() <= std::max(a.lat(), b.lat());
}

// Proper crossing: the open interiors of the two segments intersect.
// Collinear overlaps and endpoint touches are excluded on purpose; those
// cases are boundary contact, not interior overlap.
bool segments_cross_properly(const GeoPoint& p1, const GeoPoint& p2,
                             const GeoPoint& q1, const GeoPoint& q2) {
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

bool point_on_ring(const Polygon& poly, const GeoPoint& p) {
  const auto& ring = poly.ring();
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    if (cross(a, b, p) == 0.0 && on_segment(a, b, p)) {
      return true;
    }
  }
  return false;
}

bool strictly_inside_rect(const BoundingBox& rect, const GeoPoint& p) {
  return p.lat() > rect.south && p.lat() < rect.north && p.lon() > rect.west &&
         p.lon() < rect.east;
}

}  // namespace

GeoPoint::GeoPoint(double lat, double lon) : lat_(lat), lon_(lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon)) {
    throw std::invalid_argument("GeoPoint: coordinates must be finite");
  }
  if (!in_range()) {
    throw std::invalid_argument("GeoPoint: lat/lon out of range");
  }
}

bool GeoPoint::in_range() const {
  return std::isfinite(lat_) && std::isfinite(lon_) && lat_ >= -90.0 &&
         lat_ <= 90.0 && lon_ >= -180.0 && lon_ <= 180.0;
}

void BoundingBox::expand_to(const GeoPoint& p) {
  south = std::min(south, p.lat());
  north = std::max(north, p.lat());
  west = std::min(west, p.lon());
  east = std::max(east, p.lon());
}

void BoundingBox::expand_to(const BoundingBox& other) {
  south = std::min(south, other.south);
  north = std::max(north, other.north);
  west = std::min(west, other.west);
  east = std::max(east, other.east);
}

Polygon::Polygon(std::vector<GeoPoint> ring) : ring_(std::move(ring)) {
  // Drop an explicit closing point so ring_[i] -> ring_[(i+1)%n] walks
  // every edge exactly once.
  if (ring_.size() >= 2 && ring_.front() == ring_.back()) {
    ring_.pop_back();
  }
}

bool Polygon::degenerate() const {
  if (ring_.size() < 3) {
    return true;
  }
  // Zero shoelace area (e.g. collinear vertices) means no interior, so
  // the ring cannot usefully bound a study area.
  double twice_area = 0.0;
  for (std::size_t i = 0; i < ring_.size(); ++i) {
    const GeoPoint& a = ring_[i];
    const GeoPoint& b = ring_[(i + 1) % ring_.size()];
    twice_area += a.lon() * b.lat() - b.lon() * a.lat();
  }
  return twice_area == 0.0;
}

BoundingBox Polygon::bounding_box() const {
  if (ring_.empty()) {
    return BoundingBox{};
  }
  BoundingBox box{ring_[0].lat(), ring_[0].lon(), ring_[0].lat(),
                  ring_[0].lon()};
  for (const GeoPoint& p : ring_) {
    box.expand_to(p);
  }
  return box;
}

bool Polygon::contains_strict(const GeoPoint& p) const {
  if (degenerate()) {
    return false;
  }
  if (point_on_ring(*this, p)) {
    return false;
  }
  // Even-odd ray cast toward +lon. Vertex grazing is handled by the
  // standard half-open rule on edge lat spans.
  bool inside = false;
  const std::size_t n = ring_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring_[i];
    const GeoPoint& b = ring_[(i + 1) % n];
    const bool a_below = a.lat() <= p.lat();
    const bool b_below = b.lat() <= p.lat();
    if (a_below == b_below) {
      continue;
    }
    const double t = (p.lat() - a.lat()) / (b.lat() - a.lat());
    const double x = a.lon() + t * (b.lon() - a.lon());
    if (x > p.lon()) {
      inside = !inside;
    }
  }
  return inside;
}

bool rect_intersects_polygon(const BoundingBox& rect, const Polygon& poly) {
  if (poly.degenerate() || !rect.valid()) {
    return false;
  }
  const BoundingBox poly_box = poly.bounding_box();
  if (rect.east <= poly_box.west || rect.west >= poly_box.east ||
      rect.north <= poly_box.south || rect.south >= poly_box.north) {
    return false;
  }

  // Any polygon vertex strictly inside the rectangle means shared area.
  for (const GeoPoint& v : poly.ring()) {
    if (strictly_inside_rect(rect, v)) {
      return true;
    }
  }

  // Any rectangle corner strictly inside the polygon likewise.
  const GeoPoint corners[4] = {
      GeoPoint::unchecked(rect.south, rect.west),
      GeoPoint::unchecked(rect.south, rect.east),
      GeoPoint::unchecked(rect.north, rect.west),
      GeoPoint::unchecked(rect.north, rect.east),
  };
  for (const GeoPoint& c : corners) {
    if (poly.contains_strict(c)) {
      return true;
    }
  }
  // Rectangle center handles the case where the polygon slices through
  // without owning any corner (and vice versa for thin polygons).
  const GeoPoint center = GeoPoint::unchecked((rect.south + rect.north) / 2.0,
                                              (rect.west + rect.east) / 2.0);
  if (poly.contains_strict(center)) {
    return true;
  }

  // Fall back to proper edge crossings: a polygon edge passing through
  // the rectangle interior must properly cross one of its sides unless a
  // vertex is inside (handled above).
  const GeoPoint sw = corners[0];
  const GeoPoint se = corners[1];
  const GeoPoint nw = corners[2];
  const GeoPoint ne = corners[3];
  const std::pair<GeoPoint, GeoPoint> sides[4] = {
      {sw, se}, {se, ne}, {ne, nw}, {nw, sw}};
  const auto& ring = poly.ring();
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) {
    const GeoPoint& a = ring[i];
    const GeoPoint& b = ring[(i + 1) % n];
    for (const auto& side : sides) {
      if (segments_cross_properly(a, b, side.first, side.second)) {
        return true;
      }
    }
  }
  return false;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double lat1 = deg_to_rad(a.lat());
  const double lat2 = deg_to_rad(b.lat());
  const double dlat = deg_to_rad(b.lat() - a.lat());
  const double dlon = deg_to_rad(b.lon() - a.lon());

  const double sin_dlat = std::sin(dlat / 2.0);
  const double sin_dlon = std::sin(dlon / 2.0);
  double h = sin_dlat * sin_dlat +
             std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double meters_to_lon_degrees(double meters, double at_lat_degrees) {
  const double scale = std::cos(deg_to_rad(at_lat_degrees));
  // Near the poles a longitude degree shrinks to nothing; clamp so the
  // conversion stays finite.
  const double effective = std::max(scale, 1e-6);
  return meters / (kMetersPerDegree * effective);
}

}  // namespace poi
