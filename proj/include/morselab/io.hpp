#pragma once

// JSON forms of spaces, points and boundary points:
//   {"kind": "lattice_ray_plane"} | {"kind": "euclidean_plane"}
//   {"kind": "metric_tree", "edges": [[u, v, len], ...], "rays": [leaf, ...]}
//   {"chart": "plane", "x": .., "y": ..} | {"chart": "ray", "m": .., "n": .., "h": ..}
//   {"chart": "edge", "u": .., "v": .., "t": ..}
//   boundary point: [m, n]

#include <json.hpp>

#include <string>

#include "morselab/model_space.hpp"

namespace morselab {

nlohmann::json to_json(const ModelSpace& space);
ModelSpace space_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ModelPoint& p);
ModelPoint point_from_json(const nlohmann::json& j);

nlohmann::json to_json(const BoundaryPoint& b);
BoundaryPoint boundary_from_json(const nlohmann::json& j);

// Inline JSON when the argument starts with '{' or '[', else a file path.
nlohmann::json load_json_arg(const std::string& arg);

// Geodesic endpoints written as "A:B" with A, B one of
//   r[m,n] (boundary ray; r[leaf] in a tree), p(x,y), ray(m,n,h), e(u,v,t).
// Parse errors report the 0-based character position.
std::pair<Endpoint, Endpoint> parse_geodesic_spec(const std::string& spec);
std::string to_spec(const Endpoint& e);

// Shortest round-trip decimal form; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

}  // namespace morselab
