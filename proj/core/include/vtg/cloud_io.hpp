#pragma once

// ASCII point cloud file format:
//
//   cloud v1 n=<count> color=<0|1> viewpoint=<x> <y> <z>
//   x y z [r g b]        (one point per line, count lines)
//
// Coordinates are meters; colors are RGB in [0, 1].  Loading rejects
// malformed headers, wrong point counts and non-finite values, reporting
// the offending line number.

#include <iosfwd>
#include <string>

#include "vtg/geometry.hpp"

namespace vtg {

PointCloud load_cloud(std::istream& in, const std::string& name = "<stream>");
PointCloud load_cloud_file(const std::string& path);

void save_cloud(std::ostream& out, const PointCloud& cloud);
void save_cloud_file(const std::string& path, const PointCloud& cloud);

}  // namespace vtg
