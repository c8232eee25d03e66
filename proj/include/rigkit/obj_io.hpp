#pragma once

#include <string>
#include <vector>

#include "rigkit/rig.hpp"

namespace rigkit {

struct ObjParseResult {
    Mesh mesh;
    // One entry per skipped record keyword, e.g. "skipped 4 'vn' records".
    std::vector<std::string> warnings;
};

// Minimal Wavefront OBJ reader: `v` and `f` records only.  Polygons
// are fan-triangulated, indices may be 1-based or negative (relative),
// and `v/vt/vn` slash forms contribute their vertex index.  Anything
// else is skipped and counted in the warning list.
ObjParseResult parse_obj(const std::string& text);

std::string write_obj(const Mesh& mesh);

ObjParseResult load_obj(const std::string& path);
void save_obj(const std::string& path, const Mesh& mesh);

}  // namespace rigkit
