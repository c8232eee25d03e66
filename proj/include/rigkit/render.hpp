#pragma once

#include <string>

#include "rigkit/rig.hpp"

namespace rigkit {

// Orthographic front (x/y) projection of the skeleton as a standalone
// SVG: bones as lines, joints as dots, the root highlighted.  Meant
// for quick figures, not interaction.
std::string render_skeleton_svg(const Skeleton& skeleton, int size = 512);

}  // namespace rigkit
