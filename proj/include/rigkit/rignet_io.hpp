#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rigkit/rig.hpp"
#include "rigkit/rig_document.hpp"

namespace rigkit {

// Rig description in the RigNet text layout: `joints`, `root`, `hier`
// and `skin` records.  Skin weights are keyed by vertex index and name
// bones through their tail joint.
struct RigNetRig {
    Skeleton skeleton;
    std::map<int, std::vector<std::pair<std::string, double>>> skin;
};

RigNetRig parse_rignet_rig(const std::string& text);

std::string write_rignet_rig(const RigNetRig& rig);

// Conversion into the interchange document (tail-joint bone naming).
RigDocument rignet_to_document(const RigNetRig& rig);

}  // namespace rigkit
