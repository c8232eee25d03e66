#include "rigkit/rignet_io.hpp"

#include <charconv>
#include <sstream>

#include "rigkit/error.hpp"
#include "text_format.hpp"

namespace rigkit {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

double parse_double(const std::string& tok, int line) {
    const size_t skip = !tok.empty() && tok[0] == '+' ? 1 : 0;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data() + skip, tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || skip == tok.size())
        throw ParseError("bad number \"" + tok + "\"", line);
    return value;
}

int parse_index(const std::string& tok, int line) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || value < 0)
        throw ParseError("bad index \"" + tok + "\"", line);
    return value;
}

}  // namespace

RigNetRig parse_rignet_rig(const std::string& text) {
    RigNetRig rig;
    std::map<std::string, int> joint_index;
    std::map<std::string, int> hier_line;  // child name -> line that set its parent
    int root_line = 0;
    std::string root_name;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0][0] == '#') continue;

        if (tokens[0] == "joints") {
            if (tokens.size() != 5) throw ParseError("joints record needs name and 3 coordinates", line_no);
            const std::string& name = tokens[1];
            if (joint_index.count(name))
                throw ParseError("duplicate joint \"" + name + "\"", line_no);
            joint_index[name] = static_cast<int>(rig.skeleton.joints.size());
            Joint joint;
            joint.name = name;
            joint.position = {parse_double(tokens[2], line_no), parse_double(tokens[3], line_no),
                              parse_double(tokens[4], line_no)};
            rig.skeleton.joints.push_back(std::move(joint));
        } else if (tokens[0] == "root") {
            if (tokens.size() != 2) throw ParseError("root record needs one name", line_no);
            if (root_line != 0) throw ParseError("second root record (first at line " +
                                                 std::to_string(root_line) + ")", line_no);
            root_line = line_no;
            root_name = tokens[1];
            if (!joint_index.count(root_name))
                throw ParseError("unknown joint \"" + root_name + "\"", line_no);
        } else if (tokens[0] == "hier") {
            if (tokens.size() != 3) throw ParseError("hier record needs parent and child", line_no);
            const auto parent = joint_index.find(tokens[1]);
            const auto child = joint_index.find(tokens[2]);
            if (parent == joint_index.end())
                throw ParseError("unknown joint \"" + tokens[1] + "\"", line_no);
            if (child == joint_index.end())
                throw ParseError("unknown joint \"" + tokens[2] + "\"", line_no);
            Joint& c = rig.skeleton.joints[static_cast<size_t>(child->second)];
            if (c.parent)
                throw ParseError("joint \"" + tokens[2] + "\" already has a parent (line " +
                                 std::to_string(hier_line[tokens[2]]) + ")", line_no);
            c.parent = parent->second;
            hier_line[tokens[2]] = line_no;
        } else if (tokens[0] == "skin") {
            if (tokens.size() < 4 || tokens.size() % 2 != 0)
                throw ParseError("skin record needs a vertex index and bone/weight pairs", line_no);
            const int vertex = parse_index(tokens[1], line_no);
            auto& row = rig.skin[vertex];
            for (size_t t = 2; t + 1 < tokens.size(); t += 2) {
                if (!joint_index.count(tokens[t]))
                    throw ParseError("unknown joint \"" + tokens[t] + "\"", line_no);
                row.emplace_back(tokens[t], parse_double(tokens[t + 1], line_no));
            }
        } else {
            throw ParseError("unknown record \"" + tokens[0] + "\"", line_no);
        }
    }

    if (root_line == 0) throw DataError("no root");
    const int root = joint_index.at(root_name);
    for (size_t j = 0; j < rig.skeleton.joints.size(); ++j) {
        if (static_cast<int>(j) != root && !rig.skeleton.joints[j].parent)
            throw DataError("joint \"" + rig.skeleton.joints[j].name + "\" is not connected to the root");
    }
    if (rig.skeleton.joints[static_cast<size_t>(root)].parent)
        throw DataError("declared root \"" + root_name + "\" has a parent");
    rig.skeleton.root();  // validates the tree end to end
    return rig;
}

std::string write_rignet_rig(const RigNetRig& rig) {
    std::string out;
    for (const Joint& j : rig.skeleton.joints) {
        out += "joints " + j.name + " " + g9(j.position.x) + " " + g9(j.position.y) + " " +
               g9(j.position.z) + "\n";
    }
    out += "root " + rig.skeleton.joints[static_cast<size_t>(rig.skeleton.root())].name + "\n";
    for (const Joint& j : rig.skeleton.joints) {
        if (j.parent)
            out += "hier " + rig.skeleton.joints[static_cast<size_t>(*j.parent)].name + " " + j.name + "\n";
    }
    for (const auto& [vertex, weights] : rig.skin) {
        out += "skin " + std::to_string(vertex);
        for (const auto& [bone, w] : weights) out += " " + bone + " " + g9(w);
        out += "\n";
    }
    return out;
}

RigDocument rignet_to_document(const RigNetRig& rig) {
    RigDocument doc;
    for (const Joint& j : rig.skeleton.joints) {
        DocumentJoint out;
        out.name = j.name;
        out.position = j.position;
        if (j.parent) out.parent = rig.skeleton.joints[static_cast<size_t>(*j.parent)].name;
        doc.joints.push_back(std::move(out));
    }
    for (const auto& [vertex, weights] : rig.skin) {
        DocumentSkinRow row;
        row.vertex = vertex;
        for (const auto& [bone, w] : weights) row.weights[bone] += w;
        doc.skin.push_back(std::move(row));
    }
    return doc;
}

}  // namespace rigkit
