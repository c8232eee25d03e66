#include "rigkit/obj_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "rigkit/error.hpp"

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
    // from_chars does not accept a leading '+'.
    const size_t skip = !tok.empty() && tok[0] == '+' ? 1 : 0;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data() + skip, tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || skip == tok.size())
        throw ParseError("bad number \"" + tok + "\"", line);
    return value;
}

// A face corner may be "v", "v/vt", "v//vn" or "v/vt/vn"; only the
// vertex index matters here.
int parse_corner(const std::string& tok, int vertex_count, int line) {
    const size_t slash = tok.find('/');
    const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
    int index = 0;
    const auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), index);
    if (ec != std::errc() || ptr != head.data() + head.size() || index == 0)
        throw ParseError("bad face index \"" + tok + "\"", line);
    const int resolved = index > 0 ? index - 1 : vertex_count + index;
    if (resolved < 0 || resolved >= vertex_count)
        throw ParseError("face index " + std::to_string(index) + " out of range", line);
    return resolved;
}

}  // namespace

ObjParseResult parse_obj(const std::string& text) {
    ObjParseResult out;
    std::map<std::string, int> skipped;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0][0] == '#') continue;

        if (tokens[0] == "v") {
            if (tokens.size() < 4) throw ParseError("vertex needs three coordinates", line_no);
            out.mesh.vertices.push_back({parse_double(tokens[1], line_no),
                                         parse_double(tokens[2], line_no),
                                         parse_double(tokens[3], line_no)});
        } else if (tokens[0] == "f") {
            if (tokens.size() < 4) throw ParseError("face needs at least three vertices", line_no);
            const int count = static_cast<int>(out.mesh.vertices.size());
            std::vector<int> corners;
            for (size_t t = 1; t < tokens.size(); ++t)
                corners.push_back(parse_corner(tokens[t], count, line_no));
            for (size_t t = 2; t < corners.size(); ++t)
                out.mesh.faces.push_back({corners[0], corners[t - 1], corners[t]});
        } else {
            ++skipped[tokens[0]];
        }
    }

    for (const auto& [keyword, count] : skipped) {
        out.warnings.push_back("skipped " + std::to_string(count) + " '" + keyword + "' record" +
                               (count == 1 ? "" : "s"));
    }
    return out;
}

std::string write_obj(const Mesh& mesh) {
    std::string out;
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out += buf;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(buf, sizeof(buf), "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out += buf;
    }
    return out;
}

ObjParseResult load_obj(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_obj(buffer.str());
}

void save_obj(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write \"" + path + "\"");
    out << write_obj(mesh);
}

}  // namespace rigkit
