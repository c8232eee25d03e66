#include "rigkit/table_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
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

long parse_long(const std::string& tok, int line) {
    long value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("bad integer \"" + tok + "\"", line);
    return value;
}

// "key=value" headers.
long header_field(const std::vector<std::string>& tokens, const std::string& key, int line) {
    const std::string prefix = key + "=";
    for (const std::string& tok : tokens) {
        if (tok.rfind(prefix, 0) == 0) return parse_long(tok.substr(prefix.size()), line);
    }
    throw ParseError("header is missing " + key + "=", line);
}

// Reads lines, strips \r, skips blanks and #-comments, tracks numbers.
struct LineReader {
    std::istringstream in;
    int line_no = 0;

    explicit LineReader(const std::string& text) : in(text) {}

    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            tokens = split_ws(line);
            if (tokens.empty() || tokens[0][0] == '#') continue;
            return true;
        }
        return false;
    }
};

}  // namespace

std::string write_token_stream(const TokenSequence& sequence, const CodecConfig& config) {
    std::string out = "rigtokens v1 res=" + std::to_string(config.grid_resolution) +
                      " max_joints=" + std::to_string(config.max_joints) +
                      " count=" + std::to_string(sequence.tokens.size()) +
                      " terminated=" + (sequence.terminated ? "1" : "0") + "\n";
    for (size_t k = 0; k < sequence.tokens.size(); ++k) {
        const SkeletonToken& t = sequence.tokens[k];
        out += std::to_string(k) + " " + std::to_string(t.qx) + " " + std::to_string(t.qy) + " " +
               std::to_string(t.qz) + " " + std::to_string(t.parent) + "\n";
    }
    return out;
}

std::pair<TokenSequence, CodecConfig> read_token_stream(const std::string& text) {
    LineReader reader(text);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens[0] != "rigtokens" || tokens.size() < 2 || tokens[1] != "v1")
        throw ParseError("expected header \"rigtokens v1 ...\"", reader.line_no);
    CodecConfig config;
    config.grid_resolution = static_cast<int>(header_field(tokens, "res", reader.line_no));
    config.max_joints = static_cast<int>(header_field(tokens, "max_joints", reader.line_no));
    const long count = header_field(tokens, "count", reader.line_no);
    const long terminated = header_field(tokens, "terminated", reader.line_no);

    TokenSequence sequence;
    sequence.terminated = terminated != 0;
    while (reader.next(tokens)) {
        if (tokens.size() != 5) throw ParseError("token row needs 5 fields", reader.line_no);
        const long k = parse_long(tokens[0], reader.line_no);
        if (k != static_cast<long>(sequence.tokens.size()))
            throw ParseError("token rows must be consecutive from 0", reader.line_no);
        SkeletonToken t;
        t.qx = static_cast<int>(parse_long(tokens[1], reader.line_no));
        t.qy = static_cast<int>(parse_long(tokens[2], reader.line_no));
        t.qz = static_cast<int>(parse_long(tokens[3], reader.line_no));
        t.parent = static_cast<int>(parse_long(tokens[4], reader.line_no));
        sequence.tokens.push_back(t);
    }
    if (static_cast<long>(sequence.tokens.size()) != count)
        throw DataError("token stream: count says " + std::to_string(count) + " but " +
                        std::to_string(sequence.tokens.size()) + " rows follow");
    return {sequence, config};
}

std::string write_occupancy(const OccupancySet& set) {
    std::string out = "rigvox v1 res=" + std::to_string(set.resolution) +
                      " cells=" + std::to_string(set.cells.size()) + "\n";
    for (const VoxelCoord& c : set.cells)
        out += std::to_string(c.i) + " " + std::to_string(c.j) + " " + std::to_string(c.k) + "\n";
    return out;
}

OccupancySet read_occupancy(const std::string& text) {
    LineReader reader(text);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens[0] != "rigvox" || tokens.size() < 2 || tokens[1] != "v1")
        throw ParseError("expected header \"rigvox v1 ...\"", reader.line_no);
    OccupancySet set;
    set.resolution = static_cast<int>(header_field(tokens, "res", reader.line_no));
    const long count = header_field(tokens, "cells", reader.line_no);
    while (reader.next(tokens)) {
        if (tokens.size() != 3) throw ParseError("cell row needs 3 fields", reader.line_no);
        VoxelCoord c{static_cast<int>(parse_long(tokens[0], reader.line_no)),
                     static_cast<int>(parse_long(tokens[1], reader.line_no)),
                     static_cast<int>(parse_long(tokens[2], reader.line_no))};
        for (int axis : {c.i, c.j, c.k})
            if (axis < 0 || axis >= set.resolution)
                throw ParseError("cell outside the grid", reader.line_no);
        set.cells.insert(c);
    }
    if (static_cast<long>(set.cells.size()) != count)
        throw DataError("occupancy: cells says " + std::to_string(count) + " but " +
                        std::to_string(set.cells.size()) + " distinct rows follow");
    return set;
}

std::string write_feature_grid(const SparseFeatureGrid& grid) {
    std::string out = "riggrid v1 res=" + std::to_string(grid.resolution) +
                      " dim=" + std::to_string(grid.feature_dim) +
                      " cells=" + std::to_string(grid.cells.size()) + "\n";
    for (const auto& [c, cell] : grid.cells) {
        out += std::to_string(c.i) + " " + std::to_string(c.j) + " " + std::to_string(c.k) + " " +
               std::to_string(cell.count);
        for (double f : cell.feature) out += " " + g9(f);
        out += "\n";
    }
    return out;
}

SparseFeatureGrid read_feature_grid(const std::string& text) {
    LineReader reader(text);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens[0] != "riggrid" || tokens.size() < 2 || tokens[1] != "v1")
        throw ParseError("expected header \"riggrid v1 ...\"", reader.line_no);
    SparseFeatureGrid grid;
    grid.resolution = static_cast<int>(header_field(tokens, "res", reader.line_no));
    grid.feature_dim = static_cast<int>(header_field(tokens, "dim", reader.line_no));
    const long count = header_field(tokens, "cells", reader.line_no);
    while (reader.next(tokens)) {
        if (static_cast<int>(tokens.size()) != 4 + grid.feature_dim)
            throw ParseError("cell row needs " + std::to_string(4 + grid.feature_dim) + " fields",
                             reader.line_no);
        VoxelCoord c{static_cast<int>(parse_long(tokens[0], reader.line_no)),
                     static_cast<int>(parse_long(tokens[1], reader.line_no)),
                     static_cast<int>(parse_long(tokens[2], reader.line_no))};
        GridCell cell;
        cell.count = static_cast<int>(parse_long(tokens[3], reader.line_no));
        for (int d = 0; d < grid.feature_dim; ++d)
            cell.feature.push_back(parse_double(tokens[static_cast<size_t>(4 + d)], reader.line_no));
        if (!grid.cells.emplace(c, std::move(cell)).second)
            throw ParseError("duplicate cell", reader.line_no);
    }
    if (static_cast<long>(grid.cells.size()) != count)
        throw DataError("feature grid: cells says " + std::to_string(count) + " but " +
                        std::to_string(grid.cells.size()) + " rows follow");
    return grid;
}

namespace {

std::string quote_label(const std::string& label) {
    if (label.find_first_of(" \t\"") == std::string::npos && !label.empty()) return label;
    std::string out = "\"";
    for (char c : label) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

// Splits a row into fields honoring double quotes with backslash escapes.
std::vector<std::string> split_quoted(const std::string& line, int line_no) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        if (i >= line.size()) break;
        std::string field;
        if (line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < line.size()) {
                if (line[i] == '\\' && i + 1 < line.size()) {
                    field.push_back(line[i + 1]);
                    i += 2;
                } else if (line[i] == '"') {
                    ++i;
                    closed = true;
                    break;
                } else {
                    field.push_back(line[i]);
                    ++i;
                }
            }
            if (!closed) throw ParseError("unterminated quote", line_no);
        } else {
            while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
                field.push_back(line[i]);
                ++i;
            }
        }
        out.push_back(std::move(field));
    }
    return out;
}

}  // namespace

std::string write_embedding_table(const EmbeddingTable& table) {
    std::string out = "dim=" + std::to_string(table.dim) +
                      " count=" + std::to_string(table.count()) + "\n";
    for (int r = 0; r < table.count(); ++r) {
        out += quote_label(table.labels[static_cast<size_t>(r)]);
        for (double f : table.vectors.row(r)) out += " " + g9(f);
        out += "\n";
    }
    return out;
}

EmbeddingTableResult read_embedding_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    EmbeddingTableResult out;
    long dim = -1;
    long count = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (dim < 0) {
            const auto header = split_ws(line);
            dim = header_field(header, "dim", line_no);
            count = header_field(header, "count", line_no);
            if (dim <= 0) throw ParseError("dim must be positive", line_no);
            continue;
        }
        const auto fields = split_quoted(line, line_no);
        if (static_cast<long>(fields.size()) != dim + 1)
            throw ParseError("row needs a label and " + std::to_string(dim) + " values", line_no);
        std::vector<double> vec;
        for (long d = 0; d < dim; ++d)
            vec.push_back(parse_double(fields[static_cast<size_t>(d + 1)], line_no));
        try {
            if (out.table.add(fields[0], vec))
                out.warnings.push_back("renormalized \"" + fields[0] + "\"");
        } catch (const DataError& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    if (dim < 0) throw DataError("embedding table: missing header");
    if (out.table.count() != count)
        throw DataError("embedding table: count says " + std::to_string(count) + " but " +
                        std::to_string(out.table.count()) + " rows follow");
    return out;
}

std::string write_joint_embeddings(const std::vector<std::string>& names, const Matrix& vectors) {
    if (static_cast<int>(names.size()) != vectors.rows)
        throw DataError("joint embeddings: name count differs from rows");
    std::string out = "dim=" + std::to_string(vectors.cols) +
                      " count=" + std::to_string(vectors.rows) + "\n";
    for (int r = 0; r < vectors.rows; ++r) {
        out += std::to_string(r) + " " + quote_label(names[static_cast<size_t>(r)]);
        for (double f : vectors.row(r)) out += " " + g9(f);
        out += "\n";
    }
    return out;
}

JointEmbeddings read_joint_embeddings(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;

    long dim = -1;
    long count = -1;
    std::vector<bool> seen;
    JointEmbeddings out;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (dim < 0) {
            const auto header = split_ws(line);
            dim = header_field(header, "dim", line_no);
            count = header_field(header, "count", line_no);
            if (dim <= 0) throw ParseError("dim must be positive", line_no);
            if (count < 0) throw ParseError("count must be nonnegative", line_no);
            out.vectors = Matrix(static_cast<int>(count), static_cast<int>(dim));
            out.names.assign(static_cast<size_t>(count), "");
            seen.assign(static_cast<size_t>(count), false);
            continue;
        }
        const auto fields = split_quoted(line, line_no);
        if (static_cast<long>(fields.size()) != dim + 2)
            throw ParseError("row needs joint_index, label and " + std::to_string(dim) + " values",
                             line_no);
        const long joint = parse_long(fields[0], line_no);
        if (joint < 0 || joint >= count) throw ParseError("joint_index out of range", line_no);
        if (seen[static_cast<size_t>(joint)])
            throw ParseError("duplicate joint_index " + std::to_string(joint), line_no);
        seen[static_cast<size_t>(joint)] = true;
        out.names[static_cast<size_t>(joint)] = fields[1];

        double norm2 = 0.0;
        for (long d = 0; d < dim; ++d) {
            const double v = parse_double(fields[static_cast<size_t>(d + 2)], line_no);
            out.vectors.at(static_cast<int>(joint), static_cast<int>(d)) = v;
            norm2 += v * v;
        }
        const double norm = std::sqrt(norm2);
        if (norm <= 0.0) throw ParseError("zero embedding vector", line_no);
        if (std::abs(norm - 1.0) > 1e-5) {
            for (long d = 0; d < dim; ++d) out.vectors.at(static_cast<int>(joint), static_cast<int>(d)) /= norm;
            out.warnings.push_back("renormalized joint " + std::to_string(joint));
        }
    }
    if (dim < 0) throw DataError("joint embeddings: missing header");
    for (size_t j = 0; j < seen.size(); ++j)
        if (!seen[j]) throw DataError("joint embeddings: no row for joint " + std::to_string(j));
    return out;
}

std::string write_indexed_matrix(const Matrix& m) {
    std::string out = "rigmat v1 dim=" + std::to_string(m.cols) +
                      " count=" + std::to_string(m.rows) + "\n";
    for (int r = 0; r < m.rows; ++r) {
        out += std::to_string(r);
        for (double f : m.row(r)) out += " " + g9(f);
        out += "\n";
    }
    return out;
}

Matrix read_indexed_matrix(const std::string& text) {
    LineReader reader(text);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens[0] != "rigmat" || tokens.size() < 2 || tokens[1] != "v1")
        throw ParseError("expected header \"rigmat v1 ...\"", reader.line_no);
    const long dim = header_field(tokens, "dim", reader.line_no);
    const long count = header_field(tokens, "count", reader.line_no);
    if (dim < 0 || count < 0) throw ParseError("bad matrix shape", reader.line_no);

    Matrix m(static_cast<int>(count), static_cast<int>(dim));
    std::vector<bool> seen(static_cast<size_t>(count), false);
    while (reader.next(tokens)) {
        if (static_cast<long>(tokens.size()) != dim + 1)
            throw ParseError("row needs an index and " + std::to_string(dim) + " values",
                             reader.line_no);
        const long r = parse_long(tokens[0], reader.line_no);
        if (r < 0 || r >= count) throw ParseError("row index out of range", reader.line_no);
        if (seen[static_cast<size_t>(r)])
            throw ParseError("duplicate row index " + std::to_string(r), reader.line_no);
        seen[static_cast<size_t>(r)] = true;
        for (long d = 0; d < dim; ++d)
            m.at(static_cast<int>(r), static_cast<int>(d)) =
                parse_double(tokens[static_cast<size_t>(d + 1)], reader.line_no);
    }
    for (size_t r = 0; r < seen.size(); ++r)
        if (!seen[r]) throw DataError("matrix: no row for index " + std::to_string(r));
    return m;
}

std::string write_pose(const PoseSpec& pose) {
    std::string out = "rigpose v1 joints=" + std::to_string(pose.rotations.size()) + "\n";
    const Vec3& t = pose.root_translation;
    if (t.x != 0.0 || t.y != 0.0 || t.z != 0.0)
        out += "root_translation " + g9(t.x) + " " + g9(t.y) + " " + g9(t.z) + "\n";
    for (size_t j = 0; j < pose.rotations.size(); ++j) {
        const Quat& q = pose.rotations[j];
        if (q.w == 1.0 && q.x == 0.0 && q.y == 0.0 && q.z == 0.0) continue;
        out += "rot " + std::to_string(j) + " " + g9(q.w) + " " + g9(q.x) + " " + g9(q.y) + " " +
               g9(q.z) + "\n";
    }
    return out;
}

PoseSpec read_pose(const std::string& text, int expected_joints) {
    LineReader reader(text);
    std::vector<std::string> tokens;
    if (!reader.next(tokens) || tokens[0] != "rigpose" || tokens.size() < 2 || tokens[1] != "v1")
        throw ParseError("expected header \"rigpose v1 ...\"", reader.line_no);
    const long joints = header_field(tokens, "joints", reader.line_no);
    if (joints < 0) throw ParseError("joints must be nonnegative", reader.line_no);
    if (expected_joints >= 0 && joints != expected_joints)
        throw DataError("pose: file describes " + std::to_string(joints) + " joints, skeleton has " +
                        std::to_string(expected_joints));

    PoseSpec pose = PoseSpec::identity(static_cast<int>(joints));
    while (reader.next(tokens)) {
        if (tokens[0] == "root_translation") {
            if (tokens.size() != 4) throw ParseError("root_translation needs 3 values", reader.line_no);
            pose.root_translation = {parse_double(tokens[1], reader.line_no),
                                     parse_double(tokens[2], reader.line_no),
                                     parse_double(tokens[3], reader.line_no)};
        } else if (tokens[0] == "rot") {
            if (tokens.size() != 6) throw ParseError("rot needs joint and 4 values", reader.line_no);
            const long j = parse_long(tokens[1], reader.line_no);
            if (j < 0 || j >= joints) throw ParseError("joint index out of range", reader.line_no);
            pose.rotations[static_cast<size_t>(j)] = {
                parse_double(tokens[2], reader.line_no), parse_double(tokens[3], reader.line_no),
                parse_double(tokens[4], reader.line_no), parse_double(tokens[5], reader.line_no)};
        } else {
            throw ParseError("unknown record \"" + tokens[0] + "\"", reader.line_no);
        }
    }
    return pose;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write \"" + path + "\"");
    out << content;
}

}  // namespace rigkit
