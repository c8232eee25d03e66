#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rigkit/labels.hpp"
#include "rigkit/skinning.hpp"
#include "rigkit/token_codec.hpp"
#include "rigkit/voxelize.hpp"

namespace rigkit {

// Token stream: `rigtokens v1 res=<r> max_joints=<m> count=<n>
// terminated=<0|1>` then one `<k> <qx> <qy> <qz> <parent>` line per token.
std::string write_token_stream(const TokenSequence& sequence, const CodecConfig& config);
std::pair<TokenSequence, CodecConfig> read_token_stream(const std::string& text);

// Occupancy set: `rigvox v1 res=<r> cells=<n>` then `<i> <j> <k>` rows
// in lexicographic order.
std::string write_occupancy(const OccupancySet& set);
OccupancySet read_occupancy(const std::string& text);

// Feature grid: `riggrid v1 res=<r> dim=<d> cells=<n>` then
// `<i> <j> <k> <count> <f...>` rows in lexicographic order.
std::string write_feature_grid(const SparseFeatureGrid& grid);
SparseFeatureGrid read_feature_grid(const std::string& text);

// Embedding table: `dim=<d> count=<n>` then `<label> <f...>` rows,
// labels quoted when they contain whitespace or quotes.
std::string write_embedding_table(const EmbeddingTable& table);
struct EmbeddingTableResult {
    EmbeddingTable table;
    std::vector<std::string> warnings;  // renormalized rows
};
EmbeddingTableResult read_embedding_table(const std::string& text);

// Joint embeddings: the table format plus a leading joint_index
// column; rows must cover indices 0..count-1 exactly once.
struct JointEmbeddings {
    std::vector<std::string> names;  // per joint
    Matrix vectors;                  // row per joint
    std::vector<std::string> warnings;
};
std::string write_joint_embeddings(const std::vector<std::string>& names, const Matrix& vectors);
JointEmbeddings read_joint_embeddings(const std::string& text);

// Raw row-indexed matrix (no labels, no normalization): `rigmat v1
// dim=<d> count=<n>` then `<index> <f...>` rows covering 0..n-1.
std::string write_indexed_matrix(const Matrix& m);
Matrix read_indexed_matrix(const std::string& text);

// Pose: `rigpose v1 joints=<n>`, one optional `root_translation <x> <y>
// <z>` line, and `rot <joint> <w> <x> <y> <z>` lines; unlisted joints
// stay at identity.
std::string write_pose(const PoseSpec& pose);
PoseSpec read_pose(const std::string& text, int expected_joints = -1);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rigkit
