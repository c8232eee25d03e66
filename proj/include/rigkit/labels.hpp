#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rigkit/matrix.hpp"

namespace rigkit {

// Rule-based normalization of a raw joint name into a readable label.
// Returns nullopt when the name carries no usable information (empty
// after cleanup, pure digits, or a generic stem like "Bone003").
// Idempotent on its own outputs.
std::optional<std::string> clean_label(const std::string& raw);

// Label -> unit embedding vector lookup with a stable row order.
struct EmbeddingTable {
    int dim = 0;
    std::vector<std::string> labels;
    Matrix vectors;  // one row per label

    // Inserts a vector under a new label, renormalizing when the norm
    // is off by more than 1e-5.  Returns true when renormalization was
    // needed so callers can surface a warning.  Duplicate labels and
    // zero vectors are DataErrors.
    bool add(const std::string& label, std::span<const double> vector);

    // Row index of a label, -1 when absent.
    int find(const std::string& label) const;

    int count() const { return static_cast<int>(labels.size()); }
};

struct LabelScore {
    std::string label;
    double score = 0.0;
};

// For each joint embedding row, the k vocabulary labels with the
// highest dot product (cosine on unit vectors).  Ties break by
// lexicographic label order, so the result does not depend on the
// order labels were added.
std::vector<std::vector<LabelScore>> assign_labels(const Matrix& joint_embeddings,
                                                   const EmbeddingTable& vocab, int k);

// Fraction of joints whose ground-truth label appears in the first k
// entries of their ranked list.
double topk_accuracy(const std::vector<std::vector<LabelScore>>& predictions,
                     const std::vector<std::string>& ground_truth, int k);

// Symmetric-batch contrastive loss: mean over rows of
// -log softmax(similarity / temperature) at the matching column.
// Rows of both matrices must be unit length.
double info_nce(const Matrix& joint_embeddings, const Matrix& label_embeddings,
                double temperature);

}  // namespace rigkit
