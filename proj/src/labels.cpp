#include "rigkit/labels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "rigkit/error.hpp"
#include "rigkit/numeric.hpp"

namespace rigkit {

namespace {

bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_lower(char c) { return std::islower(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string lowercase(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

// "Bone003", "Joint1", "jnt", plain "j" and friends say nothing about
// what the joint is.
bool is_generic_name(const std::string& s) {
    const std::string low = lowercase(s);
    for (const char* stem : {"bone", "joint", "jnt", "j"}) {
        const size_t n = std::char_traits<char>::length(stem);
        if (low.compare(0, n, stem) != 0) continue;
        if (std::all_of(low.begin() + static_cast<long>(n), low.end(), is_digit)) return true;
    }
    return false;
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> tokens;
    std::string current;
    for (char c : s) {
        if (c == '_' || c == '.' || c == '-' || c == ' ') {
            if (!current.empty()) tokens.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Splits at camelCase humps and letter/digit boundaries.
std::vector<std::string> split_words(const std::string& token) {
    std::vector<std::string> words;
    std::string current;
    for (size_t i = 0; i < token.size(); ++i) {
        const char c = token[i];
        bool boundary = false;
        if (!current.empty()) {
            const char prev = current.back();
            if (is_lower(prev) && is_upper(c)) boundary = true;
            if (is_alpha(prev) && is_digit(c)) boundary = true;
            if (is_digit(prev) && is_alpha(c)) boundary = true;
            if (is_upper(prev) && is_upper(c) && i + 1 < token.size() && is_lower(token[i + 1]))
                boundary = true;
        }
        if (boundary) {
            words.push_back(std::move(current));
            current.clear();
        }
        current.push_back(c);
    }
    if (!current.empty()) words.push_back(std::move(current));
    return words;
}

enum class Side { kNone, kLeft, kRight };

Side side_of_letter(char c) {
    if (c == 'l' || c == 'L') return Side::kLeft;
    if (c == 'r' || c == 'R') return Side::kRight;
    return Side::kNone;
}

}  // namespace

std::optional<std::string> clean_label(const std::string& raw) {
    std::string s = raw;

    // Exporters join the armature name and the joint name with "--".
    if (const size_t pos = s.rfind("--"); pos != std::string::npos) s = s.substr(pos + 2);

    // Namespace prefixes like "mixamorig:".
    if (const size_t pos = s.rfind(':'); pos != std::string::npos) s = s.substr(pos + 1);

    // Auto-generated "_Skeleton_<digits>" suffixes.
    if (const size_t pos = s.rfind("_Skeleton_"); pos != std::string::npos) {
        const std::string tail = s.substr(pos + 10);
        if (all_digits(tail)) s = s.substr(0, pos);
    }

    std::vector<std::string> tokens = split_tokens(s);
    std::erase_if(tokens, [](const std::string& t) { return lowercase(t) == "pasted"; });

    // Side markers.  A lone "L"/"R" token at the end qualifies the name
    // before it; one in the middle (or a token like "lShoulder") marks
    // where rig-name prefixes stop and the real name starts.
    Side side = Side::kNone;
    std::vector<std::string> name_tokens;
    bool side_from_token = false;
    for (size_t i = 0; i < tokens.size() && !side_from_token; ++i) {
        const std::string& tok = tokens[i];
        if (tok.size() == 1 && side_of_letter(tok[0]) != Side::kNone) {
            side = side_of_letter(tok[0]);
            side_from_token = true;
            if (i + 1 == tokens.size()) {
                name_tokens.assign(tokens.begin(), tokens.begin() + static_cast<long>(i));
            } else {
                name_tokens.assign(tokens.begin() + static_cast<long>(i) + 1, tokens.end());
            }
        } else if (tok.size() >= 2 && side_of_letter(tok[0]) != Side::kNone && is_upper(tok[1]) &&
                   lowercase(tok) != "left" && lowercase(tok) != "right") {
            side = side_of_letter(tok[0]);
            side_from_token = true;
            name_tokens.push_back(tok.substr(1));
            name_tokens.insert(name_tokens.end(), tokens.begin() + static_cast<long>(i) + 1,
                               tokens.end());
        }
    }
    if (!side_from_token) name_tokens = tokens;

    std::vector<std::string> words;
    for (const std::string& tok : name_tokens) {
        for (std::string& w : split_words(tok)) words.push_back(std::move(w));
    }

    if (side == Side::kNone) {
        for (size_t i = 0; i < words.size(); ++i) {
            const std::string low = lowercase(words[i]);
            if (low == "left" || low == "right") {
                side = low == "left" ? Side::kLeft : Side::kRight;
                words.erase(words.begin() + static_cast<long>(i));
                break;
            }
        }
    }

    // Trailing "joint"/"jnt"/"j" words are markers, not names.
    while (!words.empty()) {
        const std::string low = lowercase(words.back());
        if (low == "j" || low == "jnt" || low == "joint") {
            words.pop_back();
        } else {
            break;
        }
    }

    std::string name;
    for (std::string& w : words) {
        if (is_alpha(w[0])) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        name += w;
    }
    if (side == Side::kLeft) name = "Left" + name;
    if (side == Side::kRight) name = "Right" + name;

    if (name.empty()) return std::nullopt;
    if (all_digits(name)) return std::nullopt;
    if (is_generic_name(name)) return std::nullopt;
    return name;
}

bool EmbeddingTable::add(const std::string& label, std::span<const double> vector) {
    if (!labels.empty() && static_cast<int>(vector.size()) != dim)
        throw DataError("embedding table: vector dimension differs from table");
    if (find(label) >= 0) throw DataError("embedding table: duplicate label \"" + label + "\"");

    double norm2 = 0.0;
    for (double x : vector) {
        if (!std::isfinite(x)) throw DataError("embedding table: non-finite value");
        norm2 += x * x;
    }
    const double norm = std::sqrt(norm2);
    if (norm <= 0.0) throw DataError("embedding table: zero vector for \"" + label + "\"");
    const bool renormalized = std::abs(norm - 1.0) > 1e-5;

    if (labels.empty()) {
        dim = static_cast<int>(vector.size());
        vectors = Matrix(0, dim);
    }

    labels.push_back(label);
    vectors.rows += 1;
    vectors.data.reserve(vectors.data.size() + vector.size());
    for (double x : vector) vectors.data.push_back(renormalized ? x / norm : x);
    return renormalized;
}

int EmbeddingTable::find(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

namespace {

void check_unit_rows(const Matrix& m, const char* what) {
    for (int r = 0; r < m.rows; ++r) {
        double norm2 = 0.0;
        for (double x : m.row(r)) norm2 += x * x;
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-5)
            throw DataError(std::string(what) + ": row " + std::to_string(r) + " is not unit length");
    }
}

}  // namespace

std::vector<std::vector<LabelScore>> assign_labels(const Matrix& joint_embeddings,
                                                   const EmbeddingTable& vocab, int k) {
    if (vocab.count() == 0) throw DataError("assign_labels: empty vocabulary");
    if (k < 1) throw DataError("assign_labels: k must be at least 1");
    if (joint_embeddings.cols != vocab.dim)
        throw DataError("assign_labels: embedding dimension differs from vocabulary");

    std::vector<std::vector<LabelScore>> out(static_cast<size_t>(joint_embeddings.rows));
    const int take = std::min(k, vocab.count());
    for (int j = 0; j < joint_embeddings.rows; ++j) {
        std::vector<LabelScore> scored(static_cast<size_t>(vocab.count()));
        const auto q = joint_embeddings.row(j);
        for (int v = 0; v < vocab.count(); ++v) {
            const auto e = vocab.vectors.row(v);
            double dot = 0.0;
            for (int d = 0; d < vocab.dim; ++d) dot += q[static_cast<size_t>(d)] * e[static_cast<size_t>(d)];
            scored[static_cast<size_t>(v)] = {vocab.labels[static_cast<size_t>(v)], dot};
        }
        std::sort(scored.begin(), scored.end(), [](const LabelScore& a, const LabelScore& b) {
            if (a.score != b.score) return a.score > b.score;
            return a.label < b.label;
        });
        scored.resize(static_cast<size_t>(take));
        out[static_cast<size_t>(j)] = std::move(scored);
    }
    return out;
}

double topk_accuracy(const std::vector<std::vector<LabelScore>>& predictions,
                     const std::vector<std::string>& ground_truth, int k) {
    if (predictions.size() != ground_truth.size())
        throw DataError("topk_accuracy: prediction and truth counts differ");
    if (k < 1) throw DataError("topk_accuracy: k must be at least 1");
    if (predictions.empty()) return 0.0;
    size_t hits = 0;
    for (size_t j = 0; j < predictions.size(); ++j) {
        const auto& ranked = predictions[j];
        const size_t limit = std::min(ranked.size(), static_cast<size_t>(k));
        for (size_t r = 0; r < limit; ++r) {
            if (ranked[r].label == ground_truth[j]) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double info_nce(const Matrix& joint_embeddings, const Matrix& label_embeddings,
                double temperature) {
    if (!joint_embeddings.same_shape(label_embeddings))
        throw DataError("info_nce: embedding shapes differ");
    if (joint_embeddings.rows == 0) throw DataError("info_nce: empty batch");
    if (!(temperature > 0.0)) throw DataError("info_nce: temperature must be positive");
    check_unit_rows(joint_embeddings, "info_nce joint embeddings");
    check_unit_rows(label_embeddings, "info_nce label embeddings");

    const int batch = joint_embeddings.rows;
    const int dim = joint_embeddings.cols;
    std::vector<double> losses(static_cast<size_t>(batch));
    std::vector<double> sims(static_cast<size_t>(batch));
    for (int k = 0; k < batch; ++k) {
        const auto q = joint_embeddings.row(k);
        for (int m = 0; m < batch; ++m) {
            const auto e = label_embeddings.row(m);
            double dot = 0.0;
            for (int d = 0; d < dim; ++d) dot += q[static_cast<size_t>(d)] * e[static_cast<size_t>(d)];
            sims[static_cast<size_t>(m)] = dot / temperature;
        }
        losses[static_cast<size_t>(k)] = log_sum_exp(sims) - sims[static_cast<size_t>(k)];
    }
    return pairwise_mean(losses);
}

}  // namespace rigkit
