#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "apgp/errors.hpp"
#include "apgp/shape.hpp"

namespace apgp {

// RNA sequence over {A,U,C,G}. 'T' and lower case are normalized on input.
class NucleotideSequence {
  public:
    explicit NucleotideSequence(std::string letters) : letters_(std::move(letters)) {
        if (letters_.empty()) throw InvalidSequence("sequence is empty");
        for (char& c : letters_) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
            if (c == 'T') c = 'U';
            if (c != 'A' && c != 'U' && c != 'C' && c != 'G')
                throw InvalidSequence(std::string("invalid nucleotide '") + c + "'");
        }
    }

    const std::string& str() const noexcept { return letters_; }
    std::size_t size() const noexcept { return letters_.size(); }
    char operator[](std::size_t i) const noexcept { return letters_[i]; }

    friend bool operator==(const NucleotideSequence&, const NucleotideSequence&) = default;

  private:
    std::string letters_;
};

// Secondary structure in dot-bracket notation, same length as its sequence.
// Balance and nesting are checked at construction; hairpin-size constraints
// belong to the folder that produced the structure.
class DotBracketStructure {
  public:
    explicit DotBracketStructure(std::string symbols) : symbols_(std::move(symbols)) {
        int depth = 0;
        for (const char c : symbols_) {
            if (c == '(') {
                ++depth;
            } else if (c == ')') {
                if (--depth < 0) throw MalformedStructure("unbalanced ')' in structure");
            } else if (c != '.') {
                throw MalformedStructure(std::string("invalid structure symbol '") + c + "'");
            }
        }
        if (depth != 0) throw MalformedStructure("unclosed '(' in structure");
    }

    const std::string& str() const noexcept { return symbols_; }
    std::size_t size() const noexcept { return symbols_.size(); }

    friend bool operator==(const DotBracketStructure&, const DotBracketStructure&) = default;

  private:
    std::string symbols_;
};

// Parse tree of a structure: one node per base pair, children strictly
// nested inside their parent, siblings ordered by opening index.
struct PairNode {
    std::size_t open = 0;
    std::size_t close = 0;
    std::vector<PairNode> children;

    friend bool operator==(const PairNode&, const PairNode&) = default;
};
using PairForest = std::vector<PairNode>;

// A -> 1000, U -> 0100, C -> 0010, G -> 0001, concatenated in order.
inline std::vector<double> encode_onehot(const NucleotideSequence& seq) {
    std::vector<double> v(4 * seq.size(), 0.0);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        std::size_t code = 0;
        switch (seq[i]) {
            case 'A': code = 0; break;
            case 'U': code = 1; break;
            case 'C': code = 2; break;
            case 'G': code = 3; break;
        }
        v[4 * i + code] = 1.0;
    }
    return v;
}

// Half the Hamming distance between the one-hot encodings, which equals the
// letter-level Hamming distance (each substitution flips exactly two bits).
inline double hamming(const NucleotideSequence& a, const NucleotideSequence& b) {
    if (a.size() != b.size())
        throw LengthMismatch("hamming: sequence lengths differ");
    std::size_t diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++diff;
    return static_cast<double>(diff);
}

inline bool can_pair(char a, char b) noexcept {
    return (a == 'A' && b == 'U') || (a == 'U' && b == 'A') ||
           (a == 'C' && b == 'G') || (a == 'G' && b == 'C') ||
           (a == 'G' && b == 'U') || (a == 'U' && b == 'G');
}

// Nussinov maximum-base-pairing folder with Watson-Crick plus wobble pairs
// and a hairpin constraint of at least min_loop unpaired bases. The
// traceback is fixed so the same sequence always yields the same structure:
// pairing (i,j) is preferred over leaving i unpaired, and bifurcations
// split at the smallest k attaining the optimum.
inline DotBracketStructure fold_surrogate(const NucleotideSequence& seq, int min_loop = 3) {
    if (min_loop < 0) throw ConfigError("min_loop must be non-negative");
    const std::size_t n = seq.size();
    const std::size_t gap = static_cast<std::size_t>(min_loop);

    // table[i][j]: maximum pairs within seq[i..j]
    std::vector<std::vector<int>> table(n, std::vector<int>(n, 0));
    for (std::size_t span = gap + 1; span < n; ++span) {
        for (std::size_t i = 0; i + span < n; ++i) {
            const std::size_t j = i + span;
            int best = table[i + 1][j];  // i unpaired
            if (can_pair(seq[i], seq[j])) {
                const int inner = (i + 1 <= j - 1) ? table[i + 1][j - 1] : 0;
                best = std::max(best, 1 + inner);
            }
            for (std::size_t k = i + 1; k < j; ++k)
                best = std::max(best, table[i][k] + table[k + 1][j]);
            table[i][j] = best;
        }
    }

    std::string dots(n, '.');
    std::vector<std::pair<std::size_t, std::size_t>> stack;
    if (n > gap + 1) stack.emplace_back(0, n - 1);
    while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        if (j <= i + gap || table[i][j] == 0) continue;
        if (can_pair(seq[i], seq[j]) &&
            table[i][j] == 1 + ((i + 1 <= j - 1) ? table[i + 1][j - 1] : 0)) {
            dots[i] = '(';
            dots[j] = ')';
            if (i + 1 < j) stack.emplace_back(i + 1, j - 1);
        } else if (table[i][j] == table[i + 1][j]) {
            stack.emplace_back(i + 1, j);
        } else {
            for (std::size_t k = i + 1; k < j; ++k) {
                if (table[i][k] + table[k + 1][j] == table[i][j]) {
                    stack.emplace_back(i, k);
                    stack.emplace_back(k + 1, j);
                    break;
                }
            }
        }
    }
    return DotBracketStructure(std::move(dots));
}

// Single stack pass; the forest is ordered by opening index.
inline PairForest parse_dotbracket(const DotBracketStructure& s) {
    PairForest roots;
    std::vector<PairNode> stack;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s.str()[i];
        if (c == '(') {
            stack.push_back(PairNode{i, 0, {}});
        } else if (c == ')') {
            // construction guarantees balance, but keep the check for
            // forests assembled from external text
            if (stack.empty()) throw MalformedStructure("unbalanced ')' at position " + std::to_string(i));
            PairNode node = std::move(stack.back());
            stack.pop_back();
            node.close = i;
            if (stack.empty())
                roots.push_back(std::move(node));
            else
                stack.back().children.push_back(std::move(node));
        }
    }
    if (!stack.empty()) throw MalformedStructure("unclosed '(' in structure");
    return roots;
}

inline void render_node(const PairNode& node, std::string& out) {
    out[node.open] = '(';
    out[node.close] = ')';
    for (const PairNode& c : node.children) render_node(c, out);
}

// Inverse of parse_dotbracket for forests whose indices fit in [0, length).
inline DotBracketStructure render_dotbracket(const PairForest& forest, std::size_t length) {
    std::string dots(length, '.');
    for (const PairNode& root : forest) render_node(root, dots);
    return DotBracketStructure(std::move(dots));
}

namespace detail {
inline void shape_of_node(const PairNode& node, std::string& out) {
    const PairNode* cur = &node;
    // stems, bulges and internal loops all appear as chains of single-child
    // nodes; level 5 collapses each maximal chain into one bracket pair
    while (cur->children.size() == 1) cur = &cur->children.front();
    out.push_back('[');
    for (const PairNode& c : cur->children) shape_of_node(c, out);
    out.push_back(']');
}
}  // namespace detail

// Level-5 coarse-graining: unpaired positions are dropped, chains of
// single-child pairs collapse to one node, and what survives is rendered
// as nested brackets. A structure with no pairs is the open chain "_".
inline AbstractShape abstract_shape(const PairForest& forest) {
    if (forest.empty()) return AbstractShape(std::string(AbstractShape::open_chain_token));
    std::string out;
    for (const PairNode& root : forest) detail::shape_of_node(root, out);
    return AbstractShape(std::move(out));
}

// One row of a sequence-shape dataset. The structure column is optional:
// externally folded data may ship shapes only.
struct DatasetRecord {
    NucleotideSequence sequence;
    std::optional<DotBracketStructure> structure;
    AbstractShape shape;
};

inline constexpr std::string_view dataset_header = "sequence,structure,shape";

inline void write_dataset(std::ostream& out, const std::vector<DatasetRecord>& records) {
    out << dataset_header << '\n';
    for (const DatasetRecord& r : records) {
        out << r.sequence.str() << ',';
        if (r.structure) out << r.structure->str();
        out << ',' << r.shape.str() << '\n';
    }
}

// Read and validate a dataset file. Rows with a structure column are
// re-abstracted and must agree with the shape column.
inline std::vector<DatasetRecord> ingest_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset file " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("dataset file " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != dataset_header)
        throw IoError("dataset file " + path + ": expected header '" +
                      std::string(dataset_header) + "', got '" + line + "'");

    std::vector<DatasetRecord> records;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = (c1 == std::string::npos) ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw IoError("dataset file " + path + " line " + std::to_string(lineno) +
                          ": expected 3 comma-separated fields");
        try {
            NucleotideSequence seq(line.substr(0, c1));
            const std::string structure_text = line.substr(c1 + 1, c2 - c1 - 1);
            AbstractShape shape(line.substr(c2 + 1));
            std::optional<DotBracketStructure> structure;
            if (!structure_text.empty()) {
                structure.emplace(structure_text);
                if (structure->size() != seq.size())
                    throw MalformedStructure("structure length differs from sequence length");
                const AbstractShape recomputed = abstract_shape(parse_dotbracket(*structure));
                if (recomputed != shape)
                    throw IngestInconsistent("shape column '" + shape.str() +
                                             "' does not match structure's shape '" +
                                             recomputed.str() + "'");
            }
            records.push_back(DatasetRecord{std::move(seq), std::move(structure), std::move(shape)});
        } catch (const IngestInconsistent& e) {
            throw IngestInconsistent("dataset file " + path + " line " + std::to_string(lineno) +
                                     ": " + e.what());
        } catch (const Error& e) {
            throw IoError("dataset file " + path + " line " + std::to_string(lineno) + ": " +
                          e.what());
        }
    }
    return records;
}

}  // namespace apgp
