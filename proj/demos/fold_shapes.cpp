// Fold a handful of sequences and show how structures coarse-grain to
// abstract shapes and their binary encodings.

#include <iostream>

#include "apgp/apgp.hpp"

int main() {
    const char* sequences[] = {
        "GGGAAAACCC",
        "AAAAAAAAAA",
        "CGACCAACGCUAAGCAAUGAUUCAAA",
        "GAGCGAUUACUGUCGCGGAUAGCUAU",
        "GGAACGCGUUCGUGACAUCCCGGGGU",
        "ACGUGGGAAAUAUGCUGUAAGUGAAA",
    };

    std::cout << "sequence -> structure -> shape -> binary (C_LZ bits)\n";
    for (const char* raw : sequences) {
        const apgp::NucleotideSequence seq(raw);
        const apgp::DotBracketStructure structure = apgp::fold_surrogate(seq);
        const apgp::AbstractShape shape = apgp::abstract_shape(apgp::parse_dotbracket(structure));
        const apgp::BinaryString bits = apgp::shape_to_binary(shape);
        const apgp::ComplexityEstimate est = apgp::clz(bits);
        std::cout << seq.str() << "\n  " << structure.str() << "\n  " << shape.str() << "  "
                  << bits.view() << "  (" << est.raw_clz << ")\n";
    }
    return 0;
}
