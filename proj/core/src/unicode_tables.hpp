#pragma once

#include <cstddef>
#include <cstdint>

namespace adaptmix::uni::tables {

struct CodepointRange {
    char32_t first;
    char32_t last;
};

struct CombiningClassEntry {
    char32_t cp;
    std::uint8_t ccc;
};

struct DecompositionEntry {
    char32_t cp;
    char32_t first;
    char32_t second;  // 0 for singleton decompositions
};

struct CompositionEntry {
    char32_t first;
    char32_t second;
    char32_t composite;
};

extern const CodepointRange kWhitespace[];
extern const std::size_t kWhitespaceCount;
extern const CodepointRange kNd[];
extern const std::size_t kNdCount;
extern const CodepointRange kMn[];
extern const std::size_t kMnCount;
extern const CodepointRange kMc[];
extern const std::size_t kMcCount;
extern const CodepointRange kNfcUnsafe[];
extern const std::size_t kNfcUnsafeCount;
extern const CombiningClassEntry kCombiningClass[];
extern const std::size_t kCombiningClassCount;
extern const DecompositionEntry kDecomposition[];
extern const std::size_t kDecompositionCount;
extern const CompositionEntry kComposition[];
extern const std::size_t kCompositionCount;

}  // namespace adaptmix::uni::tables
