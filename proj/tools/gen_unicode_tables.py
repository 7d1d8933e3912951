#!/usr/bin/env python3
"""Regenerates core/src/unicode_tables.cpp from Python's unicodedata.

Also refreshes configs/pt1_subset.json (default PT-1 diacritic subset:
virama- and nukta-class marks in the Indic blocks) and the frozen NFC
fixtures used by the unit tests.

Run from the repository root:
    python3 tools/gen_unicode_tables.py
"""

import json
import random
import sys
import unicodedata as ud
from pathlib import Path

MAX_CP = 0x110000
HANGUL_S_BASE, HANGUL_S_COUNT = 0xAC00, 11172

# Unicode PropList White_Space (stable across recent versions).
WHITESPACE_RANGES = [
    (0x0009, 0x000D), (0x0020, 0x0020), (0x0085, 0x0085), (0x00A0, 0x00A0),
    (0x1680, 0x1680), (0x2000, 0x200A), (0x2028, 0x2029), (0x202F, 0x202F),
    (0x205F, 0x205F), (0x3000, 0x3000),
]


def ranges_for(pred):
    out = []
    start = None
    for cp in range(MAX_CP):
        if pred(cp):
            if start is None:
                start = cp
        elif start is not None:
            out.append((start, cp - 1))
            start = None
    if start is not None:
        out.append((start, MAX_CP - 1))
    return out


def category(cp):
    return ud.category(chr(cp))


def canonical_decomposition(cp):
    if HANGUL_S_BASE <= cp < HANGUL_S_BASE + HANGUL_S_COUNT:
        return None  # algorithmic
    d = ud.decomposition(chr(cp))
    if not d or d.startswith("<"):
        return None
    parts = [int(x, 16) for x in d.split()]
    assert 1 <= len(parts) <= 2, hex(cp)
    return parts


def emit_ranges(f, name, ranges):
    f.write(f"const CodepointRange {name}[] = {{\n")
    for lo, hi in ranges:
        f.write(f"    {{0x{lo:X}, 0x{hi:X}}},\n")
    f.write("};\n")
    f.write(f"const std::size_t {name}Count = {len(ranges)};\n\n")


def main():
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")

    ws = set()
    for lo, hi in WHITESPACE_RANGES:
        ws.update(range(lo, hi + 1))

    nd_ranges = ranges_for(lambda cp: category(cp) == "Nd")
    mn_ranges = ranges_for(lambda cp: category(cp) == "Mn")
    mc_ranges = ranges_for(lambda cp: category(cp) == "Mc")

    ccc = [(cp, ud.combining(chr(cp))) for cp in range(MAX_CP)
           if ud.combining(chr(cp)) != 0]

    decomp = []
    for cp in range(MAX_CP):
        parts = canonical_decomposition(cp)
        if parts:
            a = parts[0]
            b = parts[1] if len(parts) == 2 else 0
            decomp.append((cp, a, b))

    # Primary composites: pairs whose NFC recombines to the precomposed char.
    comp = []
    for cp, a, b in decomp:
        if b and ud.normalize("NFC", chr(a) + chr(b)) == chr(cp):
            comp.append((a, b, cp))
    comp.sort()

    # Code points whose presence means a string might not already be NFC:
    # nonzero ccc, NFC-unstable (singleton/excluded decompositions), second
    # elements of composition pairs, and Hangul V/T jamo.
    unsafe = set()
    for cp, c in ccc:
        unsafe.add(cp)
    for cp in range(MAX_CP):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if ud.normalize("NFC", chr(cp)) != chr(cp):
            unsafe.add(cp)
    for a, b, cp in comp:
        unsafe.add(b)
    unsafe.update(range(0x1161, 0x1176))  # jamo V
    unsafe.update(range(0x11A8, 0x11C3))  # jamo T
    unsafe_ranges = ranges_for(lambda cp: cp in unsafe)

    out = root / "core/src/unicode_tables.cpp"
    with out.open("w", encoding="utf-8") as f:
        f.write("// Generated by tools/gen_unicode_tables.py (Unicode %s). "
                "Do not edit.\n\n" % ud.unidata_version)
        f.write('#include "unicode_tables.hpp"\n\n')
        f.write("namespace adaptmix::uni::tables {\n\n")
        emit_ranges(f, "kWhitespace", WHITESPACE_RANGES)
        emit_ranges(f, "kNd", nd_ranges)
        emit_ranges(f, "kMn", mn_ranges)
        emit_ranges(f, "kMc", mc_ranges)
        emit_ranges(f, "kNfcUnsafe", unsafe_ranges)

        f.write("const CombiningClassEntry kCombiningClass[] = {\n")
        for cp, c in ccc:
            f.write(f"    {{0x{cp:X}, {c}}},\n")
        f.write("};\n")
        f.write(f"const std::size_t kCombiningClassCount = {len(ccc)};\n\n")

        f.write("const DecompositionEntry kDecomposition[] = {\n")
        for cp, a, b in decomp:
            f.write(f"    {{0x{cp:X}, 0x{a:X}, 0x{b:X}}},\n")
        f.write("};\n")
        f.write(f"const std::size_t kDecompositionCount = {len(decomp)};\n\n")

        f.write("const CompositionEntry kComposition[] = {\n")
        for a, b, cp in comp:
            f.write(f"    {{0x{a:X}, 0x{b:X}, 0x{cp:X}}},\n")
        f.write("};\n")
        f.write(f"const std::size_t kCompositionCount = {len(comp)};\n\n")
        f.write("}  // namespace adaptmix::uni::tables\n")
    print(f"wrote {out}: Nd={len(nd_ranges)} Mn={len(mn_ranges)} "
          f"Mc={len(mc_ranges)} ccc={len(ccc)} decomp={len(decomp)} "
          f"comp={len(comp)} unsafe={len(unsafe_ranges)}")

    # Default PT-1 subset: virama (ccc 9) and nukta (ccc 7) marks in the
    # Devanagari..Malayalam blocks.
    subset = [cp for cp in range(0x0900, 0x0D80)
              if ud.combining(chr(cp)) in (7, 9)]
    cfg = root / "configs/pt1_subset.json"
    cfg.parent.mkdir(parents=True, exist_ok=True)
    cfg.write_text(json.dumps([f"U+{cp:04X}" for cp in subset], indent=2)
                   + "\n", encoding="utf-8")
    print(f"wrote {cfg}: {len(subset)} marks")

    # Frozen NFC fixtures: curated cases plus seeded random mark-heavy text.
    fixtures = [
        "",
        "hello world",
        "\u0915\u094D\u092F\u093E",        # composed-cluster Devanagari
        "\u0915\u093C",                     # ka + nukta (stays decomposed)
        "\u0958",                           # excluded composite, decomposes
        "e\u0301",                          # composes to e-acute
        "\u00E9",
        "a\u0316\u0301",                    # ccc reorder (220 after 230)
        "a\u0301\u0316",
        "\u0BC6\u0BBE",                     # Tamil o: composes
        "\u0BCA",
        "\u0D46\u0D3E",                     # Malayalam o: composes
        "\u2126",                           # ohm sign -> omega
        "\u1100\u1161\u11A8",               # Hangul jamo -> syllable
        "\uAC01",
        "\u0061\u0328\u0301",               # a + ogonek + acute
        "q\u0307\u0323",                    # reorder + no composition
    ]
    rng = random.Random(20260817)
    starters = ([ord("a") + i for i in range(26)]
                + list(range(0x0915, 0x0930))   # Devanagari consonants
                + list(range(0x0B95, 0x0B9B))   # Tamil consonants
                + list(range(0x0D15, 0x0D20))   # Malayalam consonants
                + [0x1100, 0x1102, 0xAC00, 0x00E9, 0x0958, 0x2126])
    marks = [0x0301, 0x0300, 0x0316, 0x0323, 0x093E, 0x094D, 0x093C,
             0x0BBE, 0x0BC6, 0x0D3E, 0x0D46, 0x1161, 0x11A8, 0x0FB7]
    for _ in range(300):
        n = rng.randint(1, 12)
        s = "".join(
            chr(rng.choice(starters)) if rng.random() < 0.55
            else chr(rng.choice(marks))
            for _ in range(n))
        fixtures.append(s)

    fx = root / "tests/nfc_fixtures.inc"
    fx.parent.mkdir(parents=True, exist_ok=True)
    with fx.open("w", encoding="utf-8") as f:
        f.write("// Generated by tools/gen_unicode_tables.py. Do not edit.\n")
        f.write("// {input, expected NFC} pairs, UTF-8, \\x-escaped.\n")
        f.write("static const char* kNfcFixtures[][2] = {\n")
        for s in fixtures:
            nfc = ud.normalize("NFC", s)
            enc = lambda t: "".join(f"\\x{b:02X}" for b in t.encode("utf-8"))
            f.write(f'    {{"{enc(s)}", "{enc(nfc)}"}},\n')
        f.write("};\n")
    print(f"wrote {fx}: {len(fixtures)} cases")


if __name__ == "__main__":
    main()
