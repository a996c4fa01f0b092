"""Canonical text formats: SCX complexes, SMAP vertex maps, XTI instances.

Writers emit a fixed order (ids ascending, facets lexicographic), so equal
objects serialize to byte-identical files.
"""

from __future__ import annotations

from fractions import Fraction

from .complexes import Complex, GeometricComplex, make_complex, subcomplex
from .plmaps import SimplicialMap, validate_simplicial_map


class FormatError(ValueError):
    pass


# ---------------------------------------------------------------------------
# SCX


def emit_scx(cx, coordinates=None) -> str:
    """`scx <ambient-dim or 0>`, `v <id> [<rat> ...]` lines, `f ...` lines."""
    if isinstance(cx, GeometricComplex):
        coordinates = coordinates or cx.coordinates
        cx = cx.complex
    dim = len(next(iter(coordinates.values()))) if coordinates else 0
    lines = [f"scx {dim}"]
    for v in sorted(cx.vertices):
        if coordinates:
            lines.append("v %d %s" % (v, " ".join(_rat(x) for x in coordinates[v])))
        else:
            lines.append(f"v {v}")
    for f in sorted(cx.facets):
        lines.append("f " + " ".join(str(v) for v in f))
    return "\n".join(lines) + "\n"


def _rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_scx(text: str):
    """Returns (Complex, coordinates dict or None)."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("scx"):
        raise FormatError("missing scx header")
    try:
        dim = int(lines[0].split()[1])
    except (IndexError, ValueError) as e:
        raise FormatError("malformed scx header") from e
    coords = {}
    verts = []
    facets = []
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] == "v":
            vid = int(parts[1])
            verts.append(vid)
            if dim:
                vals = [Fraction(p) for p in parts[2:]]
                if len(vals) != dim:
                    raise FormatError(f"vertex {vid} has {len(vals)} coordinates, want {dim}")
                coords[vid] = tuple(vals)
        elif parts[0] == "f":
            facets.append(tuple(int(p) for p in parts[1:]))
        else:
            raise FormatError(f"unknown scx line {ln!r}")
    cx = make_complex(verts, facets)
    if dim:
        return GeometricComplex(cx, coords)
    return cx


# ---------------------------------------------------------------------------
# SMAP


def emit_smap(m: SimplicialMap, src_file: str, dst_file: str) -> str:
    lines = [f"smap {src_file} {dst_file}"]
    for v in sorted(m.source.vertices):
        lines.append(f"m {v} {m.assignment[v]}")
    return "\n".join(lines) + "\n"


def parse_smap(text: str, src: Complex, dst: Complex) -> SimplicialMap:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("smap"):
        raise FormatError("missing smap header")
    assignment = {}
    for ln in lines[1:]:
        parts = ln.split()
        if parts[0] != "m" or len(parts) != 3:
            raise FormatError(f"unknown smap line {ln!r}")
        assignment[int(parts[1])] = int(parts[2])
    return validate_simplicial_map(src, dst, assignment)


def smap_header(text: str):
    first = text.strip().splitlines()[0].split()
    if len(first) != 3 or first[0] != "smap":
        raise FormatError("malformed smap header")
    return first[1], first[2]


# ---------------------------------------------------------------------------
# XTI instance files


def emit_xti(inst) -> str:
    """Sections: [complex], [subcomplex], [beta], [target], [provenance]."""
    from .reduction import ExtensionInstance

    out = ["[complex]"]
    out.append(emit_scx(inst.X, None).rstrip("\n"))
    out.append("[subcomplex]")
    for f in sorted(inst.A.facets):
        out.append("f " + " ".join(str(v) for v in f))
    out.append("[beta]")
    out.append(emit_smap(inst.beta, "complex:subcomplex", "target").rstrip("\n"))
    out.append("[target]")
    out.append(emit_scx(inst.Y, None).rstrip("\n"))
    out.append("[provenance]")
    sys = inst.system
    out.append(f"flavor {sys.flavor}")
    out.append(f"kind {inst.kind}")
    out.append(f"l {inst.l}")
    out.append(f"s {sys.s}")
    out.append(f"m {sys.m}")
    for q in range(sys.m):
        row = " ".join(f"{i},{j}:{c}" for (i, j), c in sys.a[q])
        out.append(f"a {q} {row}".rstrip())
    out.append("b " + " ".join(str(x) for x in sys.b))
    return "\n".join(out) + "\n"


def parse_xti(text: str):
    """Returns (X, A_ref, beta, Y, system, l, kind) parsed back."""
    from .reduction import DiophantineSystem

    sections = {}
    current = None
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        if ln.startswith("[") and ln.endswith("]"):
            current = ln[1:-1]
            sections[current] = []
        elif current is None:
            raise FormatError("content before the first section")
        else:
            sections[current].append(ln)
    for need in ("complex", "subcomplex", "beta", "target", "provenance"):
        if need not in sections:
            raise FormatError(f"missing [{need}] section")
    X = parse_scx("\n".join(sections["complex"]))
    Y = parse_scx("\n".join(sections["target"]))
    Xc = X.complex if isinstance(X, GeometricComplex) else X
    Yc = Y.complex if isinstance(Y, GeometricComplex) else Y
    a_facets = [tuple(int(p) for p in ln.split()[1:]) for ln in sections["subcomplex"]]
    A = subcomplex(Xc, a_facets)
    averts = sorted({v for f in a_facets for v in f})
    beta = parse_smap("\n".join(sections["beta"]), A.as_complex(), Yc)
    prov = {}
    arows = {}
    for ln in sections["provenance"]:
        parts = ln.split()
        if parts[0] == "a":
            q = int(parts[1])
            row = {}
            for item in parts[2:]:
                ij, c = item.split(":")
                i, j = ij.split(",")
                row[(int(i), int(j))] = int(c)
            arows[q] = row
        elif parts[0] == "b":
            prov["b"] = [int(x) for x in parts[1:]]
        else:
            prov[parts[0]] = parts[1]
    m = int(prov["m"])
    system = DiophantineSystem.make(
        prov["flavor"], int(prov["s"]), m, [arows.get(q, {}) for q in range(m)], prov["b"]
    )
    return Xc, A, beta, Yc, system, int(prov["l"]), prov["kind"]
